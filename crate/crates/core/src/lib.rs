//! quill: a library for describing quantum circuits as ordinary Rust code.
//!
//! Circuits are built by running functions against a [`builder::Circ`]
//! emission context, which produces a hierarchical, validated
//! [`ir::Circuit`]. Circuits can then be reversed, transformed into a smaller
//! gate set, simulated (classically, with a stabilizer tableau or with a
//! state vector) and counted.
//!
//! ```
//! use quill::builder::{extract, QUBIT};
//!
//! let bell = extract(&(QUBIT, QUBIT), |c, (a, b)| {
//!     let a = c.hadamard(a)?;
//!     let (b, a) = c.controlled_not(b, a)?;
//!     Ok((a, b))
//! })
//! .unwrap();
//! assert_eq!(bell.circuit.gates().len(), 2);
//! ```

pub mod boolexpr;
pub mod builder;
pub mod ir;
pub mod ops;
pub mod programs;
pub mod resources;
pub mod shapes;
pub mod sim;
pub mod transform;

pub use builder::{extract, BuildError, Bit, Circ, Qubit, ShapedCircuit, BIT, QUBIT};
pub use ir::{Circuit, Control, Endpoint, Gate, GateKind, NamedGate, WireId, WireKind};
pub use shapes::{QData, Tree};
