//! `quill`: print, parse, simulate, count, decompose and compile circuits.
//!
//! A circuit source is an example name, a circuit file, or `-` for stdin.
//! Text output starts with a `-- shape: IN -> OUT` line when some outputs
//! are garbage, so that a pipe into another command still knows which
//! outputs are the result.

mod source;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quill::boolexpr::ClassicalFunction;
use quill::ops::{classical_to_reversible, compile_classical};
use quill::programs::ExampleId;
use quill::resources::{count, flatten, ResourceReport};
use quill::sim::{simulate_shaped, Rng, SimError, Simulator};
use quill::transform::{decompose, GateSet};
use quill::{extract, Circ, Qubit, ShapedCircuit, Tree, QUBIT};
use serde_json::{json, Map, Number, Value};

use source::{load, read_input, render, Failure};

#[derive(Parser)]
#[command(name = "quill", version, about = "Build, print, simulate, count and transform quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Example name (see `quill examples`), circuit file, or `-` for stdin.
    source: String,
    /// Register size for the qft and adder examples.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Data shape for the generic teleportation examples, e.g. `(q,[q;3])`.
    #[arg(long)]
    shape: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print a circuit document.
    Print {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Parse and validate a circuit file, then print it again.
    Parse {
        /// Circuit file, or `-` for stdin.
        file: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a circuit on basis-state inputs.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "vector", value_parser = Simulator::from_str)]
        sim: Simulator,
        /// Seed of the measurement random number generator.
        #[arg(long, env = "QUILL_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of runs; more than one adds a frequency table.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Input bits in shape order, e.g. `110`. Defaults to all zeros.
        #[arg(long)]
        inputs: Option<String>,
    },
    /// Count gates by class without inlining subroutines.
    Count {
        #[command(flatten)]
        source: Source,
        /// Inline every subroutine call before counting.
        #[arg(long)]
        flatten: bool,
        /// Print a JSON object instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a circuit into a gate set of bounded arity.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "binary", value_parser = GateSet::from_str)]
        gateset: GateSet,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compile boolean expressions (one per line, over x0, x1, ...) into a circuit.
    Compile {
        /// Expression file, or `-` for stdin.
        file: String,
        /// Number of inputs; defaults to one more than the largest variable.
        #[arg(long)]
        arity: Option<usize>,
        /// Build `(x, y) -> (x, y xor f(x))` with every ancilla uncomputed.
        #[arg(long)]
        reversible: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the built-in examples.
    Examples,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli.command, &mut out).and_then(|()| out.flush().map_err(Failure::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.broken_pipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("quill: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Print { source, format } => {
            let sc = load(&source.source, source.n, source.shape.as_deref())?;
            emit(out, &sc, format)
        }
        Command::Parse { file, format } => {
            let sc = load(&file, 0, None)?;
            emit(out, &sc, format)
        }
        Command::Simulate { source, sim, seed, runs, inputs } => {
            let sc = load(&source.source, source.n, source.shape.as_deref())?;
            simulate(out, &sc, sim, seed, runs, inputs.as_deref())
        }
        Command::Count { source, flatten: flat, json } => {
            let sc = load(&source.source, source.n, source.shape.as_deref())?;
            let c = if flat { flatten(&sc.circuit, None).map_err(Failure::usage)? } else { sc.circuit };
            let report = count(&c);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report_json(&report))?)?;
            } else {
                writeln!(out, "{report}")?;
            }
            Ok(())
        }
        Command::Decompose { source, gateset, format } => {
            let sc = load(&source.source, source.n, source.shape.as_deref())?;
            let circuit = decompose(gateset, &sc.circuit).map_err(Failure::usage)?;
            emit(out, &ShapedCircuit { circuit, ..sc }, format)
        }
        Command::Compile { file, arity, reversible, format } => {
            let text = read_input(&file)?;
            let exprs: Vec<&str> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("--"))
                .collect();
            let f = ClassicalFunction::parse(&exprs, arity).map_err(Failure::usage)?;
            let sc = compile(&f, reversible).map_err(Failure::usage)?;
            emit(out, &sc, format)
        }
        Command::Examples => {
            for name in ExampleId::NAMES {
                writeln!(out, "{name}")?;
            }
            Ok(())
        }
    }
}

fn compile(f: &ClassicalFunction, reversible: bool) -> Result<ShapedCircuit, quill::BuildError> {
    let (a, k) = (f.arity(), f.outputs().len());
    if reversible {
        let g = |c: &mut Circ, x: Vec<Qubit>| compile_classical(f)(c, x);
        extract(&(vec![QUBIT; a], vec![QUBIT; k]), classical_to_reversible(g))
    } else {
        extract(&vec![QUBIT; a], compile_classical(f))
    }
}

fn emit(out: &mut dyn Write, sc: &ShapedCircuit, format: Format) -> Result<(), Failure> {
    match format {
        Format::Text => write!(out, "{}", render(sc))?,
        Format::Json => {
            let doc = json!({
                "input": sc.input.to_string(),
                "output": sc.output.to_string(),
                "circuit": sc.circuit,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}

fn simulate(
    out: &mut dyn Write,
    sc: &ShapedCircuit,
    sim: Simulator,
    seed: u64,
    runs: u64,
    inputs: Option<&str>,
) -> Result<(), Failure> {
    let leaves = sc.input.len();
    let bits: Vec<bool> = match inputs {
        None => vec![false; leaves],
        Some(s) => s
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | ','))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Failure::usage(format!("bad input bit {c:?}"))),
            })
            .collect::<Result<_, _>>()?,
    };
    if bits.len() != leaves {
        return Err(Failure::usage(format!("{} input bit(s) given, the input shape {} has {leaves}", bits.len(), sc.input)));
    }
    let input: Tree<bool> = sc.input.fill(&mut bits.into_iter()).expect("leaf count checked");
    let mut rng = Rng::new(seed);
    let mut tally: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..runs {
        let result = simulate_shaped(sim, sc, &input, &mut rng).map_err(sim_failure)?;
        let line: String = result.leaves().iter().map(|b| if **b { '1' } else { '0' }).collect();
        writeln!(out, "{line}")?;
        *tally.entry(line).or_default() += 1;
    }
    if runs > 1 {
        let width = tally.keys().map(String::len).max().unwrap_or(0).max("outcome".len());
        writeln!(out, "# {:<width$}  {:>8}  frequency", "outcome", "count")?;
        for (k, n) in &tally {
            writeln!(out, "# {k:<width$}  {n:>8}  {:.4}", *n as f64 / runs as f64)?;
        }
    }
    Ok(())
}

fn sim_failure(e: SimError) -> Failure {
    if e.is_assertion() {
        Failure { code: 1, message: e.to_string(), broken_pipe: false }
    } else {
        Failure::usage(e)
    }
}

fn number(n: impl ToString) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("decimal integer"))
}

/// Stable keys; counts are exact integers of any size.
fn report_json(r: &ResourceReport) -> Value {
    let gates: Map<String, Value> = r.gates.iter().map(|(c, n)| (c.to_string(), number(n))).collect();
    json!({
        "gates": gates,
        "total": number(r.total()),
        "max_width": r.max_width,
        "ancillas": number(r.ancillas()),
        "measurements": number(r.measurements()),
    })
}
