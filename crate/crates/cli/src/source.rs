//! Loading circuits from examples, files and stdin, and the shape pragma.

use std::fmt::Display;
use std::io::{self, Read};

use quill::ir::{parse, serialize};
use quill::programs::ExampleId;
use quill::{Endpoint, ShapedCircuit, Tree, WireKind};

const PRAGMA: &str = "-- shape:";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub broken_pipe: bool,
}

impl Failure {
    pub fn usage(e: impl Display) -> Self {
        Failure { code: 2, message: e.to_string(), broken_pipe: false }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, broken_pipe: e.kind() == io::ErrorKind::BrokenPipe, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(e)
    }
}

pub fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
    }
}

/// An example by name, otherwise a circuit file.
pub fn load(source: &str, n: usize, shape: Option<&str>) -> Result<ShapedCircuit, Failure> {
    if ExampleId::NAMES.contains(&source) {
        let id = ExampleId::from_name(source, n, shape).map_err(Failure::usage)?;
        return id.build().map_err(|e| Failure::usage(format!("{source}: {e}")));
    }
    if source != "-" && !std::path::Path::new(source).exists() {
        return Err(Failure::usage(format!(
            "{source:?} is neither an example nor a file (try `quill examples`)"
        )));
    }
    let text = read_input(source)?;
    let circuit = parse(&text).map_err(|e| Failure::usage(format!("{source}: {e}")))?;
    circuit.validate().map_err(|e| Failure::usage(format!("{source}: {e}")))?;
    let (input, output) = match pragma(&text)? {
        Some((i, o)) => (i, o),
        None => (flat(circuit.inputs()), flat(circuit.outputs())),
    };
    let kinds = |t: &Tree<WireKind>| t.leaves().into_iter().copied().collect::<Vec<_>>();
    let ins: Vec<WireKind> = circuit.inputs().iter().map(|e| e.kind).collect();
    let outs: Vec<WireKind> = circuit.outputs().iter().map(|e| e.kind).collect();
    if kinds(&input) != ins || !outs.starts_with(&kinds(&output)) {
        return Err(Failure::usage(format!("{source}: shape {input} -> {output} does not fit the circuit's wires")));
    }
    Ok(ShapedCircuit { circuit, input, output })
}

/// The default shape of a wire list: a lone wire, or a tuple.
fn flat(es: &[Endpoint]) -> Tree<WireKind> {
    match es {
        [e] => Tree::Leaf(e.kind),
        _ => Tree::Tuple(es.iter().map(|e| Tree::Leaf(e.kind)).collect()),
    }
}

type Shapes = (Tree<WireKind>, Tree<WireKind>);

fn pragma(text: &str) -> Result<Option<Shapes>, Failure> {
    let Some(rest) = text.lines().map(str::trim).find_map(|l| l.strip_prefix(PRAGMA)) else {
        return Ok(None);
    };
    let (i, o) = rest
        .split_once("->")
        .ok_or_else(|| Failure::usage(format!("bad shape line {:?}", rest.trim())))?;
    let tree = |s: &str| s.trim().parse::<Tree<WireKind>>().map_err(|e| Failure::usage(format!("shape line: {e}")));
    Ok(Some((tree(i)?, tree(o)?)))
}

/// The circuit document, preceded by a shape line when some outputs are
/// garbage.
pub fn render(sc: &ShapedCircuit) -> String {
    let body = serialize(&sc.circuit);
    if sc.garbage() == 0 {
        body
    } else {
        format!("{PRAGMA} {} -> {}\n{body}", sc.input, sc.output)
    }
}
