//! Line-oriented text format for circuits.
//!
//! ```text
//! Subroutine: "QFT"
//! Inputs: 0:Qbit, 1:Qbit
//! QGate["H"](1)
//! QRot[2](0) with controls=[+1]
//! QGate["H"](0)
//! Outputs: 1:Qbit, 0:Qbit
//! Inputs: 0:Qbit, 1:Qbit
//! Call["QFT",1](0,1) -> (1,0)
//! Outputs: 1:Qbit, 0:Qbit
//! ```
//!
//! `--` starts a comment that runs to the end of the line (outside quoted
//! strings). Subroutines precede the main body.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Body, Circuit, Control, Endpoint, Gate, GateKind, NamedGate, WireId, WireKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::new();
    for (name, body) in &circuit.subroutines {
        out.push_str("Subroutine: ");
        push_quoted(&mut out, name);
        out.push('\n');
        write_body(&mut out, body);
    }
    write_body(&mut out, &circuit.main);
    out
}

fn write_body(out: &mut String, body: &Body) {
    write_wirelist(out, "Inputs:", &body.inputs);
    for g in &body.gates {
        write_gate(out, g);
        out.push('\n');
    }
    write_wirelist(out, "Outputs:", &body.outputs);
}

fn write_wirelist(out: &mut String, head: &str, list: &[Endpoint]) {
    out.push_str(head);
    for (i, e) in list.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        let _ = write!(out, "{}:{}", e.wire, e.kind);
    }
    out.push('\n');
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

fn write_gate(out: &mut String, g: &Gate) {
    let op = |i: usize| g.operands.get(i).map(|w| w.0).unwrap_or_default();
    match &g.kind {
        GateKind::QInit(b) => {
            let _ = write!(out, "QInit{}({})", bit(*b), op(0));
        }
        GateKind::QTerm(b) => {
            let _ = write!(out, "QTerm{}({})", bit(*b), op(0));
        }
        GateKind::CInit(b) => {
            let _ = write!(out, "CInit{}({})", bit(*b), op(0));
        }
        GateKind::CDiscard => {
            let _ = write!(out, "CDiscard({})", op(0));
        }
        GateKind::Named(n) => {
            let _ = write!(out, "QGate[\"{}\"]({})", n.name(), op(0));
        }
        GateKind::RGate(m) => {
            let _ = write!(out, "QRot[{m}]({})", op(0));
        }
        GateKind::Measure => {
            let _ = write!(out, "QMeas({})", op(0));
        }
        GateKind::Comment { text, labels } => {
            out.push_str("Comment[");
            push_quoted(out, text);
            out.push_str("](");
            for (i, (w, l)) in labels.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{w}:");
                push_quoted(out, l);
            }
            out.push(')');
        }
        GateKind::SubCall { name, inputs, outputs, repetitions } => {
            out.push_str("Call[");
            push_quoted(out, name);
            let _ = write!(out, ",{repetitions}](");
            push_intlist(out, inputs);
            out.push_str(") -> (");
            push_intlist(out, outputs);
            out.push(')');
        }
    }
    if !g.controls.is_empty() {
        out.push_str(" with controls=[");
        for (i, c) in g.controls.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push(if c.positive { '+' } else { '-' });
            let _ = write!(out, "{}", c.wire);
        }
        out.push(']');
    }
    if g.inverted {
        out.push_str(" with inverse");
    }
}

fn push_intlist(out: &mut String, ws: &[WireId]) {
    for (i, w) in ws.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{w}");
    }
}

fn push_quoted(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Parses a document. The result is not validated; call
/// [`Circuit::validate`] to check the circuit rules.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let lines: Vec<(usize, String)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0;
    let mut subroutines = BTreeMap::new();
    let eof_line = text.lines().count().max(1);

    loop {
        let Some((n, line)) = lines.get(pos) else {
            return Err(ParseError { line: eof_line, message: "expected \"Inputs:\"".into() });
        };
        if let Some(rest) = line.strip_prefix("Subroutine:") {
            let mut cur = Cursor::new(rest, *n);
            cur.ws();
            let name = cur.quoted()?;
            cur.end()?;
            pos += 1;
            let body = parse_body(&lines, &mut pos, eof_line)?;
            if subroutines.insert(name.clone(), body).is_some() {
                return Err(ParseError { line: *n, message: format!("duplicate subroutine {name:?}") });
            }
        } else {
            let main = parse_body(&lines, &mut pos, eof_line)?;
            if let Some((n, _)) = lines.get(pos) {
                return Err(ParseError { line: *n, message: "expected end of document".into() });
            }
            return Ok(Circuit { main, subroutines });
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    let mut in_str = false;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' if in_str => i += 1,
            b'"' => in_str = !in_str,
            b'-' if !in_str && bytes.get(i + 1) == Some(&b'-') => return &line[..i],
            _ => {}
        }
        i += 1;
    }
    line
}

fn parse_body(lines: &[(usize, String)], pos: &mut usize, eof_line: usize) -> Result<Body, ParseError> {
    let Some((n, line)) = lines.get(*pos) else {
        return Err(ParseError { line: eof_line, message: "expected \"Inputs:\"".into() });
    };
    let rest = line
        .strip_prefix("Inputs:")
        .ok_or_else(|| ParseError { line: *n, message: "expected \"Inputs:\"".into() })?;
    let inputs = parse_wirelist(rest, *n)?;
    *pos += 1;
    let mut gates = Vec::new();
    loop {
        let Some((n, line)) = lines.get(*pos) else {
            return Err(ParseError { line: eof_line, message: "expected \"Outputs:\"".into() });
        };
        *pos += 1;
        if let Some(rest) = line.strip_prefix("Outputs:") {
            let outputs = parse_wirelist(rest, *n)?;
            return Ok(Body { inputs, gates, outputs });
        }
        gates.push(parse_gate(line, *n)?);
    }
}

fn parse_wirelist(text: &str, line: usize) -> Result<Vec<Endpoint>, ParseError> {
    let mut cur = Cursor::new(text, line);
    let mut out = Vec::new();
    cur.ws();
    if cur.at_end() {
        return Ok(out);
    }
    loop {
        cur.ws();
        let w = cur.int()?;
        cur.ws();
        cur.expect(":")?;
        cur.ws();
        let kind = if cur.eat("Qbit") {
            WireKind::Quantum
        } else if cur.eat("Cbit") {
            WireKind::Classical
        } else {
            return Err(cur.error("expected \"Qbit\" or \"Cbit\""));
        };
        out.push(Endpoint::new(WireId(w), kind));
        cur.ws();
        if cur.at_end() {
            return Ok(out);
        }
        cur.expect(",")?;
    }
}

fn parse_gate(text: &str, line: usize) -> Result<Gate, ParseError> {
    let mut cur = Cursor::new(text, line);
    let mut gate = if cur.eat("QInit") {
        let b = cur.bit()?;
        Gate::qinit(cur.paren_wire()?, b)
    } else if cur.eat("QTerm") {
        let b = cur.bit()?;
        Gate::qterm(cur.paren_wire()?, b)
    } else if cur.eat("CInit") {
        let b = cur.bit()?;
        Gate::cinit(cur.paren_wire()?, b)
    } else if cur.eat("CDiscard") {
        Gate::cdiscard(cur.paren_wire()?)
    } else if cur.eat("QGate[") {
        let name = cur.quoted()?;
        let g = NamedGate::from_name(&name)
            .ok_or_else(|| cur.error(&format!("unknown gate name {name:?}, expected one of H,X,Y,Z,S,T")))?;
        cur.expect("]")?;
        Gate::named(g, cur.paren_wire()?)
    } else if cur.eat("QRot[") {
        let m = cur.int()?;
        let m = u32::try_from(m).map_err(|_| cur.error("rotation order out of range"))?;
        cur.expect("]")?;
        Gate::rgate(m, cur.paren_wire()?)
    } else if cur.eat("QMeas") {
        Gate::measure(cur.paren_wire()?)
    } else if cur.eat("Comment[") {
        let text = cur.quoted()?;
        cur.expect("](")?;
        let mut labels = Vec::new();
        cur.ws();
        if !cur.eat(")") {
            loop {
                cur.ws();
                let w = cur.int()?;
                cur.ws();
                cur.expect(":")?;
                cur.ws();
                labels.push((WireId(w), cur.quoted()?));
                cur.ws();
                if cur.eat(")") {
                    break;
                }
                cur.expect(",")?;
            }
        }
        Gate::comment(text, labels)
    } else if cur.eat("Call[") {
        let name = cur.quoted()?;
        cur.ws();
        cur.expect(",")?;
        cur.ws();
        let reps = cur.int()?;
        cur.expect("]")?;
        let inputs = cur.intlist()?;
        cur.ws();
        cur.expect("->")?;
        cur.ws();
        let outputs = cur.intlist()?;
        Gate::call(name, inputs, outputs, reps)
    } else {
        return Err(cur.error("expected a gate"));
    };

    cur.ws();
    if cur.eat("with controls=[") {
        loop {
            cur.ws();
            let positive = if cur.eat("+") {
                true
            } else if cur.eat("-") {
                false
            } else {
                return Err(cur.error("expected \"+\" or \"-\""));
            };
            let w = cur.int()?;
            gate.controls.push(Control { wire: WireId(w), positive });
            cur.ws();
            if cur.eat("]") {
                break;
            }
            cur.expect(",")?;
        }
        cur.ws();
    }
    if cur.eat("with inverse") {
        gate.inverted = true;
    }
    cur.end()?;
    Ok(gate)
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { rest: text, line }
    }

    fn error(&self, msg: &str) -> ParseError {
        let near: String = self.rest.chars().take(20).collect();
        let message = if near.is_empty() {
            format!("{msg} at end of line")
        } else {
            format!("{msg} near {near:?}")
        };
        ParseError { line: self.line, message }
    }

    fn ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn at_end(&self) -> bool {
        self.rest.trim().is_empty()
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing text"))
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        match self.rest.strip_prefix(tok) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {tok:?}")))
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        let len = self.rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("expected an integer"));
        }
        let v = self.rest[..len].parse().map_err(|_| self.error("integer out of range"))?;
        self.rest = &self.rest[len..];
        Ok(v)
    }

    fn bit(&mut self) -> Result<bool, ParseError> {
        if self.eat("0") {
            Ok(false)
        } else if self.eat("1") {
            Ok(true)
        } else {
            Err(self.error("expected \"0\" or \"1\""))
        }
    }

    fn paren_wire(&mut self) -> Result<WireId, ParseError> {
        self.expect("(")?;
        self.ws();
        let w = self.int()?;
        self.ws();
        self.expect(")")?;
        Ok(WireId(w))
    }

    fn intlist(&mut self) -> Result<Vec<WireId>, ParseError> {
        self.expect("(")?;
        let mut out = Vec::new();
        self.ws();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            self.ws();
            out.push(WireId(self.int()?));
            self.ws();
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        self.expect("\"")?;
        let mut out = String::new();
        let mut chars = self.rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &self.rest[i + 1..];
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 'r')) => out.push('\r'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, c @ ('"' | '\\'))) => out.push(c),
                    _ => return Err(self.error("bad escape in quoted string")),
                },
                c => out.push(c),
            }
        }
        Err(self.error("unterminated quoted string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let c = Circuit::new(Body::new(
            vec![Endpoint::quantum(0)],
            vec![Gate::named(NamedGate::H, WireId(0))],
            vec![Endpoint::quantum(0)],
        ));
        let text = serialize(&c);
        assert_eq!(text, "Inputs: 0:Qbit\nQGate[\"H\"](0)\nOutputs: 0:Qbit\n");
        assert_eq!(parse(&text).unwrap(), c);
    }

    #[test]
    fn every_gate_form_round_trips() {
        let text = "\
Subroutine: \"f \\\"x\\\"\"
Inputs: 0:Qbit
QRot[3](0) with inverse
Outputs: 0:Qbit
Inputs: 0:Qbit, 1:Cbit, 2:Qbit
QInit1(3)
QGate[\"X\"](3) with controls=[+0,-2,+1]
QGate[\"T\"](3) with controls=[+1] with inverse
Comment[\"ENTER: -- not a comment\"](0:\"q\",3:\"a[0]\")
Call[\"f \\\"x\\\"\",4](3) -> (3)
QTerm0(3)
QMeas(2)
CDiscard(2)
CInit0(4)
Comment[\"\"]()
Outputs: 0:Qbit, 1:Cbit, 4:Cbit
";
        let c = parse(text).unwrap();
        c.validate().unwrap();
        assert_eq!(serialize(&c), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "-- header\n\nInputs: 0:Qbit   -- one qubit\n  QGate[\"H\"](0)\nOutputs: 0:Qbit\n";
        let c = parse(text).unwrap();
        assert_eq!(c.main.gates.len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("Inputs: 0:Qbit\nQGate[\"K\"](0)\nOutputs: 0:Qbit\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown gate name"));
        let err = parse("Inputs: 0:Qbit\nQGate[\"H\"](0)\n").unwrap_err();
        assert!(err.message.contains("Outputs:"));
        let err = parse("Inputs: 0:Qubit\nOutputs:\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse("Inputs:\nOutputs:\nQMeas(0)\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn control_on_dead_wire_parses_but_fails_validation() {
        let c = parse("Inputs: 0:Qbit\nQGate[\"X\"](0) with controls=[+7]\nOutputs: 0:Qbit\n").unwrap();
        assert!(c.validate().is_err());
    }
}
