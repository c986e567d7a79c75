//! Circuit text format and instruction stream.
//!
//! One instruction per line, `NAME(param) t1 t2 ...`, with `#` comments and
//! `REPEAT N { ... }` blocks. DETECTOR takes `rec[-k]` lookback targets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::Gate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Qubit(u32),
    /// `rec[-k]`: the k-th most recent measurement.
    Rec(u32),
}

impl Target {
    pub fn qubit(self) -> usize {
        match self {
            Target::Qubit(q) => q as usize,
            Target::Rec(_) => panic!("record target used as a qubit"),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Qubit(q) => write!(f, "{q}"),
            Target::Rec(k) => write!(f, "rec[-{k}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub parameter: Option<f64>,
    pub targets: Vec<Target>,
}

impl Instruction {
    /// Groups of `arity` targets, one per gate application.
    pub fn applications(&self) -> std::slice::Chunks<'_, Target> {
        if self.gate == Gate::Detector {
            // A detector is one application over all of its records.
            return self.targets.chunks(self.targets.len().max(1));
        }
        self.targets.chunks(self.gate.arity())
    }

    pub fn probability(&self) -> f64 {
        self.parameter.unwrap_or(0.0)
    }

    pub fn num_measurements(&self) -> usize {
        if self.gate.produces_measurement() {
            self.targets.len()
        } else {
            0
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().filter_map(|t| match t {
            Target::Qubit(q) => Some(*q as usize),
            Target::Rec(_) => None,
        })
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate.name())?;
        if let Some(p) = self.parameter {
            write!(f, "({p})")?;
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Instruction(Instruction),
    Repeat { count: u64, body: Circuit },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    operations: Vec<Operation>,
    num_qubits: usize,
    num_measurements: u64,
    num_detectors: u64,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Total measurements after expanding every REPEAT block.
    pub fn num_measurements(&self) -> usize {
        self.num_measurements as usize
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors as usize
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    /// Validates and appends an instruction.
    pub fn push(&mut self, gate: Gate, parameter: Option<f64>, targets: Vec<Target>) -> Result<()> {
        let msg = |m: String| Error::CircuitParse { line: 0, message: m };
        let inst = Instruction {
            gate,
            parameter,
            targets,
        };
        validate_instruction(&inst, self.num_measurements).map_err(msg)?;
        self.push_unchecked(inst);
        Ok(())
    }

    /// Appends a `REPEAT count { body }` block.
    pub fn push_repeat(&mut self, count: u64, body: Circuit) -> Result<()> {
        if count == 0 {
            return Err(Error::CircuitParse {
                line: 0,
                message: "REPEAT count must be positive".into(),
            });
        }
        if let Some(k) = body.first_lookback_underflow(self.num_measurements) {
            return Err(Error::BadLookback { lookback: k });
        }
        self.add_repeat(count, body);
        Ok(())
    }

    fn push_unchecked(&mut self, inst: Instruction) {
        for q in inst.qubits() {
            self.num_qubits = self.num_qubits.max(q + 1);
        }
        self.num_measurements += inst.num_measurements() as u64;
        if inst.gate == Gate::Detector {
            self.num_detectors += 1;
        }
        self.operations.push(Operation::Instruction(inst));
    }

    fn add_repeat(&mut self, count: u64, body: Circuit) {
        self.num_qubits = self.num_qubits.max(body.num_qubits);
        self.num_measurements += count * body.num_measurements;
        self.num_detectors += count * body.num_detectors;
        self.operations.push(Operation::Repeat { count, body });
    }

    /// Finds a detector lookback that would reach before the first
    /// measurement when the circuit starts after `prior` measurements.
    fn first_lookback_underflow(&self, prior: u64) -> Option<usize> {
        let mut seen = prior;
        for op in &self.operations {
            match op {
                Operation::Instruction(inst) => {
                    for t in &inst.targets {
                        if let Target::Rec(k) = t {
                            if *k as u64 > seen {
                                return Some(*k as usize);
                            }
                        }
                    }
                    seen += inst.num_measurements() as u64;
                }
                Operation::Repeat { count, body } => {
                    if let Some(k) = body.first_lookback_underflow(seen) {
                        return Some(k);
                    }
                    seen += count * body.num_measurements;
                }
            }
        }
        None
    }

    /// Streams instructions in execution order, expanding REPEAT blocks
    /// lazily.
    pub fn iter_flat(&self) -> FlatIter<'_> {
        FlatIter {
            stack: vec![Frame {
                ops: &self.operations,
                next: 0,
                remaining: 1,
            }],
        }
    }

    /// Each detector's measurements as absolute indices into the record.
    pub fn detector_sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.num_detectors());
        let mut seen = 0usize;
        for inst in self.iter_flat() {
            if inst.gate == Gate::Detector {
                out.push(
                    inst.targets
                        .iter()
                        .filter_map(|t| match t {
                            Target::Rec(k) => Some(seen - *k as usize),
                            Target::Qubit(_) => None,
                        })
                        .collect(),
                );
            }
            seen += inst.num_measurements();
        }
        out
    }

    /// Number of instruction applications after expansion (broadcast
    /// targets counted separately).
    pub fn num_applications(&self) -> u64 {
        self.operations
            .iter()
            .map(|op| match op {
                Operation::Instruction(i) => i.applications().len() as u64,
                Operation::Repeat { count, body } => count * body.num_applications(),
            })
            .sum()
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        for op in &self.operations {
            let pad = "    ".repeat(depth);
            match op {
                Operation::Instruction(inst) => writeln!(f, "{pad}{inst}")?,
                Operation::Repeat { count, body } => {
                    writeln!(f, "{pad}REPEAT {count} {{")?;
                    body.fmt_indented(f, depth + 1)?;
                    writeln!(f, "{pad}}}")?;
                }
            }
        }
        Ok(())
    }
}

struct Frame<'a> {
    ops: &'a [Operation],
    next: usize,
    remaining: u64,
}

pub struct FlatIter<'a> {
    stack: Vec<Frame<'a>>,
}

impl<'a> Iterator for FlatIter<'a> {
    type Item = &'a Instruction;

    fn next(&mut self) -> Option<&'a Instruction> {
        loop {
            let top = self.stack.last_mut()?;
            if top.next == top.ops.len() {
                top.remaining -= 1;
                if top.remaining == 0 {
                    self.stack.pop();
                } else {
                    top.next = 0;
                }
                continue;
            }
            let op = &top.ops[top.next];
            top.next += 1;
            match op {
                Operation::Instruction(inst) => return Some(inst),
                Operation::Repeat { count, body } => {
                    if !body.operations.is_empty() {
                        self.stack.push(Frame {
                            ops: &body.operations,
                            next: 0,
                            remaining: *count,
                        });
                    }
                }
            }
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

fn validate_instruction(inst: &Instruction, measurements_so_far: u64) -> std::result::Result<(), String> {
    let data = inst.gate.data();
    match (data.parameter_count, inst.parameter) {
        (0, Some(_)) => return Err(format!("{} takes no parameter", data.name)),
        (1, None) => return Err(format!("{} requires a probability parameter", data.name)),
        (1, Some(p)) if !(0.0..=1.0).contains(&p) => {
            return Err(format!("probability {p} outside [0, 1]"))
        }
        _ => {}
    }
    if inst.gate == Gate::Detector {
        for t in &inst.targets {
            match t {
                Target::Qubit(_) => return Err("DETECTOR targets must be rec[-k]".into()),
                Target::Rec(0) => return Err("rec[-k] requires k >= 1".into()),
                Target::Rec(k) if *k as u64 > measurements_so_far => {
                    return Err(format!(
                        "rec[-{k}] reaches before the first measurement ({measurements_so_far} so far)"
                    ))
                }
                Target::Rec(_) => {}
            }
        }
        return Ok(());
    }
    if inst.targets.is_empty() || !inst.targets.len().is_multiple_of(data.arity) {
        return Err(format!(
            "{} needs a positive multiple of {} targets, got {}",
            data.name,
            data.arity,
            inst.targets.len()
        ));
    }
    if inst.targets.iter().any(|t| matches!(t, Target::Rec(_))) {
        return Err(format!("{} does not take rec targets", data.name));
    }
    if data.arity == 2 {
        for pair in inst.targets.chunks(2) {
            if pair[0] == pair[1] {
                return Err(format!("{} applied to the same qubit twice ({})", data.name, pair[0]));
            }
        }
    }
    Ok(())
}

fn parse_target(token: &str) -> std::result::Result<Target, String> {
    if let Some(rest) = token.strip_prefix("rec[-") {
        let k = rest
            .strip_suffix(']')
            .and_then(|k| k.parse::<u32>().ok())
            .ok_or_else(|| format!("bad record target '{token}'"))?;
        return Ok(Target::Rec(k));
    }
    token
        .parse::<u32>()
        .map(Target::Qubit)
        .map_err(|_| format!("bad target '{token}'"))
}

fn parse_instruction(line: &str, measurements_so_far: u64) -> std::result::Result<Instruction, String> {
    let (head, rest) = match line.find(|c: char| c.is_whitespace()) {
        Some(k) => (&line[..k], &line[k..]),
        None => (line, ""),
    };
    // Allow whitespace between the name and its parameter list.
    let (head, rest) = match (head.find('('), rest.trim_start().starts_with('(')) {
        (None, true) => {
            let r = rest.trim_start();
            let close = r.find(')').ok_or("unclosed parameter list")?;
            (format!("{head}{}", &r[..=close]), &r[close + 1..])
        }
        _ => (head.to_string(), rest),
    };
    let (name, parameter) = match head.find('(') {
        Some(open) => {
            let close = head.rfind(')').filter(|&c| c > open).ok_or("unclosed parameter list")?;
            if close + 1 != head.len() {
                return Err(format!("unexpected text after parameter in '{head}'"));
            }
            let text = head[open + 1..close].trim();
            let p: f64 = text.parse().map_err(|_| format!("bad parameter '{text}'"))?;
            (&head[..open], Some(p))
        }
        None => (&head[..], None),
    };
    let gate = Gate::from_name(name).ok_or_else(|| format!("unknown gate '{name}'"))?;
    let targets = rest
        .split_whitespace()
        .map(parse_target)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let inst = Instruction {
        gate,
        parameter,
        targets,
    };
    validate_instruction(&inst, measurements_so_far)?;
    Ok(inst)
}

impl Circuit {
    /// Parses a circuit that continues after `prior` measurements, so
    /// detectors may look back into them.
    pub fn parse_continuing(text: &str, prior: usize) -> Result<Circuit> {
        // Each open block: (REPEAT count, line it opened on, circuit so far,
        // measurements recorded before the block started).
        let mut stack: Vec<(u64, usize, Circuit, u64)> = Vec::new();
        let mut current = Circuit::new();
        let mut before = prior as u64;
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let err = |message: String| Error::CircuitParse {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if line == "}" {
                let (count, _, parent, parent_before) =
                    stack.pop().ok_or_else(|| err("unmatched '}'".into()))?;
                let body = std::mem::replace(&mut current, parent);
                current.add_repeat(count, body);
                before = parent_before;
                continue;
            }
            let mut words = line.split_whitespace();
            if words.next().is_some_and(|w| w.eq_ignore_ascii_case("REPEAT")) {
                let count = words.next().ok_or_else(|| err("REPEAT needs a count".into()))?;
                let count: u64 = count
                    .parse()
                    .ok()
                    .filter(|&c| c > 0)
                    .ok_or_else(|| err(format!("bad REPEAT count '{count}'")))?;
                if words.next() != Some("{") || words.next().is_some() {
                    return Err(err("expected 'REPEAT N {'".into()));
                }
                let so_far = before + current.num_measurements;
                let parent = std::mem::take(&mut current);
                stack.push((count, line_no, parent, before));
                before = so_far;
                continue;
            }
            let inst = parse_instruction(line, before + current.num_measurements).map_err(err)?;
            current.push_unchecked(inst);
        }
        if let Some((_, opened, _, _)) = stack.last() {
            return Err(Error::CircuitParse {
                line: *opened,
                message: "REPEAT block is never closed".into(),
            });
        }
        Ok(current)
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Circuit> {
        Circuit::parse_continuing(text, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REP_CODE: &str = "\
REPEAT 20 {
    X_ERROR(0.01) 0 1 2 3 4 5 6 7 8 9 10
    CNOT 0 1 2 3 4 5 6 7 8 9
    CNOT 10 9 8 7 6 5 4 3 2 1
    MR 1 3 5 7 9
}
";

    fn parse(s: &str) -> Circuit {
        s.parse().unwrap()
    }

    fn err_line(s: &str) -> usize {
        match s.parse::<Circuit>() {
            Err(Error::CircuitParse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_instructions() {
        let c = parse("H 0");
        assert_eq!(c.operations().len(), 1);
        let i: Vec<_> = c.iter_flat().collect();
        assert_eq!(i[0].gate, Gate::H);
        assert_eq!(i[0].targets, vec![Target::Qubit(0)]);
        let c = parse("CNOT 0 1");
        let i: Vec<_> = c.iter_flat().collect();
        assert_eq!(i[0].gate, Gate::Cnot);
        assert_eq!(i[0].targets, vec![Target::Qubit(0), Target::Qubit(1)]);
        assert_eq!(c.num_qubits(), 2);
    }

    #[test]
    fn repetition_code_counts() {
        let c = parse(REP_CODE);
        assert_eq!(c.num_qubits(), 11);
        let rounds = c.iter_flat().filter(|i| i.gate == Gate::Mr).count();
        assert_eq!(rounds, 20);
        assert_eq!(c.iter_flat().map(|i| i.num_measurements()).sum::<usize>(), 100);
        assert_eq!(c.num_measurements(), 100);
        let mr: usize = c
            .iter_flat()
            .filter(|i| i.gate == Gate::Mr)
            .map(|i| i.targets.len())
            .sum();
        assert_eq!(mr, 100);
    }

    #[test]
    fn iter_flat_expansion() {
        let c = parse("REPEAT 3 {\nH 0\n}");
        assert_eq!(c.iter_flat().count(), 3);
        assert!(c.iter_flat().all(|i| i.gate == Gate::H));
        assert_eq!(Circuit::new().iter_flat().count(), 0);
        let c = parse("REPEAT 2 {\nREPEAT 2 {\nM 0\n}\n}");
        assert_eq!(c.iter_flat().count(), 4);
        assert_eq!(c.num_measurements(), 4);
        let c = parse("REPEAT 5 {\n}\nX 0");
        assert_eq!(c.iter_flat().count(), 1);
    }

    #[test]
    fn comments_case_and_params() {
        let c = parse("# header\n\nh 0 # hadamard\ncx 0 1\nx_error(0.125) 0 1\nDEPOLARIZE2 (0.5) 0 1");
        let i: Vec<_> = c.iter_flat().collect();
        assert_eq!(i.len(), 4);
        assert_eq!(i[1].gate, Gate::Cnot);
        assert_eq!(i[2].parameter, Some(0.125));
        assert_eq!(i[3].gate, Gate::Depolarize2);
        assert_eq!(i[3].parameter, Some(0.5));
    }

    #[test]
    fn detectors() {
        let c = parse("M 0 1\nDETECTOR rec[-1] rec[-2]\nREPEAT 3 {\nM 0\nDETECTOR rec[-1] rec[-3]\n}");
        assert_eq!(c.num_detectors(), 4);
        assert_eq!(c.num_measurements(), 5);
        assert_eq!(err_line("M 0\nDETECTOR rec[-2]"), 2);
        assert_eq!(err_line("REPEAT 2 {\nM 0\nDETECTOR rec[-2]\n}"), 3);
        assert_eq!(err_line("DETECTOR 0"), 1);
        assert_eq!(err_line("M 0\nDETECTOR rec[-0]"), 2);
        assert!(Circuit::parse_continuing("DETECTOR rec[-2]", 2).is_ok());
        assert!(Circuit::parse_continuing("DETECTOR rec[-3]", 2).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(err_line("H 0\nFOO 1"), 2);
        assert_eq!(err_line("X_ERROR(1.5) 0"), 1);
        assert_eq!(err_line("X_ERROR(-0.1) 0"), 1);
        assert_eq!(err_line("X_ERROR 0"), 1);
        assert_eq!(err_line("H(0.1) 0"), 1);
        assert_eq!(err_line("H 0\n\nCNOT 0 1 2"), 3);
        assert_eq!(err_line("CNOT 1 1"), 1);
        assert_eq!(err_line("H"), 1);
        assert_eq!(err_line("H -1"), 1);
        assert_eq!(err_line("}"), 1);
        assert_eq!(err_line("H 0\nREPEAT 2 {\nH 0"), 2);
        assert_eq!(err_line("REPEAT 0 {\n}"), 1);
        assert_eq!(err_line("REPEAT 2\nH 0"), 1);
    }

    #[test]
    fn broadcast_matches_split() {
        let a = parse("CNOT 0 1 2 3");
        let b = parse("CNOT 0 1\nCNOT 2 3");
        let apps_a: Vec<Vec<Target>> = a
            .iter_flat()
            .flat_map(|i| i.applications().map(|t| t.to_vec()).collect::<Vec<_>>())
            .collect();
        let apps_b: Vec<Vec<Target>> = b
            .iter_flat()
            .flat_map(|i| i.applications().map(|t| t.to_vec()).collect::<Vec<_>>())
            .collect();
        assert_eq!(apps_a, apps_b);
        assert_eq!(a.num_applications(), 2);
    }

    #[test]
    fn canonical_round_trip() {
        for text in [REP_CODE, "h 0\ncx 0 1\nDEPOLARIZE1(0.001) 3\nM 0\nDETECTOR rec[-1]"] {
            let c = parse(text);
            let printed = c.to_string();
            assert_eq!(parse(&printed), c);
            assert_eq!(parse(&printed).to_string(), printed);
        }
    }

    #[test]
    fn builder_validates() {
        let mut c = Circuit::new();
        c.push(Gate::H, None, vec![Target::Qubit(3)]).unwrap();
        assert!(c.push(Gate::Cnot, None, vec![Target::Qubit(3)]).is_err());
        assert!(c.push(Gate::XError, Some(2.0), vec![Target::Qubit(0)]).is_err());
        let mut body = Circuit::new();
        body.push(Gate::M, None, vec![Target::Qubit(0)]).unwrap();
        let mut det = Circuit::new();
        det.push(Gate::M, None, vec![Target::Qubit(0)]).unwrap();
        det.push(Gate::Detector, None, vec![Target::Rec(1)]).unwrap();
        c.push_repeat(4, body).unwrap();
        c.push_repeat(2, det).unwrap();
        assert_eq!(c.num_measurements(), 6);
        assert_eq!(c.num_qubits(), 4);
    }
}
