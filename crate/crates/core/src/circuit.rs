//! Gate lists over {H, S, S†, T, T†, X, Y, Z, CNOT}, their metrics, text
//! and QASM formats, and exact simulation.

use std::fmt;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::ring::GaussianRootTwo as G;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// Control, target.
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot(c, t) => vec![c, t],
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q) => vec![q],
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    pub fn is_clifford(&self) -> bool {
        !self.is_t()
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::T(q) => Gate::Tdg(q),
            Gate::Tdg(q) => Gate::T(q),
            g => g,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::X(_) => "x",
            Gate::Y(_) => "y",
            Gate::Z(_) => "z",
            Gate::Cnot(..) => "cnot",
        }
    }

    /// 2×2 matrix of a single-qubit gate.
    pub fn matrix_1q(&self) -> Option<[[G; 2]; 2]> {
        let (o, z, i) = (G::ONE, G::ZERO, G::I);
        let h = G::INV_SQRT2;
        Some(match self {
            Gate::H(_) => [[h, h], [h, -h]],
            Gate::S(_) => [[o, z], [z, i]],
            Gate::Sdg(_) => [[o, z], [z, -i]],
            Gate::T(_) => [[o, z], [z, G::OMEGA]],
            Gate::Tdg(_) => [[o, z], [z, G::OMEGA.conj()]],
            Gate::X(_) => [[z, o], [o, z]],
            Gate::Y(_) => [[z, -i], [i, z]],
            Gate::Z(_) => [[o, z], [z, -o]],
            Gate::Cnot(..) => return None,
        })
    }

    fn parse(line: &str) -> Result<Gate> {
        let mut it = line.split_whitespace();
        let name = it.next().ok_or_else(|| Error::Parse("empty gate line".into()))?;
        let args: Vec<usize> = it
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad qubit operand {s:?}")))
            })
            .collect::<Result<_>>()?;
        let one = |f: fn(usize) -> Gate| -> Result<Gate> {
            match args.as_slice() {
                [q] => Ok(f(*q)),
                _ => Err(Error::Parse(format!("{name} takes one operand"))),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "h" => one(Gate::H),
            "s" => one(Gate::S),
            "sdg" => one(Gate::Sdg),
            "t" => one(Gate::T),
            "tdg" => one(Gate::Tdg),
            "x" => one(Gate::X),
            "y" => one(Gate::Y),
            "z" => one(Gate::Z),
            "cnot" | "cx" => match args.as_slice() {
                [c, t] => Ok(Gate::Cnot(*c, *t)),
                _ => Err(Error::Parse("cnot takes two operands".into())),
            },
            other => Err(Error::Parse(format!("unknown gate {other:?}"))),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot(c, t) => write!(f, "cnot {c} {t}"),
            g => write!(f, "{} {}", g.name(), g.qubits()[0]),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Metrics {
    pub t_count: usize,
    pub t_depth: usize,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::empty(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n) {
            return Err(Error::QubitOutOfRange(q, self.n));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Invalid("cnot operands must differ".into()));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(*g)?;
        }
        Ok(())
    }

    /// The adjoint circuit.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// T-count and T-depth; T-depth is the longest path through T/T† nodes
    /// of the gate DAG.
    pub fn metrics(&self) -> Metrics {
        let mut level = vec![0usize; self.n];
        let mut t_count = 0;
        for g in &self.gates {
            match *g {
                Gate::T(q) | Gate::Tdg(q) => {
                    t_count += 1;
                    level[q] += 1;
                }
                Gate::Cnot(c, t) => {
                    let m = level[c].max(level[t]);
                    level[c] = m;
                    level[t] = m;
                }
                _ => {}
            }
        }
        Metrics {
            t_count,
            t_depth: level.into_iter().max().unwrap_or(0),
        }
    }

    pub fn simulate(&self) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.n);
        for g in &self.gates {
            m.apply_gate(g);
        }
        m
    }

    pub fn to_text(&self) -> String {
        let m = self.metrics();
        let mut s = format!(
            "# qubits {}\n# t-count {}\n# t-depth {}\n",
            self.n, m.t_count, m.t_depth
        );
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the text format. The qubit count comes from a "# qubits N"
    /// comment when present, otherwise from the largest operand.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut gates = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("qubits") {
                    let v = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse("bad qubits header".into()))?;
                    n = Some(v);
                }
                continue;
            }
            gates.push(Gate::parse(line)?);
        }
        let n = n.unwrap_or_else(|| {
            gates
                .iter()
                .flat_map(|g| g.qubits())
                .max()
                .map_or(1, |q| q + 1)
        });
        Self::new(n, gates)
    }

    /// Parses the OpenQASM 2 subset written by [`Circuit::to_qasm`]: one
    /// `qreg` and the gates of [`Gate`] on its wires.
    pub fn from_qasm(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut gates = Vec::new();
        for stmt in text.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() || stmt.starts_with("OPENQASM") || stmt.starts_with("include") {
                continue;
            }
            if let Some(reg) = stmt.strip_prefix("qreg") {
                let size = reg
                    .trim()
                    .strip_prefix("q[")
                    .and_then(|r| r.strip_suffix(']'))
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad register {stmt:?}")))?;
                n = Some(size);
                continue;
            }
            let (name, ops) = stmt
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad statement {stmt:?}")))?;
            let mut line = name.to_string();
            for op in ops.split(',') {
                let q = op
                    .trim()
                    .strip_prefix("q[")
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("bad operand {op:?}")))?;
                line.push(' ');
                line.push_str(q);
            }
            gates.push(Gate::parse(&line)?);
        }
        let n = n.ok_or_else(|| Error::Parse("missing qreg".into()))?;
        Self::new(n, gates)
    }

    pub fn to_qasm(&self) -> String {
        let mut s = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", self.n);
        for g in &self.gates {
            match *g {
                Gate::Cnot(c, t) => s.push_str(&format!("cx q[{c}],q[{t}];\n")),
                g => s.push_str(&format!("{} q[{}];\n", g.name(), g.qubits()[0])),
            }
        }
        s
    }
}

pub fn circuit_depth_metrics(c: &Circuit) -> (usize, usize) {
    let m = c.metrics();
    (m.t_count, m.t_depth)
}

pub fn simulate_exact(c: &Circuit) -> DenseMatrix {
    c.simulate()
}
