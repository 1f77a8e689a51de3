//! Gate-level circuit representation.
//!
//! Qubit 0 is the topmost wire and the most significant bit of a basis
//! label. Multi-controlled gates are stored as single nodes; decomposition
//! into elementary gates exists only as a cost model.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Single- or two-qubit operation applied to the target wires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    X,
    Z,
    H,
    /// Square root of X.
    V,
    /// Inverse of [`GateKind::V`].
    Vdg,
    Ry(f64),
    Rz(f64),
    Swap,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::V => "V",
            GateKind::Vdg => "VDG",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Swap => "SWAP",
        }
    }

    pub fn target_count(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn inverse(&self) -> GateKind {
        match *self {
            GateKind::V => GateKind::Vdg,
            GateKind::Vdg => GateKind::V,
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            other => other,
        }
    }

    /// 2x2 matrix of a single-target kind, row-major; `None` for SWAP.
    pub fn matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = match *self {
            GateKind::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            GateKind::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                [[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]]
            }
            GateKind::V => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            GateKind::Vdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.), c(-s, 0.)], [c(s, 0.), c(co, 0.)]]
            }
            GateKind::Rz(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), c(0., 0.)],
                [c(0., 0.), Complex64::from_polar(1.0, t / 2.0)],
            ],
            GateKind::Swap => return None,
        };
        Some(m)
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Ry(t) | GateKind::Rz(t) => Some(t),
            _ => None,
        }
    }
}

/// Whether a control fires on |1⟩ (closed) or |0⟩ (open).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn closed(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Closed }
    }

    pub fn open(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Open }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn single(kind: GateKind, target: usize) -> Self {
        Gate { kind, targets: vec![target], controls: Vec::new() }
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }

    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Ry(angle), q)
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Rz(angle), q)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::Swap, targets: vec![a, b], controls: Vec::new() }
    }

    /// X on `target` controlled by every qubit in `controls` (closed).
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        Self::x(target).with_controls(controls.iter().map(|&q| Control::closed(q)))
    }

    pub fn with_control(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn inverse(&self) -> Gate {
        Gate { kind: self.kind.inverse(), ..self.clone() }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let expected = self.kind.target_count();
        if self.targets.len() != expected {
            return Err(Error::TargetArity {
                kind: self.kind.name(),
                expected,
                got: self.targets.len(),
            });
        }
        let mut seen = vec![false; width];
        for q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::QubitCollision(q));
            }
        }
        Ok(())
    }

    fn remapped(&self, map: &[usize]) -> Gate {
        Gate {
            kind: self.kind,
            targets: self.targets.iter().map(|&q| map[q]).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control { qubit: map[c.qubit], polarity: c.polarity })
                .collect(),
        }
    }
}

/// Ordered gate list over `width` qubits.
///
/// `global_phase` is a scalar factor `e^{i·global_phase}` carried as
/// metadata; `calls` counts labelled sub-circuits inserted with
/// [`Circuit::append_call`], including nested ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub label: String,
    pub global_phase: f64,
    pub calls: BTreeMap<String, usize>,
}

impl Circuit {
    pub fn new(width: usize, label: impl Into<String>) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
            label: label.into(),
            global_phase: 0.0,
            calls: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `other`, sending its qubit `i` to `map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.width {
            return Err(Error::WidthMismatch { expected: other.width, got: map.len() });
        }
        for gate in &other.gates {
            self.push(gate.remapped(map))?;
        }
        self.global_phase += other.global_phase;
        for (label, count) in &other.calls {
            *self.calls.entry(label.clone()).or_default() += count;
        }
        Ok(())
    }

    /// Appends `other` on the leading wires.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        let map: Vec<usize> = (0..other.width).collect();
        self.append_mapped(other, &map)
    }

    /// Like [`Circuit::append_mapped`], and records one call of `other.label`.
    pub fn append_call(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        self.append_mapped(other, map)?;
        *self.calls.entry(other.label.clone()).or_default() += 1;
        Ok(())
    }

    /// Number of recorded calls of the sub-circuit labelled `label`.
    pub fn call_count(&self, label: &str) -> usize {
        self.calls.get(label).copied().unwrap_or(0)
    }

    pub fn dagger(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            label: self.label.clone(),
            global_phase: -self.global_phase,
            calls: self.calls.clone(),
        }
    }

    /// Adds a control on the unused wire `ctrl` to every gate.
    ///
    /// A nonzero global phase becomes relative once controlled, so it is
    /// realized as an Rz on the control wire.
    pub fn add_control(&self, ctrl: usize, polarity: Polarity) -> Result<Circuit> {
        if ctrl >= self.width {
            return Err(Error::QubitOutOfRange { qubit: ctrl, width: self.width });
        }
        if self.gates.iter().any(|g| g.qubits().any(|q| q == ctrl)) {
            return Err(Error::QubitCollision(ctrl));
        }
        let control = Control { qubit: ctrl, polarity };
        let mut out = Circuit {
            width: self.width,
            gates: self.gates.iter().map(|g| g.clone().with_control(control)).collect(),
            label: self.label.clone(),
            global_phase: 0.0,
            calls: self.calls.clone(),
        };
        if self.global_phase != 0.0 {
            let theta = self.global_phase;
            let angle = match polarity {
                Polarity::Closed => theta,
                Polarity::Open => -theta,
            };
            out.gates.push(Gate::rz(ctrl, angle));
            out.global_phase = theta / 2.0;
        }
        Ok(out)
    }

    /// Returns a circuit one wire wider whose new qubit 0 controls `self`
    /// (shifted down by one wire).
    pub fn controlled(&self, polarity: Polarity) -> Circuit {
        let map: Vec<usize> = (1..=self.width).collect();
        let mut wide = Circuit::new(self.width + 1, self.label.clone());
        wide.append_mapped(self, &map).expect("shifted wires stay in range");
        wide.add_control(0, polarity).expect("fresh control wire is unused")
    }

    /// Exact multiset of (kind, number of controls).
    pub fn count_gates(&self) -> GateHistogram {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry((g.kind.name(), g.controls.len())).or_default() += 1;
        }
        GateHistogram { counts }
    }

    /// Number of gates of `kind` acting on `target` (any controls).
    pub fn count_on(&self, kind: &str, target: usize) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind.name() == kind && g.targets.contains(&target))
            .count()
    }

    /// Line-oriented text form: a header, then one gate per line as
    /// `KIND [angle] t:q[,q] [c:q+|q-,...]` where `+` is closed and `-` open.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "width {}", self.width);
        let _ = writeln!(s, "phase {:?}", self.global_phase);
        let _ = writeln!(s, "label {}", self.label);
        for g in &self.gates {
            s.push_str(g.kind.name());
            if let Some(a) = g.kind.angle() {
                let _ = write!(s, " {a:?}");
            }
            let targets: Vec<String> = g.targets.iter().map(usize::to_string).collect();
            let _ = write!(s, " t:{}", targets.join(","));
            if !g.controls.is_empty() {
                let controls: Vec<String> = g
                    .controls
                    .iter()
                    .map(|c| {
                        let mark = if c.polarity == Polarity::Closed { '+' } else { '-' };
                        format!("{}{mark}", c.qubit)
                    })
                    .collect();
                let _ = write!(s, " c:{}", controls.join(","));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let err = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "width" => {
                    let w = rest.trim().parse().map_err(|_| err(line_no, "bad width"))?;
                    circuit = Some(Circuit::new(w, ""));
                    continue;
                }
                "phase" | "label" => {
                    let c = circuit.as_mut().ok_or_else(|| err(line_no, "header before width"))?;
                    if head == "phase" {
                        c.global_phase = rest.trim().parse().map_err(|_| err(line_no, "bad phase"))?;
                    } else {
                        c.label = rest.to_string();
                    }
                    continue;
                }
                _ => {}
            }
            let c = circuit.as_mut().ok_or_else(|| err(line_no, "gate before width"))?;
            let mut fields = rest.split_whitespace().peekable();
            let mut angle = || -> Result<f64> {
                fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| err(line_no, "missing angle"))
            };
            let kind = match head {
                "X" => GateKind::X,
                "Z" => GateKind::Z,
                "H" => GateKind::H,
                "V" => GateKind::V,
                "VDG" => GateKind::Vdg,
                "RY" => GateKind::Ry(angle()?),
                "RZ" => GateKind::Rz(angle()?),
                "SWAP" => GateKind::Swap,
                _ => return Err(err(line_no, "unknown gate kind")),
            };
            let mut gate = Gate { kind, targets: Vec::new(), controls: Vec::new() };
            for field in fields {
                if let Some(t) = field.strip_prefix("t:") {
                    for q in t.split(',') {
                        gate.targets.push(q.parse().map_err(|_| err(line_no, "bad target"))?);
                    }
                } else if let Some(cs) = field.strip_prefix("c:") {
                    for q in cs.split(',') {
                        let (num, polarity) = match q.as_bytes().last() {
                            Some(b'+') => (&q[..q.len() - 1], Polarity::Closed),
                            Some(b'-') => (&q[..q.len() - 1], Polarity::Open),
                            _ => return Err(err(line_no, "control needs + or -")),
                        };
                        let qubit = num.parse().map_err(|_| err(line_no, "bad control"))?;
                        gate.controls.push(Control { qubit, polarity });
                    }
                } else {
                    return Err(err(line_no, "unexpected field"));
                }
            }
            c.push(gate).map_err(|e| err(line_no, &e.to_string()))?;
        }
        circuit.ok_or_else(|| err(0, "missing width header"))
    }
}

/// Gate counts keyed by (kind name, number of controls).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateHistogram {
    pub counts: BTreeMap<(&'static str, usize), usize>,
}

impl GateHistogram {
    pub fn get(&self, kind: &str, controls: usize) -> usize {
        self.counts
            .iter()
            .find(|((k, c), _)| *k == kind && *c == controls)
            .map_or(0, |(_, n)| *n)
    }

    /// Total of `kind` regardless of control count.
    pub fn total_of(&self, kind: &str) -> usize {
        self.counts.iter().filter(|((k, _), _)| *k == kind).map(|(_, n)| n).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Elementary-gate cost of multi-controlled gates.
///
/// Gates with zero or one control cost one unit. A gate with `m ≥ 2`
/// controls costs `Σ_i coeffs[i]·m^i`. A SWAP is three CNOTs, the middle one
/// carrying the SWAP's controls.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub coeffs: Vec<f64>,
}

impl Default for CostModel {
    /// Linear model `16m − 17`, which charges a Toffoli 15 gates.
    fn default() -> Self {
        CostModel { coeffs: vec![-17.0, 16.0] }
    }
}

impl CostModel {
    fn controlled_cost(&self, m: usize) -> f64 {
        if m < 2 {
            return 1.0;
        }
        let m = m as f64;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * m + c)
    }

    pub fn gate_cost(&self, gate: &Gate) -> f64 {
        let m = gate.controls.len();
        match gate.kind {
            GateKind::Swap => 2.0 + self.controlled_cost(m + 1),
            _ => self.controlled_cost(m),
        }
    }

    pub fn estimate(&self, circuit: &Circuit) -> f64 {
        circuit.gates.iter().map(|g| self.gate_cost(g)).sum()
    }
}
