//! Gate and circuit intermediate representation, decomposition to the
//! hardware basis set {Id, X, SX, RZ, CX}, and gate-count reporting.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// A single gate. Qubit fields list controls first and the target last.
/// Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Id { q: usize },
    X { q: usize },
    Sx { q: usize },
    Rz { q: usize, angle: f64 },
    H { q: usize },
    Cx { c: usize, t: usize },
    Cp { c: usize, t: usize, angle: f64 },
    Ch { c: usize, t: usize },
    Ccp { c0: usize, c1: usize, t: usize, angle: f64 },
}

/// Fixed-capacity qubit list of a gate (arity is at most 3).
#[derive(Debug, Clone, Copy)]
pub struct Qubits {
    buf: [usize; 3],
    len: u8,
}

impl Qubits {
    pub fn as_slice(&self) -> &[usize] {
        &self.buf[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl<'a> IntoIterator for &'a Qubits {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;
    fn into_iter(self) -> Self::IntoIter {
        self.as_slice().iter().copied()
    }
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Id { .. } => "ID",
            Gate::X { .. } => "X",
            Gate::Sx { .. } => "SX",
            Gate::Rz { .. } => "RZ",
            Gate::H { .. } => "H",
            Gate::Cx { .. } => "CX",
            Gate::Cp { .. } => "CP",
            Gate::Ch { .. } => "CH",
            Gate::Ccp { .. } => "CCP",
        }
    }

    /// Qubits the gate acts on, controls first.
    pub fn qubits(&self) -> Qubits {
        let (buf, len) = match *self {
            Gate::Id { q } | Gate::X { q } | Gate::Sx { q } | Gate::Rz { q, .. } | Gate::H { q } => ([q, 0, 0], 1),
            Gate::Cx { c, t } | Gate::Cp { c, t, .. } | Gate::Ch { c, t } => ([c, t, 0], 2),
            Gate::Ccp { c0, c1, t, .. } => ([c0, c1, t], 3),
        };
        Qubits { buf, len }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz { angle, .. } | Gate::Cp { angle, .. } | Gate::Ccp { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// True for the hardware basis set {Id, X, SX, RZ, CX}.
    pub fn is_basis(&self) -> bool {
        matches!(
            self,
            Gate::Id { .. } | Gate::X { .. } | Gate::Sx { .. } | Gate::Rz { .. } | Gate::Cx { .. }
        )
    }

    /// Index-range and distinctness checks against a circuit width.
    pub fn validate(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        let qs = qs.as_slice();
        for &q in qs {
            if q >= width {
                return Err(Error::QubitOutOfRange { index: q, width });
            }
        }
        for (i, &a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(&a) {
                return Err(Error::DuplicateQubit { index: a });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.name())?;
        let qs = self.qubits();
        for (i, q) in qs.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        if let Some(a) = self.angle() {
            write!(f, ";{a}")?;
        }
        Ok(())
    }
}

/// A named, contiguous qubit range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub range: Range<usize>,
}

/// An ordered gate list over a fixed number of qubits, with optional register
/// labels. Circuits are immutable once construction is finished and can be
/// shared read-only across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    registers: Vec<Register>,
}

/// Basis-gate tallies. `one_qubit` excludes Id; `two_qubit` counts CX.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.one_qubit + self.two_qubit
    }
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), registers: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
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

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<Range<usize>> {
        self.registers.iter().find(|r| r.name == name).map(|r| r.range.clone())
    }

    /// Appends a gate, validating indices against the circuit width.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`; widths must match.
    pub fn append_circuit(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch { circuit: other.width, state: self.width });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Labels a contiguous qubit range. Ranges of distinct registers must be
    /// disjoint and lie within the circuit.
    pub fn add_register(&mut self, name: &str, range: Range<usize>) -> Result<()> {
        if range.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let overlaps = |a: &Range<usize>, b: &Range<usize>| a.start < b.end && b.start < a.end;
        if range.end > self.width || self.registers.iter().any(|r| overlaps(&r.range, &range)) {
            return Err(Error::RegisterOverlap { name: name.to_string() });
        }
        self.registers.push(Register { name: name.to_string(), range });
        Ok(())
    }

    /// Formats a measured basis-state index as a bitstring. Registers are
    /// printed highest qubit range first, separated by `|`, each with its most
    /// significant bit leftmost; unlabeled circuits print the full width.
    pub fn format_outcome(&self, index: u64) -> String {
        format_with_registers(&self.registers, self.width, index)
    }

    /// Rewrites the circuit in terms of the basis set {X, SX, RZ, CX},
    /// preserving the unitary up to a global phase. Adjacent RZ gates on the
    /// same qubit are merged and zero-angle rotations (and Id) are dropped.
    /// The rewrite is deterministic.
    pub fn decompose_to_basis(&self) -> Circuit {
        let mut expanded = Vec::with_capacity(self.gates.len() * 4);
        for g in &self.gates {
            emit_basis(g, &mut expanded);
        }

        // Merge pass: an RZ lands on the previous gate touching its qubit if
        // that gate is also an RZ.
        let mut gates: Vec<Gate> = Vec::with_capacity(expanded.len());
        let mut last_touch: Vec<Option<usize>> = vec![None; self.width];
        for g in expanded {
            if let Gate::Rz { q, angle } = g {
                if let Some(i) = last_touch[q] {
                    if let Gate::Rz { angle: prev, .. } = &mut gates[i] {
                        *prev += angle;
                        continue;
                    }
                }
            }
            let idx = gates.len();
            for q in &g.qubits() {
                last_touch[q] = Some(idx);
            }
            gates.push(g);
        }

        let mut out = Circuit::new(self.width);
        out.registers = self.registers.clone();
        out.gates = gates
            .into_iter()
            .filter_map(|g| match g {
                Gate::Rz { q, angle } => {
                    let a = normalize_angle(angle);
                    (a.abs() > ANGLE_EPS).then_some(Gate::Rz { q, angle: a })
                }
                other => Some(other),
            })
            .collect();
        out
    }

    /// Exact basis-gate tallies; the circuit must already be decomposed.
    pub fn gate_counts(&self) -> Result<GateCounts> {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Id { .. } => {}
                Gate::X { .. } | Gate::Sx { .. } | Gate::Rz { .. } => counts.one_qubit += 1,
                Gate::Cx { .. } => counts.two_qubit += 1,
                other => return Err(Error::NonBasisGate { kind: other.name() }),
            }
        }
        Ok(counts)
    }

    /// Line-oriented text serialization: a `width=N` header followed by one
    /// gate per line as `KIND q0[,q1[,q2]][;angle_radians]`.
    pub fn to_text(&self) -> String {
        let mut s = format!("width={}\n", self.width);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the text serialization produced by [`Circuit::to_text`].
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing width header".into()))?;
        let width: usize = header
            .trim()
            .strip_prefix("width=")
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad width in `{header}`")))?;
        let mut circ = Circuit::new(width);
        for line in lines {
            circ.push(parse_gate(line.trim())?)?;
        }
        Ok(circ)
    }
}

const ANGLE_EPS: f64 = 1e-12;

/// Wraps an angle into (-pi, pi]. Global phase is unobservable, so RZ angles
/// are equivalent modulo 2*pi.
pub fn normalize_angle(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut a = angle % tau;
    if a > std::f64::consts::PI {
        a -= tau;
    } else if a <= -std::f64::consts::PI {
        a += tau;
    }
    a
}

pub(crate) fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Bits of `value` as a string, most significant first.
pub fn format_bits(value: u64, width: usize) -> String {
    (0..width).rev().map(|b| if value >> b & 1 == 1 { '1' } else { '0' }).collect()
}

/// Register-aware bitstring formatting; see [`Circuit::format_outcome`].
pub fn format_with_registers(registers: &[Register], width: usize, index: u64) -> String {
    if registers.is_empty() {
        return format_bits(index, width);
    }
    let mut regs: Vec<&Register> = registers.iter().collect();
    regs.sort_by(|a, b| b.range.start.cmp(&a.range.start));
    let mut out = String::new();
    for (i, r) in regs.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        let w = r.range.end - r.range.start;
        let v = (index >> r.range.start) & mask(w);
        out.push_str(&format_bits(v, w));
    }
    out
}

fn emit_basis(gate: &Gate, out: &mut Vec<Gate>) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    match *gate {
        Gate::Id { .. } => {}
        g @ (Gate::X { .. } | Gate::Sx { .. } | Gate::Rz { .. } | Gate::Cx { .. }) => out.push(g),
        Gate::H { q } => {
            out.push(Gate::Rz { q, angle: FRAC_PI_2 });
            out.push(Gate::Sx { q });
            out.push(Gate::Rz { q, angle: FRAC_PI_2 });
        }
        Gate::Cp { c, t, angle } => {
            out.push(Gate::Rz { q: c, angle: angle / 2.0 });
            out.push(Gate::Cx { c, t });
            out.push(Gate::Rz { q: t, angle: -angle / 2.0 });
            out.push(Gate::Cx { c, t });
            out.push(Gate::Rz { q: t, angle: angle / 2.0 });
        }
        Gate::Ccp { c0, c1, t, angle } => {
            emit_basis(&Gate::Cp { c: c1, t, angle: angle / 2.0 }, out);
            out.push(Gate::Cx { c: c0, t: c1 });
            emit_basis(&Gate::Cp { c: c1, t, angle: -angle / 2.0 }, out);
            out.push(Gate::Cx { c: c0, t: c1 });
            emit_basis(&Gate::Cp { c: c0, t, angle: angle / 2.0 }, out);
        }
        Gate::Ch { c, t } => {
            emit_ry(-FRAC_PI_4, t, out);
            emit_basis(&Gate::Cp { c, t, angle: PI }, out);
            emit_ry(FRAC_PI_4, t, out);
        }
    }
}

/// RY(theta) in the ZSXZSXZ Euler form: RZ(0) * SX * RZ(pi - theta) * SX * RZ(-pi)
/// up to a global phase (the trailing zero rotation is omitted).
fn emit_ry(theta: f64, q: usize, out: &mut Vec<Gate>) {
    out.push(Gate::Rz { q, angle: -std::f64::consts::PI });
    out.push(Gate::Sx { q });
    out.push(Gate::Rz { q, angle: normalize_angle(std::f64::consts::PI - theta) });
    out.push(Gate::Sx { q });
}

fn parse_gate(line: &str) -> Result<Gate> {
    let bad = |why: &str| Error::Parse(format!("{why}: `{line}`"));
    let (head, angle) = match line.split_once(';') {
        Some((h, a)) => {
            let angle: f64 = a.trim().parse().map_err(|_| bad("bad angle"))?;
            (h, Some(angle))
        }
        None => (line, None),
    };
    let (kind, qubits) = head.trim().split_once(char::is_whitespace).ok_or_else(|| bad("missing qubits"))?;
    let qs: Vec<usize> = qubits
        .split(',')
        .map(|q| q.trim().parse::<usize>().map_err(|_| bad("bad qubit index")))
        .collect::<Result<_>>()?;
    let arity_err = || bad("wrong qubit count");
    let angle_of = || angle.ok_or_else(|| bad("missing angle"));
    let gate = match kind.to_ascii_uppercase().as_str() {
        "ID" => Gate::Id { q: *qs.first().ok_or_else(arity_err)? },
        "X" => Gate::X { q: *qs.first().ok_or_else(arity_err)? },
        "SX" => Gate::Sx { q: *qs.first().ok_or_else(arity_err)? },
        "H" => Gate::H { q: *qs.first().ok_or_else(arity_err)? },
        "RZ" => Gate::Rz { q: *qs.first().ok_or_else(arity_err)?, angle: angle_of()? },
        "CX" if qs.len() == 2 => Gate::Cx { c: qs[0], t: qs[1] },
        "CP" if qs.len() == 2 => Gate::Cp { c: qs[0], t: qs[1], angle: angle_of()? },
        "CH" if qs.len() == 2 => Gate::Ch { c: qs[0], t: qs[1] },
        "CCP" if qs.len() == 3 => Gate::Ccp { c0: qs[0], c1: qs[1], t: qs[2], angle: angle_of()? },
        "CX" | "CP" | "CH" | "CCP" => return Err(arity_err()),
        _ => return Err(bad("unknown gate kind")),
    };
    if matches!(gate, Gate::Id { .. } | Gate::X { .. } | Gate::Sx { .. } | Gate::H { .. }) && qs.len() != 1 {
        return Err(arity_err());
    }
    if matches!(gate, Gate::Rz { .. }) && qs.len() != 1 {
        return Err(arity_err());
    }
    Ok(gate)
}
