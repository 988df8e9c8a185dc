//! Builders for the QFT/AQFT, the Fourier-domain addition step, the quantum
//! adder (QFA) and multiplier (QFM), plus qinteger encoding and the classical
//! expected-output oracle.
//!
//! Bit order: qubit 0 of a register is its least significant bit. The QFT is
//! emitted without a terminal swap layer; the resulting bit reversal is part
//! of the declared index convention and cancels inside QFA/QFM, where every
//! forward transform is undone by its exact inverse.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::{format_with_registers, mask, Circuit, Gate, Register};
use crate::error::{Error, Result};
use crate::sim::Statevector;

const MAX_WIDTH: usize = 63;

/// A width-n register value set: a superposition of two's-complement integers.
/// "Order-j" means j distinct values with nonzero amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct QInteger {
    width: usize,
    terms: Vec<(u64, Complex64)>,
}

impl QInteger {
    /// Validates distinct in-range values and unit norm (within 1e-9).
    pub fn new(width: usize, terms: Vec<(u64, Complex64)>) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidWidth { width });
        }
        let limit = 1u128 << width;
        if terms.is_empty() || terms.len() as u128 > limit {
            return Err(Error::InvalidQInteger { reason: format!("order {} outside 1..=2^{width}", terms.len()) });
        }
        for (i, &(v, _)) in terms.iter().enumerate() {
            if u128::from(v) >= limit {
                return Err(Error::InvalidQInteger { reason: format!("value {v} does not fit in {width} bits") });
            }
            if terms[i + 1..].iter().any(|&(w, _)| w == v) {
                return Err(Error::InvalidQInteger { reason: format!("duplicate value {v}") });
            }
        }
        let norm: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidQInteger { reason: format!("squared amplitudes sum to {norm}, not 1") });
        }
        Ok(QInteger { width, terms })
    }

    /// Order-1 qinteger holding a single value.
    pub fn basis(width: usize, value: u64) -> Result<Self> {
        QInteger::new(width, vec![(value, Complex64::new(1.0, 0.0))])
    }

    /// Equal-amplitude superposition of the given values.
    pub fn uniform(width: usize, values: &[u64]) -> Result<Self> {
        let amp = Complex64::new(1.0 / (values.len() as f64).sqrt(), 0.0);
        QInteger::new(width, values.iter().map(|&v| (v, amp)).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn values(&self) -> Vec<u64> {
        self.terms.iter().map(|&(v, _)| v).collect()
    }

    /// Same terms viewed as a wider register.
    pub fn widen(&self, width: usize) -> Result<Self> {
        if width < self.width {
            return Err(Error::InvalidQInteger { reason: format!("cannot narrow width {} to {width}", self.width) });
        }
        QInteger::new(width, self.terms.clone())
    }

    /// Two's-complement reading of a stored value.
    pub fn signed(width: usize, value: u64) -> i64 {
        if width < 64 && value >= 1u64 << (width - 1) {
            value as i64 - (1i64 << width)
        } else {
            value as i64
        }
    }

    /// Parses the literal syntax `width:val[@amp][,val[@amp]...]`. Amplitudes
    /// are either given for every value (and must be normalized) or omitted
    /// everywhere for an equal-amplitude superposition. Negative values are
    /// taken as two's complement.
    pub fn parse(literal: &str) -> Result<Self> {
        let bad = |why: String| Error::Parse(format!("{why} in qinteger literal `{literal}`"));
        let (w, rest) = literal.split_once(':').ok_or_else(|| bad("missing `width:`".into()))?;
        let width: usize = w.trim().parse().map_err(|_| bad(format!("bad width `{w}`")))?;
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidWidth { width });
        }
        let mut values = Vec::new();
        let mut amps = Vec::new();
        for part in rest.split(',') {
            let (v, a) = match part.split_once('@') {
                Some((v, a)) => {
                    let amp: f64 = a.trim().parse().map_err(|_| bad(format!("bad amplitude `{a}`")))?;
                    (v, Some(amp))
                }
                None => (part, None),
            };
            let v: i64 = v.trim().parse().map_err(|_| bad(format!("bad value `{v}`")))?;
            let lo = -(1i64 << (width - 1));
            let hi = 1i64 << width;
            if v < lo || v >= hi {
                return Err(bad(format!("value {v} outside [{lo}, {hi})")));
            }
            values.push(v.rem_euclid(hi) as u64);
            amps.push(a);
        }
        if amps.iter().all(Option::is_none) {
            QInteger::uniform(width, &values)
        } else if amps.iter().all(Option::is_some) {
            let terms = values
                .into_iter()
                .zip(amps)
                .map(|(v, a)| (v, Complex64::new(a.unwrap(), 0.0)))
                .collect();
            QInteger::new(width, terms)
        } else {
            Err(bad("amplitudes must be given for all values or none".into()))
        }
    }
}

impl fmt::Display for QInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.width)?;
        let uniform = {
            let a0 = self.terms[0].1;
            self.terms.iter().all(|&(_, a)| (a - a0).norm() < 1e-12 && a.im.abs() < 1e-12)
        };
        for (i, &(v, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if uniform {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}@{}", a.re)?;
            }
        }
        Ok(())
    }
}

/// AQFT approximation depth: each qubit keeps at most `d - 1` controlled
/// rotations (R_2..R_d). `Full` is equivalent to d = register width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthSpec {
    Full,
    Fixed(usize),
}

impl DepthSpec {
    /// Concrete depth for a register width; rejects d = 0 and clamps to the
    /// width (depth = width is gate-identical to the full QFT).
    pub fn effective(&self, width: usize) -> Result<usize> {
        match *self {
            DepthSpec::Full => Ok(width),
            DepthSpec::Fixed(0) => Err(Error::InvalidDepth),
            DepthSpec::Fixed(d) => Ok(d.min(width)),
        }
    }

    pub(crate) fn seed_word(&self) -> u64 {
        match *self {
            DepthSpec::Full => u64::MAX,
            DepthSpec::Fixed(d) => d as u64,
        }
    }
}

impl fmt::Display for DepthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthSpec::Full => write!(f, "full"),
            DepthSpec::Fixed(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for DepthSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("full") {
            Ok(DepthSpec::Full)
        } else {
            let d: usize = s.parse().map_err(|_| Error::Parse(format!("bad depth `{s}` (expected `full` or a positive integer)")))?;
            if d == 0 {
                return Err(Error::InvalidDepth);
            }
            Ok(DepthSpec::Fixed(d))
        }
    }
}

impl Serialize for DepthSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            DepthSpec::Full => serializer.serialize_str("full"),
            DepthSpec::Fixed(d) => serializer.serialize_u64(d as u64),
        }
    }
}

impl<'de> Deserialize<'de> for DepthSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = DepthSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "\"full\" or a positive integer")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<DepthSpec, E> {
                if v == 0 {
                    return Err(E::custom("depth must be at least 1"));
                }
                Ok(DepthSpec::Fixed(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<DepthSpec, E> {
                if v <= 0 {
                    return Err(E::custom("depth must be at least 1"));
                }
                Ok(DepthSpec::Fixed(v as usize))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<DepthSpec, E> {
                DepthSpec::from_str(v).map_err(|e| E::custom(e.to_string()))
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// An arithmetic operation with its register sizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    /// `|x>|y> -> |x>|(x + y) mod 2^m>` with m = n (modular) or n + 1.
    Add { n: usize, modular: bool },
    /// `|x>|y>|0> -> |x>|y>|x * y>` with an (n + m)-qubit product register.
    Multiply { n: usize, m: usize },
}

impl ArithOp {
    pub fn x_width(&self) -> usize {
        match *self {
            ArithOp::Add { n, .. } | ArithOp::Multiply { n, .. } => n,
        }
    }

    /// Width of the y operand's values.
    pub fn y_operand_width(&self) -> usize {
        match *self {
            ArithOp::Add { n, .. } => n,
            ArithOp::Multiply { m, .. } => m,
        }
    }

    /// Width of the register that receives the result.
    pub fn target_width(&self) -> usize {
        match *self {
            ArithOp::Add { n, modular } => n + usize::from(!modular),
            ArithOp::Multiply { n, m } => n + m,
        }
    }

    /// Width of the y register as laid out in the circuit.
    pub fn y_register_width(&self) -> usize {
        match *self {
            ArithOp::Add { .. } => self.target_width(),
            ArithOp::Multiply { m, .. } => m,
        }
    }

    pub fn total_width(&self) -> usize {
        match *self {
            ArithOp::Add { .. } => self.x_width() + self.y_register_width(),
            ArithOp::Multiply { n, m } => 2 * (n + m),
        }
    }

    /// Register layout shared by the circuit builders and the oracle.
    pub fn registers(&self) -> Vec<Register> {
        let n = self.x_width();
        let yw = self.y_register_width();
        let mut regs = vec![
            Register { name: "x".into(), range: 0..n },
            Register { name: "y".into(), range: n..n + yw },
        ];
        if let ArithOp::Multiply { .. } = self {
            regs.push(Register { name: "z".into(), range: n + yw..self.total_width() });
        }
        regs
    }

    pub fn validate(&self) -> Result<()> {
        let widths = match *self {
            ArithOp::Add { n, .. } => vec![n],
            ArithOp::Multiply { n, m } => vec![n, m],
        };
        for w in widths {
            if w == 0 || w > MAX_WIDTH {
                return Err(Error::InvalidWidth { width: w });
            }
        }
        if self.total_width() > MAX_WIDTH {
            return Err(Error::InvalidWidth { width: self.total_width() });
        }
        Ok(())
    }

    /// Builds the full circuit at the given approximation depth.
    pub fn build_circuit(&self, depth: DepthSpec) -> Result<Circuit> {
        match *self {
            ArithOp::Add { n, modular } => build_qfa(n, modular, depth),
            ArithOp::Multiply { n, m } => build_qfm(n, m, depth),
        }
    }

    /// Full-register measurement index anticipated for classical inputs.
    pub fn expected_index(&self, x: u64, y: u64) -> u64 {
        match *self {
            ArithOp::Add { n, .. } => {
                let m = self.target_width();
                let sum = (x + y) & mask(m);
                x | sum << n
            }
            ArithOp::Multiply { n, m } => x | y << n | (x * y) << (n + m),
        }
    }

    pub(crate) fn seed_words(&self) -> [u64; 4] {
        match *self {
            ArithOp::Add { n, modular } => [1, n as u64, u64::from(modular), 0],
            ArithOp::Multiply { n, m } => [2, n as u64, m as u64, 0],
        }
    }
}

/// Rotation angle of the R_l phase gate, 2*pi / 2^l.
fn rotation_angle(l: usize) -> f64 {
    std::f64::consts::TAU / (1u64 << l) as f64
}

fn h_gate(q: usize, control: Option<usize>) -> Gate {
    match control {
        None => Gate::H { q },
        Some(c) => Gate::Ch { c, t: q },
    }
}

fn phase_gate(c: usize, t: usize, angle: f64, control: Option<usize>) -> Gate {
    match control {
        None => Gate::Cp { c, t, angle },
        Some(outer) => Gate::Ccp { c0: outer, c1: c, t, angle },
    }
}

/// QFT gate sequence over the given qubits (index 0 = least significant bit).
/// Each qubit q, processed from most significant down, receives H followed by
/// the rotations R_2..R_min(q, d) controlled by successively less significant
/// qubits. `d` must already be clamped to the register width.
fn qft_gates(qubits: &[usize], d: usize, control: Option<usize>) -> Vec<Gate> {
    let mut gates = Vec::new();
    for t in (0..qubits.len()).rev() {
        gates.push(h_gate(qubits[t], control));
        for l in 2..=d.min(t + 1) {
            gates.push(phase_gate(qubits[t + 1 - l], qubits[t], rotation_angle(l), control));
        }
    }
    gates
}

/// Exact gate-by-gate reversal with negated rotation angles.
fn invert_gates(gates: Vec<Gate>) -> Vec<Gate> {
    gates
        .into_iter()
        .rev()
        .map(|g| match g {
            Gate::Cp { c, t, angle } => Gate::Cp { c, t, angle: -angle },
            Gate::Ccp { c0, c1, t, angle } => Gate::Ccp { c0, c1, t, angle: -angle },
            other => other, // H/CH are self-inverse
        })
        .collect()
}

/// Fourier-domain addition: phi_q picks up the rotation R_(q-j+1) from x_j for
/// every addend bit j <= min(q, n), multiplying |x>|k> by e^(i 2 pi x k / 2^m).
/// The addition step is always emitted at full depth.
fn add_step_gates(x: &[usize], target: &[usize], control: Option<usize>) -> Result<Vec<Gate>> {
    let n = x.len();
    let m = target.len();
    if m != n && m != n + 1 {
        return Err(Error::InvalidTargetWidth { n, m });
    }
    let mut gates = Vec::new();
    for q in (1..=m).rev() {
        for j in (1..=q.min(n)).rev() {
            gates.push(phase_gate(x[j - 1], target[q - 1], rotation_angle(q - j + 1), control));
        }
    }
    Ok(gates)
}

/// One QFA block (QFT, addition step, inverse QFT) over explicit qubit lists.
fn qfa_block_gates(x: &[usize], target: &[usize], control: Option<usize>, depth: DepthSpec) -> Result<Vec<Gate>> {
    let d = depth.effective(target.len())?;
    let mut gates = qft_gates(target, d, control);
    gates.extend(add_step_gates(x, target, control)?);
    gates.extend(invert_gates(qft_gates(target, d, control)));
    Ok(gates)
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::InvalidWidth { width });
    }
    Ok(())
}

/// QFT (or AQFT at the given depth) over `width` qubits.
pub fn build_qft(width: usize, depth: DepthSpec) -> Result<Circuit> {
    check_width(width)?;
    let d = depth.effective(width)?;
    let qubits: Vec<usize> = (0..width).collect();
    let mut circ = Circuit::new(width);
    circ.add_register("q", 0..width)?;
    for g in qft_gates(&qubits, d, None) {
        circ.push(g)?;
    }
    Ok(circ)
}

/// Inverse of [`build_qft`]: the reversed gate list with negated angles.
pub fn build_iqft(width: usize, depth: DepthSpec) -> Result<Circuit> {
    check_width(width)?;
    let d = depth.effective(width)?;
    let qubits: Vec<usize> = (0..width).collect();
    let mut circ = Circuit::new(width);
    circ.add_register("q", 0..width)?;
    for g in invert_gates(qft_gates(&qubits, d, None)) {
        circ.push(g)?;
    }
    Ok(circ)
}

/// The bare addition step on an (n + m)-qubit circuit: x in qubits [0, n),
/// the Fourier-transformed target in [n, n + m) with m = n or n + 1.
pub fn build_add_step(n: usize, m: usize) -> Result<Circuit> {
    check_width(n)?;
    check_width(n + m)?;
    let x: Vec<usize> = (0..n).collect();
    let target: Vec<usize> = (n..n + m).collect();
    let mut circ = Circuit::new(n + m);
    circ.add_register("x", 0..n)?;
    circ.add_register("y", n..n + m)?;
    for g in add_step_gates(&x, &target, None)? {
        circ.push(g)?;
    }
    Ok(circ)
}

/// Quantum Fourier adder: |x>|y> -> |x>|(x + y) mod 2^m> at full depth, with
/// m = n (modular) or n + 1 (non-modular). The AQFT depth applies to the QFT
/// and inverse QFT; the addition step is never approximated.
pub fn build_qfa(n: usize, modular: bool, depth: DepthSpec) -> Result<Circuit> {
    let op = ArithOp::Add { n, modular };
    op.validate()?;
    let m = op.target_width();
    let x: Vec<usize> = (0..n).collect();
    let y: Vec<usize> = (n..n + m).collect();
    let mut circ = Circuit::new(n + m);
    circ.add_register("x", 0..n)?;
    circ.add_register("y", n..n + m)?;
    for g in qfa_block_gates(&x, &y, None, depth)? {
        circ.push(g)?;
    }
    Ok(circ)
}

/// QFA with every gate controlled by one extra qubit (H -> CH, CP -> CCP);
/// the block acts as the identity when the control is |0>. The control index
/// must lie outside the operand registers [0, n + m).
pub fn build_cqfa(n: usize, m: usize, control: usize, depth: DepthSpec) -> Result<Circuit> {
    check_width(n)?;
    if control < n + m {
        return Err(Error::ControlOverlap { control, min: n + m });
    }
    check_width(control + 1)?;
    let x: Vec<usize> = (0..n).collect();
    let y: Vec<usize> = (n..n + m).collect();
    let mut circ = Circuit::new(control + 1);
    circ.add_register("x", 0..n)?;
    circ.add_register("y", n..n + m)?;
    circ.add_register("c", control..control + 1)?;
    for g in qfa_block_gates(&x, &y, Some(control), depth)? {
        circ.push(g)?;
    }
    Ok(circ)
}

/// Quantum Fourier multiplier: |x>|y>|0> -> |x>|y>|x * y> (unsigned). Step i
/// applies a controlled QFA, gated on x_i, that adds y into the product-window
/// z_i..z_(i+m) (width m + 1, clamped at the top of z), accumulating
/// x_i * 2^(i-1) * y for i = 1..n.
pub fn build_qfm(n: usize, m: usize, depth: DepthSpec) -> Result<Circuit> {
    let op = ArithOp::Multiply { n, m };
    op.validate()?;
    let width = op.total_width();
    let y: Vec<usize> = (n..n + m).collect();
    let z_start = n + m;
    let mut circ = Circuit::new(width);
    for r in op.registers() {
        circ.add_register(&r.name, r.range.clone())?;
    }
    for i in 1..=n {
        let control = i - 1;
        let start = z_start + i - 1;
        let len = (m + 1).min(width - start);
        let window: Vec<usize> = (start..start + len).collect();
        for g in qfa_block_gates(&y, &window, Some(control), depth)? {
            circ.push(g)?;
        }
    }
    Ok(circ)
}

/// Writes a qinteger's amplitudes directly into a register of the statevector
/// (no state-preparation circuit, hence no preparation noise). The register
/// must currently be |0...0> and unentangled with the rest of the state.
pub fn encode_qinteger(state: &mut Statevector, range: Range<usize>, q: &QInteger) -> Result<()> {
    let width = state.width();
    if range.end > width || range.is_empty() {
        return Err(Error::RegisterOverlap { name: format!("{range:?}") });
    }
    if range.end - range.start != q.width {
        return Err(Error::WidthMismatch { circuit: range.end - range.start, state: q.width });
    }
    let start = range.start;
    let w = q.width;
    let reg_mask = mask(w);
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if (idx as u64 >> start) & reg_mask != 0 && amp.norm_sqr() > 1e-24 {
            return Err(Error::RegisterNotZero);
        }
    }
    let old = state.amplitudes().to_vec();
    let amps = state.amplitudes_mut();
    amps.fill(Complex64::new(0.0, 0.0));
    for (idx, amp) in old.iter().enumerate() {
        if amp.norm_sqr() == 0.0 || (idx as u64 >> start) & reg_mask != 0 {
            continue;
        }
        for &(v, a) in &q.terms {
            amps[idx | (v as usize) << start] = amp * a;
        }
    }
    Ok(())
}

/// Classical cross-product oracle: every combination of operand values pushed
/// through the arithmetic, formatted over all measured registers (operand
/// registers are echoed alongside the result).
pub fn expected_outputs(op: &ArithOp, x: &QInteger, y: &QInteger) -> Result<BTreeSet<String>> {
    op.validate()?;
    if x.width() != op.x_width() {
        return Err(Error::WidthMismatch { circuit: op.x_width(), state: x.width() });
    }
    let yw = y.width();
    if yw != op.y_operand_width() && yw != op.y_register_width() {
        return Err(Error::WidthMismatch { circuit: op.y_register_width(), state: yw });
    }
    let regs = op.registers();
    let width = op.total_width();
    let mut out = BTreeSet::new();
    for &(xv, _) in x.terms() {
        for &(yv, _) in y.terms() {
            out.insert(format_with_registers(&regs, width, op.expected_index(xv, yv)));
        }
    }
    Ok(out)
}
