//! Dense statevector simulation: gate kernels, noiseless execution, and
//! terminal measurement sampling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{format_bits, Circuit, Gate};
use crate::error::{Error, Result};

/// Observed shot tallies keyed by formatted bitstring.
pub type CountsMap = BTreeMap<String, u64>;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex amplitude vector over `width` qubits. Qubit `q` corresponds
/// to bit `q` of the basis-state index (qubit 0 is the least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(width: usize) -> Self {
        let mut amps = vec![C_ZERO; 1usize << width];
        amps[0] = C_ONE;
        Statevector { width, amps }
    }

    /// A computational basis state.
    pub fn basis(width: usize, index: u64) -> Result<Self> {
        if index >> width != 0 {
            return Err(Error::QubitOutOfRange { index: index as usize, width });
        }
        let mut amps = vec![C_ZERO; 1usize << width];
        amps[index as usize] = C_ONE;
        Ok(Statevector { width, amps })
    }

    /// Wraps an amplitude vector; the norm must be 1 within 1e-9.
    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << width {
            return Err(Error::WidthMismatch { circuit: width, state: amps.len().trailing_zeros() as usize });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidQInteger { reason: format!("state norm {norm} is not 1") });
        }
        Ok(Statevector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: u64) -> f64 {
        self.amps[index as usize].norm_sqr()
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Applies one gate in place. Composite kinds (H, CP, CH, CCP) are supported
/// alongside the basis set so oracle tests can run undecomposed circuits.
pub fn apply_gate(state: &mut Statevector, gate: &Gate) -> Result<()> {
    gate.validate(state.width)?;
    let amps = &mut state.amps;
    match *gate {
        Gate::Id { .. } => {}
        Gate::X { q } => kernels::x(amps, q),
        Gate::Sx { q } => kernels::sx(amps, q),
        Gate::Rz { q, angle } => kernels::rz(amps, q, angle),
        Gate::H { q } => kernels::h(amps, q),
        Gate::Cx { c, t } => kernels::cx(amps, c, t),
        Gate::Cp { c, t, angle } => kernels::cp(amps, c, t, angle),
        Gate::Ch { c, t } => kernels::ch(amps, c, t),
        Gate::Ccp { c0, c1, t, angle } => kernels::ccp(amps, c0, c1, t, angle),
    }
    Ok(())
}

/// Runs a circuit without noise on a copy of `init`.
pub fn run_noiseless(circuit: &Circuit, init: &Statevector) -> Result<Statevector> {
    if circuit.width() != init.width {
        return Err(Error::WidthMismatch { circuit: circuit.width(), state: init.width });
    }
    let mut state = init.clone();
    for g in circuit.gates() {
        apply_gate(&mut state, g)?;
    }
    Ok(state)
}

/// Draws one basis-state index by inverse CDF over |amplitude|^2. `u` must be
/// uniform in [0, 1); the cumulative sum is taken in index order.
pub(crate) fn draw_index(amps: &[Complex64], u: f64) -> Result<u64> {
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroNormState);
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0usize;
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if target < acc {
            return Ok(i as u64);
        }
    }
    Ok(last_nonzero as u64)
}

/// Samples a single measurement outcome.
pub fn sample_index<R: Rng>(state: &Statevector, rng: &mut R) -> Result<u64> {
    draw_index(&state.amps, rng.gen::<f64>())
}

/// Draws `shots` i.i.d. outcomes from one generator.
pub fn sample_indices<R: Rng>(state: &Statevector, shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if state.norm_sqr() <= 0.0 {
        return Err(Error::ZeroNormState);
    }
    let sampler = IndexSampler::new(&state.amps);
    Ok((0..shots).map(|_| sampler.draw(rng.gen::<f64>())).collect())
}

/// Tabulates `shots` samples as plain (unlabeled) bitstrings.
pub fn sample_counts<R: Rng>(state: &Statevector, shots: u64, rng: &mut R) -> Result<CountsMap> {
    let mut counts = CountsMap::new();
    for idx in sample_indices(state, shots, rng)? {
        *counts.entry(format_bits(idx, state.width)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Precomputed inverse-CDF sampler. The prefix sums use the same index-order
/// fold as [`draw_index`], so both paths map a given `u` to the same outcome.
pub(crate) struct IndexSampler {
    cdf: Vec<f64>,
    last_nonzero: usize,
}

impl IndexSampler {
    pub fn new(amps: &[Complex64]) -> Self {
        let mut acc = 0.0;
        let mut last_nonzero = 0usize;
        let cdf = amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if p > 0.0 {
                    last_nonzero = i;
                }
                acc += p;
                acc
            })
            .collect();
        IndexSampler { cdf, last_nonzero }
    }

    pub fn draw(&self, u: f64) -> u64 {
        let total = *self.cdf.last().expect("non-empty state");
        let target = u * total;
        let i = self.cdf.partition_point(|&c| c <= target);
        if i >= self.cdf.len() {
            self.last_nonzero as u64
        } else {
            i as u64
        }
    }
}

/// In-place gate kernels over raw amplitude slices. One-qubit kernels touch
/// amplitude pairs at stride 2^target; controlled kernels touch only the
/// subspace where their controls are set.
pub(crate) mod kernels {
    use super::Complex64;

    /// Re-inserts a zero bit at `pos`, spreading higher bits upward.
    #[inline]
    fn insert_zero(i: usize, pos: usize) -> usize {
        ((i >> pos) << (pos + 1)) | (i & ((1 << pos) - 1))
    }

    #[inline]
    pub fn one_qubit(amps: &mut [Complex64], t: usize, m: [[Complex64; 2]; 2]) {
        let step = 1usize << t;
        let mut base = 0;
        while base < amps.len() {
            for off in 0..step {
                let i = base + off;
                let j = i + step;
                let a = amps[i];
                let b = amps[j];
                amps[i] = m[0][0] * a + m[0][1] * b;
                amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += step << 1;
        }
    }

    pub fn x(amps: &mut [Complex64], t: usize) {
        let step = 1usize << t;
        let mut base = 0;
        while base < amps.len() {
            for off in 0..step {
                amps.swap(base + off, base + off + step);
            }
            base += step << 1;
        }
    }

    pub fn sx(amps: &mut [Complex64], t: usize) {
        let a = Complex64::new(0.5, 0.5);
        let b = Complex64::new(0.5, -0.5);
        one_qubit(amps, t, [[a, b], [b, a]]);
    }

    pub fn h(amps: &mut [Complex64], t: usize) {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        one_qubit(amps, t, [[s, s], [s, -s]]);
    }

    pub fn rz(amps: &mut [Complex64], t: usize, angle: f64) {
        let p0 = Complex64::from_polar(1.0, -0.5 * angle);
        let p1 = Complex64::from_polar(1.0, 0.5 * angle);
        let step = 1usize << t;
        let mut base = 0;
        while base < amps.len() {
            for a in &mut amps[base..base + step] {
                *a *= p0;
            }
            for a in &mut amps[base + step..base + (step << 1)] {
                *a *= p1;
            }
            base += step << 1;
        }
    }

    pub fn pauli_y(amps: &mut [Complex64], t: usize) {
        let i = Complex64::new(0.0, 1.0);
        one_qubit(amps, t, [[Complex64::new(0.0, 0.0), -i], [i, Complex64::new(0.0, 0.0)]]);
    }

    pub fn pauli_z(amps: &mut [Complex64], t: usize) {
        let step = 1usize << t;
        let mut base = 0;
        while base < amps.len() {
            for a in &mut amps[base + step..base + (step << 1)] {
                *a = -*a;
            }
            base += step << 1;
        }
    }

    pub fn cx(amps: &mut [Complex64], c: usize, t: usize) {
        let (lo, hi) = (c.min(t), c.max(t));
        let cbit = 1usize << c;
        let tbit = 1usize << t;
        for i in 0..amps.len() >> 2 {
            let idx = insert_zero(insert_zero(i, lo), hi) | cbit;
            amps.swap(idx, idx | tbit);
        }
    }

    pub fn cp(amps: &mut [Complex64], c: usize, t: usize, angle: f64) {
        let phase = Complex64::from_polar(1.0, angle);
        let (lo, hi) = (c.min(t), c.max(t));
        let set = (1usize << c) | (1usize << t);
        for i in 0..amps.len() >> 2 {
            let idx = insert_zero(insert_zero(i, lo), hi) | set;
            amps[idx] *= phase;
        }
    }

    pub fn ch(amps: &mut [Complex64], c: usize, t: usize) {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (lo, hi) = (c.min(t), c.max(t));
        let cbit = 1usize << c;
        let tbit = 1usize << t;
        for i in 0..amps.len() >> 2 {
            let idx = insert_zero(insert_zero(i, lo), hi) | cbit;
            let a = amps[idx];
            let b = amps[idx | tbit];
            amps[idx] = s * (a + b);
            amps[idx | tbit] = s * (a - b);
        }
    }

    pub fn ccp(amps: &mut [Complex64], c0: usize, c1: usize, t: usize, angle: f64) {
        let phase = Complex64::from_polar(1.0, angle);
        let mut qs = [c0, c1, t];
        qs.sort_unstable();
        let set = (1usize << c0) | (1usize << c1) | (1usize << t);
        for i in 0..amps.len() >> 3 {
            let idx = insert_zero(insert_zero(insert_zero(i, qs[0]), qs[1]), qs[2]) | set;
            amps[idx] *= phase;
        }
    }
}
