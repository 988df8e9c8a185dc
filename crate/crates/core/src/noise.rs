//! Depolarizing gate noise realized as stochastic Pauli injection per
//! trajectory, plus an exact density-matrix channel oracle for small widths.
//!
//! The channel after a noisy k-qubit gate is
//! `rho -> (1 - p) rho + p I / 2^k` on the gate's qubits. Per trajectory this
//! is realized by emitting, with probability `p (4^k - 1) / 4^k`, a uniformly
//! random non-identity k-qubit Pauli after the gate. Errors follow every
//! non-Id 1-qubit basis gate (p = p1) and every CX (p = p2); Id is noiseless
//! and RZ can be exempted for hardware that implements it virtually.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{embed_gate, CMatrix};
use crate::seeding::{rng_from, TAG_SHOT};
use crate::sim::{self, kernels, CountsMap, Statevector};

/// Depolarizing parameters: `p1` after 1-qubit basis gates, `p2` after CX.
/// All other error sources are identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    /// Whether RZ counts as a physical gate that incurs 1q noise.
    #[serde(default = "default_rz_noisy")]
    pub rz_noisy: bool,
}

fn default_rz_noisy() -> bool {
    true
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel { p1: 0.0, p2: 0.0, rz_noisy: true };

    pub fn depolarizing(p1: f64, p2: f64) -> Self {
        NoiseModel { p1, p2, rz_noisy: true }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name}: rate {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 <= 0.0 && self.p2 <= 0.0
    }

    /// Channel parameter and arity for a basis gate; `None` for noiseless
    /// sites (Id, exempted RZ, or a zero rate).
    pub fn site(&self, gate: &Gate) -> Result<Option<(usize, f64)>> {
        let site = match gate {
            Gate::Id { .. } => None,
            Gate::Rz { .. } if !self.rz_noisy => None,
            Gate::X { .. } | Gate::Sx { .. } | Gate::Rz { .. } => Some((1, self.p1)),
            Gate::Cx { .. } => Some((2, self.p2)),
            other => return Err(Error::NonBasisGate { kind: other.name() }),
        };
        Ok(site.filter(|&(_, p)| p > 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A sampled non-identity Pauli fault on the qubits of the gate it follows.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliError {
    pub terms: Vec<(usize, Pauli)>,
}

/// Samples the optional Pauli fault that follows `gate`. Zero-probability
/// sites consume no randomness, so noiseless runs draw only the measurement.
pub fn maybe_sample_error<R: Rng>(gate: &Gate, model: &NoiseModel, rng: &mut R) -> Result<Option<PauliError>> {
    let Some((k, p)) = model.site(gate)? else {
        return Ok(None);
    };
    Ok(sample_site(gate, k, p, rng))
}

fn sample_site<R: Rng>(gate: &Gate, k: usize, p: f64, rng: &mut R) -> Option<PauliError> {
    let cells = 4u32.pow(k as u32);
    let emit = p * f64::from(cells - 1) / f64::from(cells);
    if rng.gen::<f64>() >= emit {
        return None;
    }
    let idx = rng.gen_range(1..cells);
    Some(decode_pauli(gate, k, idx))
}

fn decode_pauli(gate: &Gate, k: usize, idx: u32) -> PauliError {
    let qs = gate.qubits();
    decode_pauli_on(&qs.as_slice()[..k], idx)
}

/// Decodes a nonzero Pauli index (base-4 digits, first qubit most
/// significant) into per-qubit labels, dropping identities.
pub(crate) fn decode_pauli_on(qubits: &[usize], idx: u32) -> PauliError {
    let k = qubits.len();
    let terms = qubits
        .iter()
        .enumerate()
        .map(|(j, &q)| {
            let code = (idx >> (2 * (k - 1 - j))) & 3;
            let pauli = match code {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            (q, pauli)
        })
        .filter(|&(_, p)| p != Pauli::I)
        .collect();
    PauliError { terms }
}

/// Applies a Pauli fault to the state.
pub fn apply_pauli(state: &mut Statevector, error: &PauliError) -> Result<()> {
    for &(q, p) in &error.terms {
        if q >= state.width() {
            return Err(Error::QubitOutOfRange { index: q, width: state.width() });
        }
        let amps = state.amplitudes_mut();
        match p {
            Pauli::I => {}
            Pauli::X => kernels::x(amps, q),
            Pauli::Y => kernels::pauli_y(amps, q),
            Pauli::Z => kernels::pauli_z(amps, q),
        }
    }
    Ok(())
}

pub(crate) fn run_trajectory_index<R: Rng>(
    circuit: &Circuit,
    init: &Statevector,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<u64> {
    if circuit.width() != init.width() {
        return Err(Error::WidthMismatch { circuit: circuit.width(), state: init.width() });
    }
    let mut state = init.clone();
    for gate in circuit.gates() {
        sim::apply_gate(&mut state, gate)?;
        if let Some(err) = maybe_sample_error(gate, model, rng)? {
            apply_pauli(&mut state, &err)?;
        }
    }
    sim::sample_index(&state, rng)
}

/// One noisy execution of a basis-decomposed circuit ending in a single
/// measurement sample, formatted over the circuit's registers.
pub fn run_trajectory<R: Rng>(
    circuit: &Circuit,
    init: &Statevector,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<String> {
    Ok(circuit.format_outcome(run_trajectory_index(circuit, init, model, rng)?))
}

/// Runs `shots` independent trajectories. Shot i draws from a generator
/// seeded by (seed, TAG_SHOT, i), so the tallies are independent of execution
/// order and thread count.
pub fn simulate_shots(
    circuit: &Circuit,
    init: &Statevector,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<CountsMap> {
    if shots == 0 {
        return Err(Error::EmptyCounts);
    }
    // Validate once up front so worker threads cannot fail.
    if circuit.width() != init.width() {
        return Err(Error::WidthMismatch { circuit: circuit.width(), state: init.width() });
    }
    for g in circuit.gates() {
        model.site(g)?;
    }
    if init.norm_sqr() <= 0.0 {
        return Err(Error::ZeroNormState);
    }
    let indices: Vec<u64> = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(&[seed, TAG_SHOT, i]);
            run_trajectory_index(circuit, init, model, &mut rng).expect("validated upfront")
        })
        .collect();
    let mut counts = CountsMap::new();
    for idx in indices {
        *counts.entry(circuit.format_outcome(idx)).or_insert(0) += 1;
    }
    Ok(counts)
}

const DENSITY_MAX_WIDTH: usize = 6;

/// Exact channel evolution `rho -> sum_K K rho K^dag` with depolarizing Kraus
/// terms after each noisy gate; returns the computational-basis diagonal.
/// Only for small widths; this is the validation oracle for the trajectory
/// sampler.
pub fn density_matrix_oracle(circuit: &Circuit, init: &Statevector, model: &NoiseModel) -> Result<Vec<f64>> {
    let width = circuit.width();
    if width > DENSITY_MAX_WIDTH {
        return Err(Error::WidthTooLarge { width, max: DENSITY_MAX_WIDTH });
    }
    if width != init.width() {
        return Err(Error::WidthMismatch { circuit: width, state: init.width() });
    }
    let dim = 1usize << width;
    // rho = |init><init|
    let mut rho = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            rho.set(r, c, init.amplitudes()[r] * init.amplitudes()[c].conj());
        }
    }
    for gate in circuit.gates() {
        gate.validate(width)?;
        let u = embed_gate(gate, width);
        rho = u.matmul(&rho).matmul(&u.dagger());
        if let Some((k, p)) = model.site(gate)? {
            rho = depolarize(&rho, gate, k, p, width);
        }
    }
    Ok(rho.diagonal().iter().map(|d| d.re).collect())
}

/// `(1 - p) rho + (p / 4^k) sum_P P rho P^dag` over all 4^k Paulis on the
/// gate's qubits.
fn depolarize(rho: &CMatrix, gate: &Gate, k: usize, p: f64, width: usize) -> CMatrix {
    let dim = 1usize << width;
    let cells = 4u32.pow(k as u32);
    let weight = p / f64::from(cells);
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = rho.get(r, c);
            out.set(r, c, v * (1.0 - p) + v * weight); // identity Pauli term
        }
    }
    for idx in 1..cells {
        let err = decode_pauli(gate, k, idx);
        for r in 0..dim {
            let (sr, fr) = pauli_map(&err, r as u64);
            for c in 0..dim {
                let (sc, fc) = pauli_map(&err, c as u64);
                out.add_assign(sr as usize, sc as usize, fr * fc.conj() * rho.get(r, c) * weight);
            }
        }
    }
    out
}

/// Action of a Pauli string on a basis index: `P|b> = f |b'>`.
fn pauli_map(error: &PauliError, index: u64) -> (u64, Complex64) {
    let mut idx = index;
    let mut factor = Complex64::new(1.0, 0.0);
    for &(q, p) in &error.terms {
        let bit = idx >> q & 1;
        match p {
            Pauli::I => {}
            Pauli::X => idx ^= 1 << q,
            Pauli::Y => {
                factor *= if bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
                idx ^= 1 << q;
            }
            Pauli::Z => {
                if bit == 1 {
                    factor = -factor;
                }
            }
        }
    }
    (idx, factor)
}

/// Total variation distance between two probability vectors.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{build_qfa, encode_qinteger, DepthSpec, QInteger};
    use crate::sim::{run_noiseless, sample_index};

    fn h_circuit() -> Circuit {
        let mut c = Circuit::new(1);
        c.push(Gate::H { q: 0 }).unwrap();
        c.decompose_to_basis()
    }

    #[test]
    fn zero_rate_never_emits_and_draws_nothing() {
        let model = NoiseModel::depolarizing(0.0, 0.0);
        let gate = Gate::X { q: 0 };
        let mut rng = rng_from(&[1]);
        for _ in 0..100 {
            assert!(maybe_sample_error(&gate, &model, &mut rng).unwrap().is_none());
        }
        // No randomness was consumed.
        let mut fresh = rng_from(&[1]);
        assert_eq!(rng.gen::<u64>(), fresh.gen::<u64>());
    }

    #[test]
    fn fully_depolarizing_1q_rates() {
        // p1 = 1: X, Y, Z each with probability 1/4, none with probability 1/4.
        let model = NoiseModel::depolarizing(1.0, 0.0);
        let gate = Gate::Sx { q: 0 };
        let mut rng = rng_from(&[2]);
        let draws = 1_000_000u64;
        let mut tallies = [0u64; 4];
        for _ in 0..draws {
            match maybe_sample_error(&gate, &model, &mut rng).unwrap() {
                None => tallies[0] += 1,
                Some(e) => match e.terms[0].1 {
                    Pauli::X => tallies[1] += 1,
                    Pauli::Y => tallies[2] += 1,
                    Pauli::Z => tallies[3] += 1,
                    Pauli::I => unreachable!(),
                },
            }
        }
        // 5 sigma with sigma ~ sqrt(n p (1-p)) ~ 433.
        for t in tallies {
            assert!((t as f64 - 250_000.0).abs() < 2165.0, "tallies {tallies:?}");
        }
    }

    #[test]
    fn two_qubit_emission_probability() {
        // k = 2, p2 = 0.01: emission probability 0.01 * 15/16 = 0.009375.
        let model = NoiseModel::depolarizing(0.0, 0.01);
        let gate = Gate::Cx { c: 0, t: 1 };
        let mut rng = rng_from(&[3]);
        let draws = 1_000_000u64;
        let mut emitted = 0u64;
        for _ in 0..draws {
            if maybe_sample_error(&gate, &model, &mut rng).unwrap().is_some() {
                emitted += 1;
            }
        }
        let expect = 9375.0;
        let sigma = (draws as f64 * 0.009375 * (1.0 - 0.009375)).sqrt(); // ~96
        assert!((emitted as f64 - expect).abs() < 5.0 * sigma, "emitted {emitted}");
    }

    #[test]
    fn rz_exemption_flag() {
        let noisy = NoiseModel::depolarizing(0.5, 0.0);
        let mut virt = noisy;
        virt.rz_noisy = false;
        let rz = Gate::Rz { q: 0, angle: 1.0 };
        assert_eq!(noisy.site(&rz).unwrap(), Some((1, 0.5)));
        assert_eq!(virt.site(&rz).unwrap(), None);
        assert_eq!(virt.site(&Gate::Sx { q: 0 }).unwrap(), Some((1, 0.5)));
        assert!(noisy.site(&Gate::H { q: 0 }).is_err());
        assert_eq!(noisy.site(&Gate::Id { q: 0 }).unwrap(), None);
    }

    #[test]
    fn zero_model_trajectory_equals_noiseless_sample() {
        let circ = build_qfa(2, true, DepthSpec::Full).unwrap().decompose_to_basis();
        let mut init = Statevector::zero(4);
        encode_qinteger(&mut init, 0..2, &QInteger::basis(2, 1).unwrap()).unwrap();
        encode_qinteger(&mut init, 2..4, &QInteger::uniform(2, &[0, 2]).unwrap()).unwrap();
        let final_state = run_noiseless(&circ, &init).unwrap();
        for shot in 0..32u64 {
            let mut a = rng_from(&[9, TAG_SHOT, shot]);
            let mut b = rng_from(&[9, TAG_SHOT, shot]);
            let traj = run_trajectory_index(&circ, &init, &NoiseModel::NOISELESS, &mut a).unwrap();
            let direct = sample_index(&final_state, &mut b).unwrap();
            assert_eq!(traj, direct);
        }
    }

    #[test]
    fn forced_error_path() {
        // H |0>, a deterministic Z fault, then H again: the outcome flips to
        // |1> with certainty, unlike the fault-free |0>.
        let mut circ = Circuit::new(1);
        circ.push(Gate::H { q: 0 }).unwrap();
        let circ2 = circ.clone();
        let mut state = run_noiseless(&circ, &Statevector::zero(1)).unwrap();
        apply_pauli(&mut state, &PauliError { terms: vec![(0, Pauli::Z)] }).unwrap();
        let out = run_noiseless(&circ2, &state).unwrap();
        assert!((out.probability(1) - 1.0).abs() < 1e-12);

        // X after H leaves H|0> invariant; check the state directly.
        let mut state = run_noiseless(&circ, &Statevector::zero(1)).unwrap();
        apply_pauli(&mut state, &PauliError { terms: vec![(0, Pauli::X)] }).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0].re - s).abs() < 1e-12);
        assert!((state.amplitudes()[1].re - s).abs() < 1e-12);
    }

    #[test]
    fn simulate_shots_zero_noise_matches_per_shot_sampling() {
        let circ = build_qfa(2, true, DepthSpec::Full).unwrap().decompose_to_basis();
        let mut init = Statevector::zero(4);
        encode_qinteger(&mut init, 0..2, &QInteger::basis(2, 3).unwrap()).unwrap();
        encode_qinteger(&mut init, 2..4, &QInteger::uniform(2, &[0, 1]).unwrap()).unwrap();
        let counts = simulate_shots(&circ, &init, &NoiseModel::NOISELESS, 256, 5).unwrap();

        let final_state = run_noiseless(&circ, &init).unwrap();
        let mut want = CountsMap::new();
        for i in 0..256u64 {
            let mut rng = rng_from(&[5, TAG_SHOT, i]);
            let idx = sample_index(&final_state, &mut rng).unwrap();
            *want.entry(circ.format_outcome(idx)).or_insert(0) += 1;
        }
        assert_eq!(counts, want);
        assert_eq!(counts.values().sum::<u64>(), 256);
    }

    #[test]
    fn simulate_shots_is_thread_count_invariant() {
        let circ = h_circuit();
        let init = Statevector::zero(1);
        let model = NoiseModel::depolarizing(0.3, 0.0);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| simulate_shots(&circ, &init, &model, 2000, 11).unwrap());
        let b = quad.install(|| simulate_shots(&circ, &init, &model, 2000, 11).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn simulate_shots_rejects_non_basis_circuits() {
        let mut circ = Circuit::new(2);
        circ.push(Gate::Cp { c: 0, t: 1, angle: 1.0 }).unwrap();
        let err = simulate_shots(&circ, &Statevector::zero(2), &NoiseModel::depolarizing(0.1, 0.1), 8, 0);
        assert!(matches!(err, Err(Error::NonBasisGate { .. })));
    }

    #[test]
    fn oracle_zero_noise_is_noiseless_distribution() {
        let circ = build_qfa(2, true, DepthSpec::Full).unwrap().decompose_to_basis();
        let mut init = Statevector::zero(4);
        encode_qinteger(&mut init, 0..2, &QInteger::basis(2, 2).unwrap()).unwrap();
        encode_qinteger(&mut init, 2..4, &QInteger::uniform(2, &[1, 3]).unwrap()).unwrap();
        let diag = density_matrix_oracle(&circ, &init, &NoiseModel::NOISELESS).unwrap();
        let want = run_noiseless(&circ, &init).unwrap().probabilities();
        assert!(total_variation(&diag, &want) < 1e-12);
    }

    #[test]
    fn oracle_fully_depolarized_h_is_uniform() {
        let diag = density_matrix_oracle(&h_circuit(), &Statevector::zero(1), &NoiseModel::depolarizing(1.0, 0.0)).unwrap();
        // Every basis gate of the decomposed H fully depolarizes the qubit.
        assert!((diag[0] - 0.5).abs() < 1e-12);
        assert!((diag[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_large_widths() {
        let circ = Circuit::new(7);
        let init = Statevector::zero(7);
        assert!(matches!(
            density_matrix_oracle(&circ, &init, &NoiseModel::NOISELESS),
            Err(Error::WidthTooLarge { width: 7, max: 6 })
        ));
    }

    #[test]
    fn trajectories_converge_to_the_oracle() {
        // 2-qubit circuit {H(0), CX(0,1)} with p2 = 0.2: the empirical
        // distribution over 1e5 trajectories stays within TV 0.01 of the
        // exact channel evolution.
        let mut circ = Circuit::new(2);
        circ.push(Gate::H { q: 0 }).unwrap();
        circ.push(Gate::Cx { c: 0, t: 1 }).unwrap();
        let circ = circ.decompose_to_basis();
        let init = Statevector::zero(2);
        let model = NoiseModel::depolarizing(0.0, 0.2);

        let exact = density_matrix_oracle(&circ, &init, &model).unwrap();
        let shots = 100_000u64;
        let counts = simulate_shots(&circ, &init, &model, shots, 13).unwrap();
        let mut empirical = vec![0.0; 4];
        for (bits, c) in &counts {
            let idx = usize::from_str_radix(bits, 2).unwrap();
            empirical[idx] = *c as f64 / shots as f64;
        }
        let tv = total_variation(&exact, &empirical);
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn qfa_under_heavy_2q_noise_is_no_longer_unanimous() {
        let circ = build_qfa(2, true, DepthSpec::Full).unwrap().decompose_to_basis();
        let mut init = Statevector::zero(4);
        encode_qinteger(&mut init, 0..2, &QInteger::basis(2, 1).unwrap()).unwrap();
        encode_qinteger(&mut init, 2..4, &QInteger::basis(2, 1).unwrap()).unwrap();
        let model = NoiseModel::depolarizing(0.0, 0.5);
        let counts = simulate_shots(&circ, &init, &model, 2048, 17).unwrap();
        assert!(counts.len() > 1);
        // And it agrees with the density oracle at this width.
        let exact = density_matrix_oracle(&circ, &init, &model).unwrap();
        let mut empirical = vec![0.0; 16];
        for (bits, c) in &counts {
            let cleaned: String = bits.chars().filter(|&ch| ch != '|').collect();
            empirical[usize::from_str_radix(&cleaned, 2).unwrap()] = *c as f64 / 2048.0;
        }
        assert!(total_variation(&exact, &empirical) < 0.06);
    }

    #[test]
    fn pauli_map_signs() {
        let y = PauliError { terms: vec![(0, Pauli::Y)] };
        assert_eq!(pauli_map(&y, 0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(pauli_map(&y, 1), (0, Complex64::new(0.0, -1.0)));
        let z = PauliError { terms: vec![(1, Pauli::Z)] };
        assert_eq!(pauli_map(&z, 2), (2, Complex64::new(-1.0, 0.0)));
    }
}
