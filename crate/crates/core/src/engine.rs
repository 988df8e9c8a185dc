//! Fast trajectory execution for circuits whose operand registers stay in the
//! computational basis.
//!
//! In a basis-decomposed QFA the addend register only ever sees RZ rotations
//! and CX controls; in the QFM both multiplicand registers do. Those qubits
//! never leave the computational basis, so the engine tracks them as classical
//! bit labels (one per superposition branch) and keeps a dense statevector
//! only for the register being updated. Per-gate work drops from
//! O(2^width) to O(branches * 2^dense), which is what makes the
//! 200-instance x 2048-shot sweeps tractable. Pauli faults on label qubits
//! are exact label flips and phases, so trajectories remain exact.
//!
//! Label updates are injective, so branch labels stay pairwise distinct and
//! branches never interfere; the decomposition is exact, not approximate.

use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;

use crate::arith::QInteger;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::noise::{decode_pauli_on, NoiseModel, Pauli};
use crate::seeding::{rng_from, TAG_SHOT};
use crate::sim::{kernels, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// Classical bit at this position of the branch label.
    Label(u32),
    /// Bit at this position of the dense amplitude index.
    Dense(u32),
}

#[derive(Debug, Clone, Copy)]
enum EngineOp {
    DenseX { t: usize },
    DenseSx { t: usize },
    DenseRz { t: usize, p0: Complex64, p1: Complex64 },
    DenseCx { c: usize, t: usize },
    LabelX { mask: u64 },
    LabelRz { mask: u64, p0: Complex64, p1: Complex64 },
    LabelCx { c_mask: u64, t_mask: u64 },
    CxLabelDense { c_mask: u64, t: usize },
}

/// Noise class of a compiled op, mirroring [`NoiseModel::site`].
#[derive(Debug, Clone, Copy)]
enum SiteClass {
    OneQ { rz: bool },
    TwoQ,
}

/// A basis circuit compiled onto the label/dense split. Compile once per
/// (operation, depth) and share across instances and shots.
#[derive(Debug)]
pub struct CompiledCircuit {
    width: usize,
    role: Vec<Role>,
    label_qubits: Vec<usize>,
    dense_qubits: Vec<usize>,
    ops: Vec<EngineOp>,
    sites: Vec<SiteClass>,
    site_qubits: Vec<[usize; 2]>,
}

impl CompiledCircuit {
    /// Classifies qubits and lowers the gate list. `init_registers` are the
    /// ranges that will receive qintegers in [`SplitState::prepare`]; each is
    /// kept whole (entirely label or entirely dense).
    pub fn compile(circuit: &Circuit, init_registers: &[Range<usize>]) -> Result<Self> {
        let width = circuit.width();
        for g in circuit.gates() {
            if !g.is_basis() {
                return Err(Error::NonBasisGate { kind: g.name() });
            }
            g.validate(width)?;
        }
        for r in init_registers {
            if r.end > width || r.is_empty() {
                return Err(Error::RegisterOverlap { name: format!("{r:?}") });
            }
        }

        // A qubit must go dense if it ever leaves the computational basis:
        // SX targets seed the set, CX targets of dense controls follow, and
        // init registers are kept whole.
        let mut dense = vec![false; width];
        for g in circuit.gates() {
            if let Gate::Sx { q } = g {
                dense[*q] = true;
            }
        }
        loop {
            let mut changed = false;
            for g in circuit.gates() {
                if let Gate::Cx { c, t } = g {
                    if dense[*c] && !dense[*t] {
                        dense[*t] = true;
                        changed = true;
                    }
                }
            }
            for r in init_registers {
                if r.clone().any(|q| dense[q]) {
                    for q in r.clone() {
                        if !dense[q] {
                            dense[q] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut role = Vec::with_capacity(width);
        let mut label_qubits = Vec::new();
        let mut dense_qubits = Vec::new();
        for (q, &d) in dense.iter().enumerate() {
            if d {
                role.push(Role::Dense(dense_qubits.len() as u32));
                dense_qubits.push(q);
            } else {
                role.push(Role::Label(label_qubits.len() as u32));
                label_qubits.push(q);
            }
        }

        let mut ops = Vec::with_capacity(circuit.len());
        let mut sites = Vec::with_capacity(circuit.len());
        let mut site_qubits = Vec::with_capacity(circuit.len());
        for g in circuit.gates() {
            let (op, site, qs) = match *g {
                Gate::Id { .. } => continue,
                Gate::X { q } => {
                    let op = match role[q] {
                        Role::Dense(t) => EngineOp::DenseX { t: t as usize },
                        Role::Label(b) => EngineOp::LabelX { mask: 1 << b },
                    };
                    (op, SiteClass::OneQ { rz: false }, [q, usize::MAX])
                }
                Gate::Sx { q } => {
                    let Role::Dense(t) = role[q] else { unreachable!("SX targets are dense") };
                    (EngineOp::DenseSx { t: t as usize }, SiteClass::OneQ { rz: false }, [q, usize::MAX])
                }
                Gate::Rz { q, angle } => {
                    let p0 = Complex64::from_polar(1.0, -0.5 * angle);
                    let p1 = Complex64::from_polar(1.0, 0.5 * angle);
                    let op = match role[q] {
                        Role::Dense(t) => EngineOp::DenseRz { t: t as usize, p0, p1 },
                        Role::Label(b) => EngineOp::LabelRz { mask: 1 << b, p0, p1 },
                    };
                    (op, SiteClass::OneQ { rz: true }, [q, usize::MAX])
                }
                Gate::Cx { c, t } => {
                    let op = match (role[c], role[t]) {
                        (Role::Dense(cc), Role::Dense(tt)) => EngineOp::DenseCx { c: cc as usize, t: tt as usize },
                        (Role::Label(cb), Role::Dense(tt)) => {
                            EngineOp::CxLabelDense { c_mask: 1 << cb, t: tt as usize }
                        }
                        (Role::Label(cb), Role::Label(tb)) => {
                            EngineOp::LabelCx { c_mask: 1 << cb, t_mask: 1 << tb }
                        }
                        (Role::Dense(_), Role::Label(_)) => unreachable!("dense controls force dense targets"),
                    };
                    (op, SiteClass::TwoQ, [c, t])
                }
                _ => unreachable!("non-basis kinds rejected above"),
            };
            ops.push(op);
            sites.push(site);
            site_qubits.push(qs);
        }

        Ok(CompiledCircuit { width, role, label_qubits, dense_qubits, ops, sites, site_qubits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dense_width(&self) -> usize {
        self.dense_qubits.len()
    }

    /// Number of executable (non-Id) operations per trajectory.
    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    fn effective_prob(&self, site: SiteClass, model: &NoiseModel) -> f64 {
        match site {
            SiteClass::OneQ { rz } => {
                if rz && !model.rz_noisy {
                    0.0
                } else {
                    model.p1
                }
            }
            SiteClass::TwoQ => model.p2,
        }
    }

    /// Whether any compiled site has a nonzero error probability under the
    /// model (if not, all shots of a trajectory share one evolution).
    pub fn is_noisy_under(&self, model: &NoiseModel) -> bool {
        self.sites.iter().any(|&s| self.effective_prob(s, model) > 0.0)
    }

    fn expand_index(&self, label: u64, dense_idx: usize) -> u64 {
        let mut idx = 0u64;
        for (j, &q) in self.label_qubits.iter().enumerate() {
            idx |= (label >> j & 1) << q;
        }
        for (j, &q) in self.dense_qubits.iter().enumerate() {
            idx |= ((dense_idx >> j) as u64 & 1) << q;
        }
        idx
    }
}

#[derive(Debug, Clone)]
struct Branch {
    label: u64,
    phase: Complex64,
    amps: Vec<Complex64>,
}

/// Split simulation state: a handful of branches, each a classical label on
/// the label qubits tensored with a dense vector over the dense qubits.
#[derive(Debug, Clone)]
pub struct SplitState {
    branches: Vec<Branch>,
    dense_len: usize,
}

impl SplitState {
    /// Builds the initial state from per-register qintegers; uncovered qubits
    /// start in |0>. Registers must be disjoint and match the ranges passed
    /// to [`CompiledCircuit::compile`].
    pub fn prepare(cc: &CompiledCircuit, registers: &[(Range<usize>, &QInteger)]) -> Result<SplitState> {
        for (i, (r, q)) in registers.iter().enumerate() {
            if r.end > cc.width || r.is_empty() {
                return Err(Error::RegisterOverlap { name: format!("{r:?}") });
            }
            if r.end - r.start != q.width() {
                return Err(Error::WidthMismatch { circuit: r.end - r.start, state: q.width() });
            }
            for (other, _) in &registers[i + 1..] {
                if r.start < other.end && other.start < r.end {
                    return Err(Error::RegisterOverlap { name: format!("{r:?}") });
                }
            }
        }

        let dense_len = 1usize << cc.dense_qubits.len();
        let mut amps0 = vec![Complex64::new(0.0, 0.0); dense_len];
        amps0[0] = Complex64::new(1.0, 0.0);
        let mut branches = vec![Branch { label: 0, phase: Complex64::new(1.0, 0.0), amps: amps0 }];

        for (range, q) in registers {
            let roles: Vec<Role> = range.clone().map(|i| cc.role[i]).collect();
            let all_label = roles.iter().all(|r| matches!(r, Role::Label(_)));
            let all_dense = roles.iter().all(|r| matches!(r, Role::Dense(_)));
            if all_label {
                let mut next = Vec::with_capacity(branches.len() * q.order());
                for b in &branches {
                    for &(v, a) in q.terms() {
                        let mut label = b.label;
                        for (bit, role) in roles.iter().enumerate() {
                            let Role::Label(pos) = role else { unreachable!() };
                            label |= (v >> bit & 1) << pos;
                        }
                        let mut amps = b.amps.clone();
                        for amp in &mut amps {
                            *amp *= a;
                        }
                        next.push(Branch { label, phase: b.phase, amps });
                    }
                }
                branches = next;
            } else if all_dense {
                let positions: Vec<u32> = roles
                    .iter()
                    .map(|r| {
                        let Role::Dense(pos) = r else { unreachable!() };
                        *pos
                    })
                    .collect();
                for b in &mut branches {
                    let old = b.amps.clone();
                    b.amps.fill(Complex64::new(0.0, 0.0));
                    for (idx, amp) in old.iter().enumerate() {
                        if amp.norm_sqr() == 0.0 || positions.iter().any(|&p| idx >> p & 1 == 1) {
                            continue;
                        }
                        for &(v, a) in q.terms() {
                            let mut target = idx;
                            for (bit, &p) in positions.iter().enumerate() {
                                target |= ((v >> bit & 1) as usize) << p;
                            }
                            b.amps[target] = amp * a;
                        }
                    }
                }
            } else {
                return Err(Error::InfeasiblePattern {
                    reason: format!("register {range:?} spans label and dense qubits; compile with it listed"),
                });
            }
        }

        Ok(SplitState { branches, dense_len })
    }

    /// Overwrites `self` with `other` without reallocating.
    fn copy_from(&mut self, other: &SplitState) {
        debug_assert_eq!(self.branches.len(), other.branches.len());
        self.dense_len = other.dense_len;
        for (dst, src) in self.branches.iter_mut().zip(&other.branches) {
            dst.label = src.label;
            dst.phase = src.phase;
            dst.amps.copy_from_slice(&src.amps);
        }
    }

    fn apply_op(&mut self, op: &EngineOp) {
        match *op {
            EngineOp::DenseX { t } => {
                for b in &mut self.branches {
                    kernels::x(&mut b.amps, t);
                }
            }
            EngineOp::DenseSx { t } => {
                for b in &mut self.branches {
                    kernels::sx(&mut b.amps, t);
                }
            }
            EngineOp::DenseRz { t, p0, p1 } => {
                let step = 1usize << t;
                for b in &mut self.branches {
                    let mut base = 0;
                    while base < b.amps.len() {
                        for a in &mut b.amps[base..base + step] {
                            *a *= p0;
                        }
                        for a in &mut b.amps[base + step..base + (step << 1)] {
                            *a *= p1;
                        }
                        base += step << 1;
                    }
                }
            }
            EngineOp::DenseCx { c, t } => {
                for b in &mut self.branches {
                    kernels::cx(&mut b.amps, c, t);
                }
            }
            EngineOp::LabelX { mask } => {
                for b in &mut self.branches {
                    b.label ^= mask;
                }
            }
            EngineOp::LabelRz { mask, p0, p1 } => {
                for b in &mut self.branches {
                    b.phase *= if b.label & mask != 0 { p1 } else { p0 };
                }
            }
            EngineOp::LabelCx { c_mask, t_mask } => {
                for b in &mut self.branches {
                    if b.label & c_mask != 0 {
                        b.label ^= t_mask;
                    }
                }
            }
            EngineOp::CxLabelDense { c_mask, t } => {
                for b in &mut self.branches {
                    if b.label & c_mask != 0 {
                        kernels::x(&mut b.amps, t);
                    }
                }
            }
        }
    }

    fn apply_pauli(&mut self, cc: &CompiledCircuit, qubit: usize, pauli: Pauli) {
        match cc.role[qubit] {
            Role::Dense(pos) => {
                let t = pos as usize;
                for b in &mut self.branches {
                    match pauli {
                        Pauli::I => {}
                        Pauli::X => kernels::x(&mut b.amps, t),
                        Pauli::Y => kernels::pauli_y(&mut b.amps, t),
                        Pauli::Z => kernels::pauli_z(&mut b.amps, t),
                    }
                }
            }
            Role::Label(pos) => {
                let bit = 1u64 << pos;
                for b in &mut self.branches {
                    match pauli {
                        Pauli::I => {}
                        Pauli::X => b.label ^= bit,
                        Pauli::Z => {
                            if b.label & bit != 0 {
                                b.phase = -b.phase;
                            }
                        }
                        Pauli::Y => {
                            b.phase *= if b.label & bit == 0 {
                                Complex64::new(0.0, 1.0)
                            } else {
                                Complex64::new(0.0, -1.0)
                            };
                            b.label ^= bit;
                        }
                    }
                }
            }
        }
    }

    /// Inverse-CDF measurement; the cumulative sum runs over branches in
    /// construction order, then dense indices ascending.
    fn measure(&self, cc: &CompiledCircuit, u: f64) -> u64 {
        let mut total = 0.0;
        for b in &self.branches {
            let f = b.phase.norm_sqr();
            total += f * b.amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        let target = u * total;
        let mut acc = 0.0;
        let mut last = 0u64;
        for b in &self.branches {
            let f = b.phase.norm_sqr();
            for (k, a) in b.amps.iter().enumerate() {
                let p = f * a.norm_sqr();
                if p > 0.0 {
                    last = cc.expand_index(b.label, k);
                }
                acc += p;
                if target < acc {
                    return cc.expand_index(b.label, k);
                }
            }
        }
        last
    }

    /// Expands back to a dense statevector (validation and tests).
    pub fn to_statevector(&self, cc: &CompiledCircuit) -> Statevector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << cc.width];
        for b in &self.branches {
            for (k, a) in b.amps.iter().enumerate() {
                if a.norm_sqr() > 0.0 {
                    amps[cc.expand_index(b.label, k) as usize] += b.phase * a;
                }
            }
        }
        Statevector::from_amplitudes(cc.width, amps).expect("split state is normalized")
    }
}

/// One noisy trajectory with the same per-site randomness layout as the dense
/// path: an emission draw per noisy site, a Pauli-index draw on emission, and
/// a final measurement draw.
pub fn run_trajectory_split<R: Rng>(
    cc: &CompiledCircuit,
    state: &mut SplitState,
    model: &NoiseModel,
    rng: &mut R,
) -> u64 {
    for (i, op) in cc.ops.iter().enumerate() {
        state.apply_op(op);
        let p = cc.effective_prob(cc.sites[i], model);
        if p > 0.0 {
            let k = match cc.sites[i] {
                SiteClass::OneQ { .. } => 1,
                SiteClass::TwoQ => 2,
            };
            let cells = 4u32.pow(k);
            let emit = p * f64::from(cells - 1) / f64::from(cells);
            if rng.gen::<f64>() < emit {
                let idx = rng.gen_range(1..cells);
                let qs = &cc.site_qubits[i][..k as usize];
                for (q, pauli) in decode_pauli_on(qs, idx).terms {
                    state.apply_pauli(cc, q, pauli);
                }
            }
        }
    }
    state.measure(cc, rng.gen::<f64>())
}

/// Runs `shots` trajectories with per-shot generators seeded from
/// (seed, TAG_SHOT, shot index). Noiseless models evolve the state once and
/// only re-draw the measurement, which is exactly equivalent.
pub fn run_shots_split(
    cc: &CompiledCircuit,
    init: &SplitState,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Vec<u64> {
    if !cc.is_noisy_under(model) {
        let mut evolved = init.clone();
        for op in &cc.ops {
            evolved.apply_op(op);
        }
        (0..shots)
            .map(|i| {
                let mut rng = rng_from(&[seed, TAG_SHOT, i]);
                evolved.measure(cc, rng.gen::<f64>())
            })
            .collect()
    } else {
        let mut scratch = init.clone();
        (0..shots)
            .map(|i| {
                let mut rng = rng_from(&[seed, TAG_SHOT, i]);
                scratch.copy_from(init);
                run_trajectory_split(cc, &mut scratch, model, &mut rng)
            })
            .collect()
    }
}

/// Convenience wrapper used by single-instance runs: compile, prepare, run.
pub fn simulate_shots_split(
    circuit: &Circuit,
    registers: &[(Range<usize>, &QInteger)],
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let ranges: Vec<Range<usize>> = registers.iter().map(|(r, _)| r.clone()).collect();
    let cc = CompiledCircuit::compile(circuit, &ranges)?;
    let init = SplitState::prepare(&cc, registers)?;
    Ok(run_shots_split(&cc, &init, model, shots, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{build_qfa, build_qfm, encode_qinteger, ArithOp, DepthSpec};
    use crate::linalg::phase_aligned_vec_distance;
    use crate::noise::{density_matrix_oracle, total_variation};
    use crate::sim::run_noiseless;

    fn qfa_setup(
        n: usize,
        modular: bool,
        depth: DepthSpec,
        x: &QInteger,
        y: &QInteger,
    ) -> (Circuit, CompiledCircuit, SplitState) {
        let op = ArithOp::Add { n, modular };
        let circ = build_qfa(n, modular, depth).unwrap().decompose_to_basis();
        let regs = vec![(0..n, x), (n..n + op.y_register_width(), y)];
        let ranges: Vec<Range<usize>> = regs.iter().map(|(r, _)| r.clone()).collect();
        let cc = CompiledCircuit::compile(&circ, &ranges).unwrap();
        let init = SplitState::prepare(&cc, &regs).unwrap();
        (circ, cc, init)
    }

    fn dense_init(op: &ArithOp, x: &QInteger, y: &QInteger) -> Statevector {
        let mut state = Statevector::zero(op.total_width());
        encode_qinteger(&mut state, 0..op.x_width(), x).unwrap();
        encode_qinteger(&mut state, op.x_width()..op.x_width() + op.y_register_width(), y).unwrap();
        state
    }

    #[test]
    fn qfa_splits_into_label_x_and_dense_y() {
        let x = QInteger::uniform(3, &[1, 6]).unwrap();
        let y = QInteger::basis(3, 2).unwrap();
        let (_, cc, init) = qfa_setup(3, true, DepthSpec::Full, &x, &y);
        assert_eq!(cc.label_qubits, vec![0, 1, 2]);
        assert_eq!(cc.dense_qubits, vec![3, 4, 5]);
        assert_eq!(init.branches.len(), 2);
    }

    #[test]
    fn qfm_keeps_both_operands_as_labels() {
        let circ = build_qfm(2, 2, DepthSpec::Full).unwrap().decompose_to_basis();
        let cc = CompiledCircuit::compile(&circ, &[0..2, 2..4]).unwrap();
        assert_eq!(cc.label_qubits, vec![0, 1, 2, 3]);
        assert_eq!(cc.dense_qubits, vec![4, 5, 6, 7]);
    }

    #[test]
    fn noiseless_split_evolution_matches_dense() {
        for (n, modular, depth) in [(2, true, DepthSpec::Full), (3, true, DepthSpec::Fixed(2)), (2, false, DepthSpec::Full)]
        {
            let op = ArithOp::Add { n, modular };
            let x = QInteger::uniform(n, &[1, (1 << n) - 1]).unwrap();
            let y = QInteger::uniform(op.y_register_width(), &[0, 2]).unwrap();
            let (circ, cc, init) = qfa_setup(n, modular, depth, &x, &y);

            let mut split = init.clone();
            for o in &cc.ops {
                split.apply_op(o);
            }
            let got = split.to_statevector(&cc);
            let want = run_noiseless(&circ, &dense_init(&op, &x, &y)).unwrap();
            let d = phase_aligned_vec_distance(got.amplitudes(), want.amplitudes());
            assert!(d < 1e-12, "n={n} modular={modular}: {d}");
        }
    }

    #[test]
    fn qfm_split_evolution_matches_dense() {
        let op = ArithOp::Multiply { n: 2, m: 2 };
        let circ = op.build_circuit(DepthSpec::Full).unwrap().decompose_to_basis();
        let x = QInteger::uniform(2, &[1, 2]).unwrap();
        let y = QInteger::uniform(2, &[2, 3]).unwrap();
        let regs = vec![(0..2, &x), (2..4, &y)];
        let cc = CompiledCircuit::compile(&circ, &[0..2, 2..4]).unwrap();
        let mut split = SplitState::prepare(&cc, &regs).unwrap();
        assert_eq!(split.branches.len(), 4);
        for o in &cc.ops {
            split.apply_op(o);
        }
        let got = split.to_statevector(&cc);
        let want = run_noiseless(&circ, &dense_init(&op, &x, &y)).unwrap();
        let d = phase_aligned_vec_distance(got.amplitudes(), want.amplitudes());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn forced_paulis_match_dense_application() {
        use crate::noise::{apply_pauli, PauliError};
        let x = QInteger::uniform(2, &[1, 2]).unwrap();
        let y = QInteger::basis(2, 3).unwrap();
        let (circ, cc, init) = qfa_setup(2, true, DepthSpec::Full, &x, &y);
        let op = ArithOp::Add { n: 2, modular: true };

        // Evolve halfway, inject X(0) Y(1) Z(3), finish.
        let half = cc.ops.len() / 2;
        let mut split = init.clone();
        for o in &cc.ops[..half] {
            split.apply_op(o);
        }
        for (q, p) in [(0, Pauli::X), (1, Pauli::Y), (3, Pauli::Z)] {
            split.apply_pauli(&cc, q, p);
        }
        for o in &cc.ops[half..] {
            split.apply_op(o);
        }

        // Dense reference: the compiled ops are 1:1 with non-Id gates here.
        let mut dense = dense_init(&op, &x, &y);
        let gates = circ.gates();
        for g in &gates[..half] {
            crate::sim::apply_gate(&mut dense, g).unwrap();
        }
        apply_pauli(&mut dense, &PauliError { terms: vec![(0, Pauli::X), (1, Pauli::Y), (3, Pauli::Z)] }).unwrap();
        for g in &gates[half..] {
            crate::sim::apply_gate(&mut dense, g).unwrap();
        }

        let d = phase_aligned_vec_distance(split.to_statevector(&cc).amplitudes(), dense.amplitudes());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn zero_noise_shortcut_is_bitwise_identical_to_trajectories() {
        let x = QInteger::uniform(3, &[2, 5]).unwrap();
        let y = QInteger::basis(3, 4).unwrap();
        let (_, cc, init) = qfa_setup(3, true, DepthSpec::Full, &x, &y);
        let fast = run_shots_split(&cc, &init, &NoiseModel::NOISELESS, 128, 21);
        let slow: Vec<u64> = (0..128u64)
            .map(|i| {
                let mut rng = rng_from(&[21, TAG_SHOT, i]);
                let mut st = init.clone();
                run_trajectory_split(&cc, &mut st, &NoiseModel::NOISELESS, &mut rng)
            })
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn split_trajectories_converge_to_the_density_oracle() {
        let x = QInteger::basis(2, 1).unwrap();
        let y = QInteger::uniform(2, &[0, 3]).unwrap();
        let (circ, cc, init) = qfa_setup(2, true, DepthSpec::Full, &x, &y);
        let op = ArithOp::Add { n: 2, modular: true };
        let model = NoiseModel::depolarizing(0.02, 0.05);

        let exact = density_matrix_oracle(&circ, &dense_init(&op, &x, &y), &model).unwrap();
        let shots = 100_000u64;
        let outcomes = run_shots_split(&cc, &init, &model, shots, 31);
        let mut empirical = vec![0.0; exact.len()];
        for o in outcomes {
            empirical[o as usize] += 1.0 / shots as f64;
        }
        let tv = total_variation(&exact, &empirical);
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn compile_rejects_non_basis_gates() {
        let mut circ = Circuit::new(2);
        circ.push(Gate::H { q: 0 }).unwrap();
        assert!(matches!(CompiledCircuit::compile(&circ, &[]), Err(Error::NonBasisGate { kind: "H" })));
    }

    #[test]
    fn throughput_budget_on_a_16_qubit_adder() {
        use rayon::prelude::*;
        // Repository budget: at least 1e4 trajectory-gate-applications per
        // millisecond on a 16-qubit QFA state, aggregated over worker threads.
        let x = QInteger::uniform(8, &[3, 200]).unwrap();
        let y = QInteger::uniform(8, &[17, 90]).unwrap();
        let (_, cc, init) = qfa_setup(8, true, DepthSpec::Full, &x, &y);
        assert_eq!(cc.width(), 16);
        let model = NoiseModel::depolarizing(0.0, 0.01);

        // Warm up allocators and caches.
        let _ = run_shots_split(&cc, &init, &model, 32, 1);

        let shots_per_worker = 400u64;
        let workers = 4u64;
        let start = std::time::Instant::now();
        let total: u64 = (0..workers)
            .into_par_iter()
            .map(|w| run_shots_split(&cc, &init, &model, shots_per_worker, 100 + w).len() as u64)
            .sum();
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let gate_apps = total * cc.op_count() as u64;
        let rate = gate_apps as f64 / elapsed_ms;
        assert!(rate >= 1e4, "throughput {rate:.0} gate-apps/ms below budget (ops={}, {elapsed_ms:.1} ms)", cc.op_count());
    }
}
