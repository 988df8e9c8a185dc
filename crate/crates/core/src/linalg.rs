//! Small dense complex matrices.
//!
//! This is the slow, obviously-correct route used by the validation oracles
//! (unitary-equivalence tests, the density-matrix channel evolution). The
//! statevector kernels in [`crate::sim`] are checked against it; the two
//! paths share no code.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![C_ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn add_assign(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] += v;
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![C_ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..n {
                *o += self.data[i * n + j] * v[j];
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }
}

/// Unitary of a gate over its own qubits. In the local basis ordering the
/// first listed qubit (the outer control) is the most significant bit, as in
/// the usual textbook matrix forms.
pub fn gate_matrix(gate: &Gate) -> CMatrix {
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        Gate::Id { .. } => CMatrix::identity(2),
        Gate::X { .. } => {
            let mut m = CMatrix::zeros(2);
            m.set(0, 1, C_ONE);
            m.set(1, 0, C_ONE);
            m
        }
        Gate::Sx { .. } => {
            let a = Complex64::new(0.5, 0.5);
            let b = Complex64::new(0.5, -0.5);
            let mut m = CMatrix::zeros(2);
            m.set(0, 0, a);
            m.set(0, 1, b);
            m.set(1, 0, b);
            m.set(1, 1, a);
            m
        }
        Gate::Rz { angle, .. } => {
            let mut m = CMatrix::zeros(2);
            m.set(0, 0, Complex64::from_polar(1.0, -angle / 2.0));
            m.set(1, 1, Complex64::from_polar(1.0, angle / 2.0));
            m
        }
        Gate::H { .. } => {
            let h = Complex64::new(sq, 0.0);
            let mut m = CMatrix::zeros(2);
            m.set(0, 0, h);
            m.set(0, 1, h);
            m.set(1, 0, h);
            m.set(1, 1, -h);
            m
        }
        Gate::Cx { .. } => {
            let mut m = CMatrix::identity(4);
            m.set(2, 2, C_ZERO);
            m.set(3, 3, C_ZERO);
            m.set(2, 3, C_ONE);
            m.set(3, 2, C_ONE);
            m
        }
        Gate::Cp { angle, .. } => {
            let mut m = CMatrix::identity(4);
            m.set(3, 3, Complex64::from_polar(1.0, angle));
            m
        }
        Gate::Ch { .. } => {
            let h = Complex64::new(sq, 0.0);
            let mut m = CMatrix::identity(4);
            m.set(2, 2, h);
            m.set(2, 3, h);
            m.set(3, 2, h);
            m.set(3, 3, -h);
            m
        }
        Gate::Ccp { angle, .. } => {
            let mut m = CMatrix::identity(8);
            m.set(7, 7, Complex64::from_polar(1.0, angle));
            m
        }
    }
}

/// Embeds a gate's unitary into the full 2^width space under the convention
/// that circuit qubit 0 is the least significant index bit.
pub fn embed_gate(gate: &Gate, width: usize) -> CMatrix {
    let local = gate_matrix(gate);
    let qs = gate.qubits();
    let qs = qs.as_slice();
    let k = qs.len();
    let dim = 1usize << width;
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        let mut lin = 0usize;
        let mut base = col;
        for (pos, &q) in qs.iter().enumerate() {
            lin |= ((col >> q) & 1) << (k - 1 - pos);
            base &= !(1usize << q);
        }
        for lout in 0..(1usize << k) {
            let amp = local.get(lout, lin);
            if amp == C_ZERO {
                continue;
            }
            let mut row = base;
            for (pos, &q) in qs.iter().enumerate() {
                row |= ((lout >> (k - 1 - pos)) & 1) << q;
            }
            m.add_assign(row, col, amp);
        }
    }
    m
}

/// Full unitary of a circuit as the ordered product of its embedded gates.
pub fn circuit_matrix(circuit: &Circuit) -> CMatrix {
    let mut u = CMatrix::identity(1 << circuit.width());
    for g in circuit.gates() {
        u = embed_gate(g, circuit.width()).matmul(&u);
    }
    u
}

/// Maximum elementwise deviation after aligning global phase on the first
/// element of `a` with magnitude above 1e-8. Returns infinity if the phases
/// cannot be aligned.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim, b.dim);
    let anchor = a.data.iter().position(|v| v.norm() > 1e-8);
    let Some(i) = anchor else {
        return b.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    };
    if b.data[i].norm() <= 1e-12 {
        return f64::INFINITY;
    }
    let lambda = b.data[i] / a.data[i];
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x * lambda - y).norm())
        .fold(0.0, f64::max)
}

/// Same alignment applied to state vectors.
pub fn phase_aligned_vec_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let anchor = a.iter().position(|v| v.norm() > 1e-8);
    let Some(i) = anchor else {
        return b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    };
    if b[i].norm() <= 1e-12 {
        return f64::INFINITY;
    }
    let lambda = b[i] / a[i];
    a.iter().zip(b).map(|(x, y)| (x * lambda - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_respects_bit_order() {
        // X on qubit 1 of a 2-qubit system maps |00> (index 0) to |10> (index 2).
        let m = embed_gate(&Gate::X { q: 1 }, 2);
        assert_eq!(m.get(2, 0), C_ONE);
        assert_eq!(m.get(0, 2), C_ONE);
        assert_eq!(m.get(0, 0), C_ZERO);

        // CX with control 0, target 1: index 1 (c=1,t=0) maps to index 3.
        let cx = embed_gate(&Gate::Cx { c: 0, t: 1 }, 2);
        assert_eq!(cx.get(3, 1), C_ONE);
        assert_eq!(cx.get(0, 0), C_ONE);
        assert_eq!(cx.get(2, 2), C_ONE);
    }

    #[test]
    fn cp_is_symmetric_in_qubit_order() {
        let a = embed_gate(&Gate::Cp { c: 0, t: 1, angle: 0.7 }, 2);
        let b = embed_gate(&Gate::Cp { c: 1, t: 0, angle: 0.7 }, 2);
        assert!(phase_aligned_distance(&a, &b) < 1e-15);
    }

    #[test]
    fn circuit_matrix_is_ordered_product() {
        let mut c = Circuit::new(1);
        c.push(Gate::H { q: 0 }).unwrap();
        c.push(Gate::Rz { q: 0, angle: std::f64::consts::PI }).unwrap();
        let u = circuit_matrix(&c);
        // RZ(pi) * H: column 0 should be (e^{-i pi/2}, e^{i pi/2})/sqrt(2).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u.get(0, 0) - Complex64::new(0.0, -s)).norm() < 1e-12);
        assert!((u.get(1, 0) - Complex64::new(0.0, s)).norm() < 1e-12);
    }

    #[test]
    fn unitarity_of_embedded_gates() {
        for g in [
            Gate::Sx { q: 1 },
            Gate::H { q: 0 },
            Gate::Ch { c: 2, t: 0 },
            Gate::Ccp { c0: 1, c1: 2, t: 0, angle: 1.1 },
        ] {
            let u = embed_gate(&g, 3);
            let prod = u.dagger().matmul(&u);
            assert!(phase_aligned_distance(&prod, &CMatrix::identity(8)) < 1e-12);
        }
    }
}
