use std::ops::{Add, Mul, Sub};

use super::{
    gather, scatter, validate_targets, StateVector, ACCUMULATED_TOL, ALGEBRAIC_TOL, C64, MAX_DIM,
    ONE, ZERO,
};
use crate::{Error, Result};

/// Dense square matrix acting on at most three qubits.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    m: [[C64; MAX_DIM]; MAX_DIM],
}

impl Operator {
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        if !matches!(dim, 2 | 4 | 8) {
            return Err(Error::InvalidInput(format!(
                "operator dimension {dim} is not 2, 4 or 8"
            )));
        }
        let mut m = [[ZERO; MAX_DIM]; MAX_DIM];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            m[i][..dim].copy_from_slice(row);
        }
        let op = Self { dim, m };
        if !op.is_finite() {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(op)
    }

    pub(crate) fn zeros(dim: usize) -> Self {
        Self {
            dim,
            m: [[ZERO; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        (0..dim).for_each(|i| op.m[i][i] = ONE);
        op
    }

    /// `|s⟩⟨s|`.
    pub fn outer(s: &StateVector) -> Self {
        let a = s.amplitudes();
        let mut op = Self::zeros(a.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in a.iter().enumerate() {
                op.m[i][j] = x * y.conj();
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: C64) {
        self.m[row][col] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] *= k;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::TooManyQubits(dim.trailing_zeros() as usize));
        }
        let mut out = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.m[i * other.dim + k][j * other.dim + l] = self.m[i][j] * other.m[k][l];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_deviation(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_deviation(&Operator::identity(self.dim)) <= tol
    }

    fn is_finite(&self) -> bool {
        (0..self.dim).all(|i| {
            self.m[i][..self.dim]
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        })
    }

    fn check_local(&self, targets: &[usize], s: &StateVector) -> Result<()> {
        validate_targets(targets, s.num_qubits())?;
        if self.dim != 1 << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                got: self.dim,
            });
        }
        Ok(())
    }

    /// `(self on targets) |s⟩`, with no unitarity requirement and no renormalization.
    pub(crate) fn apply_raw(&self, targets: &[usize], s: &StateVector) -> StateVector {
        let n = s.num_qubits();
        let mut out = *s;
        let src = s.amplitudes();
        for (i, slot) in out.amps_mut().iter_mut().enumerate() {
            let row = gather(i, targets, n);
            let mut acc = ZERO;
            for col in 0..self.dim {
                let z = self.m[row][col];
                if z != ZERO {
                    acc += z * src[scatter(i, col, targets, n)];
                }
            }
            *slot = acc;
        }
        out
    }
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<&[C64]> = (0..self.dim).map(|i| &self.m[i][..self.dim]).collect();
        f.debug_struct("Operator").field("rows", &rows).finish()
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let mut out = Operator::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.m[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..self.dim {
                    out.m[i][j] += a * rhs.m[k][j];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

/// Operator verified unitary to `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary(Operator);

impl Unitary {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_unitary(ALGEBRAIC_TOL) {
            return Err(Error::NotUnitary);
        }
        Ok(Self(op))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    /// `self · other`: `other` is applied first.
    pub fn then_after(&self, other: &Unitary) -> Unitary {
        Unitary(&self.0 * &other.0)
    }
}

/// Hermitian operator verified to `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable(Operator);

impl Observable {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(ALGEBRAIC_TOL) {
            return Err(Error::NotHermitian);
        }
        Ok(Self(op))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// `M² = I` within `1e-12`, i.e. the spectrum is contained in `{+1, −1}`.
    pub fn is_bivalent(&self) -> bool {
        (&self.0 * &self.0).max_deviation(&Operator::identity(self.0.dim)) <= ALGEBRAIC_TOL
    }

    /// Projector `(I − M)/2` onto the `−1` eigenspace of a bivalent observable.
    pub fn minus_projector(&self) -> Result<Operator> {
        if !self.is_bivalent() {
            return Err(Error::NotBivalent);
        }
        Ok((&Operator::identity(self.0.dim) - &self.0).scale(C64::new(0.5, 0.0)))
    }

    pub fn kron(&self, other: &Observable) -> Result<Observable> {
        Ok(Observable(self.0.kron(&other.0)?))
    }
}

/// Applies `u` to the listed register positions.
pub fn apply_unitary(u: &Unitary, targets: &[usize], s: &StateVector) -> Result<StateVector> {
    u.0.check_local(targets, s)?;
    Ok(u.0.apply_raw(targets, s))
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() >= ACCUMULATED_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// `⟨s| M_targets |s⟩`.
pub fn expectation(m: &Observable, targets: &[usize], s: &StateVector) -> Result<f64> {
    m.0.check_local(targets, s)?;
    let ms = m.0.apply_raw(targets, s);
    real_part(s.inner(&ms)?)
}

/// `⟨s| A_{targets_a} ⊗ B_{targets_b} |s⟩` for disjoint target sets.
pub fn correlation(
    a: &Observable,
    targets_a: &[usize],
    b: &Observable,
    targets_b: &[usize],
    s: &StateVector,
) -> Result<f64> {
    a.0.check_local(targets_a, s)?;
    b.0.check_local(targets_b, s)?;
    if targets_a.iter().any(|t| targets_b.contains(t)) {
        return Err(Error::BadTargets(
            targets_a.iter().chain(targets_b).copied().collect(),
        ));
    }
    let bs = b.0.apply_raw(targets_b, s);
    let abs = a.0.apply_raw(targets_a, &bs);
    real_part(s.inner(&abs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::testutil::{random_state, random_unit};
    use crate::qcore::{
        cnot_ancilla_target, hadamard, pauli_direction, pauli_x, pauli_z, phase_gate, Subsystem,
    };
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ket(bits: usize, n: usize) -> StateVector {
        StateVector::basis(bits, &vec![Subsystem::Anon; n]).unwrap()
    }

    #[test]
    fn x_on_qubit_zero() {
        let s = apply_unitary(&pauli_x(), &[0], &ket(0b00, 2)).unwrap();
        // qubit 0 is the most significant: |00⟩ → |10⟩
        assert_eq!(s, ket(0b10, 2));
        let s = apply_unitary(&pauli_x(), &[1], &ket(0b00, 2)).unwrap();
        assert_eq!(s, ket(0b01, 2));
    }

    #[test]
    fn identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(&mut rng, 3);
        let id = Unitary::new(Operator::identity(4)).unwrap();
        assert_eq!(apply_unitary(&id, &[0, 2], &s).unwrap(), s);
    }

    #[test]
    fn hadamard_twice_restores() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(&mut rng, 2);
        let h = hadamard();
        let back = apply_unitary(&h, &[1], &apply_unitary(&h, &[1], &s).unwrap()).unwrap();
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = ket(0, 2);
        assert!(Unitary::new(Operator::identity(2).scale(C64::new(2.0, 0.0))).is_err());
        assert!(apply_unitary(&pauli_x(), &[2], &s).is_err());
        assert!(apply_unitary(&cnot_ancilla_target(), &[0, 0], &s).is_err());
        assert!(apply_unitary(&cnot_ancilla_target(), &[0], &s).is_err());
    }

    #[test]
    fn expectation_examples() {
        let z = pauli_direction([0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(expectation(&z, &[0], &ket(0, 1)).unwrap(), 1.0);
        let phi_plus = crate::qcore::bell_states()[0];
        let zz = z.kron(&z).unwrap();
        assert_abs_diff_eq!(
            expectation(&zz, &[0, 1], &phi_plus).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            correlation(&z, &[0], &z, &[1], &phi_plus).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn zx_correlation_vanishes_on_resource() {
        // By hand: σz⊗σx maps (c,0,0,s) to (0,c,−s,0), orthogonal to (c,0,0,s).
        let t = PI / 6.0;
        let s = StateVector::new(
            &[C64::new(t.cos(), 0.0), ZERO, ZERO, C64::new(t.sin(), 0.0)],
            &[Subsystem::Alice, Subsystem::Bob],
        )
        .unwrap();
        let z = pauli_direction([0.0, 0.0, 1.0]).unwrap();
        let x = pauli_direction([1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            correlation(&z, &[0], &x, &[1], &s).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let zx = z.kron(&x).unwrap();
        assert_abs_diff_eq!(expectation(&zx, &[0, 1], &s).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_flags_non_hermitian_residue() {
        // Smuggle a non-Hermitian matrix past the constructor to exercise the residue check.
        let bad = Observable(Operator::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]).unwrap());
        let s = StateVector::qubit(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        assert!(matches!(
            expectation(&bad, &[0], &s),
            Err(Error::ImaginaryResidue(_))
        ));
    }

    #[test]
    fn norm_preserved_under_random_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..=3usize);
            let mut s = random_state(&mut rng, n);
            for _ in 0..4 {
                let pick = rng.random_range(0..4);
                s = match pick {
                    0 => apply_unitary(&hadamard(), &[rng.random_range(0..n)], &s),
                    1 => apply_unitary(
                        &phase_gate(rng.random_range(0.0..6.3)),
                        &[rng.random_range(0..n)],
                        &s,
                    ),
                    2 if n >= 2 => {
                        let a = rng.random_range(0..n);
                        let b = (a + rng.random_range(1..n)) % n;
                        apply_unitary(&cnot_ancilla_target(), &[a, b], &s)
                    }
                    _ => {
                        let sigma = pauli_direction(random_unit(&mut rng)).unwrap();
                        apply_unitary(
                            &Unitary::new(sigma.operator().clone()).unwrap(),
                            &[rng.random_range(0..n)],
                            &s,
                        )
                    }
                }
                .unwrap();
            }
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_z_is_diag() {
        let z = pauli_z();
        assert_eq!(z.operator().get(0, 0), ONE);
        assert_eq!(z.operator().get(1, 1), -ONE);
    }
}
