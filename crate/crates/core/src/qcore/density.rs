use super::{
    scatter, validate_targets, Observable, Operator, StateVector, ACCUMULATED_TOL, ALGEBRAIC_TOL,
    C64,
};
use crate::{Error, Result};

/// Lower bound accepted for density-matrix eigenvalues.
const PSD_FLOOR: f64 = 1e-10;

/// Density operator on one to three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    m: Operator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Operator) -> Result<Self> {
        if !m.is_hermitian(ALGEBRAIC_TOL) {
            return Err(Error::NotHermitian);
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
            return Err(Error::InvalidInput(format!("density trace is {tr}")));
        }
        let shifted = &m + &Operator::identity(m.dim()).scale(C64::new(PSD_FLOOR, 0.0));
        if !is_positive_definite(&shifted) {
            return Err(Error::InvalidInput(
                "density matrix has a negative eigenvalue".into(),
            ));
        }
        Ok(Self {
            num_qubits: m.num_qubits(),
            m,
        })
    }

    pub fn from_pure(s: &StateVector) -> Self {
        Self {
            num_qubits: s.num_qubits(),
            m: Operator::outer(s),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.m
    }

    /// `tr(ρ M)`.
    pub fn expectation(&self, m: &Operator) -> Result<f64> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.dim(),
            });
        }
        let z = (&self.m * m).trace();
        if z.im.abs() >= ACCUMULATED_TOL {
            return Err(Error::ImaginaryResidue(z.im));
        }
        Ok(z.re)
    }

    /// Probability of the `−1` outcome of a bivalent observable.
    pub fn prob_minus(&self, obs: &Observable) -> Result<f64> {
        self.expectation(&obs.minus_projector()?)
    }

    /// Reduced state on the register positions in `keep`, in register order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        validate_targets(keep, n)?;
        if keep.len() == n {
            return Err(Error::InvalidInput(
                "partial trace must discard at least one qubit".into(),
            ));
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let kd = 1 << keep.len();
        let mut out = Operator::zeros(kd);
        for i in 0..kd {
            for j in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..1 << traced.len() {
                    let base = scatter(0, r, &traced, n);
                    let row = scatter(base, i, &keep, n);
                    let col = scatter(base, j, &keep, n);
                    acc += self.m.get(row, col);
                }
                out.set(i, j, acc);
            }
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            m: out,
        })
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(s: &StateVector) -> Self {
        Self::from_pure(s)
    }
}

/// Reduced state of a pure state on the positions in `keep`.
pub fn partial_trace(s: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(s).partial_trace(keep)
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity_pure(target: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if target.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: target.dim(),
        });
    }
    let a = target.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in a.iter().enumerate() {
            acc += x.conj() * rho.m.get(i, j) * y;
        }
    }
    if acc.im.abs() >= ACCUMULATED_TOL {
        return Err(Error::ImaginaryResidue(acc.im));
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Cholesky factorization succeeds iff the Hermitian matrix is positive definite.
fn is_positive_definite(m: &Operator) -> bool {
    let d = m.dim();
    let mut l = vec![vec![C64::new(0.0, 0.0); d]; d];
    for j in 0..d {
        let diag = m.get(j, j).re - l[j][..j].iter().map(|x| x.norm_sqr()).sum::<f64>();
        if diag <= 0.0 {
            return false;
        }
        let ljj = diag.sqrt();
        l[j][j] = C64::new(ljj, 0.0);
        for i in j + 1..d {
            let acc: C64 = l[i][..j]
                .iter()
                .zip(&l[j][..j])
                .map(|(a, b)| a * b.conj())
                .sum();
            l[i][j] = (m.get(i, j) - acc) / ljj;
        }
    }
    true
}
