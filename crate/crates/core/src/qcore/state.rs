use std::fmt;

use super::{ALGEBRAIC_TOL, C64, MAX_DIM, MAX_QUBITS, ZERO};
use crate::{Error, Result};

/// Name of a qubit in a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Ancilla,
    Alice,
    Bob,
    Anon,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Subsystem::Ancilla => "ancilla",
            Subsystem::Alice => "alice",
            Subsystem::Bob => "bob",
            Subsystem::Anon => "q",
        };
        f.write_str(name)
    }
}

/// Normalized pure state of one to three qubits.
#[derive(Clone, Copy, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: [C64; MAX_DIM],
    labels: [Subsystem; MAX_QUBITS],
}

impl StateVector {
    /// Builds a state from amplitudes that must already have unit norm.
    pub fn new(amplitudes: &[C64], labels: &[Subsystem]) -> Result<Self> {
        let s = Self::unchecked(amplitudes, labels)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Builds a state, rescaling the amplitudes to unit norm.
    pub fn normalized(amplitudes: &[C64], labels: &[Subsystem]) -> Result<Self> {
        let mut s = Self::unchecked(amplitudes, labels)?;
        let n2 = s.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let scale = 1.0 / n2.sqrt();
        s.amps_mut().iter_mut().for_each(|a| *a *= scale);
        Ok(s)
    }

    pub(crate) fn unchecked(amplitudes: &[C64], labels: &[Subsystem]) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let mut amps = [ZERO; MAX_DIM];
        amps[..amplitudes.len()].copy_from_slice(amplitudes);
        let mut l = [Subsystem::Anon; MAX_QUBITS];
        l[..n].copy_from_slice(labels);
        Ok(Self {
            num_qubits: n,
            amps,
            labels: l,
        })
    }

    /// Computational basis ket `|index⟩` over `labels`.
    pub fn basis(index: usize, labels: &[Subsystem]) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if index >= 1 << n {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(&amps, labels)
    }

    /// Single anonymous qubit `a|0⟩ + b|1⟩`.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::new(&[a, b], &[Subsystem::Anon])
    }

    /// Qubit with Bloch angles `(polar, azimuth)`: `cos(p/2)|0⟩ + e^{iφ} sin(p/2)|1⟩`.
    pub fn from_bloch(polar: f64, azimuth: f64, label: Subsystem) -> Result<Self> {
        let (s, c) = (polar / 2.0).sin_cos();
        Self::new(&[C64::new(c, 0.0), C64::from_polar(s, azimuth)], &[label])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps[..self.dim()]
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels[..self.num_qubits]
    }

    /// Register position of the first qubit carrying `label`.
    pub fn position(&self, label: Subsystem) -> Result<usize> {
        self.labels()
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("no {label} qubit in register")))
    }

    pub fn with_labels(mut self, labels: &[Subsystem]) -> Result<Self> {
        if labels.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: labels.len(),
            });
        }
        self.labels[..labels.len()].copy_from_slice(labels);
        Ok(self)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, the fidelity between two pure states.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        let d = self.dim();
        &mut self.amps[..d]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("labels", &self.labels())
            .field("amplitudes", &self.amplitudes())
            .finish()
    }
}

/// Big-endian tensor product `a ⊗ b`.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.num_qubits + b.num_qubits;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let mut amps = [ZERO; MAX_DIM];
    for (i, x) in a.amplitudes().iter().enumerate() {
        for (j, y) in b.amplitudes().iter().enumerate() {
            amps[(i << b.num_qubits) | j] = x * y;
        }
    }
    let labels: Vec<Subsystem> = a.labels().iter().chain(b.labels()).copied().collect();
    StateVector::normalized(&amps[..1 << n], &labels)
}
