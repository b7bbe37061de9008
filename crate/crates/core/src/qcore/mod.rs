//! Exact complex linear algebra for registers of at most three qubits.
//!
//! Amplitude index `i` of an `n`-qubit register encodes the ket
//! `|b_{n-1} … b_0⟩` with the first listed subsystem as the most significant
//! bit. Target lists passed to the operations below are register positions
//! (`0` is the first listed subsystem) and the first target is the most
//! significant bit of the local operator's index.

mod density;
mod gates;
mod measure;
mod operator;
mod state;

pub use density::{fidelity_pure, partial_trace, DensityMatrix};
pub use gates::{
    bell_projectors, bell_states, cnot_ancilla_target, hadamard, identity, pauli_direction,
    pauli_x, pauli_y, pauli_z, phase_gate, BellState,
};
pub use measure::{conditional_state, projective_measure, MeasurementBranch};
pub use operator::{apply_unitary, correlation, expectation, Observable, Operator, Unitary};
pub use state::{tensor, StateVector, Subsystem};

pub use num_complex::Complex64 as C64;

/// Largest register handled by this module.
pub const MAX_QUBITS: usize = 3;
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

/// Tolerance for exact algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for checks on accumulated arithmetic.
pub const ACCUMULATED_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn validate_targets(targets: &[usize], num_qubits: usize) -> crate::Result<()> {
    let bad = targets.is_empty()
        || targets.iter().any(|&t| t >= num_qubits)
        || targets
            .iter()
            .enumerate()
            .any(|(i, t)| targets[..i].contains(t));
    if bad {
        return Err(crate::Error::BadTargets(targets.to_vec()));
    }
    Ok(())
}

/// Bit mask of `qubit` inside an `n`-qubit index.
#[inline]
pub(crate) fn qubit_mask(qubit: usize, num_qubits: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// Local index formed by the target bits of `index`, first target most significant.
#[inline]
pub(crate) fn gather(index: usize, targets: &[usize], num_qubits: usize) -> usize {
    targets.iter().fold(0, |acc, &t| {
        (acc << 1) | usize::from(index & qubit_mask(t, num_qubits) != 0)
    })
}

/// Writes the bits of `local` into the target positions of `base`.
#[inline]
pub(crate) fn scatter(base: usize, local: usize, targets: &[usize], num_qubits: usize) -> usize {
    let k = targets.len();
    targets.iter().enumerate().fold(base, |acc, (j, &t)| {
        let mask = qubit_mask(t, num_qubits);
        if (local >> (k - 1 - j)) & 1 == 1 {
            acc | mask
        } else {
            acc & !mask
        }
    })
}
