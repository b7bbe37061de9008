use std::f64::consts::FRAC_1_SQRT_2;

use super::{Observable, Operator, StateVector, Subsystem, Unitary, C64, ONE, ZERO};
use crate::{Error, Result};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn unitary(rows: &[&[C64]]) -> Unitary {
    Unitary::new(Operator::from_rows(rows).expect("static gate")).expect("static gate is unitary")
}

/// `|0⟩ → (|0⟩+|1⟩)/√2`, `|1⟩ → (|0⟩−|1⟩)/√2`.
pub fn hadamard() -> Unitary {
    let h = c(FRAC_1_SQRT_2);
    unitary(&[&[h, h], &[h, -h]])
}

/// `diag(1, e^{iφ})`.
pub fn phase_gate(phi: f64) -> Unitary {
    unitary(&[&[ONE, ZERO], &[ZERO, C64::from_polar(1.0, phi)]])
}

pub fn identity(dim: usize) -> Unitary {
    Unitary::new(Operator::identity(dim)).expect("identity is unitary")
}

pub fn pauli_x() -> Unitary {
    unitary(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> Unitary {
    let i = C64::new(0.0, 1.0);
    unitary(&[&[ZERO, -i], &[i, ZERO]])
}

pub fn pauli_z() -> Unitary {
    unitary(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// CNOT on an (ancilla, alice) pair with the second qubit as control:
/// `|x⟩|0⟩ → |x⟩|0⟩`, `|x⟩|1⟩ → |x⊕1⟩|1⟩`.
pub fn cnot_ancilla_target() -> Unitary {
    // basis order |00⟩, |01⟩, |10⟩, |11⟩ with the ancilla first
    unitary(&[
        &[ONE, ZERO, ZERO, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
        &[ZERO, ZERO, ONE, ZERO],
        &[ZERO, ONE, ZERO, ZERO],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn state(self) -> StateVector {
        let h = c(FRAC_1_SQRT_2);
        let amps = match self {
            BellState::PhiPlus => [h, ZERO, ZERO, h],
            BellState::PhiMinus => [h, ZERO, ZERO, -h],
            BellState::PsiPlus => [ZERO, h, h, ZERO],
            BellState::PsiMinus => [ZERO, h, -h, ZERO],
        };
        StateVector::new(&amps, &[Subsystem::Anon, Subsystem::Anon]).expect("Bell state")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

/// `[φ+, φ−, ψ+, ψ−]`.
pub fn bell_states() -> [StateVector; 4] {
    BellState::ALL.map(BellState::state)
}

pub fn bell_projectors() -> [Operator; 4] {
    bell_states().map(|s| Operator::outer(&s))
}

/// `σ·n̂ = n_x σx + n_y σy + n_z σz` for a unit vector `n̂`.
pub fn pauli_direction(n: [f64; 3]) -> Result<Observable> {
    let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !len.is_finite() || (len - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitVector(len));
    }
    let [x, y, z] = n;
    Observable::new(Operator::from_rows(&[
        &[c(z), C64::new(x, -y)],
        &[C64::new(x, y), c(-z)],
    ])?)
}
