use super::{make_branch, AncillaState, Outcome, ProtocolRun, ResourceState, Scheme, TargetSpec};
use crate::qcore::{
    apply_unitary, bell_projectors, cnot_ancilla_target, conditional_state, hadamard, pauli_z,
    phase_gate, projective_measure, tensor, BellState, Operator, StateVector, Subsystem, Unitary,
};
use crate::Result;

const ALICE: usize = 0;

/// Bob's fix-up for the `−1` / `{φ−, ψ−}` outcomes: the phase flip `diag(1, −1)`.
pub fn rsp_correction() -> Unitary {
    pauli_z()
}

fn phased_resource(theta: f64, phi: f64) -> Result<StateVector> {
    let target = TargetSpec::new(theta, phi)?;
    let d = ResourceState::new(target.theta())?.state();
    apply_unitary(&phase_gate(target.phi()), &[ALICE], &d)
}

/// Alice's phase rotation followed by a Hadamard on her qubit of the resource;
/// register (alice, bob).
pub fn stage_rsp_vn(theta: f64, phi: f64) -> Result<StateVector> {
    apply_unitary(&hadamard(), &[ALICE], &phased_resource(theta, phi)?)
}

pub fn run_rsp_vn(theta: f64, phi: f64) -> Result<ProtocolRun> {
    run_rsp_vn_with_correction(theta, phi, &rsp_correction())
}

/// RSP-vN with a caller-chosen correction for the `−1` outcome.
pub fn run_rsp_vn_with_correction(
    theta: f64,
    phi: f64,
    minus_correction: &Unitary,
) -> Result<ProtocolRun> {
    let staged = stage_rsp_vn(theta, phi)?;
    let kets = [0, 1].map(|b| StateVector::basis(b, &[Subsystem::Alice]).expect("basis ket"));
    let projectors = kets.each_ref().map(Operator::outer);
    let measured = projective_measure(&staged, &[ALICE], &projectors)?;
    let identity = crate::qcore::identity(2);
    let mut branches = Vec::with_capacity(2);
    for ((ket, sign), m) in kets.iter().zip([1i8, -1]).zip(&measured) {
        let (_, bob) = conditional_state(&staged, &[ALICE], ket)?;
        let correction = if sign > 0 {
            &identity
        } else {
            minus_correction
        };
        branches.push(make_branch(
            Outcome::SigmaZ(sign),
            m.probability,
            bob,
            correction,
        )?);
    }
    Ok(ProtocolRun {
        scheme: Scheme::RspVn,
        branches,
        classical_bits: Scheme::RspVn.classical_bits(),
    })
}

/// Ancilla ⊗ phased resource followed by the CNOT with Alice's qubit as
/// control; register (ancilla, alice, bob).
pub fn stage_rsp_bell(theta: f64, phi: f64, ancilla: &AncillaState) -> Result<StateVector> {
    let joint = tensor(&ancilla.state(), &phased_resource(theta, phi)?)?;
    apply_unitary(&cnot_ancilla_target(), &[0, 1], &joint)
}

pub fn run_rsp_bell(theta: f64, phi: f64, ancilla: &AncillaState) -> Result<ProtocolRun> {
    run_rsp_bell_with_correction(theta, phi, ancilla, &rsp_correction())
}

/// RSP-Bell with a caller-chosen correction for the `{φ−, ψ−}` pair.
pub fn run_rsp_bell_with_correction(
    theta: f64,
    phi: f64,
    ancilla: &AncillaState,
    minus_correction: &Unitary,
) -> Result<ProtocolRun> {
    let staged = stage_rsp_bell(theta, phi, ancilla)?;
    let measured = projective_measure(&staged, &[0, 1], &bell_projectors())?;
    let identity = crate::qcore::identity(2);
    let mut branches = Vec::with_capacity(4);
    for (bell, m) in BellState::ALL.iter().zip(&measured) {
        let (_, bob) = conditional_state(&staged, &[0, 1], &bell.state())?;
        let correction = match bell {
            BellState::PhiPlus | BellState::PsiPlus => &identity,
            BellState::PhiMinus | BellState::PsiMinus => minus_correction,
        };
        branches.push(make_branch(
            Outcome::Bell(*bell),
            m.probability,
            bob,
            correction,
        )?);
    }
    Ok(ProtocolRun {
        scheme: Scheme::RspBell,
        branches,
        classical_bits: Scheme::RspBell.classical_bits(),
    })
}
