use super::{make_branch, AncillaState, Outcome, ProtocolRun, ResourceState, Scheme};
use crate::qcore::{
    bell_projectors, conditional_state, identity, pauli_x, pauli_z, projective_measure, tensor,
    BellState, Unitary,
};
use crate::Result;

/// Bob's corrections in `[φ+, φ−, ψ+, ψ−]` order: `I`, `σz`, `σx`, `σx·σz`.
pub fn teleport_corrections() -> [Unitary; 4] {
    [
        identity(2),
        pauli_z(),
        pauli_x(),
        pauli_x().then_after(&pauli_z()),
    ]
}

/// Teleports `eta` through the resource with the standard corrections.
pub fn run_teleport(theta: f64, eta: &AncillaState) -> Result<ProtocolRun> {
    run_teleport_with_corrections(theta, eta, &teleport_corrections())
}

/// Teleportation with corrections given in `[φ+, φ−, ψ+, ψ−]` order.
pub fn run_teleport_with_corrections(
    theta: f64,
    eta: &AncillaState,
    corrections: &[Unitary; 4],
) -> Result<ProtocolRun> {
    let joint = tensor(&eta.state(), &ResourceState::new(theta)?.state())?;
    let measured = projective_measure(&joint, &[0, 1], &bell_projectors())?;
    let mut branches = Vec::with_capacity(4);
    for ((bell, m), u) in BellState::ALL.iter().zip(&measured).zip(corrections) {
        let (_, bob) = conditional_state(&joint, &[0, 1], &bell.state())?;
        branches.push(make_branch(Outcome::Bell(*bell), m.probability, bob, u)?);
    }
    Ok(ProtocolRun {
        scheme: Scheme::Teleport,
        branches,
        classical_bits: Scheme::Teleport.classical_bits(),
    })
}
