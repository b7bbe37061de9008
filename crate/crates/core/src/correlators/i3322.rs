use super::{observable_a1, observable_a2};
use crate::protocols::{resource_state, stage_rsp_bell, stage_rsp_vn, AncillaState};
use crate::qcore::{
    partial_trace, pauli_direction, pauli_z, tensor, validate_targets, Observable, StateVector,
};
use crate::{Error, Result};

/// `⟨s| Π₋(mA) ⊗ Π₋(mB) |s⟩` with `Π₋(M) = (I − M)/2`: the probability that
/// both bivalent observables return `−1`.
pub fn joint_prob_minus_minus(
    m_a: &Observable,
    targets_a: &[usize],
    m_b: &Observable,
    targets_b: &[usize],
    s: &StateVector,
) -> Result<f64> {
    let pa = m_a.minus_projector()?;
    let pb = m_b.minus_projector()?;
    validate_targets(targets_a, s.num_qubits())?;
    validate_targets(targets_b, s.num_qubits())?;
    if targets_a.iter().any(|t| targets_b.contains(t)) {
        return Err(Error::BadTargets(
            targets_a.iter().chain(targets_b).copied().collect(),
        ));
    }
    if pa.dim() != 1 << targets_a.len() || pb.dim() != 1 << targets_b.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << targets_a.len(),
            got: pa.dim(),
        });
    }
    let projected = pa.apply_raw(targets_a, &pb.apply_raw(targets_b, s));
    Ok(s.inner(&projected)?.re)
}

/// One protocol's I3322 ingredients: the three states Alice's settings
/// produce, her observable for each, and where Alice's and Bob's qubits sit.
struct I3322Setup<'a> {
    states: [StateVector; 3],
    alice_obs: [&'a Observable; 3],
    alice: &'a [usize],
    bob: &'a [usize],
}

/// Signed I3322 expression
/// `P11 + P21 + P31 + P12 + P22 − P32 + P13 − P23 − P_A(1) − 2 P_B(1) − P_B(2)`,
/// with `Pxy` the `(−1, −1)` probability for Alice setting `x` and Bob
/// setting `y`, and marginals taken on the reduced states of setting 1.
fn i3322_form(setup: &I3322Setup<'_>, ns: &[[f64; 3]; 3]) -> Result<f64> {
    const JOINT: [(usize, usize, f64); 8] = [
        (0, 0, 1.0),
        (1, 0, 1.0),
        (2, 0, 1.0),
        (0, 1, 1.0),
        (1, 1, 1.0),
        (2, 1, -1.0),
        (0, 2, 1.0),
        (1, 2, -1.0),
    ];
    let sigmas = [
        pauli_direction(ns[0])?,
        pauli_direction(ns[1])?,
        pauli_direction(ns[2])?,
    ];
    let mut value = 0.0;
    for (x, y, k) in JOINT {
        value += k * joint_prob_minus_minus(
            setup.alice_obs[x],
            setup.alice,
            &sigmas[y],
            setup.bob,
            &setup.states[x],
        )?;
    }
    let first = &setup.states[0];
    let rho_alice = partial_trace(first, setup.alice)?;
    let rho_bob = partial_trace(first, setup.bob)?;
    value -= rho_alice.prob_minus(setup.alice_obs[0])?;
    value -= 2.0 * rho_bob.prob_minus(&sigmas[0])?;
    value -= rho_bob.prob_minus(&sigmas[1])?;
    Ok(value)
}

/// Teleportation I3322 expression: Alice measures `A1` for `etas[0]` and
/// `etas[1]`, `A2` for `etas[2]`.
pub fn i3322_teleport(theta: f64, etas: &[AncillaState; 3], ns: &[[f64; 3]; 3]) -> Result<f64> {
    let d = resource_state(theta)?;
    let states = [
        tensor(&etas[0].state(), &d)?,
        tensor(&etas[1].state(), &d)?,
        tensor(&etas[2].state(), &d)?,
    ];
    let (a1, a2) = (observable_a1(), observable_a2());
    i3322_form(
        &I3322Setup {
            states,
            alice_obs: [a1, a1, a2],
            alice: &[0, 1],
            bob: &[2],
        },
        ns,
    )
}

/// RSP-vN I3322 expression: Alice's settings are three phases, her
/// observable is σz each time.
pub fn i3322_rsp_vn(theta: f64, phis: &[f64; 3], ns: &[[f64; 3]; 3]) -> Result<f64> {
    let states = [
        stage_rsp_vn(theta, phis[0])?,
        stage_rsp_vn(theta, phis[1])?,
        stage_rsp_vn(theta, phis[2])?,
    ];
    let z = Observable::new(pauli_z().operator().clone())?;
    i3322_form(
        &I3322Setup {
            states,
            alice_obs: [&z, &z, &z],
            alice: &[0],
            bob: &[1],
        },
        ns,
    )
}

/// RSP-Bell I3322 expression with the ancilla in `|0⟩`: `A1` for the first
/// two phases, `A2` for the third.
pub fn i3322_rsp_bell(theta: f64, phis: &[f64; 3], ns: &[[f64; 3]; 3]) -> Result<f64> {
    let anc = AncillaState::zero();
    let states = [
        stage_rsp_bell(theta, phis[0], &anc)?,
        stage_rsp_bell(theta, phis[1], &anc)?,
        stage_rsp_bell(theta, phis[2], &anc)?,
    ];
    let (a1, a2) = (observable_a1(), observable_a2());
    i3322_form(
        &I3322Setup {
            states,
            alice_obs: [a1, a1, a2],
            alice: &[0, 1],
            bob: &[2],
        },
        ns,
    )
}
