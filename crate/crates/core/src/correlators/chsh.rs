use super::{observable_a1, observable_a2};
use crate::protocols::{resource_state, stage_rsp_bell, stage_rsp_vn, AncillaState};
use crate::qcore::{correlation, pauli_direction, pauli_z, tensor, Observable, StateVector};
use crate::Result;

const ANCILLA_ALICE: [usize; 2] = [0, 1];
const BOB_OF_THREE: [usize; 1] = [2];

fn sigma_z() -> Observable {
    Observable::new(pauli_z().operator().clone()).expect("σz is Hermitian")
}

/// `|⟨a1⊗σ1⟩₁ + ⟨a1⊗σ2⟩₁ + ⟨a2⊗σ1⟩₂ − ⟨a2⊗σ2⟩₂|`, where `⟨·⟩ₖ` is taken on
/// `states[k]` with Alice's observable on `alice` and Bob's on `bob`.
fn chsh_form(
    states: [&StateVector; 2],
    alice_obs: [&Observable; 2],
    alice: &[usize],
    bob: &[usize],
    n1: [f64; 3],
    n2: [f64; 3],
) -> Result<f64> {
    let s1 = pauli_direction(n1)?;
    let s2 = pauli_direction(n2)?;
    let [a1, a2] = alice_obs;
    let value = correlation(a1, alice, &s1, bob, states[0])?
        + correlation(a1, alice, &s2, bob, states[0])?
        + correlation(a2, alice, &s1, bob, states[1])?
        - correlation(a2, alice, &s2, bob, states[1])?;
    Ok(value.abs())
}

/// Teleportation correlator: Alice measures `A1` while teleporting `eta1` and
/// `A2` while teleporting `eta2`; Bob measures `σ·n̂1` or `σ·n̂2`.
pub fn chsh_teleport(
    theta: f64,
    eta1: &AncillaState,
    eta2: &AncillaState,
    n1: [f64; 3],
    n2: [f64; 3],
) -> Result<f64> {
    let d = resource_state(theta)?;
    let s1 = tensor(&eta1.state(), &d)?;
    let s2 = tensor(&eta2.state(), &d)?;
    chsh_form(
        [&s1, &s2],
        [observable_a1(), observable_a2()],
        &ANCILLA_ALICE,
        &BOB_OF_THREE,
        n1,
        n2,
    )
}

/// RSP-vN correlator: Alice's setting is her phase `φ`, her observable is
/// always σz after the Hadamard.
pub fn chsh_rsp_vn(theta: f64, phi1: f64, phi2: f64, n1: [f64; 3], n2: [f64; 3]) -> Result<f64> {
    let s1 = stage_rsp_vn(theta, phi1)?;
    let s2 = stage_rsp_vn(theta, phi2)?;
    let z = sigma_z();
    chsh_form([&s1, &s2], [&z, &z], &[0], &[1], n1, n2)
}

/// RSP-Bell correlator with the ancilla prepared in `|0⟩`.
pub fn chsh_rsp_bell(theta: f64, phi1: f64, phi2: f64, n1: [f64; 3], n2: [f64; 3]) -> Result<f64> {
    chsh_rsp_bell_with_ancilla(theta, phi1, phi2, n1, n2, &AncillaState::zero())
}

pub fn chsh_rsp_bell_with_ancilla(
    theta: f64,
    phi1: f64,
    phi2: f64,
    n1: [f64; 3],
    n2: [f64; 3],
    ancilla: &AncillaState,
) -> Result<f64> {
    let s1 = stage_rsp_bell(theta, phi1, ancilla)?;
    let s2 = stage_rsp_bell(theta, phi2, ancilla)?;
    chsh_form(
        [&s1, &s2],
        [observable_a1(), observable_a2()],
        &ANCILLA_ALICE,
        &BOB_OF_THREE,
        n1,
        n2,
    )
}
