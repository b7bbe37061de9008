//! The three information-transfer protocols run end to end on exact states:
//! teleportation, remote state preparation by a single-qubit von Neumann
//! measurement (RSP-vN) and remote state preparation by a Bell measurement
//! with an ancilla (RSP-Bell).

mod fidelity;
mod rsp;
mod teleport;

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;

pub use fidelity::{teleport_fidelity_closed, teleport_fidelity_numeric, QuadratureSpec};
pub use rsp::{
    rsp_correction, run_rsp_bell, run_rsp_bell_with_correction, run_rsp_vn,
    run_rsp_vn_with_correction, stage_rsp_bell, stage_rsp_vn,
};
pub use teleport::{run_teleport, run_teleport_with_corrections, teleport_corrections};

use crate::qcore::{
    BellState, DensityMatrix, Operator, StateVector, Subsystem, ALGEBRAIC_TOL, C64,
};
use crate::{Error, Result};

pub(crate) fn check_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() || !(-ALGEBRAIC_TOL..=FRAC_PI_4 + ALGEBRAIC_TOL).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(theta.clamp(0.0, FRAC_PI_4))
}

fn check_phase(phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::NonFinite("phase"));
    }
    Ok(phi.rem_euclid(TAU))
}

/// Shared pair `cos θ|00⟩ + sin θ|11⟩` on (alice, bob), `θ ∈ [0, π/4]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceState {
    theta: f64,
}

impl ResourceState {
    pub fn new(theta: f64) -> Result<Self> {
        Ok(Self {
            theta: check_theta(theta)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn state(&self) -> StateVector {
        let (s, c) = self.theta.sin_cos();
        let zero = C64::new(0.0, 0.0);
        StateVector::new(
            &[C64::new(c, 0.0), zero, zero, C64::new(s, 0.0)],
            &[Subsystem::Alice, Subsystem::Bob],
        )
        .expect("resource state is normalized")
    }
}

pub fn resource_state(theta: f64) -> Result<StateVector> {
    Ok(ResourceState::new(theta)?.state())
}

/// The state `cos θ|0⟩ + e^{iφ} sin θ|1⟩` Alice wants at Bob's end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    theta: f64,
    phi: f64,
}

impl TargetSpec {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            theta: check_theta(theta)?,
            phi: check_phase(phi)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Azimuth reduced to `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn state(&self) -> StateVector {
        let (s, c) = self.theta.sin_cos();
        StateVector::new(
            &[C64::new(c, 0.0), C64::from_polar(s, self.phi)],
            &[Subsystem::Bob],
        )
        .expect("target state is normalized")
    }
}

/// Single-qubit input `a|0⟩ + b|1⟩` held by Alice: the helper qubit of
/// RSP-Bell, or the state to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaState {
    a: C64,
    b: C64,
}

impl AncillaState {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        if ![a.re, a.im, b.re, b.im].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("ancilla amplitudes"));
        }
        let n2 = a.norm_sqr() + b.norm_sqr();
        if (n2 - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { a, b })
    }

    pub fn zero() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: C64::new(0.0, 0.0),
        }
    }

    /// `cos(p/2)|0⟩ + e^{iφ} sin(p/2)|1⟩`.
    pub fn from_bloch(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::NonFinite("Bloch angles"));
        }
        let (s, c) = (polar / 2.0).sin_cos();
        Self::new(C64::new(c, 0.0), C64::from_polar(s, azimuth))
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn state(&self) -> StateVector {
        StateVector::new(&[self.a, self.b], &[Subsystem::Ancilla])
            .expect("ancilla state is normalized")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Teleport,
    RspVn,
    RspBell,
}

impl Scheme {
    pub fn classical_bits(self) -> u32 {
        match self {
            Scheme::Teleport => 2,
            Scheme::RspVn | Scheme::RspBell => 1,
        }
    }
}

/// Alice's measurement result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// σz eigenvalue `+1` (`|0⟩`) or `−1` (`|1⟩`).
    SigmaZ(i8),
    Bell(BellState),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::SigmaZ(v) => write!(f, "{v:+}"),
            Outcome::Bell(b) => f.write_str(b.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    /// Bob's conditional state before and after his correction; `None` when
    /// the outcome cannot occur.
    pub bob_pre_correction: Option<StateVector>,
    pub bob_post_correction: Option<StateVector>,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub scheme: Scheme,
    pub branches: Vec<Branch>,
    pub classical_bits: u32,
}

impl ProtocolRun {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Bob's state after correction, mixed over Alice's outcomes.
    pub fn bob_state(&self) -> DensityMatrix {
        let mut rho = Operator::identity(2).scale(C64::new(0.0, 0.0));
        for b in &self.branches {
            if let Some(s) = &b.bob_post_correction {
                rho = &rho + &Operator::outer(s).scale(C64::new(b.probability, 0.0));
            }
        }
        DensityMatrix::new(rho).expect("branch mixture is a density matrix")
    }

    /// `⟨target|ρ_Bob|target⟩` with `ρ_Bob` the corrected branch mixture.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        crate::qcore::fidelity_pure(target, &self.bob_state())
    }

    /// Smallest post-correction fidelity over the branches that occur.
    pub fn worst_branch_fidelity(&self, target: &StateVector) -> Result<f64> {
        let mut worst = 1.0f64;
        for b in &self.branches {
            if let Some(s) = &b.bob_post_correction {
                worst = worst.min(target.overlap(s)?);
            }
        }
        Ok(worst)
    }
}

pub(crate) fn make_branch(
    outcome: Outcome,
    probability: f64,
    bob: Option<StateVector>,
    correction: &crate::qcore::Unitary,
) -> Result<Branch> {
    let post = match &bob {
        Some(s) => Some(crate::qcore::apply_unitary(correction, &[0], s)?),
        None => None,
    };
    Ok(Branch {
        outcome,
        probability,
        bob_pre_correction: bob,
        bob_post_correction: post,
    })
}
