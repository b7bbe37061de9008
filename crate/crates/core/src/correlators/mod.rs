//! CHSH-type and I3322-type correlators for the three protocols, evaluated
//! exactly on the staged states as functions of the measurement settings.

mod chsh;
mod i3322;
mod scenario;

use std::sync::OnceLock;

pub use chsh::{chsh_rsp_bell, chsh_rsp_bell_with_ancilla, chsh_rsp_vn, chsh_teleport};
pub use i3322::{i3322_rsp_bell, i3322_rsp_vn, i3322_teleport, joint_prob_minus_minus};
pub use scenario::{
    CorrelatorResult, Param, ParamKind, Scenario, ScenarioKind, SettingVector, TSIRELSON,
};

use crate::qcore::{bell_projectors, pauli_direction, Observable, Operator};
use crate::{Error, Result};

fn bell_combination(signs: [f64; 4]) -> Observable {
    let [pp, pm, sp, sm] = bell_projectors();
    let terms = [
        (signs[0], pp),
        (signs[1], pm),
        (signs[2], sp),
        (signs[3], sm),
    ];
    let sum = terms
        .iter()
        .fold(Operator::identity(4).scale(0.0.into()), |acc, (k, p)| {
            &acc + &p.scale((*k).into())
        });
    Observable::new(sum).expect("real combination of projectors is Hermitian")
}

/// `A1 = P(φ−) + P(ψ−) − P(φ+) − P(ψ+)` on (ancilla, alice).
pub fn observable_a1() -> &'static Observable {
    static A1: OnceLock<Observable> = OnceLock::new();
    // order φ+, φ−, ψ+, ψ−
    A1.get_or_init(|| bell_combination([-1.0, 1.0, -1.0, 1.0]))
}

/// `A2 = −P(φ−) + P(ψ−) + P(φ+) − P(ψ+)` on (ancilla, alice).
pub fn observable_a2() -> &'static Observable {
    static A2: OnceLock<Observable> = OnceLock::new();
    A2.get_or_init(|| bell_combination([1.0, -1.0, -1.0, 1.0]))
}

/// Spin direction on Bob's Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobSetting {
    pub polar: f64,
    pub azimuth: f64,
}

impl BobSetting {
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::NonFinite("Bob setting"));
        }
        Ok(Self { polar, azimuth })
    }

    /// Angles of a unit vector.
    pub fn from_direction(n: [f64; 3]) -> Result<Self> {
        let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitVector(len));
        }
        Self::new(n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]))
    }

    pub fn direction(&self) -> [f64; 3] {
        let (sp, cp) = self.polar.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        [sp * ca, sp * sa, cp]
    }

    pub fn observable(&self) -> Observable {
        pauli_direction(self.direction()).expect("spherical angles give a unit vector")
    }
}
