use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::{
    chsh_rsp_bell, chsh_rsp_vn, chsh_teleport, i3322_rsp_bell, i3322_rsp_vn, i3322_teleport,
    BobSetting,
};
use crate::protocols::{check_theta, AncillaState};
use crate::{Error, Result};

/// Quantum maximum `2√2` of a CHSH expression.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    TeleChsh,
    RspVnChsh,
    RspBellChsh,
    TeleI3322,
    RspVnI3322,
    RspBellI3322,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::TeleChsh,
        ScenarioKind::RspVnChsh,
        ScenarioKind::RspBellChsh,
        ScenarioKind::TeleI3322,
        ScenarioKind::RspVnI3322,
        ScenarioKind::RspBellI3322,
    ];
    pub const CHSH: [ScenarioKind; 3] = [
        ScenarioKind::TeleChsh,
        ScenarioKind::RspVnChsh,
        ScenarioKind::RspBellChsh,
    ];
    pub const I3322: [ScenarioKind; 3] = [
        ScenarioKind::TeleI3322,
        ScenarioKind::RspVnI3322,
        ScenarioKind::RspBellI3322,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TeleChsh => "tele-chsh",
            ScenarioKind::RspVnChsh => "rsp-vn-chsh",
            ScenarioKind::RspBellChsh => "rsp-bell-chsh",
            ScenarioKind::TeleI3322 => "tele-i3322",
            ScenarioKind::RspVnI3322 => "rsp-vn-i3322",
            ScenarioKind::RspBellI3322 => "rsp-bell-i3322",
        }
    }

    pub fn is_chsh(self) -> bool {
        Self::CHSH.contains(&self)
    }

    fn is_teleport(self) -> bool {
        matches!(self, ScenarioKind::TeleChsh | ScenarioKind::TeleI3322)
    }

    fn alice_settings(self) -> usize {
        if self.is_chsh() {
            2
        } else {
            3
        }
    }

    /// Named free parameters, Alice's first, then Bob's `(polar, azimuth)` pairs.
    pub fn layout(self) -> Vec<Param> {
        let mut params = Vec::new();
        let settings = self.alice_settings();
        for i in 1..=settings {
            if self.is_teleport() {
                params.push(Param::new(format!("eta{i}_polar"), ParamKind::Polar));
                params.push(Param::new(format!("eta{i}_azimuth"), ParamKind::Azimuth));
            } else {
                params.push(Param::new(format!("phi{i}"), ParamKind::Phase));
            }
        }
        for i in 1..=settings {
            params.push(Param::new(format!("n{i}_polar"), ParamKind::Polar));
            params.push(Param::new(format!("n{i}_azimuth"), ParamKind::Azimuth));
        }
        params
    }

    pub fn dimension(self) -> usize {
        let settings = self.alice_settings();
        let alice = if self.is_teleport() { 2 } else { 1 };
        settings * (alice + 2)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Alice's phase, period `2π`.
    Phase,
    /// Polar angle on a Bloch sphere, followed in the layout by its azimuth.
    Polar,
    Azimuth,
}

impl ParamKind {
    /// Natural range of the parameter.
    pub fn range(self) -> (f64, f64) {
        match self {
            ParamKind::Polar => (0.0, PI),
            ParamKind::Phase | ParamKind::Azimuth => (0.0, TAU),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
}

impl Param {
    fn new(name: String, kind: ParamKind) -> Self {
        Self { name, kind }
    }
}

/// Flat list of free settings in the order given by [`ScenarioKind::layout`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SettingVector(pub Vec<f64>);

impl SettingVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One correlator at one entanglement angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    kind: ScenarioKind,
    theta: f64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, theta: f64) -> Result<Self> {
        Ok(Self {
            kind,
            theta: check_theta(theta)?,
        })
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn layout(&self) -> Vec<Param> {
        self.kind.layout()
    }

    /// Correlator value at `settings`: `|B|` for CHSH kinds, the signed
    /// expression for I3322 kinds.
    pub fn evaluate(&self, settings: &[f64]) -> Result<f64> {
        let dim = self.kind.dimension();
        if settings.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: settings.len(),
            });
        }
        if settings.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("settings"));
        }
        let k = self.kind.alice_settings();
        let (alice, bob) = settings.split_at(settings.len() - 2 * k);
        let n = |i: usize| BobSetting::new(bob[2 * i], bob[2 * i + 1]).map(|b| b.direction());
        let eta = |i: usize| AncillaState::from_bloch(alice[2 * i], alice[2 * i + 1]);
        let t = self.theta;
        match self.kind {
            ScenarioKind::TeleChsh => chsh_teleport(t, &eta(0)?, &eta(1)?, n(0)?, n(1)?),
            ScenarioKind::RspVnChsh => chsh_rsp_vn(t, alice[0], alice[1], n(0)?, n(1)?),
            ScenarioKind::RspBellChsh => chsh_rsp_bell(t, alice[0], alice[1], n(0)?, n(1)?),
            ScenarioKind::TeleI3322 => {
                i3322_teleport(t, &[eta(0)?, eta(1)?, eta(2)?], &[n(0)?, n(1)?, n(2)?])
            }
            ScenarioKind::RspVnI3322 => {
                i3322_rsp_vn(t, &[alice[0], alice[1], alice[2]], &[n(0)?, n(1)?, n(2)?])
            }
            ScenarioKind::RspBellI3322 => {
                i3322_rsp_bell(t, &[alice[0], alice[1], alice[2]], &[n(0)?, n(1)?, n(2)?])
            }
        }
    }

    /// Maps settings onto their natural ranges without changing the point
    /// they describe: phases and azimuths to `[0, 2π)`, polar angles to
    /// `[0, π]` (reflecting through the pole shifts the azimuth by `π`).
    pub fn canonicalize(&self, settings: &[f64]) -> SettingVector {
        let layout = self.kind.layout();
        let mut out = settings.to_vec();
        let mut i = 0;
        while i < out.len().min(layout.len()) {
            match layout[i].kind {
                ParamKind::Polar if i + 1 < out.len() => {
                    let mut p = out[i].rem_euclid(TAU);
                    let mut az = out[i + 1];
                    if p > PI {
                        p = TAU - p;
                        az += PI;
                    }
                    out[i] = p;
                    out[i + 1] = az.rem_euclid(TAU);
                    i += 2;
                }
                _ => {
                    out[i] = out[i].rem_euclid(TAU);
                    i += 1;
                }
            }
        }
        SettingVector(out)
    }
}

/// Optimized correlator value with the settings that achieve it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorResult {
    pub scenario: Scenario,
    pub value: f64,
    pub settings: SettingVector,
    pub evaluations: u64,
    pub converged: bool,
    /// Largest value seen across every evaluation of the search.
    pub peak_evaluated: f64,
}
