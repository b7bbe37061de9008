use rayon::prelude::*;

use super::{check_theta, run_teleport, AncillaState};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Average teleportation fidelity over all input states,
/// `(2/3)(cos³θ − sin³θ)/(cos θ − sin θ)`, evaluated as `(2/3)(1 + sin θ cos θ)`
/// so that `θ = π/4` needs no limit.
pub fn teleport_fidelity_closed(theta: f64) -> Result<f64> {
    let theta = check_theta(theta)?;
    let (s, c) = theta.sin_cos();
    Ok(2.0 / 3.0 * (1.0 + s * c))
}

/// Equal-area grid on the Bloch sphere: `bands` cells uniform in `cos(polar)`
/// times `azimuths` cells uniform in azimuth, one node at each cell midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub bands: usize,
    pub azimuths: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            bands: 2000,
            azimuths: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn nodes(&self) -> usize {
        self.bands * self.azimuths
    }
}

/// Haar average of the teleportation fidelity, each input weighted over
/// Alice's outcomes by their probabilities.
pub fn teleport_fidelity_numeric(theta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let theta = check_theta(theta)?;
    if spec.bands == 0 || spec.azimuths == 0 {
        return Err(Error::InvalidInput(
            "quadrature needs at least one node".into(),
        ));
    }
    let bands: Vec<Result<CompensatedSum>> = (0..spec.bands)
        .into_par_iter()
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / spec.bands as f64;
            let polar = z.clamp(-1.0, 1.0).acos();
            let mut band = CompensatedSum::default();
            for j in 0..spec.azimuths {
                let azimuth = std::f64::consts::TAU * (j as f64 + 0.5) / spec.azimuths as f64;
                let eta = AncillaState::from_bloch(polar, azimuth)?;
                band.add(run_teleport(theta, &eta)?.fidelity(&eta.state())?);
            }
            Ok(band)
        })
        .collect();
    let mut total = CompensatedSum::default();
    for band in bands {
        total.merge(band?);
    }
    Ok(total.value() / spec.nodes() as f64)
}
