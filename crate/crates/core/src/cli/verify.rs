//! Self-check suites run by `belltide verify`.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Fault, RunConfig};
use crate::correlators::{ScenarioKind, TSIRELSON};
use crate::optimizer::{sweep, OptimizerConfig, SweepResult};
use crate::protocols::{
    rsp_correction, run_rsp_bell_with_correction, run_rsp_vn_with_correction,
    teleport_fidelity_closed, teleport_fidelity_numeric, AncillaState, QuadratureSpec, TargetSpec,
};
use crate::qcore::{pauli_x, Unitary};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, first failing assertion otherwise.
    pub detail: String,
}

impl SuiteReport {
    fn from_check(name: &'static str, r: Result<std::result::Result<String, String>>) -> Self {
        match r {
            Ok(Ok(detail)) => Self {
                name,
                passed: true,
                detail,
            },
            Ok(Err(detail)) => Self {
                name,
                passed: false,
                detail,
            },
            Err(e) => Self {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }
}

fn random_ancilla(rng: &mut ChaCha8Rng) -> Result<AncillaState> {
    AncillaState::from_bloch(
        rng.random_range(-1.0f64..=1.0).acos(),
        rng.random_range(0.0..TAU),
    )
}

fn correction(fault: Option<Fault>) -> Unitary {
    match fault {
        Some(Fault::FlipCorrection) => pauli_x(),
        None => rsp_correction(),
    }
}

type Check = Result<std::result::Result<String, String>>;

/// Every branch of RSP-vN and RSP-Bell leaves Bob with the target state.
pub fn protocol_determinism(samples: usize, seed: u64, fault: Option<Fault>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fix = correction(fault);
    for i in 0..samples {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let target = TargetSpec::new(theta, phi)?.state();
        let f = run_rsp_vn_with_correction(theta, phi, &fix)?.worst_branch_fidelity(&target)?;
        if f < 1.0 - 1e-10 {
            return Ok(Err(format!(
                "rsp-vn sample {i}: fidelity {f:.12} < 1-1e-10 at theta={theta}, phi={phi}"
            )));
        }
    }
    for i in 0..samples {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let anc = random_ancilla(&mut rng)?;
        let target = TargetSpec::new(theta, phi)?.state();
        let f =
            run_rsp_bell_with_correction(theta, phi, &anc, &fix)?.worst_branch_fidelity(&target)?;
        if f < 1.0 - 1e-10 {
            return Ok(Err(format!(
                "rsp-bell sample {i}: fidelity {f:.12} < 1-1e-10 at theta={theta}, phi={phi}"
            )));
        }
    }
    Ok(Ok(format!(
        "{samples} rsp-vn and {samples} rsp-bell samples exact"
    )))
}

/// RSP-Bell outcome pairs each occur with probability 1/2 whatever the ancilla.
pub fn ancilla_independence(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let anc = random_ancilla(&mut rng)?;
        let run = run_rsp_bell_with_correction(theta, phi, &anc, &rsp_correction())?;
        let p = |k: usize| run.branches[k].probability;
        // order φ+, φ−, ψ+, ψ−
        for (pair, value) in [("phi+/psi+", p(0) + p(2)), ("phi-/psi-", p(1) + p(3))] {
            let dev = (value - 0.5).abs();
            worst = worst.max(dev);
            if dev > 1e-12 {
                return Ok(Err(format!(
                    "sample {i}: P({pair}) = {value:.15} differs from 1/2 by {dev:e}"
                )));
            }
        }
    }
    Ok(Ok(format!("{samples} ancillae, worst deviation {worst:e}")))
}

/// Closed-form teleportation fidelity against the Haar quadrature.
pub fn fidelity_oracle(points: usize, quadrature: &QuadratureSpec) -> Check {
    let f0 = teleport_fidelity_closed(0.0)?;
    if f0 != 2.0 / 3.0 {
        return Ok(Err(format!("F(0) = {f0}, expected 2/3")));
    }
    let f1 = teleport_fidelity_closed(FRAC_PI_4)?;
    if f1 != 1.0 {
        return Ok(Err(format!("F(pi/4) = {f1}, expected 1")));
    }
    let f8 = teleport_fidelity_closed(FRAC_PI_8)?;
    let expected = 2.0 / 3.0 * (1.0 + 1.0 / (2.0 * std::f64::consts::SQRT_2));
    if (f8 - expected).abs() > 1e-9 {
        return Ok(Err(format!("F(pi/8) = {f8}, expected {expected}")));
    }
    let mut worst = 0.0f64;
    for i in 0..points {
        let theta = FRAC_PI_4 * i as f64 / (points - 1).max(1) as f64;
        let closed = teleport_fidelity_closed(theta)?;
        let numeric = teleport_fidelity_numeric(theta, quadrature)?;
        let err = (closed - numeric).abs();
        worst = worst.max(err);
        if err > 1e-6 {
            return Ok(Err(format!(
                "theta={theta}: closed {closed} vs numeric {numeric} (|err| {err:e} > 1e-6)"
            )));
        }
    }
    Ok(Ok(format!("{points} angles, worst |err| {worst:e}")))
}

/// Pairwise pointwise agreement of the three CHSH curves.
pub fn curve_overlap(sweeps: &[SweepResult]) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for (i, a) in sweeps.iter().enumerate() {
        for b in &sweeps[i + 1..] {
            for ((t, x), y) in a.theta_grid.iter().zip(&a.values).zip(&b.values) {
                let d = (x - y).abs();
                worst = worst.max(d);
                if d >= 5e-3 {
                    return Err(format!(
                        "{} vs {} at theta={t}: {x} vs {y} (|diff| {d:e} >= 5e-3)",
                        a.kind, b.kind
                    ));
                }
            }
        }
    }
    Ok(format!("worst pairwise |diff| {worst:e}"))
}

/// No evaluated CHSH value above `2√2`.
pub fn tsirelson_ceiling(sweeps: &[SweepResult]) -> std::result::Result<String, String> {
    let peak = sweeps
        .iter()
        .map(SweepResult::peak_evaluated)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak > TSIRELSON + 1e-9 {
        Err(format!("evaluated value {peak} exceeds 2*sqrt(2) + 1e-9"))
    } else {
        Ok(format!("largest evaluated value {peak:.12}"))
    }
}

fn chsh_sweeps(steps: usize, optimizer: &OptimizerConfig) -> Result<Vec<SweepResult>> {
    ScenarioKind::CHSH
        .iter()
        .map(|&k| sweep(k, 0.0, FRAC_PI_4, steps, optimizer))
        .collect()
}

pub fn run_verify(cfg: &RunConfig) -> Vec<SuiteReport> {
    let seed = cfg.optimizer.rng_seed;
    let (samples, fid_points, steps) = if cfg.quick {
        (200, 10, 9)
    } else {
        (1000, 50, 65)
    };
    let mut reports = vec![
        SuiteReport::from_check(
            "protocol-determinism",
            protocol_determinism(samples, seed, cfg.fault),
        ),
        SuiteReport::from_check(
            "fidelity-oracle",
            fidelity_oracle(fid_points, &cfg.quadrature),
        ),
    ];
    match chsh_sweeps(steps, &cfg.optimizer) {
        Ok(sweeps) => {
            reports.push(SuiteReport::from_check(
                "curve-overlap",
                Ok(curve_overlap(&sweeps)),
            ));
            reports.push(SuiteReport::from_check(
                "tsirelson-ceiling",
                Ok(tsirelson_ceiling(&sweeps)),
            ));
        }
        Err(e) => {
            for name in ["curve-overlap", "tsirelson-ceiling"] {
                reports.push(SuiteReport::from_check(name, Err(e.clone())));
            }
        }
    }
    reports.push(SuiteReport::from_check(
        "ancilla-independence",
        ancilla_independence(samples, seed.wrapping_add(1)),
    ));
    reports
}
