//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.
//!
//! Criteria listed in `EXPECTED_FAILURES` are known not to hold for the
//! implemented model; they still run and print their measurements, and the
//! binary fails if one of them starts passing.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use belltide::correlators::{Scenario, ScenarioKind, TSIRELSON};
use belltide::optimizer::{find_crossing, maximize, sweep, OptimizerConfig, SweepResult};
use belltide::protocols::{
    run_rsp_bell, run_rsp_vn, teleport_fidelity_closed, teleport_fidelity_numeric, AncillaState,
    QuadratureSpec, TargetSpec,
};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_FAILURES: &[u32] = &[7];

struct Verdict {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn verdict(id: u32, title: &'static str, passed: bool, detail: String) -> Verdict {
    Verdict {
        id,
        title,
        passed,
        detail,
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

// ---- independent dense-matrix oracle -------------------------------------

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn paulis() -> [[C; 4]; 4] {
    let (o, l, i) = (c(0.0), c(1.0), C::new(0.0, 1.0));
    [[l, o, o, l], [o, l, l, o], [o, -i, i, o], [l, o, o, -l]]
}

fn kron(a: &[C], da: usize, b: &[C], db: usize) -> Vec<C> {
    let d = da * db;
    let mut m = vec![c(0.0); d * d];
    for r in 0..d {
        for col in 0..d {
            m[r * d + col] = a[(r / db) * da + col / db] * b[(r % db) * db + col % db];
        }
    }
    m
}

fn expect(psi: &[C], m: &[C]) -> f64 {
    let d = psi.len();
    let mut acc = c(0.0);
    for r in 0..d {
        let mut row = c(0.0);
        for col in 0..d {
            row += m[r * d + col] * psi[col];
        }
        acc += psi[r].conj() * row;
    }
    acc.re
}

fn ket_kron(a: &[C], b: &[C]) -> Vec<C> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn direction(polar: f64, azimuth: f64) -> [f64; 3] {
    [
        polar.sin() * azimuth.cos(),
        polar.sin() * azimuth.sin(),
        polar.cos(),
    ]
}

/// Alice-side vectors `(⟨A⊗σx⟩, ⟨A⊗σy⟩, ⟨A⊗σz⟩)` for both of her settings;
/// the correlator is linear in Bob's directions through them.
trait AliceSide {
    fn t1(&self, theta: f64, p: &[f64]) -> [f64; 3];
    fn t2(&self, theta: f64, p: &[f64]) -> [f64; 3];
    /// Coarse axes and their spacing for one Alice setting.
    fn axes(&self) -> Vec<(Vec<f64>, f64)>;
}

struct TeleOracle;
struct VnOracle;

fn polar_axis() -> (Vec<f64>, f64) {
    ((0..=12).map(|k| PI * k as f64 / 12.0).collect(), PI / 12.0)
}

fn periodic_axis() -> (Vec<f64>, f64) {
    ((0..16).map(|k| TAU * k as f64 / 16.0).collect(), TAU / 16.0)
}

fn tele_vectors(theta: f64, p: &[f64], which: usize) -> [f64; 3] {
    let (s, co) = (p[0] / 2.0).sin_cos();
    let eta = [c(co), C::from_polar(s, p[1])];
    let d = [c(theta.cos()), c(0.0), c(0.0), c(theta.sin())];
    let psi = ket_kron(&eta, &d);
    let sp = paulis();
    let pair = kron(&sp[which], 2, &sp[which], 2);
    let mut out = [0.0; 3];
    for k in 0..3 {
        // A1 = −σx⊗σx, A2 = −σy⊗σy on (ancilla, alice)
        out[k] = -expect(&psi, &kron(&pair, 4, &sp[k + 1], 2));
    }
    out
}

impl AliceSide for TeleOracle {
    fn t1(&self, theta: f64, p: &[f64]) -> [f64; 3] {
        tele_vectors(theta, p, 1)
    }
    fn t2(&self, theta: f64, p: &[f64]) -> [f64; 3] {
        tele_vectors(theta, p, 2)
    }
    fn axes(&self) -> Vec<(Vec<f64>, f64)> {
        vec![polar_axis(), periodic_axis()]
    }
}

/// State after Alice's phase and Hadamard: `((cos θ, e^{iφ} sin θ) ⊗ H)`.
fn vn_state(theta: f64, phi: f64) -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (ct, st) = (theta.cos(), theta.sin());
    let e = C::from_polar(st, phi);
    // cos θ|+⟩|0⟩ + e^{iφ} sin θ|−⟩|1⟩
    vec![c(h * ct), e * h, c(h * ct), -e * h]
}

fn vn_vector(theta: f64, phi: f64) -> [f64; 3] {
    let psi = vn_state(theta, phi);
    let sp = paulis();
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = expect(&psi, &kron(&sp[3], 2, &sp[k + 1], 2));
    }
    out
}

impl AliceSide for VnOracle {
    fn t1(&self, theta: f64, p: &[f64]) -> [f64; 3] {
        vn_vector(theta, p[0])
    }
    fn t2(&self, theta: f64, p: &[f64]) -> [f64; 3] {
        vn_vector(theta, p[0])
    }
    fn axes(&self) -> Vec<(Vec<f64>, f64)> {
        vec![periodic_axis()]
    }
}

fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|p| axis.iter().map(move |v| [p.clone(), vec![*v]].concat()))
            .collect()
    })
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

struct GridBest {
    value: f64,
    n1: Vec<f64>,
    n2: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

/// Exhaustive search over the given point sets; `|T1·(n1+n2) + T2·(n1−n2)|`
/// separates into independent extrema over the two Alice settings.
fn grid_search(
    oracle: &dyn AliceSide,
    theta: f64,
    bob1: &[Vec<f64>],
    bob2: &[Vec<f64>],
    alice1: &[Vec<f64>],
    alice2: &[Vec<f64>],
) -> GridBest {
    let t1: Vec<[f64; 3]> = alice1.iter().map(|p| oracle.t1(theta, p)).collect();
    let t2: Vec<[f64; 3]> = alice2.iter().map(|p| oracle.t2(theta, p)).collect();
    let d1: Vec<[f64; 3]> = bob1.iter().map(|p| direction(p[0], p[1])).collect();
    let d2: Vec<[f64; 3]> = bob2.iter().map(|p| direction(p[0], p[1])).collect();
    let mut best = GridBest {
        value: f64::NEG_INFINITY,
        n1: vec![],
        n2: vec![],
        a1: vec![],
        a2: vec![],
    };
    let extrema = |ts: &[[f64; 3]], v: [f64; 3]| {
        let mut lo = (f64::INFINITY, 0);
        let mut hi = (f64::NEG_INFINITY, 0);
        for (j, t) in ts.iter().enumerate() {
            let x = dot(*t, v);
            if x > hi.0 {
                hi = (x, j);
            }
            if x < lo.0 {
                lo = (x, j);
            }
        }
        (lo, hi)
    };
    for (i1, n1) in d1.iter().enumerate() {
        for (i2, n2) in d2.iter().enumerate() {
            let s = [n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2]];
            let d = [n1[0] - n2[0], n1[1] - n2[1], n1[2] - n2[2]];
            let (ulo, uhi) = extrema(&t1, s);
            let (vlo, vhi) = extrema(&t2, d);
            for (value, j1, j2) in [
                (uhi.0 + vhi.0, uhi.1, vhi.1),
                (-(ulo.0 + vlo.0), ulo.1, vlo.1),
            ] {
                if value > best.value {
                    best = GridBest {
                        value,
                        n1: bob1[i1].clone(),
                        n2: bob2[i2].clone(),
                        a1: alice1[j1].clone(),
                        a2: alice2[j2].clone(),
                    };
                }
            }
        }
    }
    best
}

fn local_axes(center: &[f64], spacing: &[f64]) -> Vec<Vec<f64>> {
    center
        .iter()
        .zip(spacing)
        .map(|(c, h)| (-4..=4).map(|j| c + h * j as f64 / 4.0).collect())
        .collect()
}

/// Coarse grid (13 polar × 16 azimuthal points, 16 phases), then one
/// refinement over ±1 coarse cell at a quarter of the spacing.
fn grid_oracle(oracle: &dyn AliceSide, theta: f64) -> f64 {
    let (pa, ph) = polar_axis();
    let (aa, ah) = periodic_axis();
    let bob = product(&[pa, aa]);
    let alice_axes = oracle.axes();
    let alice = product(&alice_axes.iter().map(|a| a.0.clone()).collect::<Vec<_>>());
    let coarse = grid_search(oracle, theta, &bob, &bob, &alice, &alice);

    let bob_h = [ph, ah];
    let alice_h: Vec<f64> = alice_axes.iter().map(|a| a.1).collect();
    let b1 = product(&local_axes(&coarse.n1, &bob_h));
    let b2 = product(&local_axes(&coarse.n2, &bob_h));
    let a1 = product(&local_axes(&coarse.a1, &alice_h));
    let a2 = product(&local_axes(&coarse.a2, &alice_h));
    let fine = grid_search(oracle, theta, &b1, &b2, &a1, &a2);
    fine.value.max(coarse.value)
}

// ---- criteria -------------------------------------------------------------

struct Shared {
    peaks: Vec<f64>,
    chsh_sweeps: Vec<SweepResult>,
}

fn criterion_1(cfg: &OptimizerConfig, shared: &mut Shared) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in [
        ScenarioKind::RspVnChsh,
        ScenarioKind::RspBellChsh,
        ScenarioKind::TeleChsh,
    ] {
        let t = Instant::now();
        let r = maximize(&Scenario::new(kind, FRAC_PI_4).unwrap(), cfg).unwrap();
        let dt = t.elapsed();
        shared.peaks.push(r.peak_evaluated);
        let err = (r.value - TSIRELSON).abs();
        ok &= err < 1e-4 && dt < Duration::from_secs(10);
        parts.push(format!(
            "{kind}={:.10} (|err| {err:.1e}, {:.2}s)",
            r.value,
            secs(dt)
        ));
    }
    verdict(1, "peak violation 2√2 at θ=π/4", ok, parts.join("; "))
}

fn criterion_2(cfg: &OptimizerConfig, shared: &mut Shared) -> Verdict {
    let t = Instant::now();
    let sweeps: Vec<SweepResult> = [
        ScenarioKind::TeleChsh,
        ScenarioKind::RspVnChsh,
        ScenarioKind::RspBellChsh,
    ]
    .iter()
    .map(|&k| sweep(k, 0.0, FRAC_PI_4, 65, cfg).unwrap())
    .collect();
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            for (a, b) in sweeps[i].values.iter().zip(&sweeps[j].values) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    shared
        .peaks
        .extend(sweeps.iter().map(SweepResult::peak_evaluated));
    let ok = worst < 5e-3 && sweeps.iter().all(|s| s.values.len() == 65);
    shared.chsh_sweeps = sweeps;
    verdict(
        2,
        "B1, B2, B3 curves overlap over 65 points",
        ok,
        format!(
            "worst pairwise |diff| {worst:.2e} (< 5e-3), {:.1}s",
            secs(t.elapsed())
        ),
    )
}

fn criterion_3(cfg: &OptimizerConfig, shared: &mut Shared) -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in ScenarioKind::CHSH {
        let c = find_crossing(kind, 2.0, cfg).unwrap();
        shared.peaks.push(c.peak_evaluated());
        match c.theta() {
            Some(theta) => {
                let err = (theta - FRAC_PI_8).abs();
                ok &= err < 1e-3;
                parts.push(format!("{kind} θ*={theta:.7} (|θ*−π/8| {err:.1e})"));
            }
            None => {
                ok = false;
                parts.push(format!("{kind} no crossing"));
            }
        }
    }
    let dt = t.elapsed();
    ok &= dt < Duration::from_secs(60);
    verdict(
        3,
        "locality threshold at π/8",
        ok,
        format!("{}; {:.1}s", parts.join("; "), secs(dt)),
    )
}

fn criterion_4() -> Verdict {
    let f1 = teleport_fidelity_closed(FRAC_PI_4).unwrap();
    let f0 = teleport_fidelity_closed(0.0).unwrap();
    let f8 = teleport_fidelity_closed(FRAC_PI_8).unwrap();
    let exact8 = 2.0 / 3.0 * (1.0 + 1.0 / (2.0 * SQRT_2));
    let mut ok =
        f1 == 1.0 && f0 == 2.0 / 3.0 && (f8 - exact8).abs() < 1e-9 && (f8 - 0.9023689).abs() < 1e-7;
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let theta = FRAC_PI_4 * i as f64 / 49.0;
        let closed = teleport_fidelity_closed(theta).unwrap();
        let numeric = teleport_fidelity_numeric(theta, &spec).unwrap();
        worst = worst.max((closed - numeric).abs());
    }
    ok &= worst < 1e-6;
    verdict(
        4,
        "teleportation fidelity landmarks",
        ok,
        format!(
            "F(π/4)={f1}, F(0)={f0}, F(π/8)={f8:.12}, quadrature worst |err| {worst:.1e} over 50 θ"
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_vn = 1.0f64;
    for _ in 0..1000 {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let target = TargetSpec::new(theta, phi).unwrap().state();
        worst_vn = worst_vn.min(
            run_rsp_vn(theta, phi)
                .unwrap()
                .worst_branch_fidelity(&target)
                .unwrap(),
        );
    }
    let mut worst_bell = 1.0f64;
    let mut worst_pair = 0.0f64;
    for _ in 0..1000 {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let anc = AncillaState::from_bloch(
            rng.random_range(-1.0f64..=1.0).acos(),
            rng.random_range(0.0..TAU),
        )
        .unwrap();
        let target = TargetSpec::new(theta, phi).unwrap().state();
        let run = run_rsp_bell(theta, phi, &anc).unwrap();
        worst_bell = worst_bell.min(run.worst_branch_fidelity(&target).unwrap());
        let p = |k: usize| run.branches[k].probability;
        worst_pair = worst_pair
            .max((p(0) + p(2) - 0.5).abs())
            .max((p(1) + p(3) - 0.5).abs());
    }
    let ok = worst_vn >= 1.0 - 1e-10 && worst_bell >= 1.0 - 1e-10 && worst_pair <= 1e-12;
    verdict(
        5,
        "RSP determinism and ancilla-independent pair probabilities",
        ok,
        format!(
            "worst fidelity vN {worst_vn:.15}, Bell {worst_bell:.15}; worst |P(pair)−1/2| {worst_pair:.1e}"
        ),
    )
}

fn criterion_6(shared: &Shared) -> Verdict {
    let peak = shared
        .peaks
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        6,
        "Tsirelson ceiling over all logged evaluations",
        peak <= TSIRELSON + 1e-9,
        format!("largest evaluated CHSH value {peak:.12} vs 2√2 = {TSIRELSON:.12}"),
    )
}

fn criterion_7(cfg: &OptimizerConfig) -> Verdict {
    let t = Instant::now();
    let sweeps: Vec<SweepResult> = ScenarioKind::I3322
        .iter()
        .map(|&k| sweep(k, 0.0, FRAC_PI_4, 25, cfg).unwrap())
        .collect();
    let dt = t.elapsed();
    let mut parts = Vec::new();
    let mut ok = dt < Duration::from_secs(600);
    for s in &sweeps {
        let (i, max) =
            s.values
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |a, (i, v)| if v > a.1 { (i, v) } else { a },
                );
        ok &= max <= 1e-9;
        parts.push(format!(
            "{} max {max:.6} at θ={:.4}",
            s.kind, s.theta_grid[i]
        ));
    }
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            for (a, b) in sweeps[i].values.iter().zip(&sweeps[j].values) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ok &= worst < 5e-3;
    verdict(
        7,
        "I3322 never violated and equal across schemes",
        ok,
        format!(
            "{}; worst cross-scheme |diff| {worst:.4}; {:.1}s",
            parts.join("; "),
            secs(dt)
        ),
    )
}

fn criterion_8(cfg: &OptimizerConfig) -> Verdict {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for theta in [FRAC_PI_8 / 2.0, FRAC_PI_8, PI / 6.0, FRAC_PI_4] {
        for (kind, oracle) in [
            (ScenarioKind::TeleChsh, &TeleOracle as &dyn AliceSide),
            (ScenarioKind::RspVnChsh, &VnOracle),
        ] {
            let opt = maximize(&Scenario::new(kind, theta).unwrap(), cfg)
                .unwrap()
                .value;
            let grid = grid_oracle(oracle, theta);
            let d = (opt - grid).abs();
            worst = worst.max(d);
            ok &= d < 1e-3;
            parts.push(format!("{kind}@{theta:.4}: {opt:.6}/{grid:.6}"));
        }
    }
    verdict(
        8,
        "optimizer matches dense grid oracle",
        ok,
        format!("worst |diff| {worst:.1e}; {}", parts.join(", ")),
    )
}

fn criterion_9(shared: &Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sp = paulis();
    let mut worst_red = 0.0f64;
    for _ in 0..100 {
        let theta = rng.random_range(0.0..=FRAC_PI_4);
        let phi = rng.random_range(0.0..TAU);
        let n = direction(
            rng.random_range(-1.0f64..=1.0).acos(),
            rng.random_range(0.0..TAU),
        );
        let psi = vn_state(theta, phi);
        let mut sn = vec![c(0.0); 4];
        for k in 0..3 {
            for (e, p) in sn.iter_mut().zip(&sp[k + 1]) {
                *e += p * n[k];
            }
        }
        let brute = expect(&psi, &kron(&sp[3], 2, &sn, 2));
        let formula = (2.0 * theta).sin() * (n[0] * phi.cos() + n[1] * phi.sin());
        worst_red = worst_red.max((brute - formula).abs());
    }
    let b2 = shared
        .chsh_sweeps
        .iter()
        .find(|s| s.kind == ScenarioKind::RspVnChsh)
        .expect("criterion 2 ran");
    let worst_shape = b2
        .theta_grid
        .iter()
        .zip(&b2.values)
        .map(|(t, v)| (v - TSIRELSON * (2.0 * t).sin()).abs())
        .fold(0.0f64, f64::max);
    verdict(
        9,
        "B2 sweep follows 2√2·sin2θ",
        worst_red < 1e-12 && worst_shape < 1e-3,
        format!("reduction worst |err| {worst_red:.1e} on 100 inputs; sweep worst |err| {worst_shape:.1e}"),
    )
}

fn main() -> ExitCode {
    let cfg = OptimizerConfig::default();
    let mut shared = Shared {
        peaks: Vec::new(),
        chsh_sweeps: Vec::new(),
    };
    let start = Instant::now();
    let mut verdicts = vec![
        criterion_1(&cfg, &mut shared),
        criterion_2(&cfg, &mut shared),
        criterion_3(&cfg, &mut shared),
        criterion_4(),
        criterion_5(),
    ];
    verdicts.push(criterion_6(&shared));
    verdicts.push(criterion_7(&cfg));
    verdicts.push(criterion_8(&cfg));
    verdicts.push(criterion_9(&shared));

    let mut failed = false;
    for v in &verdicts {
        let expected = EXPECTED_FAILURES.contains(&v.id);
        let tag = match (v.passed, expected) {
            (true, false) => "PASS",
            (false, false) => {
                failed = true;
                "FAIL"
            }
            (false, true) => "FAIL (expected)",
            (true, true) => {
                failed = true;
                "PASS (unexpected)"
            }
        };
        println!("criterion {} {tag}: {} :: {}", v.id, v.title, v.detail);
    }
    println!("acceptance finished in {:.1}s", secs(start.elapsed()));
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
