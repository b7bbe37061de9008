//! `belltide` command-line front end.

mod config;
mod output;
pub mod verify;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use config::{parse_config_file, Args, Command, Fault, OutputFormat, RunConfig};
pub use output::{fmt_num, parse_sweep_csv, sweep_csv, sweep_svg, write_atomic, SweepRow};

use crate::correlators::Scenario;
use crate::optimizer::{find_crossing, maximize, sweep, Crossing};
use crate::protocols::{teleport_fidelity_closed, teleport_fidelity_numeric};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NO_CROSSING: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match RunConfig::resolve(&args).and_then(|cfg| execute(&cfg, &mut out)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("belltide: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

/// Runs a resolved configuration, writing reports to `out`; returns the exit code.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    match cfg.command {
        Command::Sweep => cmd_sweep(cfg, out),
        Command::Optimize => cmd_optimize(cfg, out),
        Command::Fidelity => cmd_fidelity(cfg, out),
        Command::Crossing => cmd_crossing(cfg, out),
        Command::Verify => cmd_verify(cfg, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn angle(cfg: &RunConfig, theta: f64) -> String {
    if cfg.degrees {
        format!(
            "{} rad ({} deg)",
            fmt_num(theta),
            fmt_num(theta.to_degrees())
        )
    } else {
        format!("{} rad", fmt_num(theta))
    }
}

fn header(cfg: &RunConfig) -> String {
    output::header_lines(cfg.optimizer.rng_seed, &cfg.summary())
}

pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let thetas = cfg.thetas();
    let (lo, hi) = (thetas[0], *thetas.last().expect("non-empty grid"));
    let mut sweeps = Vec::with_capacity(cfg.scenarios.len());
    for &kind in &cfg.scenarios {
        let result = if thetas.len() == 1 {
            let r = maximize(&Scenario::new(kind, lo)?, &cfg.optimizer)?;
            crate::optimizer::SweepResult {
                kind,
                theta_grid: thetas.clone(),
                values: vec![r.value],
                points: vec![r],
            }
        } else {
            sweep(kind, lo, hi, thetas.len(), &cfg.optimizer)?
        };
        sweeps.push(result);
    }

    let head = header(cfg);
    let several = sweeps.len() > 1;
    if cfg.format.csv() {
        for s in &sweeps {
            let text = sweep_csv(s, &head);
            match &cfg.out {
                Some(path) => {
                    let p = output::per_scenario_path(path, s.kind, several, "csv");
                    write_atomic(&p, &text)?;
                    writeln!(out, "wrote {}", p.display()).map_err(stdout_err)?;
                }
                None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
            }
        }
    }
    if cfg.format.svg() {
        let path = cfg.out.as_ref().expect("validated: svg needs --out");
        let p = output::per_scenario_path(path, sweeps[0].kind, false, "svg");
        write_atomic(&p, &sweep_svg(&sweeps))?;
        writeln!(out, "wrote {}", p.display()).map_err(stdout_err)?;
    }
    for s in &sweeps {
        if !s.all_converged() {
            let n = s.points.iter().filter(|p| !p.converged).count();
            eprintln!("belltide: {}: {n} point(s) did not converge", s.kind);
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_optimize(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let theta = cfg.theta.unwrap_or(FRAC_PI_4);
    let several = cfg.scenarios.len() > 1;
    for &kind in &cfg.scenarios {
        let scenario = Scenario::new(kind, theta)?;
        let r = maximize(&scenario, &cfg.optimizer)?;
        let w = |e| stdout_err(e);
        writeln!(out, "{kind} at theta = {}", angle(cfg, theta)).map_err(w)?;
        writeln!(out, "  {:<13} {}", "value", fmt_num(r.value)).map_err(w)?;
        writeln!(out, "  {:<13} {}", "converged", r.converged).map_err(w)?;
        writeln!(out, "  {:<13} {}", "evaluations", r.evaluations).map_err(w)?;
        let layout = scenario.layout();
        for (p, v) in layout.iter().zip(r.settings.as_slice()) {
            let shown = if cfg.degrees {
                format!("{} deg", fmt_num(v.to_degrees()))
            } else {
                fmt_num(*v)
            };
            writeln!(out, "  {:<13} {shown}", p.name).map_err(w)?;
        }
        if let Some(path) = &cfg.out {
            let mut text = header(cfg);
            let names: Vec<&str> = layout.iter().map(|p| p.name.as_str()).collect();
            text.push_str(&format!(
                "theta,value,converged,evaluations,{}\n",
                names.join(",")
            ));
            let vals: Vec<String> = r.settings.as_slice().iter().map(|v| fmt_num(*v)).collect();
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_num(theta),
                fmt_num(r.value),
                r.converged,
                r.evaluations,
                vals.join(",")
            ));
            let p = output::per_scenario_path(path, kind, several, "csv");
            write_atomic(&p, &text)?;
            writeln!(out, "wrote {}", p.display()).map_err(w)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_fidelity(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut text = header(cfg);
    text.push_str("theta,F_closed,F_numeric,abs_err\n");
    for theta in cfg.thetas() {
        let closed = teleport_fidelity_closed(theta)?;
        let numeric = teleport_fidelity_numeric(theta, &cfg.quadrature)?;
        text.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(theta),
            fmt_num(closed),
            fmt_num(numeric),
            fmt_num((closed - numeric).abs())
        ));
    }
    let threshold = teleport_fidelity_closed(FRAC_PI_8)?;
    text.push_str(&format!(
        "# threshold theta=pi/8 F={}\n",
        fmt_num(threshold)
    ));
    match &cfg.out {
        Some(path) => {
            write_atomic(path, &text)?;
            writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
        }
        None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_crossing(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut code = EXIT_OK;
    for &kind in &cfg.scenarios {
        match find_crossing(kind, cfg.level, &cfg.optimizer)? {
            Crossing::Found { theta, width, .. } => writeln!(
                out,
                "{kind}: crosses {} at theta* = {} = {}*pi (bracket {:e})",
                fmt_num(cfg.level),
                angle(cfg, theta),
                fmt_num(theta / PI),
                width
            ),
            Crossing::NoCrossing { low, high, .. } => {
                code = EXIT_NO_CROSSING;
                writeln!(
                    out,
                    "{kind}: no crossing of {} in [0, pi/4] (max {} at theta=0, {} at theta=pi/4)",
                    fmt_num(cfg.level),
                    fmt_num(low),
                    fmt_num(high)
                )
            }
        }
        .map_err(stdout_err)?;
    }
    Ok(code)
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let reports = verify::run_verify(cfg);
    let mut code = EXIT_OK;
    for r in &reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {:<22} {}", r.name, r.detail).map_err(stdout_err)?;
        if !r.passed && code == EXIT_OK {
            code = EXIT_VERIFY_FAILED;
        }
    }
    if let Some(first) = reports.iter().find(|r| !r.passed) {
        writeln!(out, "first failure: {}: {}", first.name, first.detail).map_err(stdout_err)?;
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let a =
            Args::try_parse_from(std::iter::once("belltide").chain(args.iter().copied())).unwrap();
        RunConfig::resolve(&a).unwrap()
    }

    fn exec(args: &[&str]) -> (u8, String) {
        let mut buf = Vec::new();
        let code = execute(&cfg(args), &mut buf).unwrap();
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn fidelity_table() {
        let (code, text) = exec(&["fidelity", "--steps", "3", "--quick"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "theta,F_closed,F_numeric,abs_err");
        assert!(rows[1].starts_with("0,0.666666666667,"));
        assert!(rows[3].starts_with("0.785398163397,1,"));
        assert!(text.contains("# threshold theta=pi/8 F=0.902368927062"));
    }

    #[test]
    fn crossing_exit_codes() {
        let (code, text) = exec(&["crossing", "--scenario", "rsp-vn-chsh", "--quick"]);
        assert_eq!(code, EXIT_OK);
        let theta: f64 = text
            .split("theta* = ")
            .nth(1)
            .unwrap()
            .split(' ')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!((theta - FRAC_PI_8).abs() < 1e-3, "{text}");
        let (code, text) = exec(&[
            "crossing",
            "--scenario",
            "rsp-vn-chsh",
            "--level",
            "3",
            "--quick",
        ]);
        assert_eq!(code, EXIT_NO_CROSSING);
        assert!(text.contains("no crossing"));
    }

    #[test]
    fn optimize_report() {
        let (code, text) = exec(&[
            "optimize",
            "--scenario",
            "rsp-vn-chsh",
            "--quick",
            "--degrees",
        ]);
        assert_eq!(code, 0);
        assert!(text.contains("value         2.8284271"), "{text}");
        assert!(text.contains("45 deg"));
        assert!(text.contains("phi1"));
    }

    #[test]
    fn sweep_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("fig.csv");
        let o = out.to_str().unwrap();
        let (code, _) = exec(&[
            "sweep",
            "--scenario",
            "rsp-vn-chsh,tele-chsh",
            "--steps",
            "3",
            "--quick",
            "--out",
            o,
            "--format",
            "both",
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(dir.path().join("fig-rsp-vn-chsh.csv")).unwrap();
        assert!(text.contains("# seed=0"));
        let rows = parse_sweep_csv(&text).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[2].value - crate::correlators::TSIRELSON).abs() < 1e-4);
        assert!(dir.path().join("fig-tele-chsh.csv").exists());
        let svg = std::fs::read_to_string(dir.path().join("fig.svg")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let c = cfg(&[
            "fidelity",
            "--steps",
            "2",
            "--quick",
            "--out",
            "/nonexistent/dir/f.csv",
        ]);
        assert!(matches!(
            execute(&c, &mut Vec::new()),
            Err(CliError::Io { .. })
        ));
    }
}
