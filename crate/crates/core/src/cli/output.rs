use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::correlators::{ScenarioKind, TSIRELSON};
use crate::optimizer::SweepResult;

/// 12 significant digits, fixed notation for moderate exponents and
/// scientific otherwise; always `.` as decimal separator.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes through a temp file in the target directory and renames it into
/// place, so a failed run leaves no partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `stem-<scenario>.ext` when several scenarios share one `--out`.
pub fn per_scenario_path(out: &Path, kind: ScenarioKind, several: bool, ext: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "belltide".into());
    let name = if several {
        format!("{stem}-{}.{ext}", kind.name())
    } else {
        format!("{stem}.{ext}")
    };
    out.with_file_name(name)
}

pub fn header_lines(seed: u64, summary: &str) -> String {
    format!(
        "# belltide {}\n# seed={seed}\n# config: {summary}\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn sweep_csv(sweep: &SweepResult, header: &str) -> String {
    let mut s = String::from(header);
    writeln!(s, "# scenario={}", sweep.kind).unwrap();
    s.push_str("theta,value,converged,evaluations\n");
    for (theta, p) in sweep.theta_grid.iter().zip(&sweep.points) {
        writeln!(
            s,
            "{},{},{},{}",
            fmt_num(*theta),
            fmt_num(p.value),
            p.converged,
            p.evaluations
        )
        .unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub value: f64,
    pub converged: bool,
    pub evaluations: u64,
}

/// Reads back the rows of a sweep CSV, skipping `#` lines.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let bad = |line: &str| CliError::Config(format!("malformed sweep row '{line}'"));
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some("theta,value,converged,evaluations") => {}
        other => {
            return Err(CliError::Config(format!(
                "unexpected sweep header {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(line));
            }
            Ok(SweepRow {
                theta: f[0].parse().map_err(|_| bad(line))?,
                value: f[1].parse().map_err(|_| bad(line))?,
                converged: f[2].parse().map_err(|_| bad(line))?,
                evaluations: f[3].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const DASHES: [&str; 6] = ["", "8 4", "2 4", "12 3 3 3", "6 6", "1 3"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line plot of the sweeps with reference lines at the local bound 2 and at
/// `2√2`.
pub fn sweep_svg(sweeps: &[SweepResult]) -> String {
    let (w, h) = (760.0, 500.0);
    let (left, right, top, bottom) = (80.0, 190.0, 30.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let x_min = sweeps
        .iter()
        .filter_map(|s| s.theta_grid.first())
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let x_max = sweeps
        .iter()
        .filter_map(|s| s.theta_grid.last())
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let (x_min, x_max) = if x_min < x_max {
        (x_min, x_max)
    } else {
        (0.0, std::f64::consts::FRAC_PI_4)
    };
    let values = sweeps.iter().flat_map(|s| s.values.iter().copied());
    let v_min = values.clone().fold(0.0f64, f64::min);
    let v_max = values.fold(TSIRELSON, f64::max);
    let pad = 0.05 * (v_max - v_min);
    let (y_min, y_max) = (v_min - if v_min < 0.0 { pad } else { 0.0 }, v_max + pad);

    let px = |x: f64| left + (x - x_min) / (x_max - x_min) * pw;
    let py = |y: f64| top + (y_max - y) / (y_max - y_min) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();

    for i in 0..=5 {
        let x = x_min + (x_max - x_min) * i as f64 / 5.0;
        let y = y_min + (y_max - y_min) * i as f64 / 5.0;
        let (sx, sy) = (px(x), py(y));
        writeln!(
            s,
            r#"<line x1="{sx:.2}" y1="{b:.2}" x2="{sx:.2}" y2="{b2:.2}" stroke="black"/><text x="{sx:.2}" y="{t:.2}" text-anchor="middle">{x:.3}</text>"#,
            b = top + ph,
            b2 = top + ph + 5.0,
            t = top + ph + 20.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{l:.2}" y1="{sy:.2}" x2="{left}" y2="{sy:.2}" stroke="black"/><text x="{t:.2}" y="{ty:.2}" text-anchor="end">{y:.3}</text>"#,
            l = left - 5.0,
            t = left - 8.0,
            ty = sy + 4.0
        )
        .unwrap();
    }

    for (level, label) in [(2.0, "2"), (TSIRELSON, "2√2")] {
        if level >= y_min && level <= y_max {
            let y = py(level);
            writeln!(
                s,
                r##"<line x1="{left}" y1="{y:.2}" x2="{r:.2}" y2="{y:.2}" stroke="#888" stroke-dasharray="5 5"/><text x="{tx:.2}" y="{ty:.2}" fill="#555">{label}</text>"##,
                r = left + pw,
                tx = left + pw + 4.0,
                ty = y + 4.0
            )
            .unwrap();
        }
    }

    for (i, sweep) in sweeps.iter().enumerate() {
        let pts: Vec<String> = sweep
            .theta_grid
            .iter()
            .zip(&sweep.values)
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let dash = DASHES[i % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{c}" stroke-width="2"{dash_attr} points="{p}"/>"#,
            c = COLORS[i % COLORS.len()],
            p = pts.join(" ")
        )
        .unwrap();
        let ly = top + 20.0 + 20.0 * i as f64;
        let lx = left + pw + 30.0;
        writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{lx2:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"{dash_attr}/><text x="{tx:.2}" y="{ty:.2}">{name}</text>"#,
            lx2 = lx + 30.0,
            c = COLORS[i % COLORS.len()],
            tx = lx + 36.0,
            ty = ly + 4.0,
            name = esc(sweep.kind.name())
        )
        .unwrap();
    }

    writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle">θ (radians)</text>"#,
        x = left + pw / 2.0,
        y = h - 15.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text transform="translate(20 {y:.2}) rotate(-90)" text-anchor="middle">correlator value</text>"#,
        y = top + ph / 2.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
