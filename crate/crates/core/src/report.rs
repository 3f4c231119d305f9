//! Runs a suite of checks over a list of surfaces and renders the outcome as
//! JSON or CSV, plus plot-ready CSV tables.
//!
//! Output contains no timestamps or host data, so identical configurations
//! give byte-identical reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{profile_lambdas, HypersurfaceSpec, Surface};
use crate::error::{Error, Result};
use crate::integrate::profile_h;
use crate::quadrature::{adaptive_integrate, MAX_DEGREE};
use crate::verify::{
    run_check, CheckId, CheckResult, SurfaceAnalysis, Tolerance, Verdict, VerifyConfig, QUADRATURE_NODE_LIMIT,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Fewest samples accepted when some integral is done by Monte Carlo.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Points per profile curve in the plot table.
const PROFILE_POINTS: usize = 201;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

/// A complete, validated description of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub suite: Vec<CheckId>,
    pub surfaces: Vec<HypersurfaceSpec>,
    pub samples: usize,
    pub seed: u64,
    pub quadrature_degree: usize,
    pub tolerance: Tolerance,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            suite: CheckId::ALL.to_vec(),
            surfaces: Vec::new(),
            samples: v.samples,
            seed: v.seed,
            quadrature_degree: v.quadrature_degree,
            tolerance: v.tolerance,
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.suite.is_empty() {
            return bad("empty suite".into());
        }
        if self.surfaces.is_empty() {
            return bad("no surfaces given".into());
        }
        if self.quadrature_degree == 0 || self.quadrature_degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(self.quadrature_degree));
        }
        let mut needs_mc = false;
        for spec in &self.surfaces {
            spec.validate()?;
            if spec.has_immersion() {
                let surface = Surface::<f64>::from_spec(spec)?;
                needs_mc |= surface.quadrature_nodes(self.quadrature_degree).is_none_or(|n| n > QUADRATURE_NODE_LIMIT);
            }
        }
        if needs_mc && self.samples < MIN_MC_SAMPLES {
            return bad(format!(
                "{} Monte Carlo samples requested; at least {MIN_MC_SAMPLES} are required",
                self.samples
            ));
        }
        let t = &self.tolerance;
        let values = [t.sigmas, t.mc_floor, t.quadrature_rel, t.equality_rel, t.fd_rel, t.fd_denominator_floor];
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("tolerances must be positive and finite".into());
        }
        Ok(())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            samples: self.samples,
            seed: self.seed,
            quadrature_degree: self.quadrature_degree,
            tolerance: self.tolerance,
            ..VerifyConfig::default()
        }
    }

    /// The suite in the given order with repeats removed.
    fn checks(&self) -> Vec<CheckId> {
        let mut out = Vec::new();
        for &c in &self.suite {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// The configuration as recorded in the report.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigRecord {
    pub suite: Vec<CheckId>,
    pub surfaces: Vec<String>,
    pub settings: VerifyConfig,
}

/// A check/surface pair the check has nothing to say about.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skipped {
    pub check_id: CheckId,
    pub surface: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub expected_fail: usize,
    pub inconclusive: usize,
    pub skipped: usize,
    /// 0 when every verdict is a success, 1 otherwise.
    pub exit_code: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ConfigRecord,
    pub results: Vec<CheckResult>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
}

/// `∫φ_a²/Vol` and `∫ψ_a²/Vol` for one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionPoint {
    pub surface: String,
    pub direction: usize,
    pub a: Vec<f64>,
    pub phi2_ratio: f64,
    pub phi2_stderr: f64,
    pub psi2_ratio: f64,
    pub psi2_stderr: f64,
}

/// Volume density of the parallel family and its running integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePoint {
    pub surface: String,
    pub theta: f64,
    pub h: f64,
    /// `∫₀^θ |h|`
    pub cumulative_abs_h: f64,
    /// `∫₀^θ sin²(θ₀ - t) |h(t)| dt`
    pub cumulative_alpha: f64,
}

pub struct Run {
    pub report: Report,
    pub directions: Vec<DirectionPoint>,
    pub profile: Vec<ProfilePoint>,
}

fn failed_check(id: CheckId, spec: &HypersurfaceSpec, err: &Error) -> CheckResult {
    let mut r = CheckResult::new(id, spec);
    r.flags.push(format!("error: {err}"));
    r.verdict = Verdict::Inconclusive;
    r
}

fn direction_points(an: &SurfaceAnalysis) -> Vec<DirectionPoint> {
    let surface = an.spec.to_string();
    let phi = an.phi2_ratios();
    let psi = an.psi2_ratios();
    an.directions
        .iter()
        .enumerate()
        .map(|(j, a)| DirectionPoint {
            surface: surface.clone(),
            direction: j,
            a: a.clone(),
            phi2_ratio: phi[j].value,
            phi2_stderr: phi[j].stderr,
            psi2_ratio: psi[j].value,
            psi2_stderr: psi[j].stderr,
        })
        .collect()
}

fn profile_points(spec: &HypersurfaceSpec) -> Result<Vec<ProfilePoint>> {
    let Some((g, mp, mm)) = crate::verify::profile_family(spec) else {
        return Ok(Vec::new());
    };
    let prof = profile_lambdas::<f64>(g, mp, mm)?;
    let t0 = prof.theta0;
    let top = std::f64::consts::PI / g as f64;
    let surface = spec.to_string();
    let mut out = Vec::with_capacity(PROFILE_POINTS);
    let (mut abs_h, mut alpha, mut prev) = (0.0, 0.0, 0.0);
    for i in 0..PROFILE_POINTS {
        let theta = top * i as f64 / (PROFILE_POINTS - 1) as f64;
        abs_h += adaptive_integrate(|t| profile_h(&prof, t).abs(), prev, theta, 1e-14).0;
        alpha += adaptive_integrate(|t| (t0 - t).sin().powi(2) * profile_h(&prof, t).abs(), prev, theta, 1e-14).0;
        prev = theta;
        out.push(ProfilePoint {
            surface: surface.clone(),
            theta,
            h: profile_h(&prof, theta),
            cumulative_abs_h: abs_h,
            cumulative_alpha: alpha,
        });
    }
    Ok(out)
}

/// Runs every applicable check of the suite on every surface, in the
/// configured order. A check that errors is recorded as inconclusive.
pub fn run(cfg: &RunConfig) -> Result<Run> {
    cfg.validate()?;
    let vcfg = cfg.verify_config();
    let checks = cfg.checks();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    let mut directions = Vec::new();
    let mut profile = Vec::new();
    for spec in &cfg.surfaces {
        let mut analysis = None;
        let mut profiled = false;
        for &id in &checks {
            if let Err(reason) = id.applies_to(spec) {
                skipped.push(Skipped { check_id: id, surface: spec.to_string(), reason: reason.into() });
                continue;
            }
            let result = run_check(id, spec, &vcfg, &mut analysis).unwrap_or_else(|e| failed_check(id, spec, &e));
            results.push(result);
            profiled |= id == CheckId::Isoparametric;
        }
        if let Some(an) = &analysis {
            directions.extend(direction_points(an));
        }
        if profiled {
            profile.extend(profile_points(spec)?);
        }
    }

    let mut summary = Summary { skipped: skipped.len(), ..Summary::default() };
    for r in &results {
        match r.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::ExpectedFail => summary.expected_fail += 1,
            Verdict::Inconclusive => summary.inconclusive += 1,
        }
    }
    summary.exit_code = if results.iter().all(|r| r.verdict.is_success()) { 0 } else { 1 };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: ConfigRecord {
            suite: checks,
            surfaces: cfg.surfaces.iter().map(ToString::to_string).collect(),
            settings: vcfg,
        },
        results,
        skipped,
        summary,
    };
    Ok(Run { report, directions, profile })
}

/// Shortest decimal that round-trips to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per measured quantity.
    pub fn to_csv(&self) -> String {
        let header = [
            "check_id",
            "surface",
            "quantity",
            "direction",
            "measured",
            "stderr",
            "target",
            "provenance",
            "relation",
            "verdict",
        ];
        let rows = self.results.iter().flat_map(|r| {
            r.rows.iter().map(move |row| {
                vec![
                    r.check_id.to_string(),
                    r.surface.clone(),
                    row.quantity.clone(),
                    row.direction.map(|d| d.to_string()).unwrap_or_default(),
                    num(row.measured),
                    num(row.stderr),
                    opt_num(row.target),
                    row.provenance.map(|p| p.as_str().to_string()).unwrap_or_default(),
                    row.relation.as_str().to_string(),
                    row.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
                ]
            })
        });
        csv_string(&header, rows)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

impl Run {
    pub fn directions_csv(&self) -> String {
        let header = ["surface", "direction", "a", "phi2_ratio", "phi2_stderr", "psi2_ratio", "psi2_stderr"];
        let rows = self.directions.iter().map(|d| {
            let mut a = String::new();
            for (i, v) in d.a.iter().enumerate() {
                if i > 0 {
                    a.push(' ');
                }
                let _ = write!(a, "{v:?}");
            }
            vec![
                d.surface.clone(),
                d.direction.to_string(),
                a,
                num(d.phi2_ratio),
                num(d.phi2_stderr),
                num(d.psi2_ratio),
                num(d.psi2_stderr),
            ]
        });
        csv_string(&header, rows)
    }

    pub fn profile_csv(&self) -> String {
        let header = ["surface", "theta", "h", "cumulative_abs_h", "cumulative_alpha"];
        let rows = self
            .profile
            .iter()
            .map(|p| vec![p.surface.clone(), num(p.theta), num(p.h), num(p.cumulative_abs_h), num(p.cumulative_alpha)]);
        csv_string(&header, rows)
    }

    /// Writes the report to `out` and the plot tables next to it as
    /// `<stem>.directions.csv` and `<stem>.profile.csv`. Returns the paths written.
    pub fn write(&self, out: &Path, format: Format) -> Result<Vec<PathBuf>> {
        let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
        let sibling = |suffix: &str| out.with_file_name(format!("{stem}.{suffix}.csv"));
        let files = [
            (out.to_path_buf(), self.report.render(format)),
            (sibling("directions"), self.directions_csv()),
            (sibling("profile"), self.profile_csv()),
        ];
        let mut written = Vec::new();
        for (path, body) in files {
            fs::write(&path, body).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(surfaces: &[&str], suite: &[CheckId]) -> RunConfig {
        RunConfig {
            suite: suite.to_vec(),
            surfaces: surfaces.iter().map(|s| s.parse().unwrap()).collect(),
            samples: MIN_MC_SAMPLES,
            ..RunConfig::default()
        }
    }

    #[test]
    fn rejects_too_few_samples_only_when_monte_carlo_runs() {
        let mut cfg = config(&["cartan"], &[CheckId::Ie]);
        cfg.samples = 500;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let mut cfg = config(&["equator:n=3"], &[CheckId::Ie]);
        cfg.samples = 500;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn skips_inapplicable_pairs() {
        let run = run(&config(&["profile:g=4,m=2,2"], &[CheckId::Ie, CheckId::Isoparametric])).unwrap();
        assert_eq!(run.report.results.len(), 1);
        assert_eq!(run.report.skipped.len(), 1);
        assert_eq!(run.report.summary.exit_code, 0);
        assert_eq!(run.profile.len(), PROFILE_POINTS);
        let last = run.profile.last().unwrap();
        let prof = profile_lambdas::<f64>(4, 2, 2).unwrap();
        assert!((last.cumulative_abs_h - crate::integrate::profile_abs_integral(&prof)).abs() < 1e-12);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let run = run(&config(&["profile:g=3,m=1,1"], &[CheckId::Isoparametric])).unwrap();
        let csv = run.report.to_csv();
        let rows: usize = run.report.results.iter().map(|r| r.rows.len()).sum();
        assert_eq!(csv.lines().count(), rows + 1);
        assert!(csv.lines().any(|l| l.starts_with("isoparametric,\"profile:g=3,m=1,1\",int_abs_h,,0.666666666666667")));
    }
}
