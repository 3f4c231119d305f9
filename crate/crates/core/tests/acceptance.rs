//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hypersurface_ie::catalog::HypersurfaceSpec;
use hypersurface_ie::report::{self, RunConfig};
use hypersurface_ie::verify::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Cache) -> Outcome);

fn spec(s: &str) -> HypersurfaceSpec {
    s.parse().expect("valid spec")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, format!("{what}: {got:?} vs {want:?} (tol {tol:e})"))
}

fn failing_rows(r: &CheckResult) -> String {
    r.rows
        .iter()
        .filter(|row| row.verdict.is_some_and(|v| !v.is_success()))
        .map(|row| format!("{}[{:?}]={:?} target {:?}", row.quantity, row.direction, row.measured, row.target))
        .collect::<Vec<_>>()
        .join(", ")
}

fn success(r: &CheckResult) -> Result<(), String> {
    ensure(r.verdict.is_success(), format!("{} on {}: {} ({})", r.check_id, r.surface, r.verdict, failing_rows(r)))
}

/// Analyses shared between criteria, keyed by spec and sample count.
struct Cache {
    cfg: VerifyConfig,
    analyses: HashMap<(String, usize), SurfaceAnalysis>,
}

impl Cache {
    fn get(&mut self, s: &str, samples: usize) -> Result<&SurfaceAnalysis, String> {
        let key = (s.to_string(), samples);
        if !self.analyses.contains_key(&key) {
            let cfg = VerifyConfig { samples, ..self.cfg.clone() };
            let an = SurfaceAnalysis::new(&spec(s), &cfg).map_err(|e| e.to_string())?;
            self.analyses.insert(key.clone(), an);
        }
        Ok(&self.analyses[&key])
    }
}

const MINIMAL_S1: &str = "clifford:k=1,n=4,r=minimal";
const EINSTEIN: &str = "clifford:k=2,n=4,r=einstein";
const NONMINIMAL: &str = "clifford:k=1,n=4,r=0.3";
const CARTAN_SAMPLES: usize = 1_000_000;

fn fd_laplacians(c: &mut Cache) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for s in ["equator:n=4", MINIMAL_S1, NONMINIMAL, "clifford:k=2,n=4,r=0.6", "cartan"] {
        let r = check_takahashi(&spec(s), &c.cfg).map_err(|e| e.to_string())?;
        success(&r)?;
        for q in ["fd_rel_err_lap_phi", "fd_rel_err_lap_psi"] {
            let row = r.row(q).ok_or("missing row")?;
            ensure(row.measured < 1e-4, format!("{s} {q} = {:e}", row.measured))?;
            worst = worst.max(row.measured);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 30.0, format!("took {elapsed:.1} s"))?;
    Ok(format!("max relative error {worst:.2e} at 100 points x 25 directions, {elapsed:.1} s"))
}

fn torus_extremes(c: &mut Cache) -> Outcome {
    let an = c.get(MINIMAL_S1, 0)?;
    let (_, min) = an.min_phi2_ratio();
    let (_, max) = an.max_phi2_ratio();
    close(min.value, 0.125, 1e-12, "min ratio")?;
    close(max.value, 0.1875, 1e-12, "max ratio")?;
    Ok(format!("min {:?}, max {:?}", min.value, max.value))
}

fn chain(c: &mut Cache) -> Outcome {
    let cfg = c.cfg.clone();
    let an = c.get(MINIMAL_S1, 0)?;
    let r = check_inequality_chain(an, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    let (_, min) = an.min_phi2_ratio();
    let (_, max) = an.max_phi2_ratio();
    let values = [0.0, min.value, 1.0 / 6.0, max.value, 0.2];
    ensure(values.windows(2).all(|w| w[0] <= w[1] + 1e-12), format!("chain out of order: {values:?}"))?;
    let flag = r.row("half_n_equality_iff_s1_torus").ok_or("missing equality attribution")?;
    ensure(flag.measured == 1.0 && flag.verdict == Some(Verdict::Pass), "1/(2n) equality not detected")?;
    let class = r.classification.clone().unwrap_or_default();
    ensure(class.contains("1/(2n) equality"), format!("classification `{class}`"))?;
    Ok(format!("0 < {:.6} <= {:.6} <= {:.6} <= 0.2; {class}", min.value, 1.0 / 6.0, max.value))
}

fn cartan_ratios(c: &mut Cache) -> Outcome {
    let start = Instant::now();
    let an = c.get("cartan", CARTAN_SAMPLES)?;
    let mut worst_sigma: f64 = 0.0;
    let mut max_stderr: f64 = 0.0;
    for (j, (p, q)) in an.phi2_ratios().into_iter().zip(an.psi2_ratios()).enumerate() {
        for (name, e) in [("phi2", p), ("psi2", q)] {
            let z = (e.value - 0.2).abs() / e.stderr;
            ensure(z <= 4.0, format!("direction {j} {name}: {:?} ± {:e}", e.value, e.stderr))?;
            worst_sigma = worst_sigma.max(z);
            max_stderr = max_stderr.max(e.stderr);
        }
    }
    ensure(an.directions.len() == 25, "expected 5 frame and 20 random directions")?;
    Ok(format!(
        "25 directions, worst deviation {worst_sigma:.2} sigma, stderr <= {max_stderr:.1e}, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn density_values(c: &mut Cache) -> Outcome {
    let r = check_isoparametric(&spec("profile:g=3,m=1,1"), None, &c.cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    let get = |q: &str| r.row(q).map(|row| row.measured).ok_or(format!("missing {q}"));
    close(get("int_abs_h")?, 2.0 / 3.0, 1e-10, "int |h|")?;
    close(get("alpha")?, 1.0 / 3.0 - 3.0 / 10.0, 1e-10, "alpha")?;
    let vol = 4.0 * PI * PI;
    close(get("predicted_int_phi2")?, vol / 5.0, 1e-10 * vol, "corrected prediction")?;
    let printed = get("printed_prediction")?;
    close(printed, 12.0 * PI * PI / 25.0, 1e-10, "printed prediction")?;
    ensure((printed - vol / 5.0).abs() > 1.0, "printed form should disagree")?;
    Ok(format!(
        "int|h| = {:?}, alpha = {:?}, corrected = {:?} = Vol/5, printed = {printed:?} = 12pi^2/25",
        get("int_abs_h")?,
        get("alpha")?,
        get("predicted_int_phi2")?
    ))
}

fn ie_verdicts(c: &mut Cache) -> Outcome {
    let cfg = c.cfg.clone();
    let einstein = c.get(EINSTEIN, 0)?;
    let r = check_ie(einstein, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    ensure(r.classification.as_deref() == Some("IE"), "Einstein torus not IE")?;
    let worst =
        einstein.per_direction.iter().flat_map(|d| [d.route_a.value.abs(), d.route_b.value.abs()]).fold(0.0, f64::max);
    ensure(worst < 1e-10, format!("Einstein defect {worst:e}"))?;

    let s1 = c.get("clifford:k=1,n=4,r=0.5", 0)?;
    let r = check_ie(s1, &cfg).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::ExpectedFail, format!("S1 torus verdict {}", r.verdict))?;
    ensure(r.classification.as_deref() == Some("not-IE"), "S1 torus classified IE")?;
    let v = s1.volume;
    // directions e1, e2 span the circle factor
    for j in 0..2 {
        close(s1.per_direction[j].route_b.value, -v, 1e-10 * v, "route-B defect")?;
        close(s1.per_direction[j].route_a.value, -v, 1e-10 * v, "route-A defect")?;
    }

    let cartan = c.get("cartan", CARTAN_SAMPLES)?;
    let r = check_ie(cartan, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    ensure(r.classification.as_deref() == Some("IE"), "Cartan not IE")?;

    let eq = c.get("equator:n=4", 0)?;
    let r = check_ie(eq, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    ensure(r.classification.as_deref() == Some("IE"), "equator not IE")?;
    Ok(format!("Einstein |defect| <= {worst:.1e}; S1(1/2)xS3 defect = -V = {:?}; Cartan IE; equator IE", -v))
}

fn identities(c: &mut Cache) -> Outcome {
    let cfg = c.cfg.clone();
    let surfaces = [
        ("equator:n=4", 0),
        (MINIMAL_S1, 0),
        (EINSTEIN, 0),
        (NONMINIMAL, 0),
        ("clifford:k=1,n=2,r=0.6", 0),
        ("cartan", CARTAN_SAMPLES),
    ];
    for (s, samples) in surfaces {
        let an = c.get(s, samples)?;
        let r = check_integral_identities(an, &cfg).map_err(|e| e.to_string())?;
        success(&r)?;
        ensure(r.rows.iter().any(|row| row.quantity == "reilly_gap"), "no Reilly rows")?;
    }
    Ok(format!("{} surfaces: Reilly, Cheng-Yau, height identity, S psi^2 = |A a^T|^2, frame sum", surfaces.len()))
}

fn simons_gap(c: &mut Cache) -> Outcome {
    let cfg = c.cfg.clone();
    let an = c.get(MINIMAL_S1, 0)?;
    let r = check_simons_gap(an, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    let v = an.volume;
    let (i, ii) = (r.row("gap_i").ok_or("missing gap_i")?, r.row("gap_ii").ok_or("missing gap_ii")?);
    close(i.measured, v / 2.0, 1e-9, "gap (i) left side")?;
    close(i.target.unwrap_or(f64::NAN), v / 2.0, 1e-9, "gap (i) right side")?;
    close(ii.measured, 64.0 * v * v / 53.0, 1e-9 * v * v, "gap (ii) left side")?;
    close(ii.target.unwrap_or(f64::NAN), 2.0 * v * v, 1e-9 * v * v, "gap (ii) right side")?;
    ensure(ii.measured < ii.target.unwrap_or(f64::NAN), "gap (ii) not strict")?;
    ensure(r.row("gap_i_equality_iff_s_is_0_or_n").is_some_and(|f| f.measured == 1.0), "equality in (i) not detected")?;
    ensure(
        r.row("gap_ii_equality_iff_totally_geodesic").is_some_and(|f| f.measured == 0.0),
        "(ii) flagged as equality",
    )?;
    Ok(format!(
        "(i) {:?} = {:?} = V/2; (ii) {:?} < {:?}",
        i.measured,
        i.target.unwrap(),
        ii.measured,
        ii.target.unwrap()
    ))
}

fn crowns(c: &mut Cache) -> Outcome {
    let cfg = c.cfg.clone();
    let mut widths = Vec::new();
    for (s, samples) in [(MINIMAL_S1, 0), (EINSTEIN, 0), ("clifford:k=1,n=2,r=minimal", 0), ("cartan", CARTAN_SAMPLES)]
    {
        let an = c.get(s, samples)?;
        let r = check_crown(an, &cfg).map_err(|e| e.to_string())?;
        success(&r)?;
        let w = r.rows_named("width").map(|row| row.measured).fold(f64::INFINITY, f64::min);
        widths.push(format!("{s}: {w:.4}"));
    }
    let eq = c.get("equator:n=4", 0)?;
    let r = check_crown(eq, &cfg).map_err(|e| e.to_string())?;
    success(&r)?;
    let class = r.classification.unwrap_or_default();
    ensure(class.contains("hemisphere"), format!("equator classification `{class}`"))?;
    Ok(format!("min widths {}; equator: {class}", widths.join(", ")))
}

fn determinism(_: &mut Cache) -> Outcome {
    let cfg = RunConfig {
        suite: vec![CheckId::Ie, CheckId::Chain, CheckId::Crown],
        surfaces: vec![spec("cartan"), spec("clifford:k=1,n=3,r=0.4")],
        samples: 20_000,
        seed: 1234,
        quadrature_degree: 16,
        ..RunConfig::default()
    };
    let a = report::run(&cfg).map_err(|e| e.to_string())?.report.to_json();
    let b = report::run(&cfg).map_err(|e| e.to_string())?.report.to_json();
    ensure(a == b, "reports differ")?;
    Ok(format!("two runs, {} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("finite-difference Laplacians", fd_laplacians),
        ("torus extremes of the height L2 norm", torus_extremes),
        ("inequality chain and 1/(2n) equality", chain),
        ("Cartan height ratios at 1e6 samples", cartan_ratios),
        ("isoparametric density values", density_values),
        ("IE verdicts", ie_verdicts),
        ("integral identities", identities),
        ("quadratic gap inequalities", simons_gap),
        ("crown widths and hemisphere", crowns),
        ("byte-identical reports", determinism),
    ];
    let mut cache = Cache { cfg: VerifyConfig::default(), analyses: HashMap::new() };
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f(&mut cache) {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
