//! One executable check per result about height functions of hypersurfaces,
//! each producing a [`CheckResult`] with measured values, targets and a
//! verdict.

mod analysis;
mod checks;
mod rows;

pub use analysis::{direction_set, sample_points, sup_height, SurfaceAnalysis, Widths, QUADRATURE_NODE_LIMIT};
pub use checks::{
    check_crown, check_ie, check_inequality_chain, check_integral_identities, check_isoparametric, check_simons_gap,
    check_takahashi, expected_ie, profile_family,
};
pub use rows::{Provenance, Relation, Row};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::HypersurfaceSpec;
use crate::integrate::Method;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckId {
    Takahashi,
    Ie,
    Chain,
    Simons,
    Crown,
    Isoparametric,
    Identities,
}

impl CheckId {
    pub const ALL: [CheckId; 7] =
        [Self::Takahashi, Self::Ie, Self::Chain, Self::Simons, Self::Crown, Self::Isoparametric, Self::Identities];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Takahashi => "takahashi",
            Self::Ie => "ie",
            Self::Chain => "chain",
            Self::Simons => "simons",
            Self::Crown => "crown",
            Self::Isoparametric => "isoparametric",
            Self::Identities => "identities",
        }
    }

    /// `Err(reason)` when the check has nothing to say about `spec`.
    pub fn applies_to(self, spec: &HypersurfaceSpec) -> Result<(), &'static str> {
        let immersed = spec.has_immersion();
        let minimal = match spec {
            HypersurfaceSpec::Equator { .. } | HypersurfaceSpec::CartanCubic => true,
            HypersurfaceSpec::CliffordTorus { k, n, .. } => {
                let r = spec.torus_r1().unwrap_or(f64::NAN);
                (r * r - *k as f64 / *n as f64).abs() < 1e-12
            }
            HypersurfaceSpec::IsoparametricProfile { .. } => false,
        };
        match self {
            Self::Isoparametric => match spec {
                HypersurfaceSpec::Equator { .. } => Err("the equator has no principal curvature profile"),
                HypersurfaceSpec::CliffordTorus { .. } if !minimal => {
                    Err("the volume estimates concern the minimal member of the family")
                }
                _ => Ok(()),
            },
            _ if !immersed => Err("analytic profile without an immersion"),
            Self::Simons if !minimal => Err("the gap inequalities concern minimal hypersurfaces"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A negative result the theory predicts, e.g. a surface that is not IE.
    ExpectedFail,
    /// A Monte Carlo error bar straddles the decision boundary.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::ExpectedFail => "expected-fail",
            Self::Inconclusive => "inconclusive",
        }
    }

    /// Pass and expected-fail both count as success.
    pub fn is_success(self) -> bool {
        matches!(self, Self::Pass | Self::ExpectedFail)
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (ExpectedFail, _) | (_, ExpectedFail) => ExpectedFail,
            _ => Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decision thresholds. An integral matches a target when
/// `|measured - target| <= max(floor, sigmas · stderr)`, where the floor is
/// `mc_floor` for Monte Carlo and `quadrature_rel · max(1, |scale|)` for
/// quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerance {
    pub sigmas: f64,
    pub mc_floor: f64,
    pub quadrature_rel: f64,
    /// Floor used to classify equality cases of inequalities.
    pub equality_rel: f64,
    /// Bound on the relative error of finite-difference Laplacians.
    pub fd_rel: f64,
    /// Smallest denominator in that relative error.
    pub fd_denominator_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            sigmas: 4.0,
            mc_floor: 1e-9,
            quadrature_rel: 1e-10,
            equality_rel: 1e-8,
            fd_rel: 1e-4,
            fd_denominator_floor: 1e-2,
        }
    }
}

/// Numerical settings shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub quadrature_degree: usize,
    /// Random unit directions added to the ambient coordinate frame.
    pub random_directions: usize,
    /// Points at which finite-difference Laplacians are taken.
    pub fd_points: usize,
    pub fd_step: f64,
    /// Sample points used for suprema over the surface (widths, sup S).
    pub sup_samples: usize,
    pub tolerance: Tolerance,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Eq => "eq",
            Self::Le => "le",
            Self::Lt => "lt",
            Self::Ge => "ge",
            Self::Gt => "gt",
            Self::Ne => "ne",
            Self::Info => "info",
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            quadrature_degree: 24,
            random_directions: 20,
            fd_points: 100,
            fd_step: crate::height::FD_STEP_DEFAULT,
            sup_samples: 4096,
            tolerance: Tolerance::default(),
        }
    }
}

/// Outcome of one check on one surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub surface: String,
    pub method: Option<Method>,
    pub directions: Vec<Vec<f64>>,
    pub rows: Vec<Row>,
    pub tolerance_rule: String,
    /// E.g. `IE` / `not-IE`, or the detected equality case.
    pub classification: Option<String>,
    /// Classification the theory predicts, when it predicts one.
    pub expected: Option<String>,
    /// Caveats attached to the measurement.
    pub flags: Vec<String>,
    pub verdict: Verdict,
}

impl CheckResult {
    pub(crate) fn new(check_id: CheckId, spec: &HypersurfaceSpec) -> Self {
        Self {
            check_id,
            surface: spec.to_string(),
            method: None,
            directions: Vec::new(),
            rows: Vec::new(),
            tolerance_rule: String::new(),
            classification: None,
            expected: None,
            flags: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    /// Combined verdict of all rows.
    pub(crate) fn row_verdict(&self) -> Verdict {
        self.rows.iter().filter_map(|r| r.verdict).fold(Verdict::Pass, Verdict::combine)
    }

    pub fn row(&self, quantity: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn rows_named<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }
}

/// Runs check `id` on `spec`. `analysis` is built on demand and may be shared
/// between checks on the same surface.
pub fn run_check(
    id: CheckId,
    spec: &HypersurfaceSpec,
    cfg: &VerifyConfig,
    analysis: &mut Option<SurfaceAnalysis>,
) -> crate::Result<CheckResult> {
    if id == CheckId::Takahashi {
        return check_takahashi(spec, cfg);
    }
    if !spec.has_immersion() {
        return check_isoparametric(spec, None, cfg);
    }
    if analysis.is_none() {
        *analysis = Some(SurfaceAnalysis::new(spec, cfg)?);
    }
    let an = analysis.as_ref().expect("built above");
    match id {
        CheckId::Takahashi => unreachable!("handled above"),
        CheckId::Ie => check_ie(an, cfg),
        CheckId::Chain => check_inequality_chain(an, cfg),
        CheckId::Simons => check_simons_gap(an, cfg),
        CheckId::Crown => check_crown(an, cfg),
        CheckId::Isoparametric => check_isoparametric(spec, Some(an), cfg),
        CheckId::Identities => check_integral_identities(an, cfg),
    }
}
