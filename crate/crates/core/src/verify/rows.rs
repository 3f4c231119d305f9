use serde::{Deserialize, Serialize};

use crate::integrate::Estimate;

use super::{Tolerance, Verdict};

/// Where a target value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated by the theorem being checked.
    Stated,
    /// Computed by an independent closed form or oracle.
    Derived,
    /// Holds by construction or by symmetry.
    Trivial,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stated => "stated",
            Self::Derived => "derived",
            Self::Trivial => "trivial",
        }
    }
}

/// How `measured` is compared with `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
    Ne,
    /// Reported without a decision.
    Info,
}

/// One measured quantity, optionally compared with a target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    /// Index into the check's direction list.
    pub direction: Option<usize>,
    pub measured: f64,
    pub stderr: f64,
    pub target: Option<f64>,
    pub provenance: Option<Provenance>,
    pub relation: Relation,
    pub verdict: Option<Verdict>,
}

/// Appends rows and decides them under one tolerance policy.
pub(crate) struct Rows<'a> {
    pub rows: Vec<Row>,
    tol: &'a Tolerance,
}

impl<'a> Rows<'a> {
    pub fn new(tol: &'a Tolerance) -> Self {
        Self { rows: Vec::new(), tol }
    }

    /// Allowed deviation for a comparison at magnitude `scale`.
    pub fn allowance(&self, est: &Estimate<f64>, scale: f64) -> f64 {
        let floor = if est.seed.is_some() { self.tol.mc_floor } else { self.tol.quadrature_rel * scale.abs().max(1.0) };
        floor.max(self.tol.sigmas * est.stderr)
    }

    /// Equality-case classification, looser than the pass/fail floor.
    pub fn is_equality(&self, est: &Estimate<f64>, target: f64, scale: f64) -> bool {
        let floor = self.tol.equality_rel * scale.abs().max(1.0);
        (est.value - target).abs() <= floor.max(self.tol.sigmas * est.stderr)
    }

    fn push(&mut self, quantity: &str, direction: Option<usize>, est: &Estimate<f64>, target: Option<f64>) -> &mut Row {
        self.rows.push(Row {
            quantity: quantity.to_string(),
            direction,
            measured: est.value,
            stderr: est.stderr,
            target,
            provenance: None,
            relation: Relation::Info,
            verdict: None,
        });
        self.rows.last_mut().expect("just pushed")
    }

    pub fn info(&mut self, quantity: &str, direction: Option<usize>, est: Estimate<f64>) {
        self.push(quantity, direction, &est, None);
    }

    /// Reported next to a target without a decision.
    pub fn compare_info(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        target: f64,
        prov: Provenance,
    ) {
        self.push(quantity, direction, &est, Some(target)).provenance = Some(prov);
    }

    /// `measured == target` within the allowance at `scale`.
    pub fn eq(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        target: f64,
        prov: Provenance,
        scale: f64,
    ) -> bool {
        let ok = (est.value - target).abs() <= self.allowance(&est, scale);
        self.decide(quantity, direction, est, target, prov, Relation::Eq, ok)
    }

    /// Like [`Self::eq`] with an explicit absolute floor.
    pub fn eq_abs(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        target: f64,
        prov: Provenance,
        floor: f64,
    ) -> bool {
        let ok = (est.value - target).abs() <= floor.max(self.tol.sigmas * est.stderr);
        self.decide(quantity, direction, est, target, prov, Relation::Eq, ok)
    }

    /// `measured != target`: the deviation exceeds the allowance.
    pub fn ne(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        target: f64,
        prov: Provenance,
        scale: f64,
    ) -> bool {
        let ok = (est.value - target).abs() > self.allowance(&est, scale);
        self.decide(quantity, direction, est, target, prov, Relation::Ne, ok)
    }

    /// `measured <= bound`, with the allowance in favour of the claim.
    pub fn le(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        bound: f64,
        prov: Provenance,
        scale: f64,
    ) -> bool {
        let ok = est.value - bound <= self.allowance(&est, scale);
        self.decide(quantity, direction, est, bound, prov, Relation::Le, ok)
    }

    /// `measured >= bound`, with the allowance in favour of the claim.
    pub fn ge(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        bound: f64,
        prov: Provenance,
        scale: f64,
    ) -> bool {
        let ok = bound - est.value <= self.allowance(&est, scale);
        self.decide(quantity, direction, est, bound, prov, Relation::Ge, ok)
    }

    /// `measured < bound`. Inconclusive when a Monte Carlo error bar
    /// reaches the bound; a deterministic value within the floor is a failure.
    pub fn lt(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        bound: f64,
        prov: Provenance,
        scale: f64,
    ) -> Verdict {
        self.strict(quantity, direction, est, bound, prov, scale, Relation::Lt)
    }

    /// `measured > bound`, decided like [`Self::lt`].
    pub fn gt(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        bound: f64,
        prov: Provenance,
        scale: f64,
    ) -> Verdict {
        self.strict(quantity, direction, est, bound, prov, scale, Relation::Gt)
    }

    #[allow(clippy::too_many_arguments)]
    fn strict(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        bound: f64,
        prov: Provenance,
        scale: f64,
        relation: Relation,
    ) -> Verdict {
        let allow = self.allowance(&est, scale);
        let gap = if relation == Relation::Lt { bound - est.value } else { est.value - bound };
        let verdict = if gap > allow {
            Verdict::Pass
        } else if est.stderr > 0.0 && gap > -allow {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        let row = self.push(quantity, direction, &est, Some(bound));
        row.provenance = Some(prov);
        row.relation = relation;
        row.verdict = Some(verdict);
        verdict
    }

    /// A boolean claim reported as `1`/`0` against the expected flag.
    pub fn flag(&mut self, quantity: &str, direction: Option<usize>, got: bool, want: bool, prov: Provenance) -> bool {
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        self.decide(quantity, direction, Estimate::exact(b(got)), b(want), prov, Relation::Eq, got == want)
    }

    #[allow(clippy::too_many_arguments)]
    fn decide(
        &mut self,
        quantity: &str,
        direction: Option<usize>,
        est: Estimate<f64>,
        target: f64,
        prov: Provenance,
        relation: Relation,
        ok: bool,
    ) -> bool {
        let row = self.push(quantity, direction, &est, Some(target));
        row.provenance = Some(prov);
        row.relation = relation;
        row.verdict = Some(if ok { Verdict::Pass } else { Verdict::Fail });
        ok
    }
}
