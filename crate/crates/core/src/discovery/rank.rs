use std::cmp::Ordering;
use std::fmt::Write as _;

use super::{enumerate_candidates, fit_candidate, BasisSpec, FittedModel};
use crate::error::{Error, Result};
use crate::sim::Dataset;

pub const ORDERING_RULE: &str =
    "invariance ascending, then predictability ascending, then |S| ascending, then S lexicographic";

/// Pooled mean squared residual.
pub fn predictability_score(fitted: &FittedModel) -> f64 {
    let n = fitted.n_residuals();
    if n == 0 {
        return 0.0;
    }
    fitted.rss_pooled / n as f64
}

/// Largest excess per-environment loss from sharing the pooled coefficients.
///
/// Errors when fewer than two environments carry data.
pub fn invariance_score(fitted: &FittedModel) -> Result<f64> {
    if fitted.environments.len() < 2 {
        return Err(Error::invalid("invariance unavailable: fewer than two environments"));
    }
    let mut worst = 0.0f64;
    for e in 0..fitted.environments.len() {
        let n = fitted.count_by_env[e] as f64;
        let excess = (fitted.rss_by_env[e] - fitted.rss_own_env[e]) / n;
        worst = worst.max(excess);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedModel {
    pub fitted: FittedModel,
    /// `None` when the dataset has a single environment.
    pub invariance: Option<f64>,
    pub predictability: f64,
}

impl RankedModel {
    pub fn parents(&self) -> &[usize] {
        &self.fitted.candidate.parents
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub target: usize,
    pub names: Vec<String>,
    pub models: Vec<RankedModel>,
    pub invariance_available: bool,
    pub ordering_rule: &'static str,
}

impl Ranking {
    pub fn top(&self) -> &RankedModel {
        &self.models[0]
    }
}

fn compare(a: &RankedModel, b: &RankedModel) -> Ordering {
    let inv = match (a.invariance, b.invariance) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => Ordering::Equal,
    };
    inv.then_with(|| a.predictability.total_cmp(&b.predictability))
        .then_with(|| a.parents().len().cmp(&b.parents().len()))
        .then_with(|| a.parents().cmp(b.parents()))
}

/// Fits every candidate parent set of size ≤ `p_max` and sorts by [`ORDERING_RULE`].
pub fn rank_models(dataset: &Dataset, target: usize, p_max: usize, spec: &BasisSpec) -> Result<Ranking> {
    let candidates = enumerate_candidates(dataset.dim(), target, p_max, spec)?;
    let mut models = Vec::with_capacity(candidates.len());
    let mut invariance_available = true;
    for cand in &candidates {
        let fitted = fit_candidate(dataset, cand)?;
        let invariance = invariance_score(&fitted).ok();
        invariance_available &= invariance.is_some();
        let predictability = predictability_score(&fitted);
        models.push(RankedModel {
            fitted,
            invariance,
            predictability,
        });
    }
    models.sort_by(compare);
    Ok(Ranking {
        target,
        names: dataset.names.clone(),
        models,
        invariance_available,
        ordering_rule: ORDERING_RULE,
    })
}

/// Tab-separated ranking table. Lines starting with `#` are metadata.
pub fn format_ranking(r: &Ranking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# target: {}", r.names[r.target]);
    let _ = writeln!(out, "# ordering: {}", r.ordering_rule);
    if !r.invariance_available {
        let _ = writeln!(out, "# invariance unavailable: single environment, ranked by predictability only");
    }
    out.push_str("rank\tparents\tinvariance\tpredictability\ttheta\n");
    for (i, m) in r.models.iter().enumerate() {
        let labels = m.fitted.candidate.basis_labels(&r.names);
        let theta: Vec<String> = labels
            .iter()
            .zip(&m.fitted.theta)
            .map(|(l, v)| format!("{l}={v:e}"))
            .collect();
        let inv = m.invariance.map_or("NA".to_string(), |v| format!("{v:e}"));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:e}\t{}",
            i + 1,
            m.fitted.candidate.parent_label(&r.names),
            inv,
            m.predictability,
            theta.join(";")
        );
    }
    out
}
