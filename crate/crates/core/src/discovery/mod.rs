//! Invariance-based ranking of candidate parent sets for a target component.
//!
//! Each candidate is a parent set `S` together with a linear basis of terms
//! over `S`. Its coefficients are fitted by integral matching: along every
//! repetition the target is modelled as
//!
//! ```text
//! ŷ(t_l) = y(t_1) + Σ_b θ_b Q_b(t_l),   Q_b(t_l) = ∫_{t_1}^{t_l} g_b(x(s)) ds  (trapezoid)
//! ```
//!
//! Candidates are then scored by predictability (pooled mean squared residual)
//! and invariance (the largest excess loss any environment pays for sharing
//! the pooled coefficients instead of having its own), and ranked.

mod fit;
mod rank;

pub use fit::{fit_candidate, predict_new_environment, FittedModel};
pub use rank::{
    format_ranking, invariance_score, predictability_score, rank_models, RankedModel, Ranking,
    ORDERING_RULE,
};

use crate::error::{Error, Result};
use crate::term::Term;

/// Which basis terms to generate for each parent set.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    /// 1: `{1, x_i}`; 2: additionally `x_i x_j` for `i ≤ j`.
    pub degree: u32,
    /// Allow the target itself in parent sets.
    pub include_target: bool,
    /// Half-saturation constants for optional `x_i / (c2 + x_i)` terms.
    pub mm_half_sat: Vec<f64>,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            degree: 2,
            include_target: true,
            mm_half_sat: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateModel {
    pub target: usize,
    /// Sorted parent indices.
    pub parents: Vec<usize>,
    /// Unit-coefficient basis terms over `parents`.
    pub basis: Vec<Term>,
}

impl CandidateModel {
    pub fn new(target: usize, parents: Vec<usize>, spec: &BasisSpec) -> Result<Self> {
        let mut parents = parents;
        parents.sort_unstable();
        parents.dedup();
        let mut basis = vec![Term::constant(1.0)];
        for &i in &parents {
            basis.push(Term::monomial(1.0, [(i, 1)])?);
        }
        if spec.degree >= 2 {
            for (a, &i) in parents.iter().enumerate() {
                for &j in &parents[a..] {
                    basis.push(Term::monomial(1.0, [(i, 1), (j, 1)])?);
                }
            }
        }
        for &i in &parents {
            for &c2 in &spec.mm_half_sat {
                basis.push(Term::michaelis_menten(1.0, i, c2)?);
            }
        }
        Ok(CandidateModel {
            target,
            parents,
            basis,
        })
    }

    /// Short labels for the basis terms, e.g. `1`, `A`, `A*C`, `A/(2+A)`.
    pub fn basis_labels(&self, names: &[String]) -> Vec<String> {
        self.basis
            .iter()
            .map(|t| match t {
                Term::Constant { .. } => "1".to_string(),
                Term::Monomial { powers, .. } => powers
                    .iter()
                    .flat_map(|&(v, e)| std::iter::repeat_n(names[v].as_str(), e as usize))
                    .collect::<Vec<_>>()
                    .join("*"),
                Term::MichaelisMenten { var, half_sat, .. } => {
                    format!("{0}/({1}+{0})", names[*var], half_sat)
                }
                other => format!("{other:?}"),
            })
            .collect()
    }

    pub fn parent_label(&self, names: &[String]) -> String {
        let inner: Vec<&str> = self.parents.iter().map(|&j| names[j].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// All parent sets of size ≤ `p_max`, ordered by size and then lexicographically.
pub fn enumerate_candidates(
    d: usize,
    target: usize,
    p_max: usize,
    spec: &BasisSpec,
) -> Result<Vec<CandidateModel>> {
    if target >= d {
        return Err(Error::invalid(format!("target {target} out of range (d = {d})")));
    }
    if p_max > d {
        return Err(Error::invalid(format!("p_max = {p_max} exceeds d = {d}")));
    }
    if !(1..=2).contains(&spec.degree) {
        return Err(Error::invalid("basis degree must be 1 or 2"));
    }
    let pool: Vec<usize> = (0..d).filter(|&j| spec.include_target || j != target).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for mask in 0u64..(1u64 << pool.len()) {
        if mask.count_ones() as usize <= p_max {
            sets.push(
                pool.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect(),
            );
        }
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    if sets.is_empty() {
        return Err(Error::invalid("empty search space"));
    }
    sets.into_iter()
        .map(|s| CandidateModel::new(target, s, spec))
        .collect()
}
