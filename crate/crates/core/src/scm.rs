//! Point-in-time structural causal models.
//!
//! Deterministic form: `x^k := f^k(x^PA(k))`, observed as `X^k = x^k + ε^k`.
//! Stochastic form: `X^k := f^k(X^PA(k)) + σ_k ε^k` with independent standard
//! normal `ε^k`. Assignments use the closed-form term family of [`crate::term`]
//! without time terms.
//!
//! Cyclic deterministic models are solved by damped fixed-point iteration
//! `x ← ½x + ½f(x)` (tolerance 1e-10 on the max-norm step, at most 10⁴ iterations);
//! failure to converge is reported as a violation of unique solvability.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{validate_names, Graph};
use crate::rng::{stream, STREAM_NOISE, STREAM_SCM};
use crate::term::Rhs;

pub const FIXED_POINT_DAMPING: f64 = 0.5;
pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScmForm {
    /// Deterministic assignments; `sigma` is measurement noise.
    Deterministic,
    /// Additive driving noise with standard deviation `sigma`.
    Stochastic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticAssignment {
    pub parents: BTreeSet<usize>,
    pub function: Rhs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticScm {
    names: Vec<String>,
    form: ScmForm,
    assignments: Vec<StaticAssignment>,
    sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StaticIntervention {
    /// `do(X^j := value)`: constant assignment without noise.
    Hard { target: usize, value: f64 },
    /// New assignment for `target`; its parents are the support of `function`.
    /// `noise_sd` replaces the target's noise level when given.
    Soft {
        target: usize,
        function: Rhs,
        noise_sd: Option<f64>,
    },
}

impl StaticScm {
    pub fn new(
        names: Vec<String>,
        form: ScmForm,
        assignments: Vec<StaticAssignment>,
        sigma: Vec<f64>,
    ) -> Result<Self> {
        validate_names(&names)?;
        let d = names.len();
        if assignments.len() != d || sigma.len() != d {
            return Err(Error::invalid(format!(
                "{d} variables but {} assignments and {} noise levels",
                assignments.len(),
                sigma.len()
            )));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::invalid("noise standard deviations must be finite and >= 0"));
        }
        let mut assignments = assignments;
        for (k, a) in assignments.iter_mut().enumerate() {
            if a.function.depends_on_time() {
                return Err(Error::invalid(format!("assignment of `{}` uses time terms", names[k])));
            }
            if let Some(&v) = a.parents.iter().chain(a.function.support().iter()).find(|&&v| v >= d) {
                return Err(Error::invalid(format!("assignment of `{}` references index {v}", names[k])));
            }
            a.parents.extend(a.function.support());
            if a.parents.contains(&k) {
                return Err(Error::invalid(format!("`{}` cannot be its own parent", names[k])));
            }
        }
        let scm = StaticScm {
            names,
            form,
            assignments,
            sigma,
        };
        if form == ScmForm::Stochastic {
            if let Err(k) = scm.topological_order() {
                return Err(Error::Cyclic(scm.names[k].clone()));
            }
        }
        Ok(scm)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn form(&self) -> ScmForm {
        self.form
    }

    pub fn assignments(&self) -> &[StaticAssignment] {
        &self.assignments
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownSpecies {
                name: name.to_string(),
                known: self.names.join(", "),
            })
    }

    pub fn graph(&self) -> Graph {
        let edges = self
            .assignments
            .iter()
            .enumerate()
            .flat_map(|(k, a)| a.parents.iter().map(move |&j| (j, k)))
            .collect();
        Graph { d: self.dim(), edges }
    }

    /// Kahn order preferring the smallest ready index; `Err(k)` names a node on a cycle.
    pub fn topological_order(&self) -> std::result::Result<Vec<usize>, usize> {
        let d = self.dim();
        let mut indegree: Vec<usize> = self.assignments.iter().map(|a| a.parents.len()).collect();
        let mut ready: BTreeSet<usize> = (0..d).filter(|&k| indegree[k] == 0).collect();
        let mut order = Vec::with_capacity(d);
        while let Some(j) = ready.pop_first() {
            order.push(j);
            for (k, a) in self.assignments.iter().enumerate() {
                if a.parents.contains(&j) {
                    indegree[k] -= 1;
                    if indegree[k] == 0 {
                        ready.insert(k);
                    }
                }
            }
        }
        if order.len() == d {
            Ok(order)
        } else {
            Err((0..d).find(|k| !order.contains(k)).unwrap_or(0))
        }
    }

    fn eval(&self, k: usize, x: &[f64]) -> Result<f64> {
        self.assignments[k].function.eval(x, 0.0)
    }

    /// Damped fixed-point iteration from the origin.
    pub fn solve_fixed_point(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        let mut x = vec![0.0; d];
        let mut next = vec![0.0; d];
        for _ in 0..FIXED_POINT_MAX_ITERS {
            for (k, nk) in next.iter_mut().enumerate() {
                *nk = (1.0 - FIXED_POINT_DAMPING) * x[k] + FIXED_POINT_DAMPING * self.eval(k, &x)?;
            }
            let step = x
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut x, &mut next);
            if !step.is_finite() || x.iter().any(|v| !v.is_finite()) {
                break;
            }
            if step < FIXED_POINT_TOL {
                return Ok(x);
            }
        }
        Err(Error::NotConverged {
            iterations: FIXED_POINT_MAX_ITERS,
        })
    }

    /// The state induced by the deterministic assignments: exact evaluation in
    /// topological order for acyclic graphs, fixed-point iteration otherwise.
    pub fn solve_deterministic(&self) -> Result<Vec<f64>> {
        match self.topological_order() {
            Ok(order) => {
                let mut x = vec![0.0; self.dim()];
                for k in order {
                    x[k] = self.eval(k, &x)?;
                }
                Ok(x)
            }
            Err(_) => self.solve_fixed_point(),
        }
    }

    /// Ancestral sampling of the stochastic form; row `i` uses stream `(seed, [SCM, i])`.
    pub fn sample_stochastic(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let order = self
            .topological_order()
            .map_err(|k| Error::Cyclic(self.names[k].clone()))?;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, &[STREAM_SCM, i as u64]);
                let mut x = vec![0.0; self.dim()];
                // draw all noise first so the stream layout does not depend on the order
                let eps: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
                for &k in &order {
                    x[k] = self.eval(k, &x)? + self.sigma[k] * eps[k];
                }
                Ok(x)
            })
            .collect()
    }

    /// Samples the model in its own form: noisy observations of the solved state
    /// for deterministic models, ancestral samples for stochastic ones.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        match self.form {
            ScmForm::Deterministic => Ok(observe(&self.solve_deterministic()?, &self.sigma, n, seed)),
            ScmForm::Stochastic => self.sample_stochastic(n, seed),
        }
    }
}

/// `n` independent noisy copies `X^k = x^k + σ_k ε^k` of `state`; row `i` uses stream `(seed, [NOISE, i])`.
pub fn observe(state: &[f64], sigma: &[f64], n: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[STREAM_NOISE, i as u64]);
            state
                .iter()
                .zip(sigma)
                .map(|(&x, &s)| {
                    let z: f64 = rng.sample(StandardNormal);
                    x + s * z
                })
                .collect()
        })
        .collect()
}

/// Replaces one assignment, returning a new model.
pub fn intervene_static(scm: &StaticScm, iv: &StaticIntervention) -> Result<StaticScm> {
    let mut assignments = scm.assignments.clone();
    let mut sigma = scm.sigma.clone();
    let target = match iv {
        StaticIntervention::Hard { target, .. } | StaticIntervention::Soft { target, .. } => *target,
    };
    if target >= scm.dim() {
        return Err(Error::invalid(format!("intervention target {target} out of range")));
    }
    match iv {
        StaticIntervention::Hard { value, .. } => {
            if !value.is_finite() {
                return Err(Error::invalid("hard intervention value must be finite"));
            }
            assignments[target] = StaticAssignment {
                parents: BTreeSet::new(),
                function: Rhs::new([crate::term::Term::constant(*value)])?,
            };
            if scm.form == ScmForm::Stochastic {
                sigma[target] = 0.0;
            }
        }
        StaticIntervention::Soft {
            function, noise_sd, ..
        } => {
            assignments[target] = StaticAssignment {
                parents: function.support(),
                function: function.clone(),
            };
            if let Some(s) = noise_sd {
                sigma[target] = *s;
            }
        }
    }
    let out = StaticScm::new(scm.names.clone(), scm.form, assignments, sigma)?;
    if out.form == ScmForm::Deterministic {
        out.solve_deterministic()?;
    }
    Ok(out)
}
