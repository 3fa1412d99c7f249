use nalgebra::{DMatrix, DVector};

use super::CandidateModel;
use crate::error::{Error, Result};
use crate::sim::Dataset;

/// Coefficients and residual sums of one candidate.
///
/// The pooled fit minimizes `Σ_e RSS_e(θ) / n_e`, where `n_e` is the number of
/// repetitions in environment `e`, so every environment carries the same total
/// weight regardless of how often it was repeated. Reported RSS values are
/// unweighted sums of squared residuals over grid points `l ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub candidate: CandidateModel,
    pub theta: Vec<f64>,
    /// Environment indices that have at least one repetition.
    pub environments: Vec<usize>,
    /// Per-environment coefficients, aligned with `environments`.
    pub theta_by_env: Vec<Vec<f64>>,
    pub rss_pooled: f64,
    /// RSS of each environment under the pooled coefficients.
    pub rss_by_env: Vec<f64>,
    /// RSS of each environment under its own coefficients.
    pub rss_own_env: Vec<f64>,
    /// Residual equations per environment.
    pub count_by_env: Vec<usize>,
    pub grid: Vec<f64>,
}

impl FittedModel {
    pub fn n_residuals(&self) -> usize {
        self.count_by_env.iter().sum()
    }

    /// `ŷ(t_l) = y0 + Σ_b θ_b Q_b(t_l)` along `states` observed on `grid`.
    pub fn predict(&self, grid: &[f64], states: &[Vec<f64>], y0: f64) -> Result<Vec<f64>> {
        if grid.len() != states.len() {
            return Err(Error::invalid(format!(
                "grid mismatch: {} time points but {} states",
                grid.len(),
                states.len()
            )));
        }
        if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid mismatch: need at least two increasing time points"));
        }
        let q = integrated_basis(&self.candidate, grid, states)?;
        Ok((0..grid.len())
            .map(|l| {
                y0 + if l == 0 {
                    0.0
                } else {
                    (0..self.theta.len()).map(|b| self.theta[b] * q[(l - 1, b)]).sum::<f64>()
                }
            })
            .collect())
    }
}

/// Prediction with the pooled coefficients on the grid used for fitting.
pub fn predict_new_environment(fitted: &FittedModel, states: &[Vec<f64>], y0: f64) -> Result<Vec<f64>> {
    fitted.predict(&fitted.grid, states, y0)
}

/// `Q_b(t_l)` for `l = 2..L` (rows) and every basis term (columns).
fn integrated_basis(cand: &CandidateModel, grid: &[f64], states: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nb = cand.basis.len();
    let len = grid.len();
    let mut g = DMatrix::zeros(len, nb);
    for (l, x) in states.iter().enumerate() {
        for (b, term) in cand.basis.iter().enumerate() {
            g[(l, b)] = term.eval_unit(x, grid[l])?;
        }
    }
    let mut q = DMatrix::zeros(len - 1, nb);
    for b in 0..nb {
        let mut acc = 0.0;
        for l in 1..len {
            acc += 0.5 * (grid[l] - grid[l - 1]) * (g[(l - 1, b)] + g[(l, b)]);
            q[(l - 1, b)] = acc;
        }
    }
    Ok(q)
}

/// Minimum-norm least-squares solution via SVD.
pub(crate) fn lstsq_min_norm(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = max_sv * (a.nrows().max(a.ncols()) as f64) * f64::EPSILON;
    svd.solve(y, eps)
        .map_err(|e| Error::invalid(format!("least squares failed: {e}")))
}

struct Design {
    q: DMatrix<f64>,
    resp: DVector<f64>,
    env_of_row: Vec<usize>,
}

fn rss(q: &DMatrix<f64>, resp: &DVector<f64>, theta: &DVector<f64>, rows: &[usize]) -> f64 {
    rows.iter()
        .map(|&i| {
            let r = resp[i] - (q.row(i) * theta)[0];
            r * r
        })
        .sum()
}

fn select(d: &Design, rows: &[usize], weights: Option<&[f64]>) -> (DMatrix<f64>, DVector<f64>) {
    let nb = d.q.ncols();
    let mut a = DMatrix::zeros(rows.len(), nb);
    let mut y = DVector::zeros(rows.len());
    for (r, &i) in rows.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i].sqrt());
        for b in 0..nb {
            a[(r, b)] = w * d.q[(i, b)];
        }
        y[r] = w * d.resp[i];
    }
    (a, y)
}

/// Integral-matching fit of `candidate` on `dataset`: pooled and per-environment.
pub fn fit_candidate(dataset: &Dataset, candidate: &CandidateModel) -> Result<FittedModel> {
    let len = dataset.n_times();
    if len < 2 {
        return Err(Error::invalid("degenerate grid: need at least two time points"));
    }
    if candidate.target >= dataset.dim() {
        return Err(Error::invalid(format!("target {} not in dataset", candidate.target)));
    }
    let grid = dataset.grid.points();
    let nb = candidate.basis.len();
    let n_eq = dataset.n_rows() * (len - 1);
    if n_eq < 1 {
        return Err(Error::invalid("no residual equations: dataset has no repetitions"));
    }
    let mut design = Design {
        q: DMatrix::zeros(n_eq, nb),
        resp: DVector::zeros(n_eq),
        env_of_row: Vec::with_capacity(n_eq),
    };
    for row in 0..dataset.n_rows() {
        let states = dataset.states(row);
        let q = integrated_basis(candidate, grid, &states)?;
        let y = dataset.series(row, candidate.target);
        for l in 1..len {
            let i = row * (len - 1) + (l - 1);
            design.q.set_row(i, &q.row(l - 1));
            design.resp[i] = y[l] - y[0];
            design.env_of_row.push(dataset.rows[row].env);
        }
    }
    let environments: Vec<usize> = (0..dataset.environments.len())
        .filter(|&e| dataset.reps_in_env(e) > 0)
        .collect();
    let weights: Vec<f64> = design
        .env_of_row
        .iter()
        .map(|&e| 1.0 / dataset.reps_in_env(e) as f64)
        .collect();
    let all: Vec<usize> = (0..n_eq).collect();
    let (a, y) = select(&design, &all, Some(&weights));
    let theta = lstsq_min_norm(&a, &y)?;

    let mut theta_by_env = Vec::new();
    let mut rss_by_env = Vec::new();
    let mut rss_own_env = Vec::new();
    let mut count_by_env = Vec::new();
    for &e in &environments {
        let rows: Vec<usize> = (0..n_eq).filter(|&i| design.env_of_row[i] == e).collect();
        let (a_e, y_e) = select(&design, &rows, None);
        let theta_e = lstsq_min_norm(&a_e, &y_e)?;
        rss_by_env.push(rss(&design.q, &design.resp, &theta, &rows));
        rss_own_env.push(rss(&design.q, &design.resp, &theta_e, &rows));
        count_by_env.push(rows.len());
        theta_by_env.push(theta_e.iter().copied().collect());
    }
    Ok(FittedModel {
        candidate: candidate.clone(),
        theta: theta.iter().copied().collect(),
        environments,
        theta_by_env,
        rss_pooled: rss_by_env.iter().sum(),
        rss_by_env,
        rss_own_env,
        count_by_env,
        grid: grid.to_vec(),
    })
}
