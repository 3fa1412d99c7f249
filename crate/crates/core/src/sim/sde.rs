use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{guard, IntegrateOptions, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::model::KineticModel;
use crate::rng::{stream, STREAM_SDE};

/// One Euler–Maruyama path on the substep lattice of `grid`:
/// `X_{t+Δ} = X_t + f(X_t) Δ + h(X_t) √Δ Z` with independent standard normal `Z`
/// per component and step.
pub fn simulate_sde_path<R: Rng + ?Sized>(
    model: &KineticModel,
    grid: &TimeGrid,
    opts: &IntegrateOptions,
    rng: &mut R,
) -> Result<Trajectory> {
    let d = model.dim();
    let names = model.names();
    let mut x = model.require_initial()?;
    let pts = grid.points();
    guard(&x, names, opts.blow_up_bound, pts[0])?;
    let mut drift = vec![0.0; d];
    let mut diff = vec![0.0; d];
    let mut values = Vec::with_capacity(pts.len());
    values.push(x.clone());
    let m = grid.substeps();
    for w in pts.windows(2) {
        let dt = (w[1] - w[0]) / m as f64;
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("non-positive step {dt}")));
        }
        let sq = dt.sqrt();
        for j in 0..m {
            let t = w[0] + j as f64 * dt;
            model.drift_into(&x, t, &mut drift)?;
            model.diffusion_into(&x, t, &mut diff)?;
            for k in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                x[k] += drift[k] * dt + diff[k] * sq * z;
            }
            guard(&x, names, opts.blow_up_bound, t + dt)?;
        }
        values.push(x.clone());
    }
    Ok(Trajectory {
        grid: grid.clone(),
        values,
    })
}

/// `n_paths` independent paths; path `i` draws from stream `(seed, [SDE, 0, i])`.
pub fn simulate_sde(
    model: &KineticModel,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    opts: &IntegrateOptions,
) -> Result<Vec<Trajectory>> {
    if !model.is_stochastic() {
        return Err(Error::invalid("simulate_sde needs a model with diffusion terms"));
    }
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[STREAM_SDE, 0, i as u64]);
            simulate_sde_path(model, grid, opts, &mut rng)
        })
        .collect()
}
