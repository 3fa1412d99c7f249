use rand::Rng;
use rand_distr::StandardNormal;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::rng::{stream, STREAM_NOISE};

/// Observation noise added at grid points only.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NoiseSpec {
    #[default]
    None,
    /// Independent `N(0, σ_k²)` per component.
    Gaussian(Vec<f64>),
}

impl NoiseSpec {
    /// Same σ for all `d` components.
    pub fn uniform(sigma: f64, d: usize) -> Self {
        NoiseSpec::Gaussian(vec![sigma; d])
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian(s) if s.len() != d => Err(Error::invalid(format!(
                "noise has {} standard deviations for {d} components",
                s.len()
            ))),
            NoiseSpec::Gaussian(s) if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) => {
                Err(Error::invalid("noise standard deviations must be finite and >= 0"))
            }
            NoiseSpec::Gaussian(_) => Ok(()),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match self {
            NoiseSpec::None => true,
            NoiseSpec::Gaussian(s) => s.iter().all(|&v| v == 0.0),
        }
    }
}

/// Adds noise drawing from `rng`, grid point by grid point, component by component.
pub fn add_measurement_noise_with<R: Rng + ?Sized>(
    traj: &Trajectory,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Trajectory> {
    noise.validate(traj.dim())?;
    let mut out = traj.clone();
    if let NoiseSpec::Gaussian(sigma) = noise {
        for row in &mut out.values {
            for (x, s) in row.iter_mut().zip(sigma) {
                let z: f64 = rng.sample(StandardNormal);
                *x += s * z;
            }
        }
    }
    Ok(out)
}

/// `X_t = x_t + ε_t` at the observed grid points, from stream `(seed, [NOISE])`.
pub fn add_measurement_noise(traj: &Trajectory, noise: &NoiseSpec, seed: u64) -> Result<Trajectory> {
    add_measurement_noise_with(traj, noise, &mut stream(seed, &[STREAM_NOISE]))
}
