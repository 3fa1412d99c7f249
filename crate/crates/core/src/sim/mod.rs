//! Simulation: fixed-step RK4 for deterministic models, Euler–Maruyama for
//! stochastic ones, measurement noise, and multi-environment experiments.

mod dataset;
mod experiment;
mod noise;
mod ode;
mod sde;

pub use dataset::{export_csv, import_csv, read_csv, write_csv, Dataset, EnvironmentInfo, Row};
pub use experiment::{run_experiment, Environment, Experiment, InitialDist};
pub use noise::{add_measurement_noise, add_measurement_noise_with, NoiseSpec};
pub use ode::{integrate_rk4, IntegrateOptions};
pub use sde::{simulate_sde, simulate_sde_path};

use crate::error::{Error, Result};

pub const DEFAULT_BLOW_UP_BOUND: f64 = 1e9;

/// Observation times `t_1 < … < t_L` plus the number of integration substeps
/// taken inside each observation interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
    substeps: usize,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>, substeps: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a time grid needs at least two points"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("time grid points must be finite"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("time grid must be strictly increasing"));
        }
        if substeps == 0 {
            return Err(Error::invalid("substeps must be positive"));
        }
        Ok(TimeGrid { points, substeps })
    }

    /// `len` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, len: usize, substeps: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::invalid("a time grid needs at least two points"));
        }
        let span = end - start;
        let last = (len - 1) as f64;
        let points = (0..len)
            .map(|i| if i + 1 == len { end } else { start + span * (i as f64) / last })
            .collect();
        Self::new(points, substeps)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn with_substeps(&self, substeps: usize) -> Result<Self> {
        Self::new(self.points.clone(), substeps)
    }
}

/// Values of all `d` components at each grid point (`values[l][k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Time series of component `k`.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[k]).collect()
    }

    /// Component-major flattening `[x^1_{t_1} … x^1_{t_L} … x^d_{t_L}]`.
    pub fn flatten(&self) -> Vec<f64> {
        (0..self.dim()).flat_map(|k| self.component(k)).collect()
    }
}

pub(crate) fn guard(state: &[f64], names: &[String], bound: f64, t: f64) -> Result<()> {
    for (k, &x) in state.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                component: names[k].clone(),
                time: t,
            });
        }
        if x.abs() > bound {
            return Err(Error::BlowUp {
                component: names[k].clone(),
                value: x,
                bound,
                time: t,
            });
        }
    }
    Ok(())
}
