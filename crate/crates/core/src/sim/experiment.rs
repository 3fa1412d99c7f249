use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::dataset::valid_label;
use super::{
    add_measurement_noise_with, integrate_rk4, simulate_sde_path, Dataset, EnvironmentInfo,
    IntegrateOptions, NoiseSpec, Row, TimeGrid,
};
use crate::error::{Error, Result};
use crate::intervention::{apply_interventions, Intervention};
use crate::model::KineticModel;
use crate::rng::{stream, STREAM_INITIAL, STREAM_NOISE, STREAM_SDE};

/// A labeled experimental condition: a set of interventions applied to the base
/// model, observed `reps` times.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub label: String,
    pub interventions: Vec<Intervention>,
    pub reps: usize,
}

/// Distribution of one initial value, drawn once per repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDist {
    Point(f64),
    Gaussian { mean: f64, sd: f64 },
}

impl InitialDist {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialDist::Point(v) => v,
            InitialDist::Gaussian { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub base: KineticModel,
    pub environments: Vec<Environment>,
    pub grid: TimeGrid,
    pub noise: NoiseSpec,
    /// Per-component initial distributions; `None` keeps the base model's values.
    pub initial: Option<Vec<InitialDist>>,
    pub seed: u64,
    pub options: IntegrateOptions,
}

impl Experiment {
    pub fn new(base: KineticModel, grid: TimeGrid, seed: u64) -> Self {
        Experiment {
            base,
            environments: Vec::new(),
            grid,
            noise: NoiseSpec::None,
            initial: None,
            seed,
            options: IntegrateOptions::default(),
        }
    }

    pub fn environment(mut self, label: &str, interventions: Vec<Intervention>, reps: usize) -> Self {
        self.environments.push(Environment {
            label: label.to_string(),
            interventions,
            reps,
        });
        self
    }

    pub fn noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }
}

fn run_one(exp: &Experiment, env_idx: usize, rep: usize) -> Result<Vec<f64>> {
    let env = &exp.environments[env_idx];
    let path = |purpose| [purpose, env_idx as u64, rep as u64];
    let mut base = exp.base.clone();
    if let Some(dists) = &exp.initial {
        let mut rng = stream(exp.seed, &path(STREAM_INITIAL));
        let init = dists.iter().map(|d| d.draw(&mut rng)).collect();
        base = base.with_initial(init)?;
    }
    let model = apply_interventions(&base, &env.interventions)?;
    let latent = if model.is_stochastic() && !exp.options.ignore_diffusion {
        let mut rng = stream(exp.seed, &path(STREAM_SDE));
        simulate_sde_path(&model, &exp.grid, &exp.options, &mut rng)?
    } else {
        integrate_rk4(&model, &exp.grid, &exp.options)?
    };
    let observed = add_measurement_noise_with(&latent, &exp.noise, &mut stream(exp.seed, &path(STREAM_NOISE)))?;
    Ok(observed.flatten())
}

/// Runs every environment and repetition and assembles the `n × (d·L)` dataset.
///
/// Repetition `r` of environment `e` draws initial values, SDE increments and
/// measurement noise from the streams `(seed, [purpose, e, r])`, so the result
/// does not depend on scheduling.
pub fn run_experiment(exp: &Experiment) -> Result<Dataset> {
    if exp.environments.is_empty() {
        return Err(Error::invalid("an experiment needs at least one environment"));
    }
    exp.noise.validate(exp.base.dim())?;
    if let Some(dists) = &exp.initial {
        if dists.len() != exp.base.dim() {
            return Err(Error::invalid(format!(
                "{} initial distributions for {} components",
                dists.len(),
                exp.base.dim()
            )));
        }
    }
    for e in &exp.environments {
        if !valid_label(&e.label) {
            return Err(Error::invalid(format!("invalid environment label `{}`", e.label)));
        }
    }
    let jobs: Vec<(usize, usize)> = exp
        .environments
        .iter()
        .enumerate()
        .flat_map(|(e, env)| (0..env.reps).map(move |r| (e, r)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(env, rep)| {
            run_one(exp, env, rep)
                .map(|values| Row { env, rep, values })
                .map_err(|source| Error::Experiment {
                    environment: exp.environments[env].label.clone(),
                    repetition: rep + 1,
                    source: Box::new(source),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = exp.base.names().to_vec();
    let environments = exp
        .environments
        .iter()
        .map(|e| EnvironmentInfo {
            label: e.label.clone(),
            interventions: e.interventions.iter().map(|iv| iv.describe(&names)).collect(),
        })
        .collect();
    Dataset::new(names, exp.grid.clone(), environments, rows, exp.seed)
}
