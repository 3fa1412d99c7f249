//! Causal kinetic models.
//!
//! Reaction networks are compiled to ODE systems by mass-action kinetics,
//! intervened on at the level of their differential equations, simulated
//! (RK4 for deterministic models, Euler–Maruyama for stochastic ones) and
//! used to generate multi-environment datasets. The [`discovery`] module ranks
//! candidate parent sets of a target by how well a single mechanism explains
//! every environment. [`scm`] holds the point-in-time structural causal models.

pub mod discovery;
pub mod error;
pub mod intervention;
pub mod model;
pub mod model_io;
pub mod network;
pub mod rng;
pub mod scm;
pub mod sim;
pub mod term;

pub use error::{Error, Result};
pub use intervention::{apply_intervention, apply_interventions, parse_directive, Intervention};
pub use model::{Graph, KineticModel, ModelParts, ParentCheck};
pub use network::{compile_mass_action, format_network, parse_network, set_rate_effect, ReactionNetwork};
pub use term::{Rhs, Term};
pub use discovery::{enumerate_candidates, fit_candidate, rank_models, BasisSpec, CandidateModel, FittedModel, Ranking};
pub use model_io::{format_model, format_scm, parse_model, parse_scm};
pub use scm::{intervene_static, StaticIntervention, StaticScm};
pub use sim::{Dataset, TimeGrid, Trajectory};
