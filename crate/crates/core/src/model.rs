//! Deterministic and stochastic causal kinetic models and their causal graphs.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::term::{is_identifier, Rhs, RESERVED_NAMES};

/// How `build` treats a declared parent set that misses variables of the RHS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParentCheck {
    /// Widen the parent set and report the widening.
    #[default]
    Widen,
    /// Reject the model.
    Strict,
}

/// Raw pieces of a model before validation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelParts {
    pub names: Vec<String>,
    pub drift: Vec<Rhs>,
    pub parents: Vec<BTreeSet<usize>>,
    pub initial: Option<Vec<f64>>,
    pub diffusion: Option<Vec<Rhs>>,
}

/// Record of a parent set that had to be enlarged during `build`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentWidening {
    pub component: usize,
    pub added: Vec<usize>,
}

/// A causal kinetic model: `d` components, each with a drift RHS, a parent set,
/// an optional initial value and, for stochastic models, a diffusion RHS.
///
/// Values are immutable; interventions return new models.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticModel {
    names: Vec<String>,
    drift: Vec<Rhs>,
    parents: Vec<BTreeSet<usize>>,
    initial: Vec<Option<f64>>,
    diffusion: Option<Vec<Rhs>>,
    /// Source network for models produced by mass-action compilation.
    network: Option<ReactionNetwork>,
    /// `true` where the drift is still the mass-action compilation of `network`.
    from_network: Vec<bool>,
}

pub(crate) fn validate_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::invalid("a model needs at least one component"));
    }
    for (i, name) in names.iter().enumerate() {
        if !is_identifier(name) {
            return Err(Error::invalid(format!("`{name}` is not a valid identifier")));
        }
        if RESERVED_NAMES.contains(&name.as_str()) {
            return Err(Error::invalid(format!("`{name}` is a reserved name")));
        }
        if names[..i].contains(name) {
            return Err(Error::invalid(format!("duplicate component name `{name}`")));
        }
    }
    Ok(())
}

impl KineticModel {
    /// Validates `parts`. Parent sets are checked against the syntactic support
    /// of drift and diffusion; see [`ParentCheck`].
    pub fn build(parts: ModelParts, check: ParentCheck) -> Result<(Self, Vec<ParentWidening>)> {
        let ModelParts {
            names,
            drift,
            mut parents,
            initial,
            diffusion,
        } = parts;
        validate_names(&names)?;
        let d = names.len();
        if drift.len() != d || parents.len() != d {
            return Err(Error::invalid(format!(
                "dimension mismatch: {d} names, {} drifts, {} parent sets",
                drift.len(),
                parents.len()
            )));
        }
        if let Some(init) = &initial {
            if init.len() != d {
                return Err(Error::invalid(format!("expected {d} initial values, got {}", init.len())));
            }
            if let Some(k) = init.iter().position(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("initial value of `{}` is not finite", names[k])));
            }
        }
        if let Some(diff) = &diffusion {
            if diff.len() != d {
                return Err(Error::invalid(format!("expected {d} diffusion terms, got {}", diff.len())));
            }
        }
        let mut widened = Vec::new();
        for k in 0..d {
            let mut support = drift[k].support();
            if let Some(diff) = &diffusion {
                support.extend(diff[k].support());
            }
            if let Some(&bad) = support.iter().chain(parents[k].iter()).find(|&&v| v >= d) {
                return Err(Error::invalid(format!(
                    "component `{}` references variable index {bad} but d = {d}",
                    names[k]
                )));
            }
            let missing: Vec<usize> = support.difference(&parents[k]).copied().collect();
            if missing.is_empty() {
                continue;
            }
            match check {
                ParentCheck::Strict => {
                    return Err(Error::ParentsTooSmall {
                        component: names[k].clone(),
                        missing: missing.iter().map(|&v| names[v].clone()).collect(),
                    })
                }
                ParentCheck::Widen => {
                    log::warn!(
                        "widening parents of `{}` by {:?}",
                        names[k],
                        missing.iter().map(|&v| &names[v]).collect::<Vec<_>>()
                    );
                    parents[k].extend(missing.iter().copied());
                    widened.push(ParentWidening {
                        component: k,
                        added: missing,
                    });
                }
            }
        }
        let model = KineticModel {
            from_network: vec![false; d],
            initial: match initial {
                Some(v) => v.into_iter().map(Some).collect(),
                None => vec![None; d],
            },
            names,
            drift,
            parents,
            diffusion,
            network: None,
        };
        Ok((model, widened))
    }

    /// `build` with parent widening, discarding the widening report.
    pub fn new(parts: ModelParts) -> Result<Self> {
        Ok(Self::build(parts, ParentCheck::Widen)?.0)
    }

    pub(crate) fn from_network_parts(parts: ModelParts, network: ReactionNetwork) -> Result<Self> {
        let (mut model, _) = Self::build(parts, ParentCheck::Strict)?;
        model.from_network = vec![true; model.dim()];
        model.network = Some(network);
        Ok(model)
    }

    /// Parts of the model; `initial` is `Some` only when every component has a value.
    pub fn into_parts(self) -> ModelParts {
        ModelParts {
            initial: self.initial.iter().copied().collect(),
            names: self.names,
            drift: self.drift,
            parents: self.parents,
            diffusion: self.diffusion,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
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

    pub fn drift(&self) -> &[Rhs] {
        &self.drift
    }

    pub fn parents(&self) -> &[BTreeSet<usize>] {
        &self.parents
    }

    /// Per-component initial values; `None` where unset.
    pub fn initial(&self) -> &[Option<f64>] {
        &self.initial
    }

    pub fn diffusion(&self) -> Option<&[Rhs]> {
        self.diffusion.as_deref()
    }

    pub fn network(&self) -> Option<&ReactionNetwork> {
        self.network.as_ref()
    }

    /// Whether the drift of component `k` is the mass-action compilation of the source network.
    pub fn is_network_derived(&self, k: usize) -> bool {
        self.from_network[k]
    }

    pub fn is_stochastic(&self) -> bool {
        self.diffusion.is_some()
    }

    pub fn with_initial(&self, initial: Vec<f64>) -> Result<Self> {
        let d = self.dim();
        if initial.len() != d {
            return Err(Error::invalid(format!("expected {d} initial values, got {}", initial.len())));
        }
        if let Some(k) = initial.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("initial value of `{}` is not finite", self.names[k])));
        }
        let mut out = self.clone();
        out.initial = initial.into_iter().map(Some).collect();
        Ok(out)
    }

    /// Attaches diffusion terms (one per component), widening parents to cover them.
    pub fn with_diffusion(&self, diffusion: Vec<Rhs>) -> Result<Self> {
        let d = self.dim();
        if diffusion.len() != d {
            return Err(Error::invalid(format!("expected {d} diffusion terms, got {}", diffusion.len())));
        }
        let mut out = self.clone();
        for (k, h) in diffusion.iter().enumerate() {
            if let Some(v) = h.max_var().filter(|&v| v >= d) {
                return Err(Error::invalid(format!("diffusion references variable index {v} but d = {d}")));
            }
            out.parents[k].extend(h.support());
        }
        out.diffusion = Some(diffusion);
        Ok(out)
    }

    pub fn without_diffusion(&self) -> Self {
        let mut out = self.clone();
        out.diffusion = None;
        out
    }

    /// Drift evaluated at `state`, written into `out`.
    pub fn drift_into(&self, state: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        for (o, f) in out.iter_mut().zip(&self.drift) {
            *o = f.eval(state, t)?;
        }
        Ok(())
    }

    pub fn rhs_eval(&self, state: &[f64], t: f64) -> Result<Vec<f64>> {
        if state.len() != self.dim() {
            return Err(Error::invalid(format!(
                "state has {} entries, model has {} components",
                state.len(),
                self.dim()
            )));
        }
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("state must be finite"));
        }
        let mut out = vec![0.0; self.dim()];
        self.drift_into(state, t, &mut out)?;
        Ok(out)
    }

    pub(crate) fn diffusion_into(&self, state: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        match &self.diffusion {
            Some(h) => {
                for (o, f) in out.iter_mut().zip(h) {
                    *o = f.eval(state, t)?;
                }
            }
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
        Ok(())
    }

    pub fn causal_graph(&self) -> Graph {
        let edges = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(k, pa)| pa.iter().map(move |&j| (j, k)))
            .collect();
        Graph {
            d: self.dim(),
            edges,
        }
    }

    /// Human-readable ODE listing, one `d[X]/dt = ...` line per component.
    pub fn equations(&self) -> String {
        let mut out = String::new();
        for (k, name) in self.names.iter().enumerate() {
            out.push_str(&format!("d[{name}]/dt = {}\n", self.drift[k].format(&self.names)));
            if let Some(h) = &self.diffusion {
                out.push_str(&format!("  diffusion[{name}] = {}\n", h[k].format(&self.names)));
            }
        }
        out
    }

    // Internal mutation used by interventions on a fresh clone.

    pub(crate) fn set_component(
        &mut self,
        k: usize,
        drift: Rhs,
        diffusion: Option<Rhs>,
        extra_parents: &BTreeSet<usize>,
    ) -> Result<()> {
        let d = self.dim();
        let mut parents = drift.support();
        if let Some(v) = drift.max_var().filter(|&v| v >= d) {
            return Err(Error::invalid(format!("replacement drift references index {v} but d = {d}")));
        }
        match (&mut self.diffusion, diffusion) {
            (Some(h), new) => {
                let new = new.unwrap_or_default();
                if let Some(v) = new.max_var().filter(|&v| v >= d) {
                    return Err(Error::invalid(format!(
                        "replacement diffusion references index {v} but d = {d}"
                    )));
                }
                parents.extend(new.support());
                h[k] = new;
            }
            (None, Some(new)) if !new.is_zero() => {
                return Err(Error::invalid(
                    "cannot give a diffusion term to one component of a deterministic model",
                ))
            }
            (None, _) => {}
        }
        parents.extend(extra_parents.iter().copied());
        self.drift[k] = drift;
        self.parents[k] = parents;
        self.from_network[k] = false;
        Ok(())
    }

    pub(crate) fn set_initial_value(&mut self, k: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid("initial value must be finite"));
        }
        self.initial[k] = Some(value);
        Ok(())
    }

    /// Replaces the drift of network-derived components with a recompilation of `network`.
    pub(crate) fn recompile_from(&mut self, network: ReactionNetwork, components: &[usize]) -> Result<()> {
        let compiled = crate::network::compile_mass_action(&network)?;
        for &k in components {
            if !self.from_network[k] {
                continue;
            }
            let mut parents = compiled.parents[k].clone();
            if let Some(h) = &self.diffusion {
                parents.extend(h[k].support());
            }
            self.drift[k] = compiled.drift[k].clone();
            self.parents[k] = parents;
        }
        self.network = Some(network);
        Ok(())
    }

    pub(crate) fn set_provenance(&mut self, network: Option<ReactionNetwork>, from_network: Vec<bool>) {
        self.network = network;
        self.from_network = from_network;
    }

    /// Initial values with every entry set, or an error naming the first missing one.
    pub fn require_initial(&self) -> Result<Vec<f64>> {
        self.initial
            .iter()
            .enumerate()
            .map(|(k, x)| {
                x.ok_or_else(|| {
                    Error::invalid(format!(
                        "initial value of `{}` must be set before simulation",
                        self.names[k]
                    ))
                })
            })
            .collect()
    }
}

/// Causal graph over components: `(j, k)` means `j ∈ PA(k)`. Self-loops allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub d: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn parents_of(&self, k: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|&&(_, to)| to == k)
            .map(|&(from, _)| from)
            .collect()
    }

    /// All nodes reachable from `start` along directed edges, `start` included.
    pub fn descendants(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(j) = stack.pop() {
            for &(from, to) in &self.edges {
                if from == j && seen.insert(to) {
                    stack.push(to);
                }
            }
        }
        seen
    }

    /// Edge list as `A -> B` lines in sorted order.
    pub fn display<'a>(&'a self, names: &'a [String]) -> GraphDisplay<'a> {
        GraphDisplay { graph: self, names }
    }
}

pub struct GraphDisplay<'a> {
    graph: &'a Graph,
    names: &'a [String],
}

impl fmt::Display for GraphDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(from, to) in &self.graph.edges {
            writeln!(f, "{} -> {}", self.names[from], self.names[to])?;
        }
        Ok(())
    }
}
