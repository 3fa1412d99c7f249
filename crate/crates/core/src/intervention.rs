//! Interventions on kinetic models.
//!
//! Every intervention returns a new model in which only the targeted component(s)
//! differ. Rate changes act on the source reaction network and therefore touch
//! every species whose net stoichiometry in the edited reaction is nonzero.
//!
//! Directive syntax (used by configs and the command line):
//!
//! ```text
//! set-initial <species> <value>
//! set-rate <rate> <value>
//! clamp <species> <value>
//! force <species> <value> gain <gain>
//! traj <species> "<time-only expression>"
//! replace-ode <species> "<expression>" [diffusion "<expression>"]
//! ```

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::KineticModel;
use crate::term::{fmt_num, parse_rhs, Rhs, Term};

#[derive(Debug, Clone, PartialEq)]
pub enum Intervention {
    /// `do(x^k_0 := value)`
    SetInitial { target: usize, value: f64 },
    /// `do(ẋ^k := drift)`; for stochastic models the diffusion is replaced too
    /// (by zero when `diffusion` is `None`).
    ReplaceOde {
        target: usize,
        drift: Rhs,
        diffusion: Option<Rhs>,
    },
    /// Change the rate constant of every reaction named `rate`.
    SetRate { rate: String, value: f64 },
    /// `do(x^k_0 := value)` together with `do(ẋ^k := 0)`.
    Clamp { target: usize, value: f64 },
    /// `ẋ^k := gain · (value - x^k)`.
    Force { target: usize, value: f64, gain: f64 },
    /// `x^k_t := ζ(t)`, realized as `do(ẋ^k := ζ̇)` and `do(x^k_0 := ζ(0))`.
    Trajectory { target: usize, path: Rhs },
}

/// Part of a component an intervention writes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    Initial,
    Dynamics,
}

impl Intervention {
    /// `(component, slot)` pairs written by this intervention on `model`.
    pub fn slots(&self, model: &KineticModel) -> Result<Vec<(usize, Slot)>> {
        Ok(match self {
            Intervention::SetInitial { target, .. } => vec![(*target, Slot::Initial)],
            Intervention::ReplaceOde { target, .. } | Intervention::Force { target, .. } => {
                vec![(*target, Slot::Dynamics)]
            }
            Intervention::Clamp { target, .. } | Intervention::Trajectory { target, .. } => {
                vec![(*target, Slot::Initial), (*target, Slot::Dynamics)]
            }
            Intervention::SetRate { rate, .. } => {
                let net = model.network().ok_or_else(|| {
                    Error::invalid("set-rate requires a model compiled from a reaction network")
                })?;
                net.rate_effect(rate)?
                    .into_iter()
                    .map(|k| (k, Slot::Dynamics))
                    .collect()
            }
        })
    }

    pub fn target(&self) -> Option<usize> {
        match self {
            Intervention::SetInitial { target, .. }
            | Intervention::ReplaceOde { target, .. }
            | Intervention::Clamp { target, .. }
            | Intervention::Force { target, .. }
            | Intervention::Trajectory { target, .. } => Some(*target),
            Intervention::SetRate { .. } => None,
        }
    }

    /// Directive text for this intervention, resolvable again with [`parse_directive`].
    pub fn describe(&self, names: &[String]) -> String {
        match self {
            Intervention::SetInitial { target, value } => {
                format!("set-initial {} {}", names[*target], fmt_num(*value))
            }
            Intervention::SetRate { rate, value } => format!("set-rate {rate} {}", fmt_num(*value)),
            Intervention::Clamp { target, value } => {
                format!("clamp {} {}", names[*target], fmt_num(*value))
            }
            Intervention::Force {
                target,
                value,
                gain,
            } => format!(
                "force {} {} gain {}",
                names[*target],
                fmt_num(*value),
                fmt_num(*gain)
            ),
            Intervention::Trajectory { target, path } => {
                format!("traj {} \"{}\"", names[*target], path.format(names))
            }
            Intervention::ReplaceOde {
                target,
                drift,
                diffusion,
            } => {
                let mut s = format!("replace-ode {} \"{}\"", names[*target], drift.format(names));
                if let Some(h) = diffusion {
                    s.push_str(&format!(" diffusion \"{}\"", h.format(names)));
                }
                s
            }
        }
    }
}

fn check_target(model: &KineticModel, target: usize) -> Result<()> {
    if target >= model.dim() {
        return Err(Error::invalid(format!(
            "intervention target {target} out of range (d = {})",
            model.dim()
        )));
    }
    Ok(())
}

/// Applies one intervention, returning a new model.
pub fn apply_intervention(model: &KineticModel, iv: &Intervention) -> Result<KineticModel> {
    let mut out = model.clone();
    let none = BTreeSet::new();
    match iv {
        Intervention::SetInitial { target, value } => {
            check_target(model, *target)?;
            out.set_initial_value(*target, *value)?;
        }
        Intervention::ReplaceOde {
            target,
            drift,
            diffusion,
        } => {
            check_target(model, *target)?;
            out.set_component(*target, drift.clone(), diffusion.clone(), &none)?;
        }
        Intervention::SetRate { rate, value } => {
            let net = model.network().ok_or_else(|| {
                Error::invalid("set-rate requires a model compiled from a reaction network")
            })?;
            let affected = crate::network::set_rate_effect(net, rate, *value)?;
            let edited = net.with_rate(rate, *value)?;
            out.recompile_from(edited, &affected)?;
        }
        Intervention::Clamp { target, value } => {
            check_target(model, *target)?;
            out.set_component(*target, Rhs::zero(), None, &none)?;
            out.set_initial_value(*target, *value)?;
        }
        Intervention::Force {
            target,
            value,
            gain,
        } => {
            check_target(model, *target)?;
            if !(*gain > 0.0 && gain.is_finite()) || !value.is_finite() {
                return Err(Error::invalid(format!(
                    "forcing needs a finite target and a positive gain, got value {value}, gain {gain}"
                )));
            }
            let drift = Rhs::new([
                Term::constant(gain * value),
                Term::monomial(-gain, [(*target, 1)])?,
            ])?;
            // keep x^k as a parent even when gain * value is 0
            out.set_component(*target, drift, None, &BTreeSet::from([*target]))?;
        }
        Intervention::Trajectory { target, path } => {
            check_target(model, *target)?;
            let derivative = path.time_derivative().ok_or_else(|| {
                Error::invalid("trajectory interventions accept only time-dependent terms")
            })?;
            let start = path.eval(&[], 0.0)?;
            out.set_component(*target, derivative, None, &none)?;
            out.set_initial_value(*target, start)?;
        }
    }
    Ok(out)
}

/// Applies a list of interventions in order. Two interventions writing the same
/// slot of the same component are rejected; rate changes on distinct rates may
/// overlap with each other.
pub fn apply_interventions(model: &KineticModel, ivs: &[Intervention]) -> Result<KineticModel> {
    let mut taken: Vec<((usize, Slot), bool)> = Vec::new();
    let mut rates = BTreeSet::new();
    for iv in ivs {
        let is_rate = matches!(iv, Intervention::SetRate { .. });
        if let Intervention::SetRate { rate, .. } = iv {
            if !rates.insert(rate.clone()) {
                return Err(Error::invalid(format!("rate `{rate}` intervened on twice")));
            }
        }
        for slot in iv.slots(model)? {
            if let Some((_, prev_rate)) = taken.iter().find(|(s, _)| *s == slot) {
                if !(is_rate && *prev_rate) {
                    return Err(Error::invalid(format!(
                        "duplicate intervention target `{}` ({:?})",
                        model.names()[slot.0],
                        slot.1
                    )));
                }
            }
            taken.push((slot, is_rate));
        }
    }
    ivs.iter()
        .try_fold(model.clone(), |m, iv| apply_intervention(&m, iv))
}

fn split_args(text: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let mut arg = String::new();
        if c == '"' {
            chars.next();
            let mut closed = false;
            for c in chars.by_ref() {
                if c == '"' {
                    closed = true;
                    break;
                }
                arg.push(c);
            }
            if !closed {
                return Err(Error::invalid(format!("unterminated quote in `{text}`")));
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                arg.push(c);
                chars.next();
            }
        }
        args.push(arg);
    }
    Ok(args)
}

fn number(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::invalid(format!("invalid {what} `{s}`")))
}

/// Parses one directive string against the component names of `model`.
pub fn parse_directive(text: &str, model: &KineticModel) -> Result<Intervention> {
    let args = split_args(text)?;
    let usage = || Error::invalid(format!("malformed directive `{text}`"));
    let (verb, rest) = args.split_first().ok_or_else(usage)?;
    let names = model.names();
    let expr = |s: &str| parse_rhs(s, names);
    Ok(match (verb.as_str(), rest) {
        ("set-initial", [who, v]) => Intervention::SetInitial {
            target: model.index_of(who)?,
            value: number(v, "initial value")?,
        },
        ("set-rate", [rate, v]) => {
            let net = model.network().ok_or_else(|| {
                Error::invalid("set-rate requires a model compiled from a reaction network")
            })?;
            if net.rate(rate).is_none() {
                return Err(Error::UnknownRate(rate.clone()));
            }
            Intervention::SetRate {
                rate: rate.clone(),
                value: number(v, "rate")?,
            }
        }
        ("clamp", [who, v]) => Intervention::Clamp {
            target: model.index_of(who)?,
            value: number(v, "clamp value")?,
        },
        ("force", [who, v, kw, g]) if kw == "gain" => Intervention::Force {
            target: model.index_of(who)?,
            value: number(v, "forcing target")?,
            gain: number(g, "gain")?,
        },
        ("traj", [who, e]) => Intervention::Trajectory {
            target: model.index_of(who)?,
            path: expr(e)?,
        },
        ("replace-ode", [who, e]) => Intervention::ReplaceOde {
            target: model.index_of(who)?,
            drift: expr(e)?,
            diffusion: None,
        },
        ("replace-ode", [who, e, kw, h]) if kw == "diffusion" => Intervention::ReplaceOde {
            target: model.index_of(who)?,
            drift: expr(e)?,
            diffusion: Some(expr(h)?),
        },
        ("set-initial" | "set-rate" | "clamp" | "force" | "traj" | "replace-ode", _) => {
            return Err(usage())
        }
        (other, _) => return Err(Error::invalid(format!("unknown directive `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{compile_mass_action, parse_network};

    fn lv() -> KineticModel {
        let net = parse_network("A -> 2 A @ k1 = 0.1\nA + B -> 2 B @ k2 = 0.05\nB -> 0 @ k3 = 0.05").unwrap();
        compile_mass_action(&net).unwrap().with_initial(vec![1.0, 1.5]).unwrap()
    }

    #[test]
    fn figure_one_intervention() {
        let m = lv();
        let out = apply_interventions(
            &m,
            &[
                Intervention::SetRate { rate: "k1".into(), value: 0.05 },
                Intervention::SetInitial { target: 1, value: 2.0 },
            ],
        )
        .unwrap();
        let names = out.names().to_vec();
        assert_eq!(out.drift()[0].format(&names), "0.05 * A - 0.05 * A * B");
        assert_eq!(out.drift()[1], m.drift()[1]);
        assert_eq!(out.initial(), &[Some(1.0), Some(2.0)]);
        // (1, 1) is the new equilibrium
        assert_eq!(out.rhs_eval(&[1.0, 1.0], 0.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn clamp_zeroes_dynamics() {
        let out = apply_intervention(&lv(), &Intervention::Clamp { target: 0, value: 0.3 }).unwrap();
        assert!(out.drift()[0].is_zero());
        assert!(out.parents()[0].is_empty());
        assert_eq!(out.initial()[0], Some(0.3));
        assert_eq!(out.rhs_eval(&[0.3, 5.0], 0.0).unwrap()[0], 0.0);
    }

    #[test]
    fn trajectory_becomes_derivative() {
        let path = parse_rhs("sin(t)", &[]).unwrap();
        let out = apply_intervention(&lv(), &Intervention::Trajectory { target: 1, path }).unwrap();
        assert_eq!(out.drift()[1].terms(), &[Term::time_sin(1.0, 1.0, std::f64::consts::FRAC_PI_2)]);
        assert_eq!(out.initial()[1], Some(0.0));
        let bad = Intervention::Trajectory { target: 1, path: parse_rhs("A", out.names()).unwrap() };
        assert!(apply_intervention(&lv(), &bad).is_err());
    }

    #[test]
    fn forcing_pulls_towards_target() {
        let out = apply_intervention(&lv(), &Intervention::Force { target: 0, value: 2.0, gain: 5.0 }).unwrap();
        assert_eq!(out.rhs_eval(&[1.0, 1.0], 0.0).unwrap()[0], 5.0);
        assert_eq!(out.rhs_eval(&[2.0, 1.0], 0.0).unwrap()[0], 0.0);
        assert!(apply_intervention(&lv(), &Intervention::Force { target: 0, value: 2.0, gain: 0.0 }).is_err());
    }

    #[test]
    fn rejects_duplicates_and_non_network_rates() {
        let m = lv();
        let dup = [
            Intervention::SetInitial { target: 1, value: 2.0 },
            Intervention::Clamp { target: 1, value: 2.0 },
        ];
        assert!(apply_interventions(&m, &dup).is_err());
        let custom = KineticModel::new(m.clone().into_parts()).unwrap();
        assert!(apply_intervention(&custom, &Intervention::SetRate { rate: "k1".into(), value: 1.0 }).is_err());
        assert!(matches!(
            apply_intervention(&m, &Intervention::SetRate { rate: "zz".into(), value: 1.0 }),
            Err(Error::UnknownRate(_))
        ));
    }

    #[test]
    fn rate_and_initial_on_same_component_are_compatible() {
        let m = lv();
        let ivs = [
            Intervention::SetRate { rate: "k3".into(), value: 0.1 },
            Intervention::SetInitial { target: 1, value: 2.0 },
        ];
        assert!(apply_interventions(&m, &ivs).is_ok());
    }

    #[test]
    fn directives_round_trip() {
        let m = lv();
        for text in [
            "set-initial B 2",
            "set-rate k1 0.05",
            "clamp A 0.3",
            "force A 0.3 gain 5",
            "traj B \"1 * sin(1 * t + 0)\"",
            "replace-ode A \"0.2 * A - 1 * A * B\"",
        ] {
            let iv = parse_directive(text, &m).unwrap();
            assert_eq!(iv.describe(m.names()), text);
        }
        assert!(matches!(parse_directive("clamp Q 1", &m), Err(Error::UnknownSpecies { .. })));
        assert!(parse_directive("explode A", &m).is_err());
        assert!(parse_directive("force A 1 gian 2", &m).is_err());
        assert!(parse_directive("traj A \"sin(t", &m).is_err());
    }
}
