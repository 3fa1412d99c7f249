//! Reaction networks: the plain-text DSL and mass-action compilation.
//!
//! One reaction per line, `#` starts a comment:
//!
//! ```text
//! line := side "->" side "@" ident "=" positive-real
//! side := "0" | term ("+" term)*
//! term := [integer] ident
//! ```
//!
//! An optional `species: A, B, ...` line fixes the species order explicitly;
//! without it species are indexed by first appearance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{validate_names, KineticModel, ModelParts};
use crate::term::{fmt_num, is_identifier, Rhs, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    /// Species index to stoichiometry (≥ 1).
    pub reactants: BTreeMap<usize, u32>,
    pub products: BTreeMap<usize, u32>,
    pub rate_name: String,
    pub rate_value: f64,
}

impl Reaction {
    /// `n_s - m_s` for species `s`.
    pub fn net(&self, s: usize) -> i64 {
        let n = self.products.get(&s).copied().unwrap_or(0) as i64;
        let m = self.reactants.get(&s).copied().unwrap_or(0) as i64;
        n - m
    }

    /// Species whose amount changes when the reaction fires.
    pub fn affected(&self) -> BTreeSet<usize> {
        self.reactants
            .keys()
            .chain(self.products.keys())
            .copied()
            .filter(|&s| self.net(s) != 0)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    pub fn new(names: Vec<String>, reactions: Vec<Reaction>) -> Result<Self> {
        validate_names(&names)?;
        let d = names.len();
        let mut rates: BTreeMap<&str, f64> = BTreeMap::new();
        for r in &reactions {
            if r.reactants.is_empty() && r.products.is_empty() {
                return Err(Error::invalid("reaction with empty reactant and product sides"));
            }
            if r.reactants.values().chain(r.products.values()).any(|&c| c == 0) {
                return Err(Error::invalid("stoichiometries must be >= 1"));
            }
            if let Some(&s) = r.reactants.keys().chain(r.products.keys()).find(|&&s| s >= d) {
                return Err(Error::invalid(format!("reaction references species index {s}, d = {d}")));
            }
            if !is_identifier(&r.rate_name) {
                return Err(Error::invalid(format!("`{}` is not a valid rate name", r.rate_name)));
            }
            if !(r.rate_value > 0.0 && r.rate_value.is_finite()) {
                return Err(Error::invalid(format!(
                    "rate `{}` must be positive and finite, got {}",
                    r.rate_name, r.rate_value
                )));
            }
            if let Some(&prev) = rates.get(r.rate_name.as_str()) {
                if prev != r.rate_value {
                    return Err(Error::invalid(format!(
                        "rate `{}` declared with conflicting values {prev} and {}",
                        r.rate_name, r.rate_value
                    )));
                }
            }
            rates.insert(&r.rate_name, r.rate_value);
        }
        let species = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| Species { name, index })
            .collect();
        Ok(ReactionNetwork { species, reactions })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn names(&self) -> Vec<String> {
        self.species.iter().map(|s| s.name.clone()).collect()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn rate(&self, name: &str) -> Option<f64> {
        self.reactions
            .iter()
            .find(|r| r.rate_name == name)
            .map(|r| r.rate_value)
    }

    /// Copy of the network with every reaction using `rate_name` set to `value`.
    pub fn with_rate(&self, rate_name: &str, value: f64) -> Result<Self> {
        if self.rate(rate_name).is_none() {
            return Err(Error::UnknownRate(rate_name.to_string()));
        }
        let reactions = self
            .reactions
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.rate_name == rate_name {
                    r.rate_value = value;
                }
                r
            })
            .collect();
        ReactionNetwork::new(self.names(), reactions)
    }

    /// Species whose differential equation changes when `rate_name` is changed.
    pub fn rate_effect(&self, rate_name: &str) -> Result<Vec<usize>> {
        let mut found = false;
        let mut out = BTreeSet::new();
        for r in self.reactions.iter().filter(|r| r.rate_name == rate_name) {
            found = true;
            out.extend(r.affected());
        }
        if !found {
            return Err(Error::UnknownRate(rate_name.to_string()));
        }
        Ok(out.into_iter().collect())
    }
}

/// Species indices changed by editing `rate_name` in `net`.
pub fn set_rate_effect(net: &ReactionNetwork, rate_name: &str, new_value: f64) -> Result<Vec<usize>> {
    if !(new_value > 0.0 && new_value.is_finite()) {
        return Err(Error::invalid(format!("rate must be positive and finite, got {new_value}")));
    }
    net.rate_effect(rate_name)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err(&mut self, msg: &str) -> Error {
        self.skip_ws();
        let found = match self.chars.get(self.pos) {
            Some(c) => format!("`{c}`"),
            None => "end of line".to_string(),
        };
        Error::syntax(self.line, self.col(), format!("{msg}, found {found}"))
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_alphabetic()) {
            return None;
        }
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn real(&mut self) -> Result<(f64, usize)> {
        self.skip_ws();
        let col = self.col();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if !c.is_whitespace()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        if s.is_empty() {
            return Err(Error::syntax(self.line, col, "expected a rate value"));
        }
        let ok = s
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        match s.parse::<f64>() {
            Ok(v) if ok => Ok((v, col)),
            _ => Err(Error::syntax(self.line, col, format!("invalid number `{s}`"))),
        }
    }
}

struct Names {
    list: Vec<String>,
    fixed: bool,
}

impl Names {
    fn index(&mut self, name: &str, line: usize, col: usize) -> Result<usize> {
        if let Some(i) = self.list.iter().position(|n| n == name) {
            return Ok(i);
        }
        if self.fixed {
            return Err(Error::syntax(line, col, format!("species `{name}` not declared in the species line")));
        }
        if crate::term::RESERVED_NAMES.contains(&name) {
            return Err(Error::syntax(line, col, format!("`{name}` is a reserved name")));
        }
        self.list.push(name.to_string());
        Ok(self.list.len() - 1)
    }
}

fn parse_side(cur: &mut Cursor, names: &mut Names) -> Result<BTreeMap<usize, u32>> {
    let mut side = BTreeMap::new();
    loop {
        cur.skip_ws();
        let col = cur.col();
        let digits = cur.digits();
        let name_follows = matches!(cur.peek(), Some(c) if c.is_ascii_alphabetic());
        let count = match digits {
            Some(d) if d.chars().all(|c| c == '0') && !name_follows && side.is_empty() => {
                return Ok(side);
            }
            Some(d) => {
                let v: u32 = d
                    .parse()
                    .map_err(|_| Error::syntax(cur.line, col, "stoichiometry out of range"))?;
                if v == 0 {
                    return Err(Error::syntax(cur.line, col, "stoichiometry must be >= 1"));
                }
                v
            }
            None => 1,
        };
        cur.skip_ws();
        let name_col = cur.col();
        let name = cur.ident().ok_or_else(|| cur.err("expected a species name"))?;
        let idx = names.index(&name, cur.line, name_col)?;
        *side.entry(idx).or_insert(0) += count;
        if !cur.eat_str("+") {
            return Ok(side);
        }
    }
}

/// Parses the reaction DSL. Species are indexed in order of first appearance.
pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    let mut names = Names {
        list: Vec::new(),
        fixed: false,
    };
    let mut reactions = Vec::new();
    let mut rates: BTreeMap<String, f64> = BTreeMap::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor {
            chars: content.chars().collect(),
            pos: 0,
            line: line_no,
        };
        if content.trim_start().starts_with("species:") {
            if names.fixed || !names.list.is_empty() {
                return Err(Error::syntax(line_no, 1, "species line must come first and only once"));
            }
            cur.eat_str("species:");
            loop {
                cur.skip_ws();
                let col = cur.col();
                let name = cur.ident().ok_or_else(|| cur.err("expected a species name"))?;
                if names.list.contains(&name) {
                    return Err(Error::syntax(line_no, col, format!("duplicate species `{name}`")));
                }
                names.index(&name, line_no, col)?;
                if !cur.eat_str(",") {
                    break;
                }
            }
            if !cur.at_end() {
                return Err(cur.err("expected `,` or end of line"));
            }
            names.fixed = true;
            continue;
        }
        let reactants = parse_side(&mut cur, &mut names)?;
        if !cur.eat_str("->") {
            return Err(cur.err("expected `->`"));
        }
        let products = parse_side(&mut cur, &mut names)?;
        if reactants.is_empty() && products.is_empty() {
            return Err(Error::syntax(line_no, 1, "reaction with both sides empty"));
        }
        if !cur.eat_str("@") {
            return Err(cur.err("expected `@`"));
        }
        cur.skip_ws();
        let rate_col = cur.col();
        let rate_name = cur.ident().ok_or_else(|| cur.err("expected a rate name"))?;
        if !cur.eat_str("=") {
            return Err(cur.err("expected `=`"));
        }
        let (rate_value, value_col) = cur.real()?;
        if !cur.at_end() {
            return Err(cur.err("unexpected trailing input"));
        }
        if !(rate_value > 0.0 && rate_value.is_finite()) {
            return Err(Error::syntax(
                line_no,
                value_col,
                format!("rate `{rate_name}` must be positive and finite, got {rate_value}"),
            ));
        }
        if let Some(&prev) = rates.get(&rate_name) {
            if prev != rate_value {
                return Err(Error::syntax(
                    line_no,
                    rate_col,
                    format!("rate `{rate_name}` redeclared with conflicting value {rate_value} (was {prev})"),
                ));
            }
        }
        rates.insert(rate_name.clone(), rate_value);
        reactions.push(Reaction {
            reactants,
            products,
            rate_name,
            rate_value,
        });
    }
    if names.list.is_empty() {
        return Err(Error::syntax(last_line, 1, "network has no species"));
    }
    ReactionNetwork::new(names.list, reactions)
}

fn format_side(side: &BTreeMap<usize, u32>, names: &[String]) -> String {
    if side.is_empty() {
        return "0".to_string();
    }
    side.iter()
        .map(|(&s, &c)| match c {
            1 => names[s].clone(),
            c => format!("{c} {}", names[s]),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Canonical text of the network; `parse_network` reproduces the same value.
pub fn format_network(net: &ReactionNetwork) -> String {
    let names = net.names();
    let mut seen = Vec::new();
    for r in &net.reactions {
        for s in r.reactants.keys().chain(r.products.keys()) {
            if !seen.contains(s) {
                seen.push(*s);
            }
        }
    }
    let mut out = String::new();
    if seen != (0..names.len()).collect::<Vec<_>>() {
        let _ = writeln!(out, "species: {}", names.join(", "));
    }
    for r in &net.reactions {
        let _ = writeln!(
            out,
            "{} -> {} @ {} = {}",
            format_side(&r.reactants, &names),
            format_side(&r.products, &names),
            r.rate_name,
            fmt_num(r.rate_value)
        );
    }
    out
}

/// Mass-action ODE system of `net`: for each species `s`,
/// `d[s]/dt = Σ_r (n_{r,s} - m_{r,s}) k_r Π_i [x_i]^{m_{r,i}}`, one term per reaction
/// with nonzero net stoichiometry. Initial values are left unset.
pub fn compile_mass_action(net: &ReactionNetwork) -> Result<KineticModel> {
    let d = net.species.len();
    let mut drift = vec![Vec::new(); d];
    let mut parents = vec![BTreeSet::new(); d];
    for r in &net.reactions {
        for s in r.affected() {
            let coef = r.net(s) as f64 * r.rate_value;
            let term = Term::monomial(coef, r.reactants.iter().map(|(&i, &m)| (i, m)))?;
            drift[s].push(term);
            parents[s].extend(r.reactants.keys().copied());
        }
    }
    let drift = drift
        .into_iter()
        .map(Rhs::new)
        .collect::<Result<Vec<_>>>()?;
    let parts = ModelParts {
        names: net.names(),
        drift,
        parents,
        initial: None,
        diffusion: None,
    };
    KineticModel::from_network_parts(parts, net.clone())
}
