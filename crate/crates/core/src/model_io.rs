//! Line-oriented text format for kinetic models and static SCMs.
//!
//! Kinetic model:
//!
//! ```text
//! kinetic-model
//! species: A, B
//! reaction: A -> 2 A @ k1 = 0.1          # only for models compiled from a network
//! component A
//!   parents: A, B
//!   initial: 1                           # or `unset`
//!   drift: 0.1 * A - 0.05 * A * B
//!   diffusion: 0.2 * A                   # all components or none
//!   origin: network                      # `network` or `custom`
//! end
//! ```
//!
//! Static SCM:
//!
//! ```text
//! static-scm
//! form: stochastic                       # or `deterministic`
//! species: X1, X2
//! variable X1
//!   parents:
//!   assign: 0
//!   noise: 1
//! end
//! ```
//!
//! Expressions use the grammar of [`crate::term`]. Blank lines and `#` comments
//! are ignored. Components appear in species order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{KineticModel, ModelParts, ParentCheck};
use crate::network::{format_network, parse_network};
use crate::scm::{ScmForm, StaticAssignment, StaticScm};
use crate::term::{fmt_num, parse_rhs_at, Rhs};

fn name_list(set: &BTreeSet<usize>, names: &[String]) -> String {
    set.iter()
        .map(|&j| names[j].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn format_model(model: &KineticModel) -> String {
    let names = model.names();
    let mut out = String::from("kinetic-model\n");
    let _ = writeln!(out, "species: {}", names.join(", "));
    if let Some(net) = model.network() {
        for line in format_network(net).lines() {
            if !line.starts_with("species:") {
                let _ = writeln!(out, "reaction: {line}");
            }
        }
    }
    for k in 0..model.dim() {
        let _ = writeln!(out, "component {}", names[k]);
        let _ = writeln!(out, "{}", format!("  parents: {}", name_list(&model.parents()[k], names)).trim_end());
        let init = model.initial()[k].map_or("unset".to_string(), fmt_num);
        let _ = writeln!(out, "  initial: {init}");
        let _ = writeln!(out, "  drift: {}", model.drift()[k].format(names));
        if let Some(h) = model.diffusion() {
            let _ = writeln!(out, "  diffusion: {}", h[k].format(names));
        }
        let origin = if model.is_network_derived(k) { "network" } else { "custom" };
        let _ = writeln!(out, "  origin: {origin}");
        out.push_str("end\n");
    }
    out
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    /// 1-based column where `text` starts in the source line
    col: usize,
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            let col = body.len() - trimmed.len() + 1;
            let trimmed = trimmed.trim_end();
            (!trimmed.is_empty()).then_some(Line {
                no: i + 1,
                text: trimmed,
                col,
            })
        })
        .collect()
}

fn key_value<'a>(line: &Line<'a>, key: &str) -> Result<(&'a str, usize)> {
    let prefix = format!("{key}:");
    match line.text.strip_prefix(&prefix) {
        Some(rest) => {
            let value = rest.trim_start();
            let col = line.col + prefix.len() + (rest.len() - value.len());
            Ok((value, col))
        }
        None => Err(Error::syntax(line.no, line.col, format!("expected `{key}:`"))),
    }
}

fn parse_names(value: &str, line: &Line) -> Result<Vec<String>> {
    let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
    crate::model::validate_names(&names).map_err(|e| Error::syntax(line.no, line.col, e.to_string()))?;
    Ok(names)
}

fn parse_parent_list(value: &str, names: &[String], line: &Line) -> Result<BTreeSet<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::syntax(line.no, line.col, format!("unknown parent `{s}`")))
        })
        .collect()
}

fn parse_f64(value: &str, line: &Line, col: usize) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::syntax(line.no, col, format!("invalid number `{value}`")))
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<&Line<'a>> {
        let last = self.last;
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::syntax(last, 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn expect_exact(&mut self, text: &str) -> Result<()> {
        let line = self.next(&format!("`{text}`"))?;
        if line.text != text {
            return Err(Error::syntax(line.no, line.col, format!("expected `{text}`")));
        }
        Ok(())
    }

    fn block_header(&mut self, keyword: &str, expected: &str) -> Result<()> {
        let line = self.next(&format!("`{keyword} {expected}`"))?;
        match line.text.strip_prefix(keyword).map(str::trim) {
            Some(name) if name == expected => Ok(()),
            _ => Err(Error::syntax(
                line.no,
                line.col,
                format!("expected `{keyword} {expected}`"),
            )),
        }
    }
}

pub fn parse_model(text: &str) -> Result<KineticModel> {
    let lines = content_lines(text);
    let last = lines.last().map_or(1, |l| l.no);
    let mut cur = Cursor { lines, pos: 0, last };
    cur.expect_exact("kinetic-model")?;
    let line = cur.next("`species:`")?;
    let (value, _) = key_value(line, "species")?;
    let names = parse_names(value, line)?;

    let mut reaction_text = format!("species: {}\n", names.join(", "));
    let mut reaction_lines = Vec::new();
    while let Some(line) = cur.peek() {
        let Ok((value, _)) = key_value(line, "reaction") else {
            break;
        };
        reaction_text.push_str(value);
        reaction_text.push('\n');
        reaction_lines.push(line.no);
        cur.pos += 1;
    }
    let network = if reaction_lines.is_empty() {
        None
    } else {
        Some(parse_network(&reaction_text).map_err(|e| match e {
            Error::Syntax { line, column, message } => Error::syntax(
                reaction_lines.get(line.wrapping_sub(2)).copied().unwrap_or(line),
                column,
                message,
            ),
            other => other,
        })?)
    };

    let d = names.len();
    let mut drift = Vec::with_capacity(d);
    let mut parents = Vec::with_capacity(d);
    let mut initial = Vec::with_capacity(d);
    let mut diffusion: Vec<Option<Rhs>> = Vec::with_capacity(d);
    let mut origin = Vec::with_capacity(d);
    for name in &names {
        cur.block_header("component", name)?;
        let line = cur.next("`parents:`")?;
        let (value, _) = key_value(line, "parents")?;
        parents.push(parse_parent_list(value, &names, line)?);

        let line = cur.next("`initial:`")?;
        let (value, col) = key_value(line, "initial")?;
        initial.push(match value {
            "unset" => None,
            v => Some(parse_f64(v, line, col)?),
        });

        let line = cur.next("`drift:`")?;
        let (value, col) = key_value(line, "drift")?;
        drift.push(parse_rhs_at(value, &names, line.no, col)?);

        let line = cur.next("`diffusion:` or `origin:`")?;
        let line = match key_value(line, "diffusion") {
            Ok((value, col)) => {
                diffusion.push(Some(parse_rhs_at(value, &names, line.no, col)?));
                cur.next("`origin:`")?
            }
            Err(_) => {
                diffusion.push(None);
                line
            }
        };
        let (value, col) = key_value(line, "origin")?;
        origin.push(match value {
            "network" => true,
            "custom" => false,
            _ => return Err(Error::syntax(line.no, col, "origin must be `network` or `custom`")),
        });
        cur.expect_exact("end")?;
    }
    if let Some(line) = cur.peek() {
        return Err(Error::syntax(line.no, line.col, "unexpected content after last component"));
    }

    let diffusion = match diffusion.iter().filter(|h| h.is_some()).count() {
        0 => None,
        n if n == d => Some(diffusion.into_iter().flatten().collect()),
        _ => {
            return Err(Error::syntax(
                last,
                1,
                "diffusion must be given for all components or none",
            ))
        }
    };
    if origin.iter().any(|&o| o) && network.is_none() {
        return Err(Error::syntax(last, 1, "`origin: network` needs `reaction:` lines"));
    }
    let parts = ModelParts {
        names,
        drift,
        parents,
        initial: None,
        diffusion,
    };
    let (mut model, _) = KineticModel::build(parts, ParentCheck::Strict)?;
    for (k, v) in initial.into_iter().enumerate() {
        if let Some(v) = v {
            model.set_initial_value(k, v)?;
        }
    }
    model.set_provenance(network, origin);
    Ok(model)
}

pub fn format_scm(scm: &StaticScm) -> String {
    let names = scm.names();
    let mut out = String::from("static-scm\n");
    let form = match scm.form() {
        ScmForm::Deterministic => "deterministic",
        ScmForm::Stochastic => "stochastic",
    };
    let _ = writeln!(out, "form: {form}");
    let _ = writeln!(out, "species: {}", names.join(", "));
    for (k, a) in scm.assignments().iter().enumerate() {
        let _ = writeln!(out, "variable {}", names[k]);
        let _ = writeln!(out, "{}", format!("  parents: {}", name_list(&a.parents, names)).trim_end());
        let _ = writeln!(out, "  assign: {}", a.function.format(names));
        let _ = writeln!(out, "  noise: {}", fmt_num(scm.sigma()[k]));
        out.push_str("end\n");
    }
    out
}

pub fn parse_scm(text: &str) -> Result<StaticScm> {
    let lines = content_lines(text);
    let last = lines.last().map_or(1, |l| l.no);
    let mut cur = Cursor { lines, pos: 0, last };
    cur.expect_exact("static-scm")?;
    let line = cur.next("`form:`")?;
    let (value, col) = key_value(line, "form")?;
    let form = match value {
        "deterministic" => ScmForm::Deterministic,
        "stochastic" => ScmForm::Stochastic,
        _ => return Err(Error::syntax(line.no, col, "form must be `deterministic` or `stochastic`")),
    };
    let line = cur.next("`species:`")?;
    let (value, _) = key_value(line, "species")?;
    let names = parse_names(value, line)?;
    let mut assignments = Vec::new();
    let mut sigma = Vec::new();
    for name in &names {
        cur.block_header("variable", name)?;
        let line = cur.next("`parents:`")?;
        let (value, _) = key_value(line, "parents")?;
        let parents = parse_parent_list(value, &names, line)?;
        let line = cur.next("`assign:`")?;
        let (value, col) = key_value(line, "assign")?;
        let function = parse_rhs_at(value, &names, line.no, col)?;
        let line = cur.next("`noise:`")?;
        let (value, col) = key_value(line, "noise")?;
        sigma.push(parse_f64(value, line, col)?);
        cur.expect_exact("end")?;
        assignments.push(StaticAssignment { parents, function });
    }
    if let Some(line) = cur.peek() {
        return Err(Error::syntax(line.no, line.col, "unexpected content after last variable"));
    }
    StaticScm::new(names, form, assignments, sigma)
}
