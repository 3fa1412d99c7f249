//! Multi-environment datasets and their CSV form.
//!
//! ```text
//! # grid: 0,0.5,1
//! # substeps: 10
//! # species: A,B
//! # seed: 42
//! # environment: observational |
//! # environment: shifted | set-rate k1 0.05; set-initial B 2
//! env,rep,A_t1,A_t2,A_t3,B_t1,B_t2,B_t3
//! observational,1,1,1.02,1.05,1.5,1.49,1.47
//! ```
//!
//! Values use the shortest decimal that parses back to the same `f64`.
//! Repetitions are numbered from 1 within each environment.

use std::fmt::Write as _;
use std::path::Path;

use super::TimeGrid;
use crate::error::{Error, Result};
use crate::term::fmt_num;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentInfo {
    pub label: String,
    /// Directive text of the interventions that defined the environment.
    pub interventions: Vec<String>,
}

/// One repetition: `values[k * L + l]` is component `k` at grid point `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub env: usize,
    pub rep: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub grid: TimeGrid,
    pub environments: Vec<EnvironmentInfo>,
    pub rows: Vec<Row>,
    pub seed: u64,
}

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        grid: TimeGrid,
        environments: Vec<EnvironmentInfo>,
        rows: Vec<Row>,
        seed: u64,
    ) -> Result<Self> {
        let width = names.len() * grid.len();
        for (i, e) in environments.iter().enumerate() {
            if !valid_label(&e.label) {
                return Err(Error::invalid(format!(
                    "environment label `{}` must be non-empty and use only [A-Za-z0-9_.-]",
                    e.label
                )));
            }
            if environments[..i].iter().any(|p| p.label == e.label) {
                return Err(Error::invalid(format!("duplicate environment label `{}`", e.label)));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.env >= environments.len() {
                return Err(Error::invalid(format!("row {i} refers to unknown environment {}", r.env)));
            }
            if r.values.len() != width {
                return Err(Error::invalid(format!(
                    "row {i} has {} values, expected d*L = {width}",
                    r.values.len()
                )));
            }
        }
        Ok(Dataset {
            names,
            grid,
            environments,
            rows,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn value(&self, row: usize, k: usize, l: usize) -> f64 {
        self.rows[row].values[k * self.n_times() + l]
    }

    /// Series of component `k` in row `row`.
    pub fn series(&self, row: usize, k: usize) -> &[f64] {
        let l = self.n_times();
        &self.rows[row].values[k * l..(k + 1) * l]
    }

    /// State vectors of a row, one per grid point.
    pub fn states(&self, row: usize) -> Vec<Vec<f64>> {
        (0..self.n_times())
            .map(|l| (0..self.dim()).map(|k| self.value(row, k, l)).collect())
            .collect()
    }

    /// The `n × (d·L)` matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    pub fn rows_in_env(&self, env: usize) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].env == env).collect()
    }

    pub fn reps_in_env(&self, env: usize) -> usize {
        self.rows.iter().filter(|r| r.env == env).count()
    }

    pub fn env_index(&self, label: &str) -> Option<usize> {
        self.environments.iter().position(|e| e.label == label)
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
}

/// Serializes a dataset to CSV text.
pub fn write_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    let grid: Vec<String> = ds.grid.points().iter().map(|&t| fmt_num(t)).collect();
    let _ = writeln!(out, "# grid: {}", grid.join(","));
    let _ = writeln!(out, "# substeps: {}", ds.grid.substeps());
    let _ = writeln!(out, "# species: {}", ds.names.join(","));
    let _ = writeln!(out, "# seed: {}", ds.seed);
    for e in &ds.environments {
        let _ = writeln!(out, "# environment: {} | {}", e.label, e.interventions.join("; "));
    }
    out.push_str("env,rep");
    for name in &ds.names {
        for l in 1..=ds.n_times() {
            let _ = write!(out, ",{name}_t{l}");
        }
    }
    out.push('\n');
    for r in &ds.rows {
        out.push_str(&ds.environments[r.env].label);
        let _ = write!(out, ",{}", r.rep + 1);
        for &v in &r.values {
            out.push(',');
            out.push_str(&fmt_num(v));
        }
        out.push('\n');
    }
    out
}

fn csv_err(line: usize, msg: impl Into<String>) -> Error {
    Error::syntax(line, 1, msg)
}

/// Parses CSV text produced by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Dataset> {
    let mut grid_pts: Option<Vec<f64>> = None;
    let mut substeps = 1usize;
    let mut names: Option<Vec<String>> = None;
    let mut seed = 0u64;
    let mut environments: Vec<EnvironmentInfo> = Vec::new();
    let mut header_seen = false;
    let mut rows = Vec::new();
    let mut rep_counts: Vec<usize> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if header_seen {
                continue;
            }
            let Some((key, value)) = comment.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "grid" => {
                    let pts = value
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| csv_err(ln, "non-numeric grid point"))?;
                    grid_pts = Some(pts);
                }
                "substeps" => {
                    substeps = value
                        .parse()
                        .map_err(|_| csv_err(ln, "substeps must be a positive integer"))?
                }
                "species" => names = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
                "seed" => seed = value.parse().map_err(|_| csv_err(ln, "seed must be an unsigned integer"))?,
                "environment" => {
                    let (label, ivs) = value.split_once('|').unwrap_or((value, ""));
                    let interventions = ivs
                        .split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect();
                    environments.push(EnvironmentInfo {
                        label: label.trim().to_string(),
                        interventions,
                    });
                }
                _ => {}
            }
            continue;
        }
        let names_ref = names
            .as_ref()
            .ok_or_else(|| csv_err(ln, "missing `# species:` header line"))?;
        let pts = grid_pts
            .as_ref()
            .ok_or_else(|| csv_err(ln, "missing `# grid:` header line"))?;
        let width = names_ref.len() * pts.len();
        let cells: Vec<&str> = line.split(',').collect();
        if !header_seen {
            if cells.first().map(|c| c.trim()) != Some("env") || cells.get(1).map(|c| c.trim()) != Some("rep") {
                return Err(Error::EnvironmentsRequired(
                    "the header must start with `env,rep`".to_string(),
                ));
            }
            let expected: Vec<String> = names_ref
                .iter()
                .flat_map(|n| (1..=pts.len()).map(move |l| format!("{n}_t{l}")))
                .collect();
            let got: Vec<String> = cells[2..].iter().map(|c| c.trim().to_string()).collect();
            if got != expected {
                return Err(csv_err(
                    ln,
                    format!("malformed header: expected {} columns named <species>_t<l>", width + 2),
                ));
            }
            header_seen = true;
            continue;
        }
        if cells.len() != width + 2 {
            return Err(csv_err(
                ln,
                format!("dimension mismatch: {} cells, expected {}", cells.len(), width + 2),
            ));
        }
        let label = cells[0].trim();
        if label.is_empty() {
            return Err(Error::EnvironmentsRequired(format!("row on line {ln} has no environment label")));
        }
        let env = match environments.iter().position(|e| e.label == label) {
            Some(e) => e,
            None => {
                environments.push(EnvironmentInfo {
                    label: label.to_string(),
                    interventions: Vec::new(),
                });
                environments.len() - 1
            }
        };
        rep_counts.resize(environments.len(), 0);
        let rep: usize = cells[1]
            .trim()
            .parse()
            .ok()
            .filter(|&r| r >= 1)
            .ok_or_else(|| csv_err(ln, format!("invalid repetition `{}`", cells[1])))?;
        rep_counts[env] += 1;
        let values = cells[2..]
            .iter()
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| csv_err(ln, format!("non-numeric cell `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(Row {
            env,
            rep: rep - 1,
            values,
        });
    }
    if !header_seen {
        return Err(csv_err(text.lines().count().max(1), "missing header row"));
    }
    let grid = TimeGrid::new(grid_pts.unwrap_or_default(), substeps)?;
    Dataset::new(names.unwrap_or_default(), grid, environments, rows, seed)
}

pub fn export_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_csv(ds)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(&text)
}
