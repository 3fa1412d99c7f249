//! Run configuration: a sectioned, line-oriented key-value format.
//!
//! ```text
//! file    := (blank | comment | section | entry)*
//! comment := "#" anything
//! section := "[" name [" " label] "]"
//! entry   := key "=" value            # value runs to end of line, `#` starts a comment
//! ```
//!
//! Sections and keys:
//!
//! ```text
//! [model]        network = <path> | model = <path>
//!                initial = A=1, B=1.5          (optional override)
//!                initial_sd = A=0.1            (optional: Gaussian initial values per repetition)
//! [grid]         start, end, points, substeps
//! [noise]        sigma = 0.01  |  sigma = A=0.01, B=0.02
//! [run]          seed = <u64>, output = <file stem>
//! [environment <label>]   reps = <n>, do = <directive>   (repeatable; order kept)
//! [discover]     data, target, p_max, degree, include_target, mm_half_sat, output
//! ```
//!
//! Paths are relative to the directory of the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub substeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sigma {
    All(f64),
    PerSpecies(Vec<(String, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvBlock {
    pub label: String,
    pub reps: usize,
    pub directives: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiscoverSpec {
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub p_max: Option<usize>,
    pub degree: Option<u32>,
    pub include_target: Option<bool>,
    pub mm_half_sat: Vec<f64>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub network: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub initial: Vec<(String, f64)>,
    pub initial_sd: Vec<(String, f64)>,
    pub grid: Option<GridSpec>,
    pub sigma: Option<Sigma>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub environments: Vec<EnvBlock>,
    pub discover: DiscoverSpec,
}

fn err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("config line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| err(line, format!("invalid value `{v}` for `{key}`")))
}

fn assignments(line: usize, key: &str, v: &str) -> Result<Vec<(String, f64)>, CliError> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| err(line, format!("`{key}` expects NAME=VALUE pairs")))?;
            Ok((name.trim().to_string(), num(line, key, value.trim())?))
        })
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        let mut grid: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| err(ln, "unterminated section header"))?
                    .trim();
                let (name, label) = inner.split_once(char::is_whitespace).unwrap_or((inner, ""));
                match (name, label.trim()) {
                    ("environment", "") => return Err(err(ln, "environment sections need a label")),
                    ("environment", label) => {
                        if cfg.environments.iter().any(|e| e.label == label) {
                            return Err(err(ln, format!("duplicate environment `{label}`")));
                        }
                        cfg.environments.push(EnvBlock {
                            label: label.to_string(),
                            reps: 1,
                            directives: Vec::new(),
                        });
                    }
                    ("model" | "grid" | "noise" | "run" | "discover", "") => {}
                    _ => return Err(err(ln, format!("unknown section `[{inner}]`"))),
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(ln, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let path = || base.join(value);
            match (section.as_str(), key) {
                ("model", "network") => cfg.network = Some(path()),
                ("model", "model") => cfg.model = Some(path()),
                ("model", "initial") => cfg.initial = assignments(ln, key, value)?,
                ("model", "initial_sd") => cfg.initial_sd = assignments(ln, key, value)?,
                ("grid", "start" | "end" | "points" | "substeps") => {
                    grid.insert(key, (ln, value));
                }
                ("noise", "sigma") => {
                    cfg.sigma = Some(if value.contains('=') {
                        Sigma::PerSpecies(assignments(ln, key, value)?)
                    } else {
                        Sigma::All(num(ln, key, value)?)
                    })
                }
                ("run", "seed") => cfg.seed = Some(num(ln, key, value)?),
                ("run", "output") => cfg.output = Some(value.to_string()),
                ("environment", "reps") => cfg.environments.last_mut().unwrap().reps = num(ln, key, value)?,
                ("environment", "do") => cfg.environments.last_mut().unwrap().directives.push(value.to_string()),
                ("discover", "data") => cfg.discover.data = Some(path()),
                ("discover", "target") => cfg.discover.target = Some(value.to_string()),
                ("discover", "p_max") => cfg.discover.p_max = Some(num(ln, key, value)?),
                ("discover", "degree") => cfg.discover.degree = Some(num(ln, key, value)?),
                ("discover", "include_target") => cfg.discover.include_target = Some(num(ln, key, value)?),
                ("discover", "mm_half_sat") => {
                    cfg.discover.mm_half_sat = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| num(ln, key, s.trim()))
                        .collect::<Result<_, _>>()?
                }
                ("discover", "output") => cfg.discover.output = Some(value.to_string()),
                ("", _) => return Err(err(ln, format!("`{key}` outside of a section"))),
                (s, _) => return Err(err(ln, format!("unknown key `{key}` in [{s}]"))),
            }
        }
        if !grid.is_empty() {
            let get = |k: &str| grid.get(k).ok_or_else(|| CliError::Usage(format!("[grid] needs `{k}`")));
            let (l, v) = get("start")?;
            let start = num(*l, "start", v)?;
            let (l, v) = get("end")?;
            let end = num(*l, "end", v)?;
            let (l, v) = get("points")?;
            let points = num(*l, "points", v)?;
            let substeps = match grid.get("substeps") {
                Some((l, v)) => num(*l, "substeps", v)?,
                None => 1,
            };
            cfg.grid = Some(GridSpec { start, end, points, substeps });
        }
        Ok(cfg)
    }
}
