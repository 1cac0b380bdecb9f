//! Flat `key = value` run configuration.
//!
//! Lists are comma separated, `#` starts a comment line, and keys may be
//! written with `-` or `_`. Floats are written in shortest round-trip form,
//! so `parse(to_text(c)) == c` holds exactly.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MAX_DENSE_DEPTH;
use crate::line::DisorderFamily;
use crate::localization::log_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig4,
    Scaling,
    Hitting,
    Crosscheck,
    Thouless,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Fig4,
        Experiment::Scaling,
        Experiment::Hitting,
        Experiment::Crosscheck,
        Experiment::Thouless,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig4 => "fig4",
            Experiment::Scaling => "scaling",
            Experiment::Hitting => "hitting",
            Experiment::Crosscheck => "crosscheck",
            Experiment::Thouless => "thouless",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Everything a run depends on. Which fields matter depends on the
/// experiment; the rest keep their defaults and are still echoed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Tree depths. `fig4` and `crosscheck` take exactly one.
    pub n: Vec<usize>,
    pub gamma: f64,
    pub families: Vec<DisorderFamily>,
    /// Disorder widths: the propagation set for `fig4`, the grid for
    /// `scaling` and `thouless`, a single value for `hitting`.
    pub deltas: Vec<f64>,
    /// Master seed; per-realization seeds are derived from it.
    pub seed: u64,
    /// Disorder repetitions.
    pub seeds: usize,
    /// Sample times; `None` selects the experiment's automatic choice.
    pub times: Option<Vec<f64>>,
    /// Time-grid spacing for `hitting`, energy spacing for `thouless`.
    pub grid_dt: f64,
    /// Hitting horizon in units of `n`.
    pub horizon_factor: f64,
    /// Transfer-matrix steps per realization (`scaling`).
    pub steps: usize,
    pub quantile: f64,
    pub out: PathBuf,
    pub overwrite: bool,
}

const KEYS: [&str; 15] = [
    "experiment",
    "n",
    "gamma",
    "hbar",
    "family",
    "delta",
    "seed",
    "seeds",
    "times",
    "grid_dt",
    "horizon_factor",
    "steps",
    "quantile",
    "out",
    "overwrite",
];

impl ExperimentConfig {
    /// Defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            n: vec![1000],
            gamma: 1.0,
            families: vec![DisorderFamily::Cauchy],
            deltas: vec![0.0, 0.03, 0.06],
            seed: 0,
            seeds: 1,
            times: None,
            grid_dt: 0.1,
            horizon_factor: 4.0,
            steps: 10_000_000,
            quantile: 0.99,
            out: PathBuf::from("runs").join(experiment.name()),
            overwrite: false,
        };
        match experiment {
            Experiment::Fig4 => {}
            Experiment::Scaling => {
                c.families = DisorderFamily::ALL.to_vec();
                c.deltas = log_grid(0.01, 0.1, 8);
                c.seeds = 4;
            }
            Experiment::Hitting => {
                c.n = vec![20, 30, 40, 50, 60];
                c.deltas = vec![0.2];
                c.seeds = 10;
            }
            Experiment::Crosscheck => {
                c.n = vec![6];
                c.deltas = vec![0.0];
                c.times = Some(vec![1.0, 3.0, 10.0]);
            }
            Experiment::Thouless => {
                c.deltas = vec![0.03, 0.06, 0.1];
            }
        }
        c
    }

    /// Parse the text form. The `experiment` key is required.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let experiment = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| Error::Config("missing 'experiment' key".into()))?
            .1
            .parse()?;
        let mut c = ExperimentConfig::new(experiment);
        for (k, v) in &pairs {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Apply the pairs of a config file on top of `self`, e.g. a
    /// subcommand's defaults. The file may not name another experiment.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (k, v) in parse_pairs(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Set one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("key '{key}': {what} '{value}'"));
        match key.as_str() {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(Error::Config(format!(
                        "config is for '{e}', not '{}'",
                        self.experiment
                    )));
                }
            }
            "n" => self.n = parse_list(value).map_err(|_| bad("bad depth list"))?,
            "gamma" => self.gamma = value.parse().map_err(|_| bad("bad number"))?,
            "hbar" => {
                let hbar: f64 = value.parse().map_err(|_| bad("bad number"))?;
                if hbar != 1.0 {
                    return Err(bad("hbar is fixed at 1, got"));
                }
            }
            "family" => self.families = parse_list(value)?,
            "delta" => self.deltas = parse_list(value).map_err(|_| bad("bad number list"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("bad seed"))?,
            "seeds" => self.seeds = value.parse().map_err(|_| bad("bad count"))?,
            "times" => {
                self.times = if value == "auto" {
                    None
                } else {
                    Some(parse_list(value).map_err(|_| bad("bad number list"))?)
                }
            }
            "grid_dt" => self.grid_dt = value.parse().map_err(|_| bad("bad number"))?,
            "horizon_factor" => {
                self.horizon_factor = value.parse().map_err(|_| bad("bad number"))?
            }
            "steps" => self.steps = value.parse().map_err(|_| bad("bad count"))?,
            "quantile" => self.quantile = value.parse().map_err(|_| bad("bad number"))?,
            "out" => {
                if value.is_empty() {
                    return Err(bad("empty path"));
                }
                self.out = PathBuf::from(value)
            }
            "overwrite" => {
                self.overwrite = value.parse().map_err(|_| bad("expected true/false, got"))?
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Range and consistency checks that do not depend on running anything.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.n.is_empty() || self.n.contains(&0) {
            return err("n must list at least one positive depth".into());
        }
        if matches!(self.experiment, Experiment::Fig4 | Experiment::Crosscheck) && self.n.len() != 1
        {
            return err(format!("{} takes a single n", self.experiment));
        }
        if self.experiment == Experiment::Crosscheck && self.n[0] > MAX_DENSE_DEPTH {
            return err(format!("crosscheck needs n <= {MAX_DENSE_DEPTH}"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return err(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.families.is_empty() {
            return err("family list is empty".into());
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return err("delta must list finite, non-negative widths".into());
        }
        if self.experiment == Experiment::Hitting && self.deltas.len() != 1 {
            return err("hitting takes a single delta".into());
        }
        if self.seeds == 0 {
            return err("seeds must be at least 1".into());
        }
        if let Some(times) = &self.times {
            if times.is_empty() || times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return err("times must be finite and non-negative".into());
            }
        }
        if !(self.grid_dt > 0.0 && self.grid_dt.is_finite()) {
            return err(format!("grid_dt must be positive, got {}", self.grid_dt));
        }
        if !(self.horizon_factor > 0.0 && self.horizon_factor.is_finite()) {
            return err("horizon_factor must be positive".into());
        }
        if !(self.quantile > 0.0 && self.quantile < 1.0) {
            return err(format!(
                "quantile must lie in (0, 1), got {}",
                self.quantile
            ));
        }
        Ok(())
    }

    /// Canonical text form: every key, fixed order.
    pub fn to_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// `(key, value)` pairs in canonical order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let times = match &self.times {
            None => "auto".to_string(),
            Some(t) => join(t),
        };
        let values = [
            self.experiment.to_string(),
            join(&self.n),
            format!("{:?}", self.gamma),
            "1.0".to_string(),
            self.families
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(","),
            join(&self.deltas),
            self.seed.to_string(),
            self.seeds.to_string(),
            times,
            format!("{:?}", self.grid_dt),
            format!("{:?}", self.horizon_factor),
            self.steps.to_string(),
            format!("{:?}", self.quantile),
            self.out.display().to_string(),
            self.overwrite.to_string(),
        ];
        KEYS.into_iter().zip(values).collect()
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
        pairs.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, T::Err> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Comma join using `Debug`, which is shortest round-trip for floats.
fn join<T: fmt::Debug>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}
