//! JSON file formats.
//!
//! * polynomial: `[{"point": ["p/q", ...], "re": x, "im": y}, ...]`; the
//!   dimension is the point length and loading re-canonicalizes.
//! * points: `[["p/q", ...], ...]`.
//! * state: `{"kind": "epr" | "regular", "lambda": x, "mu": y}`.
//! * search config: `{"supports": [[point, ...] x 4], "restarts": n,
//!   "max_iters": n, "seed": n}` plus optional step-schedule fields.

use std::fs;
use std::path::Path;

use epr_core::bell::SearchConfig;
use epr_core::{PhasePoint, StateFunctional, WeylPolynomial, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub point: Vec<String>,
    pub re: f64,
    pub im: f64,
}

pub fn polynomial_to_records(p: &WeylPolynomial) -> Vec<TermRecord> {
    p.terms()
        .map(|(x, c)| TermRecord { point: x.to_strings(), re: c.re, im: c.im })
        .collect()
}

pub fn polynomial_from_records(records: &[TermRecord]) -> Result<WeylPolynomial> {
    let first = records
        .first()
        .ok_or_else(|| CliError::Format("polynomial has no terms, so its dimension is unknown".into()))?;
    let dim = first.point.len();
    let mut terms = Vec::with_capacity(records.len());
    for r in records {
        if r.point.len() != dim {
            return Err(epr_core::Error::DimensionMismatch { expected: dim, got: r.point.len() }.into());
        }
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(CliError::Format(format!("coefficient at {:?} is not finite", r.point)));
        }
        terms.push((PhasePoint::parse(&r.point)?, C64::new(r.re, r.im)));
    }
    Ok(WeylPolynomial::from_terms(dim, terms)?)
}

pub fn points_from_records(records: &[Vec<String>]) -> Result<Vec<PhasePoint>> {
    Ok(records.iter().map(|r| PhasePoint::parse(r)).collect::<epr_core::Result<Vec<_>>>()?)
}

pub fn points_to_records(points: &[PhasePoint]) -> Vec<Vec<String>> {
    points.iter().map(PhasePoint::to_strings).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKindSpec {
    Epr,
    Regular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: StateKindSpec,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
    /// Negative control: doubles the off-diagonal kernel entries.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_kernel: bool,
}

impl Default for StateSpec {
    fn default() -> Self {
        Self { kind: StateKindSpec::Epr, lambda: 0.0, mu: 0.0, corrupt_kernel: false }
    }
}

impl StateSpec {
    pub fn epr(lambda: f64, mu: f64) -> Self {
        Self { kind: StateKindSpec::Epr, lambda, mu, corrupt_kernel: false }
    }

    pub fn functional(&self) -> Result<StateFunctional> {
        if !self.lambda.is_finite() || !self.mu.is_finite() {
            return Err(CliError::Format("lambda and mu must be finite".into()));
        }
        let st = match self.kind {
            StateKindSpec::Epr => StateFunctional::epr(self.lambda, self.mu),
            StateKindSpec::Regular => StateFunctional::regular(),
        };
        Ok(if self.corrupt_kernel { st.with_corrupted_kernel() } else { st })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfigSpec {
    pub supports: Vec<Vec<Vec<String>>>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_cap: Option<usize>,
}

impl SearchConfigSpec {
    pub fn from_config(cfg: &SearchConfig) -> Self {
        Self {
            supports: cfg.supports.iter().map(|s| points_to_records(s)).collect(),
            restarts: cfg.restarts,
            max_iters: cfg.max_iters,
            seed: cfg.seed,
            initial_step: Some(cfg.initial_step),
            step_decay: Some(cfg.step_decay),
            step_floor: Some(cfg.step_floor),
            term_cap: Some(cfg.term_cap),
        }
    }

    pub fn config(&self) -> Result<SearchConfig> {
        if self.supports.len() != 4 {
            return Err(CliError::Format(format!(
                "search config needs 4 supports (A1, A2, B1, B2), got {}",
                self.supports.len()
            )));
        }
        let s: Vec<Vec<PhasePoint>> = self.supports.iter().map(|s| points_from_records(s)).collect::<Result<_>>()?;
        let [a1, a2, b1, b2]: [Vec<PhasePoint>; 4] = s.try_into().expect("length checked");
        let mut cfg = SearchConfig::new([a1, a2, b1, b2]);
        cfg.restarts = self.restarts;
        cfg.max_iters = self.max_iters;
        cfg.seed = self.seed;
        if let Some(v) = self.initial_step {
            cfg.initial_step = v;
        }
        if let Some(v) = self.step_decay {
            cfg.step_decay = v;
        }
        if let Some(v) = self.step_floor {
            cfg.step_floor = v;
        }
        if let Some(v) = self.term_cap {
            cfg.term_cap = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

pub fn read_polynomial(path: &Path) -> Result<WeylPolynomial> {
    polynomial_from_records(&read_json::<Vec<TermRecord>>(path)?)
}

pub fn read_points(path: &Path) -> Result<Vec<PhasePoint>> {
    points_from_records(&read_json::<Vec<Vec<String>>>(path)?)
}

pub fn read_state(path: Option<&Path>) -> Result<StateSpec> {
    match path {
        Some(p) => read_json(p),
        None => Ok(StateSpec::default()),
    }
}
