use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::formats::StateSpec;

pub const TOOL: &str = "epr";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The statement the check makes executable.
    pub anchor: String,
    /// SHA-256 of the canonical JSON of the check's inputs.
    pub inputs_digest: String,
    pub measured: BTreeMap<String, Value>,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub state: Option<StateSpec>,
    pub seed: Option<u64>,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(command: &str, state: Option<StateSpec>, seed: Option<u64>) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            state,
            seed,
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, rec: CheckRecord) {
        self.pass &= rec.pass;
        self.checks.push(rec);
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with every `wall_ms` zeroed; two runs on the same inputs
    /// have equal bodies.
    pub fn body(&self) -> Self {
        let mut r = self.clone();
        r.checks.iter_mut().for_each(|c| c.wall_ms = 0.0);
        r
    }
}

pub fn digest<T: Serialize + ?Sized>(inputs: &T) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// JSON number, or a string for non-finite values, which JSON numbers
/// cannot carry.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn complex(z: epr_core::C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

/// Measurements collected while a check runs.
#[derive(Debug, Default)]
pub struct Measured(BTreeMap<String, Value>);

impl Measured {
    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.0.insert(key.to_string(), v.into());
    }

    pub fn real(&mut self, key: &str, x: f64) {
        self.0.insert(key.to_string(), num(x));
    }
}

/// Runs `body`, which returns the pass flag, and times it.
pub fn run_check<I: Serialize + ?Sized>(
    name: &str,
    anchor: &str,
    tolerance: f64,
    inputs: &I,
    body: impl FnOnce(&mut Measured) -> Result<bool>,
) -> Result<CheckRecord> {
    let start = Instant::now();
    let mut m = Measured::default();
    let pass = body(&mut m)?;
    Ok(CheckRecord {
        name: name.to_string(),
        anchor: anchor.to_string(),
        inputs_digest: digest(inputs),
        measured: m.0,
        tolerance,
        pass,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
