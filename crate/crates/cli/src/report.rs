//! JSON report documents written to standard output.
//!
//! Schema (version 1): `report_version`, `command` (argument echo),
//! `parameters`, `results`, `provenance` and `runtime`. Everything except
//! `runtime` is a function of the inputs and flags alone.

use std::time::Duration;

use gwasym::numerics::{BigReal, HalfPowerCoeff};
use serde::Serialize;
use serde_json::{json, Value};

pub const REPORT_VERSION: u32 = 1;

/// Significant digits printed for real results.
pub const DIGITS: usize = 30;

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub report_version: u32,
    pub command: Vec<String>,
    pub parameters: Value,
    pub results: Value,
    pub provenance: Value,
    pub runtime: Value,
}

impl ReportDocument {
    pub fn new(command: Vec<String>, parameters: Value, results: Value, provenance: Value, elapsed: Duration) -> Self {
        ReportDocument {
            report_version: REPORT_VERSION,
            command,
            parameters,
            results,
            provenance,
            runtime: json!({ "wall_seconds": elapsed.as_secs_f64() }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub fn real(x: &BigReal) -> String {
    real_digits(x, DIGITS)
}

pub fn real_digits(x: &BigReal, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

pub fn coeff(c: &HalfPowerCoeff) -> Value {
    json!({
        "index": c.index,
        "value": real(&c.value),
        "parity": c.parity.as_str(),
        "parity_ok": c.parity_consistent(),
    })
}
