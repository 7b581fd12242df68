//! Verification suites run by `hamgadget verify`.
//!
//! Each suite reads a JSON config (the bundled default when none is given),
//! builds its instances, and emits one [`Assertion`] per checked property.
//! A suite passes iff every assertion passes.

mod circuits;
mod queries;
mod reductions;
mod voting;

use serde::Serialize;

use super::io::RunManifest;
use crate::spectra::SolverConfig;
use crate::{Error, Result};

pub const SUITES: [&str; 9] =
    ["lemma1", "nullspace", "lemma4", "lemma5", "corollary1", "theorem1", "apx2corr", "voting", "spectralgap"];

/// Bundled default config of `suite`.
pub fn default_config(suite: &str) -> Option<&'static str> {
    Some(match suite {
        "lemma1" => include_str!("../../../fixtures/suites/lemma1.json"),
        "nullspace" => include_str!("../../../fixtures/suites/nullspace.json"),
        "lemma4" => include_str!("../../../fixtures/suites/lemma4.json"),
        "lemma5" => include_str!("../../../fixtures/suites/lemma5.json"),
        "corollary1" => include_str!("../../../fixtures/suites/corollary1.json"),
        "theorem1" => include_str!("../../../fixtures/suites/theorem1.json"),
        "apx2corr" => include_str!("../../../fixtures/suites/apx2corr.json"),
        "voting" => include_str!("../../../fixtures/suites/voting.json"),
        "spectralgap" => include_str!("../../../fixtures/suites/spectralgap.json"),
        _ => return None,
    })
}

/// One checked property with its measured value and margin. `margin` is
/// positive on the passing side.
#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    /// Short name of the property being checked.
    pub anchor: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub detail: String,
}

impl Assertion {
    /// Passes iff `measured ≥ bound − slack`.
    pub fn at_least(id: String, anchor: &str, measured: f64, bound: f64, slack: f64, detail: String) -> Self {
        let margin = measured - bound;
        Assertion { id, anchor: anchor.into(), passed: margin >= -slack, measured, bound, margin, detail }
    }

    /// Passes iff `measured ≤ bound + slack`.
    pub fn at_most(id: String, anchor: &str, measured: f64, bound: f64, slack: f64, detail: String) -> Self {
        let margin = bound - measured;
        Assertion { id, anchor: anchor.into(), passed: margin >= -slack, measured, bound, margin, detail }
    }

    /// Boolean property; `measured` is 1 when it holds.
    pub fn holds(id: String, anchor: &str, ok: bool, detail: String) -> Self {
        let v = f64::from(u8::from(ok));
        Assertion { id, anchor: anchor.into(), passed: ok, measured: v, bound: 1.0, margin: v - 1.0, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub config: serde_json::Value,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

/// Settings shared by every suite.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub solver: SolverConfig,
    /// Used when a config does not fix its own seed.
    pub seed: u64,
}

fn parse<T: for<'de> serde::Deserialize<'de>>(suite: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed {suite} config: {e}")))
}

/// Runs `suite` on `config` (JSON text). Unknown suites and malformed
/// configs are errors; failed properties are reported in the result.
pub fn run_suite(suite: &str, config: &str, ctx: &SuiteContext) -> Result<Report> {
    let value: serde_json::Value = parse(suite, config)?;
    let assertions = match suite {
        "lemma1" => circuits::gap_bound(&parse(suite, config)?, ctx)?,
        "nullspace" => circuits::nullspace(&parse(suite, config)?, ctx)?,
        "lemma4" => queries::separation(&parse(suite, config)?)?,
        "lemma5" => queries::unary_separation(&parse(suite, config)?)?,
        "corollary1" => queries::overlap(&parse(suite, config)?, ctx)?,
        "theorem1" => reductions::apx_sim(&parse(suite, config)?, ctx)?,
        "apx2corr" => reductions::apx2corr(&parse(suite, config)?, ctx)?,
        "voting" => voting::voting(&parse(suite, config)?, ctx)?,
        "spectralgap" => reductions::spectralgap(&parse(suite, config)?, ctx)?,
        _ => return Err(Error::Input(format!("unknown suite '{suite}' (expected one of {})", SUITES.join(", ")))),
    };
    if assertions.is_empty() {
        return Err(Error::Input(format!("{suite} config produced no assertions")));
    }
    Ok(Report {
        suite: suite.to_string(),
        passed: assertions.iter().all(|a| a.passed),
        config: value,
        assertions,
        manifest: None,
    })
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}
