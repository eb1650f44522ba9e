//! Named batch experiments with strict JSON configs and reproducible reports.

mod commands;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::series::{DiskPoly, SelfMapDisk, C64};

pub use report::{
    emit_csv, emit_json, format_g17, to_json_string, Cell, Record, Relation, Report, Table,
};

/// Every anchor string a report record may carry.
pub const ANCHORS: &[&str] = &[
    "composition-norm-bound",
    "inner-symbol-sharpness",
    "weighted-composition-contractive",
    "szego-kernel-identity",
    "summation-identity",
    "bergman-composition-bound",
    "inf-estimate",
    "coordinate-multipliers-contractive",
    "row-multiplier-bound",
    "inverse-kernel-multiplier-bound",
    "ball-composition-bound",
    "br-unbounded-at-one",
    "br-bounded-below-one",
    "br-kernel-not-positive",
    "pointwise-limit",
    "kernel-positivity",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: Map::new(),
            seed: 0,
            tolerances: Tolerances::default(),
            output_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Slack allowed in each family of checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack for norm inequalities.
    pub bound: f64,
    /// Relative slack for the weighted-composition inequality.
    pub relative: f64,
    /// Absolute slack for the Hardy composition bound.
    pub hardy_bound: f64,
    /// Required closeness of the final lower bound to the bound at inner symbols.
    pub sharpness: f64,
    pub szego_residual: f64,
    /// Slack for positivity of partial-sum increments.
    pub monotone: f64,
    pub summation_defect: f64,
    pub cross_method: f64,
    /// Required negativity of a witness eigenvalue.
    pub witness_eigenvalue: f64,
    /// Largest change between the last two trace values counted as saturated.
    pub saturation: f64,
    /// Scale in the PSD tolerance `scale * n * ||G|| * eps`.
    pub psd_tol_scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bound: 1e-8,
            relative: 1e-8,
            hardy_bound: 1e-9,
            sharpness: 1e-2,
            szego_residual: 1e-6,
            monotone: 1e-10,
            summation_defect: 1e-5,
            cross_method: 1e-5,
            witness_eigenvalue: 1e-6,
            saturation: 1e-3,
            psd_tol_scale: crate::kernels::DEFAULT_TOL_SCALE,
        }
    }
}

/// A disk self-map given either as a truncated Möbius map
/// `(z + a) / (1 + a z)` or as an explicit polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Mobius {
        a: f64,
        #[serde(default = "default_tail")]
        tail: f64,
    },
    Poly(DiskPoly),
}

fn default_tail() -> f64 {
    1e-12
}

impl SymbolSpec {
    pub fn mobius(a: f64) -> Self {
        SymbolSpec::Mobius {
            a,
            tail: default_tail(),
        }
    }

    pub fn poly(coeffs: &[(f64, f64)]) -> Self {
        SymbolSpec::Poly(
            DiskPoly::new(coeffs.iter().map(|&(re, im)| C64::new(re, im)).collect())
                .expect("finite coefficients"),
        )
    }

    pub fn build(&self) -> Result<SelfMapDisk> {
        match self {
            SymbolSpec::Mobius { a, tail } => SelfMapDisk::mobius(*a, *tail),
            SymbolSpec::Poly(p) => SelfMapDisk::new(p.clone()),
        }
    }

    pub fn is_inner(&self) -> bool {
        matches!(self, SymbolSpec::Mobius { .. })
    }
}

/// Name, summary and default parameters of a command.
#[derive(Clone, Debug, Serialize)]
pub struct CommandInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub anchors: &'static [&'static str],
    pub default_params: Value,
}

pub fn list_commands() -> Vec<CommandInfo> {
    commands::registry()
}

/// Runs the named experiment. The report records wall time but never
/// serializes it.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = commands::dispatch(config)?;
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
