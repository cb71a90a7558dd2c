//! Run configuration: a single JSON document validated on load.

use std::fs;
use std::path::Path;

use qcc_core::{
    build_shapes, Couplings, Exponents, InteractionMode, IntegratorOptions, Masses, Model, Pair,
    ShapeSet, System,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_GRID: usize = 2000;
pub const MIN_GRID: usize = 100;
pub const DEFAULT_MULTISTART: usize = qcc_core::collinear::DEFAULT_MULTISTART;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    masses: [f64; 3],
    alpha: f64,
    beta: f64,
    mode: String,
    couplings: serde_json::Value,
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FullCouplings {
    #[serde(rename = "A")]
    a: [f64; 3],
    #[serde(rename = "B")]
    b: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShorthandCouplings {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    k: f64,
    k1: f64,
}

/// Optional numeric overrides.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_multistart")]
    pub multistart: usize,
}

fn default_rel_tol() -> f64 {
    1e-10
}

fn default_abs_tol() -> f64 {
    1e-12
}

fn default_multistart() -> usize {
    DEFAULT_MULTISTART
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            multistart: default_multistart(),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub masses: Masses,
    pub exps: Exponents,
    pub mode: InteractionMode,
    pub couplings: Couplings,
    pub grid: usize,
    pub tolerances: Tolerances,
    pub shapes: ShapeSet<f64>,
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid `{field}`: {reason}"))
}

fn core_err(e: qcc_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("malformed config: {e}")))?;

        let mode = match raw.mode.as_str() {
            "attractive-repulsive" => InteractionMode::AttractiveRepulsive,
            "attractive-attractive" => InteractionMode::AttractiveAttractive,
            other => {
                return Err(invalid(
                    "mode",
                    format!(
                        "`{other}` is not one of \"attractive-repulsive\", \"attractive-attractive\""
                    ),
                ))
            }
        };
        let [m1, m2, m3] = raw.masses;
        let masses = Masses::new(m1, m2, m3).map_err(core_err)?;
        let exps = Exponents::new(raw.alpha, raw.beta).map_err(core_err)?;
        let couplings = parse_couplings(raw.couplings)?;

        let grid = raw.grid.unwrap_or(DEFAULT_GRID);
        if grid < MIN_GRID {
            return Err(invalid("grid", format!("must be at least {MIN_GRID}")));
        }
        let tolerances = raw.tolerances.unwrap_or_default();
        if !(tolerances.rel_tol > 0.0 && tolerances.abs_tol > 0.0) {
            return Err(invalid("tolerances", "rel_tol and abs_tol must be positive"));
        }
        if tolerances.multistart < qcc_core::collinear::MIN_MULTISTART {
            return Err(invalid(
                "tolerances.multistart",
                format!("must be at least {}", qcc_core::collinear::MIN_MULTISTART),
            ));
        }
        let shapes = build_shapes(&masses, &couplings, &exps, mode).map_err(core_err)?;
        Ok(RunConfig {
            masses,
            exps,
            mode,
            couplings,
            grid,
            tolerances,
            shapes,
        })
    }

    pub fn system(&self) -> System {
        System::new(self.shapes.shapes, self.masses)
    }

    pub fn model(&self) -> Model {
        Model::new(self.masses, self.couplings, self.exps, self.mode)
    }

    pub fn integrator(&self) -> IntegratorOptions<f64> {
        IntegratorOptions::with_tolerances(self.tolerances.rel_tol, self.tolerances.abs_tol)
    }

    /// The configuration with every default filled in, as written to
    /// `meta.json`.
    pub fn resolved(&self) -> ResolvedConfig {
        ResolvedConfig {
            masses: self.masses.as_array(),
            alpha: self.exps.attractive(),
            beta: self.exps.repulsive(),
            mode: self.mode.as_str(),
            couplings: ResolvedCouplings {
                a: Pair::ALL.map(|p| self.couplings.a(p)),
                b: Pair::ALL.map(|p| self.couplings.b(p)),
            },
            grid: self.grid,
            tolerances: self.tolerances,
        }
    }
}

fn parse_couplings(value: serde_json::Value) -> Result<Couplings, CliError> {
    let shape_hint = "expected {\"A\": [3], \"B\": [3]} or {\"A\", \"B\", \"k\", \"k1\"}";
    let is_full = value.get("A").map(|a| a.is_array()).unwrap_or(false);
    if is_full {
        let full: FullCouplings = serde_json::from_value(value)
            .map_err(|e| invalid("couplings", format!("{e}; {shape_hint}")))?;
        if full.b.iter().all(|&b| b == 0.0) {
            return Couplings::newtonian(full.a).map_err(core_err);
        }
        return Couplings::new(full.a, full.b).map_err(core_err);
    }
    let short: ShorthandCouplings = serde_json::from_value(value)
        .map_err(|e| invalid("couplings", format!("{e}; {shape_hint}")))?;
    if short.b == 0.0 {
        if !(short.k > 0.0 && short.k1 > 0.0) {
            return Err(invalid("couplings.k", "k and k1 must be positive"));
        }
        return Couplings::newtonian([short.a, short.k * short.a, short.k1 * short.a])
            .map_err(core_err);
    }
    Couplings::proportional(short.a, short.b, short.k, short.k1).map_err(core_err)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCouplings {
    #[serde(rename = "A")]
    pub a: [f64; 3],
    #[serde(rename = "B")]
    pub b: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub masses: [f64; 3],
    pub alpha: f64,
    pub beta: f64,
    pub mode: &'static str,
    pub couplings: ResolvedCouplings,
    pub grid: usize,
    pub tolerances: Tolerances,
}
