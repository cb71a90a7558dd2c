//! Subcommand implementations. Each returns a serialisable report; the
//! binary prints it and maps empty results and failures to exit codes.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use qcc_core::families::CLASSIFY_REL_TOL;
use qcc_core::{
    bifurcation_scan, cc_residual, count_at_inertia, count_collinear, curve_number,
    default_eta_grid, embed, integrate, k_tilde, periodicity_error, rigid_rotation_state,
    solutions_at_level, trace_families, Config, Curve, Error, Pair, Sample, ShapeKind, Solution,
    TriangleStatus,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ResolvedConfig, RunConfig};
use crate::error::CliError;

/// A solution is accepted when both bounds hold.
pub const RESIDUAL_BOUND: f64 = 1e-9;
pub const PERIODICITY_BOUND: f64 = 1e-6;
/// Collinear solutions re-embedded in the plane must satisfy this.
pub const COLLINEAR_BOUND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One sampled configuration of a family, as written to `families.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub family_label: String,
    pub eta: f64,
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
    pub inertia: f64,
    pub triangle_status: String,
    pub class: String,
}

impl FamilyRow {
    fn from_sample(label: &str, s: &Sample) -> Self {
        FamilyRow {
            family_label: label.to_string(),
            eta: s.eta,
            r12: s.config.r12,
            r13: s.config.r13,
            r23: s.config.r23,
            inertia: s.inertia,
            triangle_status: s.status.as_str().to_string(),
            class: class_name(&s.config),
        }
    }
}

fn class_name(config: &Config) -> String {
    match config.classify(CLASSIFY_REL_TOL) {
        Ok(c) => c.as_str().to_string(),
        Err(_) => "collinear".to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationRow {
    pub inertia: f64,
    pub eta: f64,
    pub kind: &'static str,
    pub families: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairMeta {
    pub pair: &'static str,
    pub kind: &'static str,
    pub c1: f64,
    pub c2: f64,
    pub p: f64,
    pub q: f64,
    pub x0: Option<f64>,
    pub xc: Option<f64>,
    pub f_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMeta {
    pub label: String,
    pub curve: Option<u8>,
    pub samples: usize,
    pub valid_samples: usize,
    /// `[inertia_min, inertia_max]` per validity interval.
    pub inertia_ranges: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub config: ResolvedConfig,
    pub pairs: Vec<PairMeta>,
    pub k: f64,
    pub k1: f64,
    pub proportional: bool,
    pub k_tilde: Option<f64>,
    pub eta_grid_points: usize,
    pub families: Vec<FamilyMeta>,
}

/// Everything `analyze` computes, before serialisation.
pub struct Analysis {
    pub curves: Vec<Curve>,
    pub rows: Vec<FamilyRow>,
    pub bifurcations: Vec<BifurcationRow>,
    pub meta: Meta,
}

fn shape_kind_name(kind: ShapeKind) -> &'static str {
    match kind {
        ShapeKind::TwoBranch => "two-branch",
        ShapeKind::Monotone => "monotone",
    }
}

pub fn trace(cfg: &RunConfig, grid: usize) -> Result<Vec<Curve>, CliError> {
    let system = cfg.system();
    let etas = default_eta_grid(&system, grid)?;
    Ok(trace_families(&system, &etas)?)
}

pub fn analyze(cfg: &RunConfig, grid: Option<usize>) -> Result<Analysis, CliError> {
    let grid = grid.unwrap_or(cfg.grid);
    if grid < crate::config::MIN_GRID {
        return Err(CliError::Config(format!(
            "invalid `grid`: must be at least {}",
            crate::config::MIN_GRID
        )));
    }
    let curves = trace(cfg, grid)?;
    let shapes = &cfg.shapes.shapes;

    let mut rows = Vec::new();
    for curve in &curves {
        let label = curve.label.to_string();
        rows.extend(
            curve
                .samples
                .iter()
                .filter(|s| s.status != TriangleStatus::Invalid)
                .map(|s| FamilyRow::from_sample(&label, s)),
        );
    }

    let bifurcations = bifurcation_scan(&curves)
        .into_iter()
        .map(|b| BifurcationRow {
            inertia: b.inertia,
            eta: b.eta,
            kind: b.kind.as_str(),
            families: b.families.iter().map(|l| l.to_string()).collect(),
        })
        .collect();

    let pairs = Pair::ALL
        .iter()
        .map(|&p| {
            let s = &shapes[p.index()];
            let crit = s.critical().ok();
            PairMeta {
                pair: p.name(),
                kind: shape_kind_name(s.kind()),
                c1: s.c1(),
                c2: s.c2(),
                p: s.p(),
                q: s.q(),
                x0: s.zero().ok(),
                xc: crit.map(|c| c.x),
                f_max: crit.map(|c| c.value),
            }
        })
        .collect();
    let families = curves
        .iter()
        .map(|c| FamilyMeta {
            label: c.label.to_string(),
            curve: curve_number(c.label, shapes),
            samples: c.samples.len(),
            valid_samples: c.valid_samples().count(),
            inertia_ranges: c.inertia_range().into_iter().map(|(a, b)| [a, b]).collect(),
        })
        .collect();
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.resolved(),
        pairs,
        k: cfg.shapes.k,
        k1: cfg.shapes.k1,
        proportional: cfg.shapes.proportional,
        k_tilde: k_tilde(&shapes[0]).ok(),
        eta_grid_points: grid,
        families,
    };
    Ok(Analysis {
        curves,
        rows,
        bifurcations,
        meta,
    })
}

pub fn to_json<S: Serialize + ?Sized>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn rows_csv(rows: &[FamilyRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "family_label",
            "eta",
            "r12",
            "r13",
            "r23",
            "inertia",
            "triangle_status",
            "class",
        ])
        .map_err(|e| CliError::Config(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Config(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

/// Writes `families.{csv,json}`, `bifurcations.json` and `meta.json`.
pub fn write_analysis(analysis: &Analysis, out: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out)?;
    let families = match format {
        Format::Csv => {
            let p = out.join("families.csv");
            fs::write(&p, rows_csv(&analysis.rows)?)?;
            p
        }
        Format::Json => {
            let p = out.join("families.json");
            fs::write(&p, to_json(&analysis.rows))?;
            p
        }
    };
    let bif = out.join("bifurcations.json");
    fs::write(&bif, to_json(&analysis.bifurcations))?;
    let meta = out.join("meta.json");
    fs::write(&meta, to_json(&analysis.meta))?;
    Ok(vec![families, bif, meta])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub family: String,
    pub eta: f64,
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
    pub inertia: f64,
    pub class: String,
}

impl From<&Solution<f64>> for SolutionRow {
    fn from(s: &Solution<f64>) -> Self {
        SolutionRow {
            family: s.label.to_string(),
            eta: s.sample.eta,
            r12: s.sample.config.r12,
            r13: s.sample.config.r13,
            r23: s.sample.config.r23,
            inertia: s.sample.inertia,
            class: s.class.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub inertia: f64,
    pub count: usize,
    pub solutions: Vec<SolutionRow>,
}

pub fn count(cfg: &RunConfig, inertia: f64) -> Result<CountReport, CliError> {
    if !(inertia.is_finite() && inertia > 0.0) {
        return Err(CliError::Config("invalid `--inertia`: must be positive".into()));
    }
    let curves = trace(cfg, cfg.grid)?;
    let solutions: Vec<SolutionRow> = count_at_inertia(&curves, inertia)?
        .iter()
        .map(SolutionRow::from)
        .collect();
    Ok(CountReport {
        inertia,
        count: solutions.len(),
        solutions,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub omega2: f64,
    pub count: usize,
    pub solutions: Vec<SolutionRow>,
}

pub fn solve(cfg: &RunConfig, omega2: f64) -> Result<SolveReport, CliError> {
    if !(omega2.is_finite() && omega2 > 0.0) {
        return Err(CliError::Config("invalid `--omega2`: must be positive".into()));
    }
    let solutions: Vec<SolutionRow> = solutions_at_level(&cfg.system(), omega2)?
        .iter()
        .map(SolutionRow::from)
        .collect();
    Ok(SolveReport {
        omega2,
        count: solutions.len(),
        solutions,
    })
}

/// A configuration to verify. Unknown fields are ignored so rows written by
/// `analyze`, `count` and `solve` are accepted directly.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SolutionInput {
    #[serde(default, alias = "family_label")]
    pub family: Option<String>,
    pub eta: f64,
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
    /// Angular velocity; `sqrt(eta)` when absent. Its sign is free.
    #[serde(default)]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub family: Option<String>,
    pub eta: f64,
    pub omega: f64,
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
    pub cc_residual: Option<f64>,
    pub periodicity_error: Option<f64>,
    pub position_error: Option<f64>,
    pub velocity_error: Option<f64>,
    pub energy_drift: Option<f64>,
    pub angular_momentum_drift: Option<f64>,
    pub steps: Option<usize>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    pub solutions: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Checks the residual at `ω²` and integrates the rigid rotation for one
/// period. Invalid triangles fail the row; integrator breakdowns abort.
pub fn verify_one(cfg: &RunConfig, input: &SolutionInput) -> Result<VerifyRow, CliError> {
    let omega = input.omega.unwrap_or_else(|| input.eta.sqrt());
    let mut row = VerifyRow {
        family: input.family.clone(),
        eta: input.eta,
        omega,
        r12: input.r12,
        r13: input.r13,
        r23: input.r23,
        cc_residual: None,
        periodicity_error: None,
        position_error: None,
        velocity_error: None,
        energy_drift: None,
        angular_momentum_drift: None,
        steps: None,
        pass: false,
        error: None,
    };
    if !(omega.is_finite() && omega != 0.0) {
        row.error = Some("omega must be finite and nonzero".into());
        return Ok(row);
    }
    let state = match Config::new(input.r12, input.r13, input.r23).and_then(|c| embed(&c, &cfg.masses)) {
        Ok(s) => s,
        Err(e @ (Error::Triangle { .. } | Error::InvalidParameter { .. })) => {
            row.error = Some(e.to_string());
            return Ok(row);
        }
        Err(e) => return Err(e.into()),
    };
    let model = cfg.model();
    let omega_sq = omega * omega;
    let residual = cc_residual(&state, &model, omega_sq)?;
    let period = 2.0 * PI / omega.abs();
    let start = rigid_rotation_state(&state, omega);
    let traj = integrate(&start, &model, period, &cfg.integrator())?;
    let per = periodicity_error(&traj, period)?;
    row.cc_residual = Some(residual);
    row.periodicity_error = Some(per.total);
    row.position_error = Some(per.position);
    row.velocity_error = Some(per.velocity);
    row.energy_drift = Some(traj.stats.energy_drift);
    row.angular_momentum_drift = Some(traj.stats.angular_momentum_drift);
    row.steps = Some(traj.stats.steps);
    row.pass = residual <= RESIDUAL_BOUND && per.total <= PERIODICITY_BOUND;
    Ok(row)
}

pub fn verify(cfg: &RunConfig, inputs: &[SolutionInput]) -> Result<VerifyReport, CliError> {
    let rows = inputs
        .par_iter()
        .map(|s| verify_one(cfg, s))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(VerifyReport {
        count: rows.len(),
        passed,
        failed: rows.len() - passed,
        solutions: rows,
    })
}

/// Reads a single solution object, an array of them, or any report with a
/// `solutions` array.
pub fn read_solution_file(path: &Path) -> Result<Vec<SolutionInput>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parsed = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        serde_json::Value::Object(ref map) if map.contains_key("solutions") => {
            serde_json::from_value(map["solutions"].clone())
        }
        other => serde_json::from_value(other).map(|s| vec![s]),
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The nondegenerate rows of an `analyze` output directory, every
/// `stride`-th one.
pub fn read_analysis_dir(dir: &Path, stride: usize) -> Result<Vec<SolutionInput>, CliError> {
    let stride = stride.max(1);
    let csv_path = dir.join("families.csv");
    let json_path = dir.join("families.json");
    let rows: Vec<FamilyRow> = if csv_path.exists() {
        let mut r = csv::Reader::from_path(&csv_path)
            .map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
        r.deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?
    } else if json_path.exists() {
        let text = fs::read_to_string(&json_path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", json_path.display())))?
    } else {
        return Err(CliError::Config(format!(
            "{} holds neither families.csv nor families.json",
            dir.display()
        )));
    };
    Ok(rows
        .into_iter()
        .filter(|r| r.triangle_status == TriangleStatus::NonDegenerate.as_str())
        .step_by(stride)
        .map(|r| SolutionInput {
            family: Some(r.family_label),
            eta: r.eta,
            r12: r.r12,
            r13: r.r13,
            r23: r.r23,
            omega: None,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LineRow {
    pub s: [f64; 3],
    pub gaps: [f64; 2],
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
    pub residual: f64,
    pub planar_residual: f64,
    pub fold: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub order: String,
    pub count: usize,
    pub solutions: Vec<LineRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollinearReport {
    pub omega2: f64,
    pub total: usize,
    pub folds: usize,
    pub orders: Vec<OrderRow>,
}

pub fn collinear(cfg: &RunConfig, omega2: f64) -> Result<CollinearReport, CliError> {
    if !(omega2.is_finite() && omega2 > 0.0) {
        return Err(CliError::Config("invalid `--omega2`: must be positive".into()));
    }
    let model = cfg.model();
    let counted = count_collinear(&model, omega2, cfg.tolerances.multistart)?;
    let mut orders = Vec::new();
    for o in &counted.per_order {
        let mut rows = Vec::new();
        for sol in &o.solutions {
            let planar = cc_residual(&sol.planar(), &model, omega2)?;
            let [r12, r13, r23] = sol.distances();
            rows.push(LineRow {
                s: sol.s,
                gaps: sol.gaps(),
                r12,
                r13,
                r23,
                residual: sol.residual,
                planar_residual: planar,
                fold: sol.fold,
                pass: planar <= COLLINEAR_BOUND,
            });
        }
        orders.push(OrderRow {
            order: o.order.to_string(),
            count: rows.len(),
            solutions: rows,
        });
    }
    Ok(CollinearReport {
        omega2,
        total: counted.total,
        folds: counted.folds(),
        orders,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KTildeReport {
    pub base_pair: &'static str,
    pub k_tilde: f64,
    pub xc: f64,
    pub f_max: f64,
    pub k: f64,
    pub k1: f64,
    pub proportional: bool,
    pub k_exceeds: bool,
    pub k1_exceeds: bool,
}

pub fn ktilde(cfg: &RunConfig) -> Result<KTildeReport, CliError> {
    let base = &cfg.shapes.shapes[0];
    let kt = k_tilde(base).map_err(|e| CliError::Config(format!("ktilde: {e}")))?;
    let crit = base.critical()?;
    Ok(KTildeReport {
        base_pair: Pair::P12.name(),
        k_tilde: kt,
        xc: crit.x,
        f_max: crit.value,
        k: cfg.shapes.k,
        k1: cfg.shapes.k1,
        proportional: cfg.shapes.proportional,
        k_exceeds: cfg.shapes.k > kt,
        k1_exceeds: cfg.shapes.k1 > kt,
    })
}
