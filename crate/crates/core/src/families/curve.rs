use rayon::prelude::*;

use super::bifurcation::BifurcationKind;
use super::label::{enumerate_families, FamilyLabel};
use super::triangle::{ConfigTriple, TriangleStatus};
use super::ShapeSystem;
use crate::error::{Error, Result};
use crate::roots::{bracketed_root, minimize, Tolerance};
use crate::scalar::Real;
use crate::shape::ShapeKind;

pub const DEFAULT_GRID_POINTS: usize = 2000;

/// Successive inertia values closer than this (relative) count as equal.
const FLAT_REL_TOL: f64 = 1e-14;
/// Triangle slack of the sample inserted just inside a degeneracy boundary.
const INNER_SLACK: f64 = 1e-10;
/// Closest approach of the grid to the meeting level, relative to it.
const GRID_TOP_OFFSET: f64 = 1e-10;
/// Smallest level of the grid, relative to the meeting level.
const GRID_FLOOR: f64 = 1e-9;
/// Distance span (each way) of the grid for systems without a meeting level.
const MONOTONE_SPAN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySample<T> {
    /// Common level `ω²`.
    pub eta: T,
    pub config: ConfigTriple<T>,
    pub inertia: T,
    pub status: TriangleStatus,
    /// Some pair sits on its coincident root `x_c`.
    pub meeting: bool,
}

impl<T: Real> FamilySample<T> {
    pub fn is_valid(&self) -> bool {
        self.status == TriangleStatus::NonDegenerate
    }
}

/// Maximal run of non-degenerate samples, indices inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityInterval<T> {
    pub first: usize,
    pub last: usize,
    pub eta_high: T,
    pub eta_low: T,
    pub inertia_min: T,
    pub inertia_max: T,
}

/// Direction of the inertia along decreasing `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneSegment<T> {
    pub first: usize,
    pub last: usize,
    pub trend: Trend,
    pub inertia_min: T,
    pub inertia_max: T,
}

impl<T: Real> MonotoneSegment<T> {
    pub fn contains(&self, inertia: T) -> bool {
        inertia >= self.inertia_min && inertia <= self.inertia_max
    }
}

/// A distinguished point on one curve, refined beyond grid resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveEvent<T> {
    pub kind: BifurcationKind,
    pub eta: T,
    pub inertia: T,
}

/// One family traced over a decreasing `η` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyCurve<T> {
    pub label: FamilyLabel,
    pub system: ShapeSystem<T>,
    /// Ordered by strictly decreasing `η`; grid points plus refinements.
    pub samples: Vec<FamilySample<T>>,
    pub validity_intervals: Vec<ValidityInterval<T>>,
    pub monotone_segments: Vec<MonotoneSegment<T>>,
    pub events: Vec<CurveEvent<T>>,
    /// The `η → 0` limit of an all-low family, where every side is `x₀`.
    pub zero_level_limit: Option<FamilySample<T>>,
}

impl<T: Real> FamilyCurve<T> {
    /// `true` when no sample satisfies the strict triangle inequality.
    pub fn is_empty(&self) -> bool {
        self.validity_intervals.is_empty()
    }

    /// Inertia ranges covered by the valid samples, one per validity interval.
    pub fn inertia_range(&self) -> Vec<(T, T)> {
        self.validity_intervals
            .iter()
            .map(|v| (v.inertia_min, v.inertia_max))
            .collect()
    }

    pub fn valid_samples(&self) -> impl Iterator<Item = &FamilySample<T>> {
        self.samples.iter().filter(|s| s.is_valid())
    }

    /// Exact sample of this family at `eta`.
    pub fn sample_at(&self, eta: T) -> Result<FamilySample<T>> {
        make_sample(&self.system, self.label, eta)
    }
}

pub(crate) fn make_sample<T: Real>(
    system: &ShapeSystem<T>,
    label: FamilyLabel,
    eta: T,
) -> Result<FamilySample<T>> {
    let (config, meeting) = system
        .config(label, eta)?
        .ok_or_else(|| Error::NoRoot {
            operation: "sample_family",
            level: eta.as_f64(),
        })?;
    Ok(FamilySample {
        eta,
        inertia: config.inertia(&system.masses),
        status: config.status(),
        config,
        meeting,
    })
}

fn geomspace<T: Real>(from: T, to: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![from];
    }
    let (la, lb) = (from.ln(), to.ln());
    let steps = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| (la + (lb - la) * T::from_usize(i).unwrap() / steps).exp())
        .collect()
}

/// Strictly decreasing level grid of `n` points.
///
/// With a meeting level `η_max` (smallest `f_max` of the two-branch pairs)
/// the grid starts exactly at `η_max`; half of the points are geometric in
/// `η_max - η` to resolve the branch meeting, the rest geometric in `η` down
/// to `1e-9·η_max`. Purely monotone systems get a geometric grid spanning
/// four decades of distance around the root of `f_12 = 1`.
pub fn default_eta_grid<T: Real>(system: &ShapeSystem<T>, n: usize) -> Result<Vec<T>> {
    if n < 8 {
        return Err(Error::invalid("grid", "need at least 8 grid points"));
    }
    let half = T::lit(0.5);
    let mut grid = match system.level_ceiling() {
        Some(top) => {
            let n_top = n / 2;
            let n_bottom = n - n_top;
            let mut grid = Vec::with_capacity(n);
            grid.push(top);
            grid.extend(
                geomspace(T::lit(GRID_TOP_OFFSET), half, n_top - 1)
                    .into_iter()
                    .map(|s| top * (T::one() - s)),
            );
            grid.extend(
                geomspace(half, T::lit(GRID_FLOOR), n_bottom + 1)
                    .into_iter()
                    .skip(1)
                    .map(|s| top * s),
            );
            grid
        }
        None => {
            let reference = system.shapes[0]
                .solve_level(T::one())?
                .low
                .expect("monotone shapes have a root at every positive level");
            let span = T::lit(MONOTONE_SPAN);
            let hi = system.shapes[0].value(reference / span);
            let lo = system.shapes[0].value(reference * span);
            geomspace(hi, lo, n)
        }
    };
    grid.dedup();
    Ok(grid)
}

fn effective_signs<T: Real>(samples: &[FamilySample<T>]) -> Vec<i8> {
    let tol = T::lit(FLAT_REL_TOL);
    let mut signs: Vec<i8> = samples
        .windows(2)
        .map(|w| {
            let d = w[1].inertia - w[0].inertia;
            if d.abs() <= tol * w[0].inertia.abs().max(w[1].inertia.abs()) {
                0
            } else if d > T::zero() {
                1
            } else {
                -1
            }
        })
        .collect();
    // Flat steps join the preceding segment; leading flat steps join the first.
    let mut last = signs.iter().copied().find(|&s| s != 0).unwrap_or(0);
    for s in signs.iter_mut() {
        if *s == 0 {
            *s = last;
        } else {
            last = *s;
        }
    }
    signs
}

/// Indices (relative to `samples`) where the inertia turns around.
fn turning_points<T: Real>(samples: &[FamilySample<T>]) -> Vec<usize> {
    let signs = effective_signs(samples);
    (1..signs.len())
        .filter(|&k| signs[k - 1] != 0 && signs[k] != 0 && signs[k - 1] != signs[k])
        .collect()
}

fn validity_runs<T: Real>(samples: &[FamilySample<T>]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, s) in samples.iter().enumerate() {
        match (s.is_valid(), start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                runs.push((a, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        runs.push((a, samples.len() - 1));
    }
    runs
}

fn inertia_bounds<T: Real>(samples: &[FamilySample<T>]) -> (T, T) {
    samples.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| {
        (lo.min(s.inertia), hi.max(s.inertia))
    })
}

fn intervals_and_segments<T: Real>(
    samples: &[FamilySample<T>],
) -> (Vec<ValidityInterval<T>>, Vec<MonotoneSegment<T>>) {
    let mut intervals = Vec::new();
    let mut segments = Vec::new();
    for (first, last) in validity_runs(samples) {
        let run = &samples[first..=last];
        let (inertia_min, inertia_max) = inertia_bounds(run);
        intervals.push(ValidityInterval {
            first,
            last,
            eta_high: run[0].eta,
            eta_low: run[run.len() - 1].eta,
            inertia_min,
            inertia_max,
        });
        let signs = effective_signs(run);
        let mut cuts = vec![0];
        cuts.extend(turning_points(run));
        cuts.push(run.len() - 1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let trend = match signs.get(a).copied().unwrap_or(0) {
                1 => Trend::Increasing,
                -1 => Trend::Decreasing,
                _ => Trend::Flat,
            };
            let (lo, hi) = inertia_bounds(&run[a..=b]);
            segments.push(MonotoneSegment {
                first: first + a,
                last: first + b,
                trend,
                inertia_min: lo,
                inertia_max: hi,
            });
        }
    }
    (intervals, segments)
}

/// Locates the triangle-degeneracy boundary between a valid and an invalid
/// sample. Returns the boundary sample and, when there is room, a
/// non-degenerate sample just inside it.
fn refine_degeneracy<T: Real>(
    system: &ShapeSystem<T>,
    label: FamilyLabel,
    valid: &FamilySample<T>,
    other: &FamilySample<T>,
) -> Result<(FamilySample<T>, Option<FamilySample<T>>)> {
    let slack = |eta: T| -> T {
        match system.config(label, eta) {
            Ok(Some((c, _))) => c.triangle_slack(),
            _ => T::nan(),
        }
    };
    let other_slack = other.config.triangle_slack();
    let boundary = if other_slack >= T::zero() {
        *other
    } else {
        let eta = bracketed_root(slack, other.eta, valid.eta, Tolerance::machine())?;
        make_sample(system, label, eta)?
    };
    let inner_target = T::lit(INNER_SLACK);
    let inner = if valid.config.triangle_slack() > inner_target {
        let eta = bracketed_root(
            |e| slack(e) - inner_target,
            boundary.eta,
            valid.eta,
            Tolerance::machine(),
        )?;
        let s = make_sample(system, label, eta)?;
        s.is_valid().then_some(s)
    } else {
        None
    };
    Ok((boundary, inner))
}

fn merge_samples<T: Real>(samples: &mut Vec<FamilySample<T>>, extra: Vec<FamilySample<T>>) {
    if extra.is_empty() {
        return;
    }
    samples.extend(extra);
    samples.sort_by(|a, b| b.eta.partial_cmp(&a.eta).expect("finite levels"));
    samples.dedup_by(|a, b| a.eta == b.eta);
}

/// Samples family `label` on a strictly decreasing level grid, then refines
/// its triangle-degeneracy boundaries (bisection on the triangle slack) and
/// its interior inertia extrema (Brent's parabolic search), inserting the
/// refined samples into the curve.
pub fn sample_family<T: Real>(
    label: FamilyLabel,
    system: &ShapeSystem<T>,
    eta_grid: &[T],
) -> Result<FamilyCurve<T>> {
    if eta_grid.is_empty() {
        return Err(Error::invalid("eta_grid", "grid is empty"));
    }
    if eta_grid.iter().any(|e| !(e.is_finite() && *e > T::zero())) {
        return Err(Error::invalid("eta_grid", "levels must be positive and finite"));
    }
    if eta_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("eta_grid", "levels must be strictly decreasing"));
    }

    let mut samples = eta_grid
        .par_iter()
        .map(|&eta| make_sample(system, label, eta))
        .collect::<Result<Vec<_>>>()?;
    let mut events = Vec::new();

    let mut extra = Vec::new();
    for i in 0..samples.len() - 1 {
        let (a, b) = (&samples[i], &samples[i + 1]);
        if a.is_valid() == b.is_valid() {
            continue;
        }
        let (valid, other) = if a.is_valid() { (a, b) } else { (b, a) };
        let (boundary, inner) = refine_degeneracy(system, label, valid, other)?;
        events.push(CurveEvent {
            kind: BifurcationKind::TriangleDegeneracy,
            eta: boundary.eta,
            inertia: boundary.inertia,
        });
        extra.push(boundary);
        extra.extend(inner);
    }
    merge_samples(&mut samples, extra);

    let mut extra = Vec::new();
    for (first, last) in validity_runs(&samples) {
        let run = &samples[first..=last];
        let signs = effective_signs(run);
        for k in turning_points(run) {
            let is_min = signs[k - 1] < 0;
            let (lo, hi) = (run[k + 1].eta, run[k - 1].eta);
            let objective = |eta: T| -> T {
                match make_sample(system, label, eta) {
                    Ok(s) if is_min => s.inertia,
                    Ok(s) => -s.inertia,
                    Err(_) => T::infinity(),
                }
            };
            let (eta, _) = minimize(objective, lo, hi, T::tol(1e-12), 200);
            let refined = make_sample(system, label, eta)?;
            let better = if is_min {
                refined.inertia <= run[k].inertia
            } else {
                refined.inertia >= run[k].inertia
            };
            let best = if better && refined.is_valid() {
                extra.push(refined);
                refined
            } else {
                run[k]
            };
            events.push(CurveEvent {
                kind: BifurcationKind::InteriorExtremum,
                eta: best.eta,
                inertia: best.inertia,
            });
        }
    }
    merge_samples(&mut samples, extra);

    let first = samples[0];
    if first.meeting && first.is_valid() {
        events.push(CurveEvent {
            kind: BifurcationKind::BranchMeeting,
            eta: first.eta,
            inertia: first.inertia,
        });
    }

    let zero_level_limit = if label.all_low()
        && system.shapes.iter().all(|s| s.kind() == ShapeKind::TwoBranch)
    {
        let sides = [
            system.shapes[0].zero()?,
            system.shapes[1].zero()?,
            system.shapes[2].zero()?,
        ];
        let config = ConfigTriple::from_array(sides)?;
        Some(FamilySample {
            eta: T::zero(),
            inertia: config.inertia(&system.masses),
            status: config.status(),
            config,
            meeting: false,
        })
    } else {
        None
    };
    if let (Some(limit), Some(last)) = (zero_level_limit, samples.last()) {
        if limit.is_valid() && last.is_valid() {
            events.push(CurveEvent {
                kind: BifurcationKind::Onset,
                eta: limit.eta,
                inertia: limit.inertia,
            });
        }
    }

    let (validity_intervals, monotone_segments) = intervals_and_segments(&samples);
    Ok(FamilyCurve {
        label,
        system: *system,
        samples,
        validity_intervals,
        monotone_segments,
        events,
        zero_level_limit,
    })
}

/// Every family of `system` (one per symmetry class) traced on `eta_grid`.
pub fn trace_families<T: Real>(
    system: &ShapeSystem<T>,
    eta_grid: &[T],
) -> Result<Vec<FamilyCurve<T>>> {
    enumerate_families(&system.shapes)
        .into_iter()
        .map(|label| sample_family(label, system, eta_grid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_curve(label: &str) -> FamilyCurve<f64> {
        let sys = ShapeSystem::canonical();
        let grid = default_eta_grid(&sys, DEFAULT_GRID_POINTS).unwrap();
        sample_family(label.parse().unwrap(), &sys, &grid).unwrap()
    }

    #[test]
    fn grid_shape() {
        let sys = ShapeSystem::<f64>::canonical();
        let grid = default_eta_grid(&sys, 2000).unwrap();
        assert_eq!(grid.len(), 2000);
        assert_eq!(grid[0], 27.0 / 256.0);
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
        assert!(*grid.last().unwrap() > 0.0);
        assert!(default_eta_grid(&sys, 3).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let sys = ShapeSystem::<f64>::canonical();
        let l = "LLL".parse().unwrap();
        assert!(sample_family(l, &sys, &[]).is_err());
        assert!(sample_family(l, &sys, &[0.05, 0.06]).is_err());
        assert!(sample_family(l, &sys, &[0.05, -0.01]).is_err());
        // above the meeting level the low root does not exist
        assert!(matches!(
            sample_family(l, &sys, &[0.2, 0.05]),
            Err(Error::NoRoot { .. })
        ));
    }

    #[test]
    fn lll_limits() {
        let c = canonical_curve("LLL");
        assert!((c.samples[0].inertia - 16.0 / 27.0).abs() < 1e-12);
        let limit = c.zero_level_limit.unwrap();
        assert!((limit.inertia - 1.0 / 3.0).abs() < 1e-15);
        let last = c.samples.last().unwrap();
        assert!((last.inertia - 1.0 / 3.0).abs() < 1e-8);
        assert_eq!(c.validity_intervals.len(), 1);
        assert_eq!(c.monotone_segments.len(), 1);
        assert_eq!(c.monotone_segments[0].trend, Trend::Decreasing);
        let kinds: Vec<_> = c.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, [BifurcationKind::BranchMeeting, BifurcationKind::Onset]);
    }

    #[test]
    fn llh_turns_and_degenerates() {
        let c = canonical_curve("LLH");
        // x1 = xc - e, x2 = xc + e gives 9I = 3xc² - 2e·xc + 3e²: decreasing first
        assert!(c.samples[1].inertia < c.samples[0].inertia);
        assert_eq!(c.validity_intervals.len(), 1);
        let v = c.validity_intervals[0];
        assert_eq!(v.first, 0);
        // level 0.05 is past the degeneracy, where 2·x1 < x2
        assert!(v.eta_low > 0.05);
        assert_eq!(c.monotone_segments.len(), 2);
        assert_eq!(c.monotone_segments[0].trend, Trend::Decreasing);
        assert_eq!(c.monotone_segments[1].trend, Trend::Increasing);
        let degeneracy = c
            .events
            .iter()
            .find(|e| e.kind == BifurcationKind::TriangleDegeneracy)
            .unwrap();
        // x2 = 2·x1 on x^-3 - x^-4 gives x1 = 15/14, I = 75/98.
        assert!((degeneracy.inertia - 75.0 / 98.0).abs() < 1e-12);
    }

    #[test]
    fn hhh_increases_without_bound() {
        let c = canonical_curve("HHH");
        assert_eq!(c.monotone_segments.len(), 1);
        assert_eq!(c.monotone_segments[0].trend, Trend::Increasing);
        assert!((c.samples[0].inertia - 16.0 / 27.0).abs() < 1e-12);
        assert!(c.samples.last().unwrap().inertia > 1e5);
        for s in &c.samples {
            let x = s.config.r12;
            assert!((s.inertia - x * x / 3.0).abs() <= 1e-14 * s.inertia);
        }
    }

    #[test]
    fn parallel_sampling_is_deterministic() {
        let sys = ShapeSystem::<f64>::canonical();
        let grid = default_eta_grid(&sys, 500).unwrap();
        let label = "LLH".parse().unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_family(label, &sys, &grid).unwrap());
        let b = four.install(|| sample_family(label, &sys, &grid).unwrap());
        assert_eq!(a, b);
    }
}
