use super::curve::{make_sample, FamilyCurve, FamilySample};
use super::label::{enumerate_families, FamilyLabel};
use super::triangle::{TriangleClass, CLASSIFY_REL_TOL};
use super::ShapeSystem;
use crate::error::{Error, Result};
use crate::roots::{bracketed_root, Tolerance};
use crate::scalar::Real;

/// Bound on the per-pair residual `|f(r) - η| / max(1, η)` of every
/// reported configuration.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Solutions whose sides and levels agree to this relative tolerance are
/// the same equilibrium.
const DUPLICATE_REL_TOL: f64 = 1e-9;

/// One non-collinear central configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution<T> {
    pub label: FamilyLabel,
    pub sample: FamilySample<T>,
    pub class: TriangleClass,
}

fn checked_solution<T: Real>(
    system: &ShapeSystem<T>,
    label: FamilyLabel,
    sample: FamilySample<T>,
) -> Result<Option<Solution<T>>> {
    if !sample.is_valid() {
        return Ok(None);
    }
    let residual = system.residual(&sample.config, sample.eta);
    if residual > T::tol(RESIDUAL_TOL) {
        return Err(Error::Numerical {
            operation: "count_at_inertia",
            reason: format!(
                "family {label} at eta = {:e}: shape residual {:e}",
                sample.eta.as_f64(),
                residual.as_f64()
            ),
        });
    }
    let class = sample.config.classify(T::lit(CLASSIFY_REL_TOL))?;
    Ok(Some(Solution {
        label,
        sample,
        class,
    }))
}

fn is_duplicate<T: Real>(a: &Solution<T>, b: &Solution<T>) -> bool {
    let tol = T::lit(DUPLICATE_REL_TOL);
    (a.sample.eta - b.sample.eta).abs() <= tol * a.sample.eta.max(b.sample.eta)
        && a.sample.config.rel_distance(&b.sample.config) <= tol
}

fn finish<T: Real>(mut solutions: Vec<Solution<T>>) -> Vec<Solution<T>> {
    solutions.sort_by(|a, b| {
        a.label.cmp(&b.label).then(
            a.sample
                .eta
                .partial_cmp(&b.sample.eta)
                .expect("finite levels"),
        )
    });
    let mut unique: Vec<Solution<T>> = Vec::with_capacity(solutions.len());
    for s in solutions {
        if !unique.iter().any(|u| is_duplicate(u, &s)) {
            unique.push(s);
        }
    }
    unique
}

/// Levels are halved at most this many times past the end of the grid.
const TAIL_HALVINGS: usize = 1000;

/// Continues a curve past its smallest sampled level. Returns the sample
/// where the inertia crosses `inertia`, provided the curve moves towards it
/// and stays a valid triangle on the way.
fn tail_crossing<T: Real>(curve: &FamilyCurve<T>, inertia: T) -> Result<Option<FamilySample<T>>> {
    let n = curve.samples.len();
    if n < 2 {
        return Ok(None);
    }
    let (prev, last) = (curve.samples[n - 2], curve.samples[n - 1]);
    if !(prev.is_valid() && last.is_valid()) {
        return Ok(None);
    }
    let heading = last.inertia - prev.inertia;
    let gap = inertia - last.inertia;
    if heading == T::zero() || gap.signum() != heading.signum() {
        return Ok(None);
    }
    let sample = |eta: T| -> Option<FamilySample<T>> {
        make_sample(&curve.system, curve.label, eta)
            .ok()
            .filter(|s| s.is_valid())
    };
    let mut hi = last.eta;
    let mut lo = hi;
    let mut reached = false;
    for _ in 0..TAIL_HALVINGS {
        lo = lo / T::lit(2.0);
        if !(lo > T::min_positive_value()) {
            break;
        }
        let Some(s) = sample(lo) else {
            return Ok(None);
        };
        if (inertia - s.inertia).signum() != gap.signum() {
            reached = true;
            break;
        }
        hi = lo;
    }
    if !reached {
        return Ok(None);
    }
    let eta = bracketed_root(
        |eta| sample(eta).map_or(T::nan(), |s| s.inertia - inertia),
        lo,
        hi,
        Tolerance::machine(),
    )?;
    Ok(sample(eta))
}

/// All non-collinear central configurations of moment of inertia `inertia`.
///
/// Every monotone segment whose inertia range contains the target is
/// inverted by bisection in `η` between the bracketing samples. Curves that
/// run towards the target beyond their smallest sampled level are followed
/// by repeated halving of `η`. Equal configurations reached through several
/// families are reported once. Sorted by family label, then level.
pub fn count_at_inertia<T: Real>(curves: &[FamilyCurve<T>], inertia: T) -> Result<Vec<Solution<T>>> {
    if !(inertia.is_finite() && inertia > T::zero()) {
        return Err(Error::invalid("inertia", "must be positive"));
    }
    let mut found = Vec::new();
    for curve in curves {
        for seg in &curve.monotone_segments {
            if !seg.contains(inertia) {
                continue;
            }
            let samples = &curve.samples[seg.first..=seg.last];
            if let Some(hit) = samples.iter().find(|s| s.inertia == inertia) {
                found.extend(checked_solution(&curve.system, curve.label, *hit)?);
                continue;
            }
            let Some(w) = samples.windows(2).find(|w| {
                (w[0].inertia - inertia).signum() != (w[1].inertia - inertia).signum()
            }) else {
                continue;
            };
            let (hi, lo) = (w[0].eta, w[1].eta);
            let eta = bracketed_root(
                |eta| match make_sample(&curve.system, curve.label, eta) {
                    Ok(s) => s.inertia - inertia,
                    Err(_) => T::nan(),
                },
                lo,
                hi,
                Tolerance::machine(),
            )?;
            let sample = make_sample(&curve.system, curve.label, eta)?;
            found.extend(checked_solution(&curve.system, curve.label, sample)?);
        }
        if let Some(sample) = tail_crossing(curve, inertia)? {
            found.extend(checked_solution(&curve.system, curve.label, sample)?);
        }
    }
    Ok(finish(found))
}

/// All non-collinear central configurations at level `eta = ω²`.
pub fn solutions_at_level<T: Real>(system: &ShapeSystem<T>, eta: T) -> Result<Vec<Solution<T>>> {
    if !(eta.is_finite() && eta > T::zero()) {
        return Err(Error::invalid("omega2", "must be positive"));
    }
    let mut found = Vec::new();
    for label in enumerate_families(&system.shapes) {
        if system.config(label, eta)?.is_none() {
            continue;
        }
        let sample = make_sample(system, label, eta)?;
        found.extend(checked_solution(system, label, sample)?);
    }
    Ok(finish(found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{default_eta_grid, trace_families};

    fn canonical_curves() -> Vec<FamilyCurve<f64>> {
        let sys = ShapeSystem::canonical();
        let grid = default_eta_grid(&sys, 2000).unwrap();
        trace_families(&sys, &grid).unwrap()
    }

    #[test]
    fn counts_on_canonical_curves() {
        let curves = canonical_curves();
        assert!(count_at_inertia(&curves, 0.3).unwrap().is_empty());

        let meet = count_at_inertia(&curves, 16.0 / 27.0).unwrap();
        let xc = 4.0 / 3.0;
        assert!(meet.iter().any(|s| {
            s.class == TriangleClass::Equilateral && (s.sample.config.r12 - xc).abs() < 1e-9
        }));

        let big = count_at_inertia(&curves, 10.0).unwrap();
        let labels: Vec<_> = big.iter().map(|s| (s.label.to_string(), s.class)).collect();
        assert_eq!(
            labels,
            [
                ("LHH".to_string(), TriangleClass::Isosceles),
                ("HHH".to_string(), TriangleClass::Equilateral)
            ]
        );
        for s in &big {
            assert!((s.sample.inertia - 10.0).abs() < 1e-12);
        }
        assert!(count_at_inertia(&curves, -1.0).is_err());
    }

    #[test]
    fn counts_beyond_the_grid() {
        let curves = canonical_curves();
        for target in [1e7, 1e12] {
            let found = count_at_inertia(&curves, target).unwrap();
            assert_eq!(found.len(), 2, "I = {target}");
            for s in &found {
                assert!((s.sample.inertia - target).abs() <= 1e-12 * target);
            }
        }
        // between the onset and the smallest sampled level of LLL
        let near = count_at_inertia(&curves, 1.0 / 3.0 + 1e-13).unwrap();
        assert_eq!(near.len(), 1);
        assert_eq!(near[0].label.to_string(), "LLL");
    }

    #[test]
    fn level_solutions() {
        let sys = ShapeSystem::<f64>::canonical();
        let at = solutions_at_level(&sys, 0.05).unwrap();
        let labels: Vec<_> = at.iter().map(|s| s.label.to_string()).collect();
        assert_eq!(labels, ["LLL", "LHH", "HHH"]);
        assert!((at[0].sample.config.r12 - 1.0641).abs() < 5e-5);

        let at = solutions_at_level(&sys, 27.0 / 256.0).unwrap();
        assert_eq!(at.len(), 1);
        assert_eq!(at[0].class, TriangleClass::Equilateral);

        assert!(solutions_at_level(&sys, 0.2).unwrap().is_empty());
    }
}
