use std::fmt;

use super::curve::FamilyCurve;
use super::label::FamilyLabel;
use crate::scalar::Real;

/// Points closer than this in inertia are reported once.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BifurcationKind {
    /// Infimum of the inertia where equilibria first appear (`η → 0` limit
    /// of an all-low family).
    Onset,
    /// Low and high roots of a pair meet at `x_c` (`η = f_max`).
    BranchMeeting,
    /// Fold of the inertia along a family.
    InteriorExtremum,
    /// The family reaches the collinear limit and ends.
    TriangleDegeneracy,
}

impl BifurcationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BifurcationKind::Onset => "onset",
            BifurcationKind::BranchMeeting => "branch-meeting",
            BifurcationKind::InteriorExtremum => "interior-extremum",
            BifurcationKind::TriangleDegeneracy => "triangle-degeneracy",
        }
    }
}

impl fmt::Display for BifurcationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint<T> {
    pub inertia: T,
    /// Level of the first contributing event (0 for an onset).
    pub eta: T,
    pub kind: BifurcationKind,
    pub families: Vec<FamilyLabel>,
}

/// Collects the refined events of all curves, sorted by inertia, merging
/// points closer than [`MERGE_TOL`].
pub fn bifurcation_scan<T: Real>(curves: &[FamilyCurve<T>]) -> Vec<BifurcationPoint<T>> {
    let mut events: Vec<_> = curves
        .iter()
        .flat_map(|c| c.events.iter().map(move |e| (e, c.label)))
        .collect();
    events.sort_by(|(a, la), (b, lb)| {
        a.inertia
            .partial_cmp(&b.inertia)
            .expect("finite inertia")
            .then(a.kind.cmp(&b.kind))
            .then(la.cmp(lb))
    });

    let tol = T::lit(MERGE_TOL);
    let mut points: Vec<BifurcationPoint<T>> = Vec::new();
    for (event, label) in events {
        match points.last_mut() {
            Some(p) if event.inertia - p.inertia <= tol => {
                if !p.families.contains(&label) {
                    p.families.push(label);
                    p.families.sort();
                }
            }
            _ => points.push(BifurcationPoint {
                inertia: event.inertia,
                eta: event.eta,
                kind: event.kind,
                families: vec![label],
            }),
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{default_eta_grid, trace_families, ShapeSystem};
    use crate::shape::{InteractionMode, ShapeFunction};

    #[test]
    fn empty_input() {
        assert!(bifurcation_scan::<f64>(&[]).is_empty());
    }

    #[test]
    fn canonical_has_four_points() {
        let sys = ShapeSystem::<f64>::canonical();
        let grid = default_eta_grid(&sys, 2000).unwrap();
        let curves = trace_families(&sys, &grid).unwrap();
        let points = bifurcation_scan(&curves);
        let kinds: Vec<_> = points.iter().map(|p| p.kind).collect();
        assert_eq!(
            kinds,
            [
                BifurcationKind::Onset,
                BifurcationKind::InteriorExtremum,
                BifurcationKind::BranchMeeting,
                BifurcationKind::TriangleDegeneracy
            ]
        );
        assert!((points[0].inertia - 1.0 / 3.0).abs() < 1e-12);
        assert!((points[2].inertia - 16.0 / 27.0).abs() < 1e-12);
        assert_eq!(points[2].families.len(), 4);
        assert!(points.windows(2).all(|w| w[0].inertia < w[1].inertia));
    }

    #[test]
    fn attractive_attractive_has_none() {
        let f = ShapeFunction::new(1.0, 0.5, 3.0, 4.5, InteractionMode::AttractiveAttractive)
            .unwrap();
        let sys = ShapeSystem::new([f, f.scaled(1.3), f.scaled(0.8)], crate::MassTriple::equal());
        let grid = default_eta_grid(&sys, 400).unwrap();
        let curves = trace_families(&sys, &grid).unwrap();
        assert_eq!(curves.len(), 1);
        assert!(bifurcation_scan(&curves).is_empty());
    }
}
