//! Non-collinear central configurations as branch-combination families.
//!
//! At a common level `η = ω²` every pair distance is a root of its own
//! shape function. Choosing the low or high root per pair gives up to eight
//! candidate triangles; identical shapes make some of them congruent, so the
//! labels are collapsed under the symmetry group of the shape triple. Each
//! family is traced over `η`, filtered by the triangle inequality, and its
//! moment of inertia curve is scanned for the values where the number of
//! equilibria changes.

mod bifurcation;
mod count;
mod curve;
mod label;
mod triangle;

pub use bifurcation::{bifurcation_scan, BifurcationKind, BifurcationPoint, MERGE_TOL};
pub use count::{count_at_inertia, solutions_at_level, Solution, RESIDUAL_TOL};
pub use curve::{
    default_eta_grid, sample_family, trace_families, CurveEvent, FamilyCurve, FamilySample,
    MonotoneSegment, Trend, ValidityInterval, DEFAULT_GRID_POINTS,
};
pub use label::{canonical_label, curve_number, enumerate_families, symmetry_group, FamilyLabel};
pub use triangle::{
    ConfigTriple, TriangleClass, TriangleStatus, CLASSIFY_REL_TOL, DEGENERACY_REL_TOL,
};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::shape::{
    build_shapes, ExponentPair, InteractionMode, MassTriple, PairCouplings, RootPair,
    ShapeFunction, ShapeKind,
};

/// Pair shapes plus the masses that weight the moment of inertia.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSystem<T> {
    pub shapes: [ShapeFunction<T>; 3],
    pub masses: MassTriple<T>,
}

impl<T: Real> ShapeSystem<T> {
    pub fn new(shapes: [ShapeFunction<T>; 3], masses: MassTriple<T>) -> Self {
        ShapeSystem { shapes, masses }
    }

    /// Three canonical shapes `x^-3 - x^-4` with equal masses 1/3.
    pub fn canonical() -> Self {
        Self::new([ShapeFunction::canonical(); 3], MassTriple::equal())
    }

    pub fn from_physical(
        masses: MassTriple<T>,
        couplings: &PairCouplings<T>,
        exps: &ExponentPair<T>,
        mode: InteractionMode,
    ) -> Result<Self> {
        let set = build_shapes(&masses, couplings, exps, mode)?;
        Ok(Self::new(set.shapes, masses))
    }

    /// Smallest `f_max` over the two-branch pairs; `None` if all are monotone.
    pub fn level_ceiling(&self) -> Option<T> {
        self.shapes
            .iter()
            .filter(|s| s.kind() == ShapeKind::TwoBranch)
            .filter_map(|s| s.critical().ok())
            .map(|c| c.value)
            .reduce(T::min)
    }

    pub fn roots(&self, eta: T) -> Result<[RootPair<T>; 3]> {
        Ok([
            self.shapes[0].solve_level(eta)?,
            self.shapes[1].solve_level(eta)?,
            self.shapes[2].solve_level(eta)?,
        ])
    }

    /// The configuration of family `label` at level `eta`, or `None` when a
    /// required root does not exist. The flag reports whether some pair sits
    /// at its coincident root.
    pub fn config(&self, label: FamilyLabel, eta: T) -> Result<Option<(ConfigTriple<T>, bool)>> {
        let roots = self.roots(eta)?;
        let mut sides = [T::zero(); 3];
        let mut meeting = false;
        for (i, (r, b)) in roots.iter().zip(label.branches()).enumerate() {
            match r.branch(b) {
                Some(x) => sides[i] = x,
                None => return Ok(None),
            }
            meeting |= r.is_coincident();
        }
        Ok(Some((ConfigTriple::from_array(sides)?, meeting)))
    }

    /// Largest per-pair `|f(r) - η|`, scaled by `max(1, η)`.
    pub fn residual(&self, config: &ConfigTriple<T>, eta: T) -> T {
        let scale = T::one().max(eta.abs());
        self.shapes
            .iter()
            .zip(config.as_array())
            .map(|(s, r)| (s.value(r) - eta).abs() / scale)
            .fold(T::zero(), T::max)
    }
}

/// Scaling `k` at which the high root of `k·f` at the meeting level
/// `f(x_c)` equals `2·x_c`: `f(x_c) / f(2·x_c)`.
///
/// Beyond it an isosceles triangle with two sides at `x_c` and the third on
/// the high branch of `k·f` violates the triangle inequality.
pub fn k_tilde<T: Real>(base: &ShapeFunction<T>) -> Result<T> {
    if base.kind() != ShapeKind::TwoBranch {
        return Err(Error::MonotoneShape {
            operation: "k_tilde",
        });
    }
    let crit = base.critical()?;
    Ok(crit.value / base.value(crit.x * T::lit(2.0)))
}
