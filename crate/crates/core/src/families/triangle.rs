use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::shape::{MassTriple, Pair};

/// Relative band within which the triangle inequality counts as equality.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Default relative tolerance for equal sides in [`ConfigTriple::classify`].
pub const CLASSIFY_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleStatus {
    /// Every side strictly shorter than the sum of the other two.
    NonDegenerate,
    /// Collinear limit: the longest side equals the sum of the others.
    Degenerate,
    Invalid,
}

impl TriangleStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TriangleStatus::NonDegenerate => "nondegenerate",
            TriangleStatus::Degenerate => "degenerate",
            TriangleStatus::Invalid => "invalid",
        }
    }
}

impl fmt::Display for TriangleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleClass {
    Equilateral,
    Isosceles,
    Scalene,
}

impl TriangleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TriangleClass::Equilateral => "equilateral",
            TriangleClass::Isosceles => "isosceles",
            TriangleClass::Scalene => "scalene",
        }
    }
}

impl fmt::Display for TriangleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mutual distances `(r12, r13, r23)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigTriple<T> {
    pub r12: T,
    pub r13: T,
    pub r23: T,
}

impl<T: Real> ConfigTriple<T> {
    pub fn new(r12: T, r13: T, r23: T) -> Result<Self> {
        for r in [r12, r13, r23] {
            if !(r.is_finite() && r > T::zero()) {
                return Err(Error::invalid("distance", "mutual distances must be positive"));
            }
        }
        Ok(ConfigTriple { r12, r13, r23 })
    }

    pub fn from_array(r: [T; 3]) -> Result<Self> {
        Self::new(r[0], r[1], r[2])
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.r12, self.r13, self.r23]
    }

    pub fn get(&self, pair: Pair) -> T {
        self.as_array()[pair.index()]
    }

    /// `(a + b - c) / c` with `c` the longest side; positive for proper triangles.
    pub fn triangle_slack(&self) -> T {
        let mut r = self.as_array();
        r.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        (r[0] + r[1] - r[2]) / r[2]
    }

    pub fn status(&self) -> TriangleStatus {
        let slack = self.triangle_slack();
        let tol = T::tol(DEGENERACY_REL_TOL);
        if slack > tol {
            TriangleStatus::NonDegenerate
        } else if slack >= -tol {
            TriangleStatus::Degenerate
        } else {
            TriangleStatus::Invalid
        }
    }

    /// Moment of inertia `(m1 m2 r12² + m1 m3 r13² + m2 m3 r23²) / M`.
    pub fn inertia(&self, masses: &MassTriple<T>) -> T {
        let weighted = Pair::ALL
            .iter()
            .map(|&p| masses.pair_product(p) * self.get(p) * self.get(p))
            .fold(T::zero(), |acc, x| acc + x);
        weighted / masses.total()
    }

    /// Shape class of a proper triangle, sides compared at relative `rel_tol`.
    pub fn classify(&self, rel_tol: T) -> Result<TriangleClass> {
        let status = self.status();
        if status != TriangleStatus::NonDegenerate {
            return Err(Error::Triangle {
                operation: "classify",
                status,
                r12: self.r12.as_f64(),
                r13: self.r13.as_f64(),
                r23: self.r23.as_f64(),
            });
        }
        let same = |a: T, b: T| (a - b).abs() <= rel_tol * a.max(b);
        let equal_pairs = [
            same(self.r12, self.r13),
            same(self.r12, self.r23),
            same(self.r13, self.r23),
        ]
        .iter()
        .filter(|&&e| e)
        .count();
        Ok(match equal_pairs {
            3 => TriangleClass::Equilateral,
            0 => TriangleClass::Scalene,
            _ => TriangleClass::Isosceles,
        })
    }

    /// Largest relative difference to `other`, side by side.
    pub fn rel_distance(&self, other: &Self) -> T {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(&a, b)| (a - b).abs() / a.max(b))
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inertia_examples() {
        let eq = MassTriple::<f64>::equal();
        let c = ConfigTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!((c.inertia(&eq) - 1.0 / 3.0).abs() < 1e-15);
        let c = ConfigTriple::new(1.0, 1.0, 2.0).unwrap();
        assert!((c.inertia(&eq) - 2.0 / 3.0).abs() < 1e-15);
        let m = MassTriple::<f64>::new(0.5, 0.25, 0.25).unwrap();
        let c = ConfigTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!((c.inertia(&m) - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn status_and_classes() {
        let c = ConfigTriple::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(c.classify(1e-8).unwrap(), TriangleClass::Equilateral);
        let c = ConfigTriple::new(1.2, 1.2, 1.9).unwrap();
        assert_eq!(c.classify(1e-8).unwrap(), TriangleClass::Isosceles);
        let c = ConfigTriple::new(3.0, 4.0, 5.0).unwrap();
        assert_eq!(c.classify(1e-8).unwrap(), TriangleClass::Scalene);

        // Low/high roots of the canonical shape at level 0.05: 2·1.0641 < 2.2245.
        let c = ConfigTriple::new(1.0641, 1.0641, 2.2245).unwrap();
        assert_eq!(c.status(), TriangleStatus::Invalid);
        assert!(c.classify(1e-8).is_err());

        let c = ConfigTriple::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(c.status(), TriangleStatus::Degenerate);
        assert!(matches!(
            c.classify(1e-8),
            Err(Error::Triangle {
                status: TriangleStatus::Degenerate,
                ..
            })
        ));
        assert!(ConfigTriple::new(0.0, 1.0, 1.0).is_err());
    }
}
