//! Per-pair shape functions.
//!
//! For a non-collinear configuration with the centre of mass at the origin,
//! the planar central-configuration equations decouple into one scalar
//! condition per pair of bodies, `f_ij(r_ij) = ω²`. Each `f_ij` has the form
//! `c1·x^-p ∓ c2·x^-q` with `p = α + 2` and `q = β + 2`; the mass factor
//! `M / (m_i m_j)` is folded into the coefficients.

use std::fmt;

use crate::error::{Error, Result};
use crate::roots::{bracketed_root, Tolerance, MAX_ITERATIONS};
use crate::scalar::{rel_eq, Real};

/// Relative band around `f_max` in which a level counts as the coincident
/// root `x_c`.
pub const COINCIDENT_REL_TOL: f64 = 1e-12;

/// Relative tolerance of the proportionality test between pair shapes.
pub const PROPORTIONAL_REL_TOL: f64 = 1e-12;

/// The two exponents of the quasi-homogeneous potential `A/r^α ± B/r^β`.
///
/// In attractive–repulsive mode the repulsive exponent must exceed the
/// attractive one; that ordering is checked where the mode is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair<T> {
    attractive: T,
    repulsive: T,
}

impl<T: Real> ExponentPair<T> {
    pub fn new(attractive: T, repulsive: T) -> Result<Self> {
        if !(attractive.is_finite() && attractive > T::zero()) {
            return Err(Error::invalid("alpha", "must be a positive finite number"));
        }
        if !(repulsive.is_finite() && repulsive > T::zero()) {
            return Err(Error::invalid("beta", "must be a positive finite number"));
        }
        if attractive == repulsive {
            return Err(Error::invalid("beta", "must differ from alpha"));
        }
        Ok(ExponentPair {
            attractive,
            repulsive,
        })
    }

    /// `α`, the exponent of the `A` term.
    pub fn attractive(&self) -> T {
        self.attractive
    }

    /// `β`, the exponent of the `B` term.
    pub fn repulsive(&self) -> T {
        self.repulsive
    }

    /// `α ≥ 1`, the range the family analysis is established for.
    pub fn is_conventional(&self) -> bool {
        self.attractive >= T::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionMode {
    /// `A/r^α − B/r^β`: attraction at long range, repulsion at short range.
    AttractiveRepulsive,
    /// `A/r^α + B/r^β`: both terms attract.
    AttractiveAttractive,
}

impl InteractionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InteractionMode::AttractiveRepulsive => "attractive-repulsive",
            InteractionMode::AttractiveAttractive => "attractive-attractive",
        }
    }
}

impl fmt::Display for InteractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the three pairs of bodies, in the fixed order 12, 13, 23.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Zero-based body indices of the pair.
    pub fn bodies(self) -> (usize, usize) {
        match self {
            Pair::P12 => (0, 1),
            Pair::P13 => (0, 2),
            Pair::P23 => (1, 2),
        }
    }

    pub fn of(i: usize, j: usize) -> Pair {
        match (i.min(j), i.max(j)) {
            (0, 1) => Pair::P12,
            (0, 2) => Pair::P13,
            (1, 2) => Pair::P23,
            _ => panic!("no pair for bodies {i}, {j}"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassTriple<T> {
    masses: [T; 3],
}

impl<T: Real> MassTriple<T> {
    pub fn new(m1: T, m2: T, m3: T) -> Result<Self> {
        const FIELDS: [&str; 3] = ["masses[0]", "masses[1]", "masses[2]"];
        for (m, field) in [m1, m2, m3].into_iter().zip(FIELDS) {
            if !(m.is_finite() && m > T::zero()) {
                return Err(Error::invalid(field, "mass must be a positive finite number"));
            }
        }
        Ok(MassTriple {
            masses: [m1, m2, m3],
        })
    }

    /// Three masses of 1/3, total mass one.
    pub fn equal() -> Self {
        let third = T::one() / T::lit(3.0);
        MassTriple {
            masses: [third; 3],
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        self.masses
    }

    pub fn get(&self, body: usize) -> T {
        self.masses[body]
    }

    pub fn total(&self) -> T {
        self.masses[0] + self.masses[1] + self.masses[2]
    }

    pub fn pair_product(&self, pair: Pair) -> T {
        let (i, j) = pair.bodies();
        self.masses[i] * self.masses[j]
    }
}

/// Coupling constants `A_ij`, `B_ij` indexed by pair (12, 13, 23).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCouplings<T> {
    a: [T; 3],
    b: [T; 3],
    newtonian: bool,
}

impl<T: Real> PairCouplings<T> {
    pub fn new(a: [T; 3], b: [T; 3]) -> Result<Self> {
        const A: [&str; 3] = ["couplings.A[12]", "couplings.A[13]", "couplings.A[23]"];
        const B: [&str; 3] = ["couplings.B[12]", "couplings.B[13]", "couplings.B[23]"];
        for i in 0..3 {
            if !(a[i].is_finite() && a[i] > T::zero()) {
                return Err(Error::invalid(A[i], "coupling must be positive"));
            }
            if !(b[i].is_finite() && b[i] > T::zero()) {
                return Err(Error::invalid(B[i], "coupling must be positive"));
            }
        }
        Ok(PairCouplings {
            a,
            b,
            newtonian: false,
        })
    }

    /// Couplings with the second term switched off (`B = 0`).
    pub fn newtonian(a: [T; 3]) -> Result<Self> {
        let mut c = Self::new(a, [T::one(); 3])?;
        c.b = [T::zero(); 3];
        c.newtonian = true;
        Ok(c)
    }

    /// `(A, B)` on pair 12, `(kA, kB)` on pair 13 and `(k1·A, k1·B)` on 23.
    pub fn proportional(a: T, b: T, k: T, k1: T) -> Result<Self> {
        if !(k.is_finite() && k > T::zero()) {
            return Err(Error::invalid("couplings.k", "must be positive"));
        }
        if !(k1.is_finite() && k1 > T::zero()) {
            return Err(Error::invalid("couplings.k1", "must be positive"));
        }
        Self::new([a, k * a, k1 * a], [b, k * b, k1 * b])
    }

    pub fn a(&self, pair: Pair) -> T {
        self.a[pair.index()]
    }

    pub fn b(&self, pair: Pair) -> T {
        self.b[pair.index()]
    }

    pub fn is_newtonian(&self) -> bool {
        self.newtonian
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    /// Negative near zero, a single positive maximum at `x_c`, zero at infinity.
    TwoBranch,
    /// Strictly decreasing from `+∞` to zero.
    Monotone,
}

/// Root side of a two-branch shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// The root in `(x₀, x_c]`; also the unique root of a monotone shape.
    Low,
    /// The root in `[x_c, ∞)`.
    High,
}

impl Branch {
    pub fn letter(self) -> char {
        match self {
            Branch::Low => 'L',
            Branch::High => 'H',
        }
    }
}

/// The maximiser of a two-branch shape and its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Critical<T> {
    pub x: T,
    pub value: T,
}

/// Solutions of `f(x) = level`.
///
/// Monotone shapes report their unique root as `low`. At level zero the high
/// root of a two-branch shape escapes to infinity, flagged by
/// `high_unbounded`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair<T> {
    pub level: T,
    pub low: Option<T>,
    pub high: Option<T>,
    pub high_unbounded: bool,
}

impl<T: Real> RootPair<T> {
    fn none(level: T) -> Self {
        RootPair {
            level,
            low: None,
            high: None,
            high_unbounded: false,
        }
    }

    pub fn branch(&self, branch: Branch) -> Option<T> {
        match branch {
            Branch::Low => self.low,
            Branch::High => self.high,
        }
    }

    /// Both branches meet at the maximiser.
    pub fn is_coincident(&self) -> bool {
        matches!((self.low, self.high), (Some(l), Some(h)) if l == h)
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFunction<T> {
    c1: T,
    c2: T,
    p: T,
    q: T,
    mode: InteractionMode,
}

impl<T: Real> ShapeFunction<T> {
    pub fn new(c1: T, c2: T, p: T, q: T, mode: InteractionMode) -> Result<Self> {
        if !(c1.is_finite() && c1 > T::zero()) {
            return Err(Error::invalid("c1", "must be positive"));
        }
        if !(c2.is_finite() && c2 >= T::zero()) {
            return Err(Error::invalid("c2", "must be nonnegative"));
        }
        if !(p.is_finite() && p > T::zero() && q.is_finite() && q > T::zero()) {
            return Err(Error::invalid("exponents", "must be positive"));
        }
        if mode == InteractionMode::AttractiveRepulsive && c2 > T::zero() && q <= p {
            return Err(Error::invalid(
                "beta",
                "the repulsive exponent must exceed the attractive one",
            ));
        }
        Ok(ShapeFunction { c1, c2, p, q, mode })
    }

    /// `x^-3 - x^-4`: zero at 1, maximum 27/256 at 4/3.
    pub fn canonical() -> Self {
        ShapeFunction {
            c1: T::one(),
            c2: T::one(),
            p: T::lit(3.0),
            q: T::lit(4.0),
            mode: InteractionMode::AttractiveRepulsive,
        }
    }

    pub fn c1(&self) -> T {
        self.c1
    }
    pub fn c2(&self) -> T {
        self.c2
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn q(&self) -> T {
        self.q
    }
    pub fn mode(&self) -> InteractionMode {
        self.mode
    }

    pub fn kind(&self) -> ShapeKind {
        if self.mode == InteractionMode::AttractiveRepulsive && self.c2 > T::zero() {
            ShapeKind::TwoBranch
        } else {
            ShapeKind::Monotone
        }
    }

    /// Both coefficients multiplied by `s > 0`.
    pub fn scaled(&self, s: T) -> Self {
        ShapeFunction {
            c1: self.c1 * s,
            c2: self.c2 * s,
            ..*self
        }
    }

    /// Same mode and exponents, coefficients within `rel`.
    pub fn approx_eq(&self, other: &Self, rel: T) -> bool {
        self.mode == other.mode
            && self.p == other.p
            && self.q == other.q
            && rel_eq(self.c1, other.c1, rel)
            && rel_eq(self.c2, other.c2, rel)
    }

    /// `f(x)` without the domain check.
    #[inline]
    pub fn value(&self, x: T) -> T {
        let first = self.c1 * x.powf(-self.p);
        let second = self.c2 * x.powf(-self.q);
        match self.mode {
            InteractionMode::AttractiveRepulsive => first - second,
            InteractionMode::AttractiveAttractive => first + second,
        }
    }

    pub fn eval(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::invalid("x", "shape functions are defined for x > 0"));
        }
        Ok(self.value(x))
    }

    /// `f'(x)`.
    pub fn derivative(&self, x: T) -> T {
        let first = -self.p * self.c1 * x.powf(-self.p - T::one());
        let second = -self.q * self.c2 * x.powf(-self.q - T::one());
        match self.mode {
            InteractionMode::AttractiveRepulsive => first - second,
            InteractionMode::AttractiveAttractive => first + second,
        }
    }

    fn require_two_branch(&self, operation: &'static str) -> Result<()> {
        match self.kind() {
            ShapeKind::TwoBranch => Ok(()),
            ShapeKind::Monotone => Err(Error::MonotoneShape { operation }),
        }
    }

    /// The positive zero `x₀ = (c2/c1)^(1/(q-p))`.
    pub fn zero(&self) -> Result<T> {
        self.require_two_branch("shape_zero")?;
        Ok((self.c2 / self.c1).powf(T::one() / (self.q - self.p)))
    }

    /// The maximiser `x_c = (q·c2 / (p·c1))^(1/(q-p))` and `f(x_c)`.
    pub fn critical(&self) -> Result<Critical<T>> {
        self.require_two_branch("shape_crit")?;
        let x = ((self.q * self.c2) / (self.p * self.c1)).powf(T::one() / (self.q - self.p));
        Ok(Critical {
            x,
            value: self.value(x),
        })
    }

    /// Solves `f(x) = level`.
    ///
    /// Two-branch shapes return both roots below `f_max`, the single root
    /// `x_c` within [`COINCIDENT_REL_TOL`] of it and nothing above it. At
    /// level zero only `x₀` is finite. Monotone shapes need `level > 0` and
    /// return their unique root as `low`.
    pub fn solve_level(&self, level: T) -> Result<RootPair<T>> {
        if !level.is_finite() {
            return Err(Error::invalid("eta", "level must be finite"));
        }
        let tol = Tolerance::machine();
        match self.kind() {
            ShapeKind::TwoBranch => {
                if level < T::zero() {
                    return Err(Error::invalid("eta", "level must be nonnegative"));
                }
                let crit = self.critical()?;
                if rel_eq(level, crit.value, T::tol(COINCIDENT_REL_TOL)) {
                    return Ok(RootPair {
                        level,
                        low: Some(crit.x),
                        high: Some(crit.x),
                        high_unbounded: false,
                    });
                }
                if level > crit.value {
                    return Ok(RootPair::none(level));
                }
                let x0 = self.zero()?;
                if level == T::zero() {
                    return Ok(RootPair {
                        level,
                        low: Some(x0),
                        high: None,
                        high_unbounded: true,
                    });
                }
                let g = |x: T| self.value(x) - level;
                // f < 0 on (0, x0), so half of x0 is a safe left end.
                let low = bracketed_root(g, x0 / T::lit(2.0), crit.x, tol)?;
                let mut upper = crit.x * T::lit(2.0);
                let mut doublings = 0;
                while g(upper) > T::zero() {
                    doublings += 1;
                    if doublings > MAX_ITERATIONS || !upper.is_finite() {
                        return Err(Error::BracketFailure {
                            operation: "solve_level",
                            level: level.as_f64(),
                            doublings,
                        });
                    }
                    upper = upper * T::lit(2.0);
                }
                let high = bracketed_root(g, crit.x, upper, tol)?;
                Ok(RootPair {
                    level,
                    low: Some(low),
                    high: Some(high),
                    high_unbounded: false,
                })
            }
            ShapeKind::Monotone => {
                if level <= T::zero() {
                    return Err(Error::invalid(
                        "eta",
                        "level must be positive for a monotone shape",
                    ));
                }
                let g = |x: T| self.value(x) - level;
                let two = T::lit(2.0);
                let (mut lo, mut hi) = (T::one(), T::one());
                let mut doublings = 0;
                let fail = |doublings| Error::BracketFailure {
                    operation: "solve_level",
                    level: level.as_f64(),
                    doublings,
                };
                if g(T::one()) > T::zero() {
                    while g(hi) > T::zero() {
                        doublings += 1;
                        if doublings > MAX_ITERATIONS || !hi.is_finite() {
                            return Err(fail(doublings));
                        }
                        lo = hi;
                        hi = hi * two;
                    }
                } else {
                    while g(lo) < T::zero() {
                        doublings += 1;
                        if doublings > MAX_ITERATIONS || lo == T::zero() {
                            return Err(fail(doublings));
                        }
                        hi = lo;
                        lo = lo / two;
                    }
                }
                let root = bracketed_root(g, lo, hi, tol)?;
                Ok(RootPair {
                    level,
                    low: Some(root),
                    high: None,
                    high_unbounded: false,
                })
            }
        }
    }
}

/// The three pair shapes of a system together with their scaling ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSet<T> {
    pub shapes: [ShapeFunction<T>; 3],
    /// `c1(13) / c1(12)`.
    pub k: T,
    /// `c1(23) / c1(12)`.
    pub k1: T,
    /// The second coefficients scale by the same `k`, `k1`, i.e. the pair
    /// shapes are multiples of one another.
    pub proportional: bool,
}

impl<T: Real> ShapeSet<T> {
    pub fn from_shapes(shapes: [ShapeFunction<T>; 3]) -> Self {
        let [s12, s13, s23] = shapes;
        let k = s13.c1 / s12.c1;
        let k1 = s23.c1 / s12.c1;
        let tol = T::tol(PROPORTIONAL_REL_TOL);
        let proportional = s12.mode == s13.mode
            && s12.mode == s23.mode
            && s12.p == s13.p
            && s12.p == s23.p
            && s12.q == s13.q
            && s12.q == s23.q
            && if s12.c2 == T::zero() {
                s13.c2 == T::zero() && s23.c2 == T::zero()
            } else {
                rel_eq(s13.c2 / s12.c2, k, tol) && rel_eq(s23.c2 / s12.c2, k1, tol)
            };
        ShapeSet {
            shapes,
            k,
            k1,
            proportional,
        }
    }

    pub fn get(&self, pair: Pair) -> &ShapeFunction<T> {
        &self.shapes[pair.index()]
    }
}

/// Builds the pair shapes `c1 = M·α·A_ij/(m_i m_j)`, `c2 = M·β·B_ij/(m_i m_j)`,
/// `p = α + 2`, `q = β + 2`.
pub fn build_shapes<T: Real>(
    masses: &MassTriple<T>,
    couplings: &PairCouplings<T>,
    exps: &ExponentPair<T>,
    mode: InteractionMode,
) -> Result<ShapeSet<T>> {
    let alpha = exps.attractive();
    let beta = exps.repulsive();
    if mode == InteractionMode::AttractiveRepulsive && !couplings.is_newtonian() && beta <= alpha
    {
        return Err(Error::invalid(
            "beta",
            "attractive-repulsive mode requires beta > alpha",
        ));
    }
    let total = masses.total();
    let two = T::lit(2.0);
    let mut shapes = [ShapeFunction::canonical(); 3];
    for pair in Pair::ALL {
        let weight = total / masses.pair_product(pair);
        shapes[pair.index()] = ShapeFunction::new(
            weight * alpha * couplings.a(pair),
            weight * beta * couplings.b(pair),
            alpha + two,
            beta + two,
            mode,
        )?;
    }
    Ok(ShapeSet::from_shapes(shapes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m) > 0.0) == (fa > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..300 {
            let x1 = b - r * (b - a);
            let x2 = a + r * (b - a);
            if f(x1) < f(x2) {
                a = x1;
            } else {
                b = x2;
            }
        }
        0.5 * (a + b)
    }

    fn shape(c1: f64, c2: f64, p: f64, q: f64) -> ShapeFunction<f64> {
        ShapeFunction::new(c1, c2, p, q, InteractionMode::AttractiveRepulsive).unwrap()
    }

    #[test]
    fn equal_masses_unit_couplings() {
        let set = build_shapes(
            &MassTriple::<f64>::equal(),
            &PairCouplings::new([1.0; 3], [1.0; 3]).unwrap(),
            &ExponentPair::new(1.0, 2.0).unwrap(),
            InteractionMode::AttractiveRepulsive,
        )
        .unwrap();
        for s in set.shapes {
            assert!((s.c1() - 9.0).abs() < 1e-12);
            assert!((s.c2() - 18.0).abs() < 1e-12);
            assert_eq!((s.p(), s.q()), (3.0, 4.0));
            assert_eq!(s.kind(), ShapeKind::TwoBranch);
        }
        assert!((set.k - 1.0).abs() < 1e-15 && (set.k1 - 1.0).abs() < 1e-15);
        assert!(set.proportional);
    }

    #[test]
    fn proportionality_flag() {
        let m = MassTriple::<f64>::equal();
        let e = ExponentPair::new(1.0, 2.0).unwrap();
        let mode = InteractionMode::AttractiveRepulsive;
        let c = PairCouplings::new([1.0, 1.0, 2.0], [1.0, 1.0, 2.0]).unwrap();
        let set = build_shapes(&m, &c, &e, mode).unwrap();
        assert!((set.k - 1.0).abs() < 1e-15);
        assert!((set.k1 - 2.0).abs() < 1e-15);
        assert!(set.proportional);

        let c = PairCouplings::new([1.0, 1.0, 2.0], [1.0, 1.0, 3.0]).unwrap();
        assert!(!build_shapes(&m, &c, &e, mode).unwrap().proportional);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ExponentPair::new(2.0, 2.0).is_err());
        assert!(ExponentPair::new(-1.0, 2.0).is_err());
        assert!(MassTriple::new(1.0, 0.0, 1.0).is_err());
        assert!(MassTriple::new(1.0, 1.0, -2.0).is_err());
        assert!(PairCouplings::new([1.0, 0.0, 1.0], [1.0; 3]).is_err());
        assert!(PairCouplings::new([1.0; 3], [1.0, 1.0, -1.0]).is_err());
        let err = build_shapes(
            &MassTriple::<f64>::equal(),
            &PairCouplings::new([1.0; 3], [1.0; 3]).unwrap(),
            &ExponentPair::new(2.0, 1.0).unwrap(),
            InteractionMode::AttractiveRepulsive,
        )
        .unwrap_err();
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn newtonian_limit_is_monotone() {
        let set = build_shapes(
            &MassTriple::equal(),
            &PairCouplings::newtonian([1.0; 3]).unwrap(),
            &ExponentPair::new(1.0, 2.0).unwrap(),
            InteractionMode::AttractiveRepulsive,
        )
        .unwrap();
        assert!(set.shapes.iter().all(|s| s.kind() == ShapeKind::Monotone));
        assert!(set.proportional);
    }

    #[test]
    fn eval_examples() {
        let s = ShapeFunction::<f64>::canonical();
        assert_eq!(s.eval(1.0).unwrap(), 0.0);
        assert_eq!(s.eval(2.0).unwrap(), 0.0625);
        assert!(s.eval(0.0).is_err());
        assert!(s.eval(-1.0).is_err());
        let aa = ShapeFunction::<f64>::new(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveAttractive)
            .unwrap();
        assert_eq!(aa.eval(1.0).unwrap(), 2.0);
        assert_eq!(aa.kind(), ShapeKind::Monotone);
    }

    #[test]
    fn zero_against_bisection() {
        let s = ShapeFunction::<f64>::canonical();
        assert!((s.zero().unwrap() - 1.0).abs() < 1e-15);

        let s = shape(1.0, 2.0, 3.0, 4.0);
        let oracle = bisect(|x| s.value(x), 1.0, 3.0);
        assert!((oracle - 2.0).abs() < 1e-12);
        assert!((s.zero().unwrap() - oracle).abs() < 1e-12);
        assert!(s.value(s.zero().unwrap()).abs() < 1e-14);

        let s = shape(4.0, 1.0, 3.0, 5.0);
        let oracle = bisect(|x| s.value(x), 0.1, 3.0);
        assert!((oracle - 0.5).abs() < 1e-12);
        assert!((s.zero().unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn critical_against_golden_section() {
        let s = ShapeFunction::<f64>::canonical();
        let c = s.critical().unwrap();
        let oracle = golden_max(|x| s.value(x), 1.0, 10.0);
        assert!((c.x - oracle).abs() < 1e-7);
        assert!((c.x - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.value - 27.0 / 256.0).abs() < 1e-15);
        assert!((s.value(oracle) - 27.0 / 256.0).abs() < 1e-10);
        // f' vanishes at x_c (central difference).
        let h = 1e-6;
        let fd = (s.value(c.x + h) - s.value(c.x - h)) / (2.0 * h);
        assert!(fd.abs() <= 1e-10 * c.value.max(1.0));

        let s = shape(1.0, 2.0, 3.0, 4.0);
        let oracle = golden_max(|x| s.value(x), 2.0, 20.0);
        assert!((oracle - 8.0 / 3.0).abs() < 1e-7);
        assert!((s.critical().unwrap().x - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_rejects_zero_and_crit() {
        let s = ShapeFunction::new(1.0, 0.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive)
            .unwrap();
        assert!(matches!(s.zero(), Err(Error::MonotoneShape { .. })));
        assert!(matches!(s.critical(), Err(Error::MonotoneShape { .. })));
    }

    #[test]
    fn level_examples() {
        let s = ShapeFunction::<f64>::canonical();
        let r = s.solve_level(0.05).unwrap();
        let low = r.low.unwrap();
        let high = r.high.unwrap();
        let lo_oracle = bisect(|x| s.value(x) - 0.05, 1.0, 4.0 / 3.0);
        let hi_oracle = bisect(|x| s.value(x) - 0.05, 4.0 / 3.0, 10.0);
        assert!((low - lo_oracle).abs() < 1e-12);
        assert!((high - hi_oracle).abs() < 1e-12);
        assert!((low - 1.064108).abs() < 1e-6);
        assert!((high - 2.224639).abs() < 1e-6);
        assert!((s.value(low) - 0.05).abs() <= 1e-12);
        assert!((s.value(high) - 0.05).abs() <= 1e-12);

        let r = s.solve_level(27.0 / 256.0).unwrap();
        assert!(r.is_coincident());
        assert_eq!(r.low.unwrap(), s.critical().unwrap().x);

        assert!(s.solve_level(0.2).unwrap().is_empty());

        let r = s.solve_level(0.0).unwrap();
        assert_eq!(r.low, Some(1.0));
        assert!(r.high.is_none() && r.high_unbounded);

        assert!(s.solve_level(-0.1).is_err());

        let aa = ShapeFunction::<f64>::new(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveAttractive)
            .unwrap();
        let r = aa.solve_level(2.0).unwrap();
        assert!((r.low.unwrap() - 1.0).abs() < 1e-15);
        assert!(r.high.is_none());
        assert!(aa.solve_level(0.0).is_err());
    }

    #[test]
    fn f32_shapes() {
        let s = ShapeFunction::<f32>::canonical();
        let c = s.critical().unwrap();
        assert!((c.x - 4.0 / 3.0).abs() < 1e-6);
        let r = s.solve_level(0.05).unwrap();
        assert!((r.low.unwrap() - 1.0641).abs() < 1e-3);
        assert!((r.high.unwrap() - 2.2245).abs() < 1e-3);
    }
}
