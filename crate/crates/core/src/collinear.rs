//! Collinear central configurations by multistart damped Newton.
//!
//! For a left-to-right body order the unknowns are the two gaps
//! `g1 = s_mid - s_left`, `g2 = s_right - s_mid`; the mass centre is pinned
//! at the origin, which leaves two independent scalar equations (those of
//! the outer bodies). Newton runs in `ln g` so the gaps stay positive.

use rayon::prelude::*;

use crate::dynamics::{cc_residual, PlanarState, PotentialModel, Vec2, Weighting};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::shape::{build_shapes, Pair, ShapeKind};

pub const DEFAULT_MULTISTART: usize = 16;
pub const MIN_MULTISTART: usize = 8;
/// Converged solutions closer than this (relative, in both gaps) are merged.
pub const DEDUP_REL_TOL: f64 = 1e-8;
/// Largest accepted residual of a returned solution.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;
pub const MIN_GAP: f64 = 1e-10;
/// `|det J| / |J|²` below this marks a fold (double root).
pub const FOLD_TOL: f64 = 1e-6;

const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 40;
const MAX_LOG_STEP: f64 = 2.0;
const LOG_GAP_LIMIT: f64 = 40.0;
const FD_STEP: f64 = 1e-7;
// Gap ratios are seeded over `[1/R, R]` in log space.
const RATIO_SPAN: f64 = 32.0;
const SPAN_FACTORS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Bodies (0-based) from left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineOrder(pub [usize; 3]);

impl LineOrder {
    /// One representative per reflection class: middle body 2, 3, 1.
    pub const MOD_REFLECTION: [LineOrder; 3] =
        [LineOrder([0, 1, 2]), LineOrder([0, 2, 1]), LineOrder([1, 0, 2])];

    pub fn new(order: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &b in &order {
            if b > 2 || seen[b] {
                return Err(Error::invalid("ordering", format!("{order:?} is not a permutation of bodies")));
            }
            seen[b] = true;
        }
        Ok(LineOrder(order))
    }

    pub fn reflected(self) -> Self {
        let [a, b, c] = self.0;
        LineOrder([c, b, a])
    }

    pub fn middle(self) -> usize {
        self.0[1]
    }
}

impl std::fmt::Display for LineOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{}-{}-{}", a + 1, b + 1, c + 1)
    }
}

/// A collinear central configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineConfig<T> {
    /// Signed position of each body (indexed by body).
    pub s: [T; 3],
    pub order: LineOrder,
    /// Normalised residual of the central-configuration condition.
    pub residual: T,
    /// The Jacobian is nearly singular here.
    pub fold: bool,
}

impl<T: Real> LineConfig<T> {
    pub fn gaps(&self) -> [T; 2] {
        let [a, b, c] = self.order.0;
        [self.s[b] - self.s[a], self.s[c] - self.s[b]]
    }

    pub fn distances(&self) -> [T; 3] {
        Pair::ALL.map(|p| {
            let (i, j) = p.bodies();
            (self.s[i] - self.s[j]).abs()
        })
    }

    /// Positions on the x-axis, at rest.
    pub fn planar(&self) -> PlanarState<T> {
        PlanarState::at_rest(self.s.map(|x| Vec2::new(x, T::zero())))
    }

    pub fn reflected(&self) -> Self {
        LineConfig {
            s: self.s.map(|x| -x),
            order: self.order.reflected(),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderSolutions<T> {
    pub order: LineOrder,
    pub solutions: Vec<LineConfig<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollinearCount<T> {
    pub omega_sq: T,
    /// Number of configurations over the orders modulo reflection.
    pub total: usize,
    pub per_order: Vec<OrderSolutions<T>>,
}

impl<T: Real> CollinearCount<T> {
    pub fn solutions(&self) -> impl Iterator<Item = &LineConfig<T>> {
        self.per_order.iter().flat_map(|o| o.solutions.iter())
    }

    pub fn folds(&self) -> usize {
        self.solutions().filter(|s| s.fold).count()
    }
}

struct Problem<'a, T> {
    model: &'a PotentialModel<T>,
    order: LineOrder,
    omega_sq: T,
}

impl<T: Real> Problem<'_, T> {
    fn positions(&self, g: [T; 2]) -> [T; 3] {
        let m = self.model.masses;
        let [a, b, c] = self.order.0;
        let left = -(m.get(b) * g[0] + m.get(c) * (g[0] + g[1])) / m.total();
        let mut s = [T::zero(); 3];
        s[a] = left;
        s[b] = left + g[0];
        s[c] = left + g[0] + g[1];
        s
    }

    /// Raw force balance `∇_i V - ω² m_i s_i` of the outer bodies together
    /// with the normalised residual over all three bodies.
    fn residual(&self, u: [T; 2]) -> Option<([T; 2], T)> {
        let g = u.map(T::exp);
        if g.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
            return None;
        }
        let s = self.positions(g);
        let mut raw = [T::zero(); 3];
        let mut norm = T::zero();
        for i in 0..3 {
            let mut grad = T::zero();
            for j in 0..3 {
                if i != j {
                    let d = s[i] - s[j];
                    grad = grad + self.model.radial_factor(Pair::of(i, j), d.abs()) * d;
                }
            }
            let centripetal = self.omega_sq * self.model.inertial_mass(i) * s[i];
            raw[i] = grad - centripetal;
            norm = norm.max(raw[i].abs() / (T::one() + centripetal.abs()));
        }
        let [a, _, c] = self.order.0;
        let out = [raw[a], raw[c]];
        if out.iter().all(|x| x.is_finite()) && norm.is_finite() {
            Some((out, norm))
        } else {
            None
        }
    }

    fn jacobian(&self, u: [T; 2]) -> Option<[[T; 2]; 2]> {
        let h = T::lit(FD_STEP);
        let mut jac = [[T::zero(); 2]; 2];
        for k in 0..2 {
            let (mut up, mut dn) = (u, u);
            up[k] = up[k] + h;
            dn[k] = dn[k] - h;
            let (rp, _) = self.residual(up)?;
            let (rm, _) = self.residual(dn)?;
            for i in 0..2 {
                jac[i][k] = (rp[i] - rm[i]) / (h + h);
            }
        }
        Some(jac)
    }

    fn is_fold(jac: &[[T; 2]; 2]) -> bool {
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let frob = jac.iter().flatten().fold(T::zero(), |s, x| s + *x * *x);
        !(frob > T::zero()) || det.abs() <= T::lit(FOLD_TOL) * frob
    }

    /// Damped Newton from `u`; returns the converged log-gaps.
    fn newton(&self, mut u: [T; 2], seed_index: usize) -> Option<([T; 2], T)> {
        let sq = |r: [T; 2]| r[0] * r[0] + r[1] * r[1];
        let (mut r, mut norm) = self.residual(u)?;
        let target = T::tol(1e-14);
        let mut perturbations = 0;
        for _ in 0..MAX_NEWTON {
            if norm <= target {
                break;
            }
            let jac = self.jacobian(u)?;
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let frob = jac.iter().flatten().fold(T::zero(), |s, x| s + *x * *x);
            if !(det.abs() > T::epsilon() * frob) {
                // singular Jacobian: nudge the iterate deterministically
                if perturbations >= 4 {
                    break;
                }
                perturbations += 1;
                let nudge = T::lit(1e-3 * (1 + (seed_index + perturbations) % 7) as f64);
                u = [u[0] + nudge, u[1] - nudge];
                (r, norm) = self.residual(u)?;
                continue;
            }
            let mut step = [
                -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
            ];
            let len = step[0].abs().max(step[1].abs());
            if len > T::lit(MAX_LOG_STEP) {
                let s = T::lit(MAX_LOG_STEP) / len;
                step = [step[0] * s, step[1] * s];
            }
            let f0 = sq(r);
            let mut lambda = T::one();
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial = [u[0] + lambda * step[0], u[1] + lambda * step[1]];
                if let Some((rt, nt)) = self.residual(trial) {
                    if sq(rt) < f0 * (T::one() - T::lit(1e-4) * lambda) || nt <= target {
                        accepted = Some((trial, rt, nt));
                        break;
                    }
                }
                lambda = lambda * T::lit(0.5);
            }
            let (trial, rt, nt) = accepted?;
            let moved = (trial[0] - u[0]).abs().max((trial[1] - u[1]).abs());
            u = trial;
            r = rt;
            norm = nt;
            if u.iter().any(|x| x.abs() > T::lit(LOG_GAP_LIMIT)) {
                return None;
            }
            if moved <= T::lit(4.0) * T::epsilon() {
                break;
            }
        }
        Some((u, norm))
    }
}

/// Characteristic lengths for seeding: every pair's roots at `omega_sq`
/// plus its zero and maximiser.
fn reference_lengths<T: Real>(model: &PotentialModel<T>, omega_sq: T) -> Result<Vec<T>> {
    let set = build_shapes(&model.masses, &model.couplings, &model.exps, model.mode)?;
    let mut out = Vec::new();
    for shape in &set.shapes {
        let roots = shape.solve_level(omega_sq)?;
        out.extend([roots.low, roots.high].into_iter().flatten());
        if shape.kind() == ShapeKind::TwoBranch {
            out.push(shape.zero()?);
            out.push(shape.critical()?.x);
        }
    }
    out.retain(|x| x.is_finite() && *x > T::zero());
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite lengths"));
    out.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-3) * *b);
    if out.is_empty() {
        out.push(T::one());
    }
    Ok(out)
}

/// Base-2 van der Corput sequence: every prefix of length `2^k` refines the
/// shorter ones, so more seeds always include the earlier seeds.
fn van_der_corput(mut n: usize) -> f64 {
    let (mut q, mut denom) = (0.0, 1.0);
    while n > 0 {
        denom *= 2.0;
        q += (n & 1) as f64 / denom;
        n >>= 1;
    }
    q
}

fn check_inputs<T: Real>(omega_sq: T, multistart: usize) -> Result<()> {
    if !(omega_sq > T::zero()) || !omega_sq.is_finite() {
        return Err(Error::invalid("omega_sq", "must be positive and finite"));
    }
    if multistart < MIN_MULTISTART {
        return Err(Error::invalid(
            "multistart_count",
            format!("must be at least {MIN_MULTISTART}"),
        ));
    }
    Ok(())
}

/// All collinear central configurations with the given body order.
///
/// Solutions are sorted by the first gap. The mass-weighted condition is
/// always used, whatever the model's weighting.
pub fn solve_collinear<T: Real>(
    order: LineOrder,
    model: &PotentialModel<T>,
    omega_sq: T,
    multistart: usize,
) -> Result<Vec<LineConfig<T>>> {
    check_inputs(omega_sq, multistart)?;
    let model = model.with_weighting(Weighting::MassWeighted);
    let problem = Problem {
        model: &model,
        order,
        omega_sq,
    };
    let lengths = reference_lengths(&model, omega_sq)?;
    let mut seeds = Vec::with_capacity(multistart * lengths.len() * SPAN_FACTORS.len());
    for n in 1..=multistart {
        let log_ratio = (2.0 * van_der_corput(n) - 1.0) * RATIO_SPAN.ln();
        let ratio = T::lit(log_ratio.exp());
        for &len in &lengths {
            for &f in &SPAN_FACTORS {
                let span = len * T::lit(f);
                let g1 = span / (T::one() + ratio);
                seeds.push([g1.ln(), (g1 * ratio).ln()]);
            }
        }
    }

    let converged: Vec<Option<LineConfig<T>>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let (u, _) = problem.newton(u, i)?;
            let g = u.map(T::exp);
            if g.iter().any(|x| *x <= T::lit(MIN_GAP)) {
                return None;
            }
            let s = problem.positions(g);
            let mut config = LineConfig {
                s,
                order,
                residual: T::zero(),
                fold: false,
            };
            config.residual = cc_residual(&config.planar(), &model, omega_sq).ok()?;
            if !(config.residual <= T::tol(ACCEPT_RESIDUAL)) {
                return None;
            }
            config.fold = Problem::is_fold(&problem.jacobian(u)?);
            Some(config)
        })
        .collect();

    let tol = T::tol(DEDUP_REL_TOL);
    let mut out: Vec<LineConfig<T>> = Vec::new();
    for c in converged.into_iter().flatten() {
        let g = c.gaps();
        let duplicate = out.iter().any(|o| {
            let h = o.gaps();
            (0..2).all(|k| (g[k] - h[k]).abs() <= tol * g[k].max(h[k]))
        });
        if !duplicate {
            out.push(c);
        }
    }
    out.sort_by(|a, b| {
        let (ga, gb) = (a.gaps(), b.gaps());
        ga[0].partial_cmp(&gb[0])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ga[1].partial_cmp(&gb[1]).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// Collinear configurations over the three orders modulo reflection.
pub fn count_collinear<T: Real>(
    model: &PotentialModel<T>,
    omega_sq: T,
    multistart: usize,
) -> Result<CollinearCount<T>> {
    let per_order = LineOrder::MOD_REFLECTION
        .iter()
        .map(|&order| {
            Ok(OrderSolutions {
                order,
                solutions: solve_collinear(order, model, omega_sq, multistart)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollinearCount {
        omega_sq,
        total: per_order.iter().map(|o| o.solutions.len()).sum(),
        per_order,
    })
}
