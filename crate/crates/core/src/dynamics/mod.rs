//! Planar three-body dynamics for verifying relative equilibria.
//!
//! The potential energy is stored with the sign that makes the `A` term
//! attractive: `V = Σ (-A r^-α + B r^-β)` in attractive–repulsive mode and
//! `V = Σ (-A r^-α - B r^-β)` in attractive–attractive mode. The equations
//! of motion are `m_i q̈_i = -∇_i V` and a central configuration satisfies
//! `∇_i V = ω² m_i q_i` for every body.

mod integrate;
mod vec2;

pub use integrate::{
    integrate, periodicity_error, IntegrationStats, IntegratorOptions, Periodicity, Trajectory,
};
pub use vec2::Vec2;

use crate::error::{Error, Result};
use crate::families::{ConfigTriple, TriangleStatus};
use crate::scalar::Real;
use crate::shape::{ExponentPair, InteractionMode, MassTriple, Pair, PairCouplings};

/// Bodies closer than this are treated as a collision.
pub const MIN_SEPARATION: f64 = 1e-13;

/// How masses enter the equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// `m_i q̈_i = -∇_i V`; consistent with a fixed mass-weighted centroid.
    #[default]
    MassWeighted,
    /// `q̈_i = -∇_i V` with unit masses in the dynamics, as written for the
    /// unweighted equations of motion. Only consistent with the centroid
    /// constraint when the masses are equal.
    Literal,
}

/// Positions and velocities of the three bodies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarState<T> {
    pub positions: [Vec2<T>; 3],
    pub velocities: [Vec2<T>; 3],
}

impl<T: Real> PlanarState<T> {
    pub fn at_rest(positions: [Vec2<T>; 3]) -> Self {
        PlanarState {
            positions,
            velocities: [Vec2::zero(); 3],
        }
    }

    pub fn distance(&self, pair: Pair) -> T {
        let (i, j) = pair.bodies();
        (self.positions[i] - self.positions[j]).norm()
    }

    pub fn distances(&self) -> [T; 3] {
        Pair::ALL.map(|p| self.distance(p))
    }

    /// `Σ m_i q_i`.
    pub fn mass_moment(&self, masses: &MassTriple<T>) -> Vec2<T> {
        (0..3).fold(Vec2::zero(), |acc, i| acc + self.positions[i] * masses.get(i))
    }

    pub(crate) fn to_phase(self) -> [T; 12] {
        let mut y = [T::zero(); 12];
        for i in 0..3 {
            y[2 * i] = self.positions[i].x;
            y[2 * i + 1] = self.positions[i].y;
            y[6 + 2 * i] = self.velocities[i].x;
            y[6 + 2 * i + 1] = self.velocities[i].y;
        }
        y
    }

    pub(crate) fn from_phase(y: &[T; 12]) -> Self {
        let v = |k: usize| Vec2::new(y[k], y[k + 1]);
        PlanarState {
            positions: [v(0), v(2), v(4)],
            velocities: [v(6), v(8), v(10)],
        }
    }
}

/// Everything needed to evaluate forces: masses, couplings, exponents, mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialModel<T> {
    pub masses: MassTriple<T>,
    pub couplings: PairCouplings<T>,
    pub exps: ExponentPair<T>,
    pub mode: InteractionMode,
    pub weighting: Weighting,
}

impl<T: Real> PotentialModel<T> {
    pub fn new(
        masses: MassTriple<T>,
        couplings: PairCouplings<T>,
        exps: ExponentPair<T>,
        mode: InteractionMode,
    ) -> Self {
        PotentialModel {
            masses,
            couplings,
            exps,
            mode,
            weighting: Weighting::MassWeighted,
        }
    }

    /// Masses 1/3, `A = 1/9`, `B = 1/18`, `α = 1`, `β = 2`: every pair shape
    /// is `x^-3 - x^-4`.
    pub fn canonical() -> Self {
        let ninth = T::one() / T::lit(9.0);
        let eighteenth = T::one() / T::lit(18.0);
        Self::new(
            MassTriple::equal(),
            PairCouplings::new([ninth; 3], [eighteenth; 3]).expect("positive couplings"),
            ExponentPair::new(T::one(), T::lit(2.0)).expect("distinct exponents"),
            InteractionMode::AttractiveRepulsive,
        )
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    /// Mass of body `i` as it appears in the equations of motion.
    pub fn inertial_mass(&self, i: usize) -> T {
        match self.weighting {
            Weighting::MassWeighted => self.masses.get(i),
            Weighting::Literal => T::one(),
        }
    }

    fn sign(&self) -> T {
        match self.mode {
            InteractionMode::AttractiveRepulsive => T::one(),
            InteractionMode::AttractiveAttractive => -T::one(),
        }
    }

    /// `(dV/dr) / r` for one pair.
    pub fn radial_factor(&self, pair: Pair, r: T) -> T {
        let alpha = self.exps.attractive();
        let beta = self.exps.repulsive();
        let two = T::lit(2.0);
        alpha * self.couplings.a(pair) * r.powf(-alpha - two)
            - self.sign() * beta * self.couplings.b(pair) * r.powf(-beta - two)
    }

    /// Pair energy split into its `A` and `B` contributions.
    fn pair_energy(&self, pair: Pair, r: T) -> (T, T) {
        let a = -self.couplings.a(pair) * r.powf(-self.exps.attractive());
        let b = self.sign() * self.couplings.b(pair) * r.powf(-self.exps.repulsive());
        (a, b)
    }

    fn check_separation(&self, positions: &[Vec2<T>; 3]) -> Result<()> {
        for pair in Pair::ALL {
            let (i, j) = pair.bodies();
            let r = (positions[i] - positions[j]).norm();
            if !(r >= T::lit(MIN_SEPARATION)) {
                return Err(Error::CoincidentBodies {
                    i: i + 1,
                    j: j + 1,
                    distance: r.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn potential_energy(&self, positions: &[Vec2<T>; 3]) -> Result<T> {
        self.check_separation(positions)?;
        Ok(Pair::ALL
            .iter()
            .map(|&p| {
                let (i, j) = p.bodies();
                let (a, b) = self.pair_energy(p, (positions[i] - positions[j]).norm());
                a + b
            })
            .fold(T::zero(), |s, x| s + x))
    }

    pub(crate) fn gradient_unchecked(&self, positions: &[Vec2<T>; 3]) -> [Vec2<T>; 3] {
        let mut grad = [Vec2::zero(); 3];
        for pair in Pair::ALL {
            let (i, j) = pair.bodies();
            let d = positions[i] - positions[j];
            let g = d * self.radial_factor(pair, d.norm());
            grad[i] += g;
            grad[j] -= g;
        }
        grad
    }

    pub fn kinetic_energy(&self, state: &PlanarState<T>) -> T {
        let half = T::lit(0.5);
        (0..3)
            .map(|i| half * self.inertial_mass(i) * state.velocities[i].dot(state.velocities[i]))
            .fold(T::zero(), |s, x| s + x)
    }

    /// Total energy and a magnitude scale (kinetic energy plus the absolute
    /// values of every potential term) for relative drift measurements.
    pub fn energy(&self, state: &PlanarState<T>) -> Result<(T, T)> {
        self.check_separation(&state.positions)?;
        let kinetic = self.kinetic_energy(state);
        let (mut total, mut scale) = (kinetic, kinetic);
        for pair in Pair::ALL {
            let (a, b) = self.pair_energy(pair, state.distance(pair));
            total = total + a + b;
            scale = scale + a.abs() + b.abs();
        }
        Ok((total, scale))
    }

    /// `Σ m_i q_i × v_i` and the scale `Σ m_i |q_i| |v_i|`.
    pub fn angular_momentum(&self, state: &PlanarState<T>) -> (T, T) {
        (0..3).fold((T::zero(), T::zero()), |(l, s), i| {
            let m = self.inertial_mass(i);
            let (q, v) = (state.positions[i], state.velocities[i]);
            (l + m * q.cross(v), s + m * q.norm() * v.norm())
        })
    }
}

/// `∇_{q_i} V` for each body. The three gradients sum to zero.
pub fn grad_potential<T: Real>(
    positions: &[Vec2<T>; 3],
    model: &PotentialModel<T>,
) -> Result<[Vec2<T>; 3]> {
    model.check_separation(positions)?;
    Ok(model.gradient_unchecked(positions))
}

/// Largest `|∇_i V - ω² m_i q_i| / (1 + |ω² m_i q_i|)` over the bodies.
pub fn cc_residual<T: Real>(
    state: &PlanarState<T>,
    model: &PotentialModel<T>,
    omega_sq: T,
) -> Result<T> {
    let grad = grad_potential(&state.positions, model)?;
    Ok((0..3)
        .map(|i| {
            let centripetal = state.positions[i] * (omega_sq * model.inertial_mass(i));
            (grad[i] - centripetal).norm() / (T::one() + centripetal.norm())
        })
        .fold(T::zero(), T::max))
}

/// Places a distance triple in the plane: body 1 at the origin, body 2 on the
/// positive x-axis, body 3 in the upper half-plane; then shifts the mass
/// centre to the origin. Velocities are zero.
pub fn embed<T: Real>(config: &ConfigTriple<T>, masses: &MassTriple<T>) -> Result<PlanarState<T>> {
    let status = config.status();
    if status != TriangleStatus::NonDegenerate {
        return Err(Error::Triangle {
            operation: "embed",
            status,
            r12: config.r12.as_f64(),
            r13: config.r13.as_f64(),
            r23: config.r23.as_f64(),
        });
    }
    let (r12, r13, r23) = (config.r12, config.r13, config.r23);
    let two = T::lit(2.0);
    let x3 = (r12 * r12 + r13 * r13 - r23 * r23) / (two * r12);
    // Heron-style product avoids cancellation in r13² - x3².
    let y3 = ((r12 + r13 + r23) * (-r12 + r13 + r23) * (r12 - r13 + r23) * (r12 + r13 - r23))
        .sqrt()
        / (two * r12);
    let raw = [Vec2::zero(), Vec2::new(r12, T::zero()), Vec2::new(x3, y3)];
    let centre = (0..3).fold(Vec2::zero(), |acc, i| acc + raw[i] * masses.get(i))
        * (T::one() / masses.total());
    Ok(PlanarState::at_rest(raw.map(|q| q - centre)))
}

/// The `t = 0` slice of the uniform rotation `q(t) = R(ωt) q(0)`:
/// `v_i = ω · (-y_i, x_i)`.
pub fn rigid_rotation_state<T: Real>(state: &PlanarState<T>, omega: T) -> PlanarState<T> {
    PlanarState {
        positions: state.positions,
        velocities: state.positions.map(|q| q.perp() * omega),
    }
}
