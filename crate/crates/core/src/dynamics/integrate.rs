//! Adaptive Dormand–Prince 5(4) integration with cubic Hermite dense output.

use super::{PlanarState, PotentialModel};
use crate::error::{Error, Result};
use crate::scalar::Real;

// the system is autonomous, so the stage times are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// fifth-order weights minus the embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<T>,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: T::tol(1e-10),
            abs_tol: T::tol(1e-12),
            max_steps: 2_000_000,
            initial_step: None,
        }
    }
}

impl<T: Real> IntegratorOptions<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        IntegratorOptions {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

/// Step counts and first-integral drift of a trajectory.
///
/// Drifts are maxima over accepted steps. Energy drift is relative to the
/// initial kinetic energy plus the absolute values of every potential term;
/// angular momentum drift is relative to `Σ m_i |q_i| |v_i|` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationStats<T> {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest `|Σ m_i q_i|` seen.
    pub com_drift: T,
    pub energy_drift: T,
    pub angular_momentum_drift: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    times: Vec<T>,
    phase: Vec<[T; 12]>,
    slopes: Vec<[T; 12]>,
    pub stats: IntegrationStats<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn t_end(&self) -> T {
        *self.times.last().expect("trajectory holds the initial state")
    }

    pub fn state(&self, index: usize) -> PlanarState<T> {
        PlanarState::from_phase(&self.phase[index])
    }

    pub fn initial(&self) -> PlanarState<T> {
        self.state(0)
    }

    pub fn last(&self) -> PlanarState<T> {
        self.state(self.len() - 1)
    }

    /// State at time `t` by cubic Hermite interpolation between steps.
    pub fn state_at(&self, t: T) -> Result<PlanarState<T>> {
        let t0 = self.times[0];
        let t1 = self.t_end();
        if !(t >= t0 && t <= t1) {
            return Err(Error::TrajectoryTooShort {
                t_end: t1.as_f64(),
                period: t.as_f64(),
            });
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k >= self.len() {
            return Ok(self.last());
        }
        let (ta, tb) = (self.times[k - 1], self.times[k]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        let h00 = (one + two * s) * (one - s) * (one - s);
        let h10 = s * (one - s) * (one - s);
        let h01 = s * s * (three - two * s);
        let h11 = s * s * (s - one);
        let (ya, yb) = (&self.phase[k - 1], &self.phase[k]);
        let (fa, fb) = (&self.slopes[k - 1], &self.slopes[k]);
        let mut y = [T::zero(); 12];
        for i in 0..12 {
            y[i] = h00 * ya[i] + h10 * h * fa[i] + h01 * yb[i] + h11 * h * fb[i];
        }
        Ok(PlanarState::from_phase(&y))
    }
}

fn rhs<T: Real>(model: &PotentialModel<T>, y: &[T; 12]) -> Result<[T; 12]> {
    let state = PlanarState::from_phase(y);
    model.check_separation(&state.positions)?;
    let grad = model.gradient_unchecked(&state.positions);
    let mut dy = [T::zero(); 12];
    for i in 0..3 {
        let m = model.inertial_mass(i);
        dy[2 * i] = y[6 + 2 * i];
        dy[2 * i + 1] = y[6 + 2 * i + 1];
        dy[6 + 2 * i] = -grad[i].x / m;
        dy[6 + 2 * i + 1] = -grad[i].y / m;
    }
    Ok(dy)
}

fn scaled_norm<T: Real>(v: &[T; 12], y: &[T; 12], opts: &IntegratorOptions<T>) -> T {
    let sum = (0..12).fold(T::zero(), |s, i| {
        let e = v[i] / (opts.abs_tol + opts.rel_tol * y[i].abs());
        s + e * e
    });
    (sum / T::lit(12.0)).sqrt()
}

fn initial_step<T: Real>(
    model: &PotentialModel<T>,
    y0: &[T; 12],
    f0: &[T; 12],
    opts: &IntegratorOptions<T>,
) -> Result<T> {
    let d0 = scaled_norm(y0, y0, opts);
    let d1 = scaled_norm(f0, y0, opts);
    let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    let mut y1 = *y0;
    for i in 0..12 {
        y1[i] = y0[i] + h0 * f0[i];
    }
    let f1 = rhs(model, &y1)?;
    let mut df = [T::zero(); 12];
    for i in 0..12 {
        df[i] = f1[i] - f0[i];
    }
    let d2 = scaled_norm(&df, y0, opts) / h0;
    let h1 = if d1.max(d2) <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / d1.max(d2)).powf(T::lit(0.2))
    };
    Ok((T::lit(100.0) * h0).min(h1))
}

/// Integrates `m_i q̈_i = -∇_i V` from `state` over `[0, t_end]`.
pub fn integrate<T: Real>(
    state: &PlanarState<T>,
    model: &PotentialModel<T>,
    t_end: T,
    opts: &IntegratorOptions<T>,
) -> Result<Trajectory<T>> {
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(Error::invalid("t_end", "must be positive and finite"));
    }
    if !(opts.rel_tol > T::zero() && opts.abs_tol > T::zero()) {
        return Err(Error::invalid("tolerances", "must be positive"));
    }
    let (e0, e_scale) = model.energy(state)?;
    let (l0, l_scale) = model.angular_momentum(state);
    let e_scale = if e_scale > T::zero() { e_scale } else { T::one() };
    let l_scale = if l_scale > T::zero() { l_scale } else { T::one() };

    let mut y = state.to_phase();
    let mut f = rhs(model, &y)?;
    let mut stats = IntegrationStats {
        steps: 0,
        rejected: 0,
        evaluations: 1,
        com_drift: state.mass_moment(&model.masses).norm(),
        energy_drift: T::zero(),
        angular_momentum_drift: T::zero(),
    };
    let mut h = match opts.initial_step {
        Some(h) => h,
        None => {
            stats.evaluations += 1;
            initial_step(model, &y, &f, opts)?
        }
    };
    let mut traj = Trajectory {
        times: vec![T::zero()],
        phase: vec![y],
        slopes: vec![f],
        stats,
    };

    let mut t = T::zero();
    let mut last_rejected = false;
    let mut k = [[T::zero(); 12]; 7];
    while t < t_end {
        if traj.stats.steps + traj.stats.rejected >= opts.max_steps {
            return Err(Error::StepBudget {
                t: t.as_f64(),
                max_steps: opts.max_steps,
            });
        }
        // land on t_end exactly and avoid a sliver of a final step
        if t + h * T::lit(1.01) >= t_end {
            h = t_end - t;
        }
        if h <= T::lit(16.0) * T::epsilon() * t.abs().max(T::one()) {
            return Err(Error::StepUnderflow {
                t: t.as_f64(),
                h: h.as_f64(),
            });
        }

        k[0] = f;
        let mut stage = [T::zero(); 12];
        for s in 1..7 {
            for i in 0..12 {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + T::lit(A[s][j]) * kj[i];
                }
                stage[i] = y[i] + h * acc;
            }
            match rhs(model, &stage) {
                Ok(v) => k[s] = v,
                // a stage that crashes two bodies counts as a failed step
                Err(_) => {
                    k[s] = [T::nan(); 12];
                    break;
                }
            }
        }
        traj.stats.evaluations += 6;
        // the seventh stage is evaluated at the fifth-order solution
        let y_new = stage;
        let mut err = [T::zero(); 12];
        for i in 0..12 {
            err[i] = h * (0..7).fold(T::zero(), |acc, s| acc + T::lit(E[s]) * k[s][i]);
        }
        let mut denom_ref = y;
        for i in 0..12 {
            denom_ref[i] = y[i].abs().max(y_new[i].abs());
        }
        let err_norm = scaled_norm(&err, &denom_ref, opts);

        if err_norm.is_finite() && err_norm <= T::one() {
            t = if h == t_end - t { t_end } else { t + h };
            y = y_new;
            f = k[6];
            traj.stats.steps += 1;
            traj.times.push(t);
            traj.phase.push(y);
            traj.slopes.push(f);

            let s = PlanarState::from_phase(&y);
            let com = s.mass_moment(&model.masses).norm();
            let (e, _) = model.energy(&s)?;
            let (l, _) = model.angular_momentum(&s);
            let st = &mut traj.stats;
            st.com_drift = st.com_drift.max(com);
            st.energy_drift = st.energy_drift.max((e - e0).abs() / e_scale);
            st.angular_momentum_drift = st.angular_momentum_drift.max((l - l0).abs() / l_scale);

            let mut factor = if err_norm > T::zero() {
                T::lit(SAFETY) * err_norm.powf(T::lit(-0.2))
            } else {
                T::lit(MAX_FACTOR)
            };
            factor = factor.max(T::lit(MIN_FACTOR)).min(T::lit(MAX_FACTOR));
            if last_rejected {
                factor = factor.min(T::one());
            }
            h = h * factor;
            last_rejected = false;
        } else {
            traj.stats.rejected += 1;
            let factor = if err_norm.is_finite() {
                (T::lit(SAFETY) * err_norm.powf(T::lit(-0.2))).max(T::lit(MIN_FACTOR))
            } else {
                T::lit(MIN_FACTOR)
            };
            h = h * factor.min(T::one());
            last_rejected = true;
        }
    }
    Ok(traj)
}

/// Distance between the state at `t = period` and the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Periodicity<T> {
    /// Largest `|q_i(T) - q_i(0)|`.
    pub position: T,
    /// Largest `|v_i(T) - v_i(0)|`.
    pub velocity: T,
    /// Largest `|q_i(T) - q_i(0)| + |v_i(T) - v_i(0)|`.
    pub total: T,
}

pub fn periodicity_error<T: Real>(trajectory: &Trajectory<T>, period: T) -> Result<Periodicity<T>> {
    let t_end = trajectory.t_end();
    if !(period > T::zero()) {
        return Err(Error::invalid("period", "must be positive"));
    }
    if period > t_end * (T::one() + T::lit(4.0) * T::epsilon()) {
        return Err(Error::TrajectoryTooShort {
            t_end: t_end.as_f64(),
            period: period.as_f64(),
        });
    }
    let start = trajectory.initial();
    let end = trajectory.state_at(period.min(t_end))?;
    let mut out = Periodicity {
        position: T::zero(),
        velocity: T::zero(),
        total: T::zero(),
    };
    for i in 0..3 {
        let dq = (end.positions[i] - start.positions[i]).norm();
        let dv = (end.velocities[i] - start.velocities[i]).norm();
        out.position = out.position.max(dq);
        out.velocity = out.velocity.max(dv);
        out.total = out.total.max(dq + dv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{embed, rigid_rotation_state, Vec2};
    use crate::families::ConfigTriple;
    use crate::shape::ShapeFunction;
    use std::f64::consts::PI;

    fn rotating_equilateral(side: f64, omega_scale: f64) -> (PlanarState<f64>, PotentialModel<f64>, f64) {
        let model = PotentialModel::canonical();
        let state = embed(&ConfigTriple::new(side, side, side).unwrap(), &model.masses).unwrap();
        let omega = ShapeFunction::<f64>::canonical().value(side).sqrt();
        (rigid_rotation_state(&state, omega * omega_scale), model, omega)
    }

    #[test]
    fn fixed_point_stays_put() {
        // the zero of the shape function: no force at rest
        let (state, model, _) = rotating_equilateral(1.0, 0.0);
        let traj = integrate(&state, &model, 50.0, &IntegratorOptions::default()).unwrap();
        let p = periodicity_error(&traj, 50.0).unwrap();
        assert!(p.total <= 1e-12 * 50.0, "{p:?}");
    }

    #[test]
    fn relative_equilibrium_is_periodic() {
        let side = ShapeFunction::<f64>::canonical().solve_level(0.05).unwrap().low.unwrap();
        let (state, model, omega) = rotating_equilateral(side, 1.0);
        let period = 2.0 * PI / omega;
        let traj = integrate(&state, &model, period, &IntegratorOptions::default()).unwrap();
        assert_eq!(traj.t_end(), period);
        let p = periodicity_error(&traj, period).unwrap();
        assert!(p.total <= 1e-6, "{p:?}");
        assert!(traj.stats.energy_drift <= 1e-8);
        assert!(traj.stats.angular_momentum_drift <= 1e-8);
        assert!(traj.stats.com_drift <= 1e-12);
    }

    #[test]
    fn energy_over_ten_periods() {
        let (state, model, omega) = rotating_equilateral(4.0 / 3.0, 1.0);
        let period = 2.0 * PI / omega;
        let traj = integrate(&state, &model, 10.0 * period, &IntegratorOptions::default()).unwrap();
        assert!(traj.stats.energy_drift <= 1e-8, "{:?}", traj.stats);
    }

    #[test]
    fn wrong_omega_breaks_periodicity() {
        let side = ShapeFunction::<f64>::canonical().solve_level(0.05).unwrap().low.unwrap();
        let (state, model, omega) = rotating_equilateral(side, 1.2);
        let period = 2.0 * PI / (1.2 * omega);
        let traj = integrate(&state, &model, period, &IntegratorOptions::default()).unwrap();
        assert!(periodicity_error(&traj, period).unwrap().total >= 1e-2);
    }

    #[test]
    fn dense_output_tracks_rotation() {
        let side = 2.0;
        let (state, model, omega) = rotating_equilateral(side, 1.0);
        let traj = integrate(&state, &model, 3.0, &IntegratorOptions::default()).unwrap();
        for t in [0.37, 1.234, 2.9] {
            let s = traj.state_at(t).unwrap();
            let (c, sn) = ((omega * t).cos(), (omega * t).sin());
            for i in 0..3 {
                let q = state.positions[i];
                let exact = Vec2::new(c * q.x - sn * q.y, sn * q.x + c * q.y);
                assert!((s.positions[i] - exact).norm() < 1e-8);
            }
        }
        assert!(matches!(
            periodicity_error(&traj, 4.0),
            Err(Error::TrajectoryTooShort { .. })
        ));
    }

    #[test]
    fn rejects_bad_horizon() {
        let (state, model, _) = rotating_equilateral(1.2, 1.0);
        assert!(integrate(&state, &model, 0.0, &IntegratorOptions::default()).is_err());
    }
}
