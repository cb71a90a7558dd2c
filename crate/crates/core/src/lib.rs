//! Relative equilibria of the planar three-body problem under
//! quasi-homogeneous pair potentials `A r^-α ± B r^-β`.
//!
//! Every routine is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the bottom of this file fix it to `f64`.

pub mod collinear;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod roots;
pub mod scalar;
pub mod shape;

pub use collinear::{
    count_collinear, solve_collinear, CollinearCount, LineConfig, LineOrder, OrderSolutions,
};
pub use dynamics::{
    cc_residual, embed, grad_potential, integrate, periodicity_error, rigid_rotation_state,
    IntegrationStats, IntegratorOptions, Periodicity, PlanarState, PotentialModel, Trajectory,
    Vec2, Weighting,
};
pub use error::{Error, Result};
pub use families::{
    bifurcation_scan, canonical_label, count_at_inertia, curve_number, default_eta_grid,
    enumerate_families, k_tilde, sample_family, solutions_at_level, symmetry_group,
    trace_families, BifurcationKind, BifurcationPoint, ConfigTriple, FamilyCurve, FamilyLabel,
    FamilySample, ShapeSystem, Solution, TriangleClass, TriangleStatus,
};
pub use scalar::Real;
pub use shape::{
    build_shapes, Branch, ExponentPair, InteractionMode, MassTriple, Pair, PairCouplings,
    RootPair, ShapeFunction, ShapeKind, ShapeSet,
};

pub type Shape = ShapeFunction<f64>;
pub type Shapes = ShapeSet<f64>;
pub type Masses = MassTriple<f64>;
pub type Couplings = PairCouplings<f64>;
pub type Exponents = ExponentPair<f64>;
pub type Config = ConfigTriple<f64>;
pub type System = ShapeSystem<f64>;
pub type Curve = FamilyCurve<f64>;
pub type Sample = FamilySample<f64>;
pub type Bifurcation = BifurcationPoint<f64>;
pub type Model = PotentialModel<f64>;
pub type State = PlanarState<f64>;
pub type Line = LineConfig<f64>;
