use proptest::prelude::*;
use qcc_core::{
    embed, grad_potential, Config, Exponents, InteractionMode, Masses, Model, Pair, Shape, Vec2,
    Couplings, ShapeFunction, TriangleStatus,
};

fn two_branch() -> impl Strategy<Value = Shape> {
    (0.1f64..10.0, 0.1f64..10.0, 2.5f64..5.0, 0.5f64..3.0).prop_map(|(c1, c2, p, dq)| {
        Shape::new(c1, c2, p, p + dq, InteractionMode::AttractiveRepulsive).unwrap()
    })
}

fn model(mode: InteractionMode) -> impl Strategy<Value = Model> {
    (
        prop::array::uniform3(0.1f64..3.0),
        prop::array::uniform3(0.1f64..2.0),
        prop::array::uniform3(0.1f64..2.0),
        0.5f64..2.0,
        0.2f64..2.0,
    )
        .prop_map(move |(m, a, b, alpha, dbeta)| {
            Model::new(
                Masses::new(m[0], m[1], m[2]).unwrap(),
                Couplings::new(a, b).unwrap(),
                Exponents::new(alpha, alpha + dbeta).unwrap(),
                mode,
            )
        })
}

fn positions() -> impl Strategy<Value = [Vec2<f64>; 3]> {
    prop::array::uniform3((-3.0f64..3.0, -3.0f64..3.0))
        .prop_map(|p| p.map(|(x, y)| Vec2::new(x, y)))
        .prop_filter("separated bodies", |q| {
            Pair::ALL.iter().all(|p| {
                let (i, j) = p.bodies();
                (q[i] - q[j]).norm() > 0.2
            })
        })
}

fn potential(model: &Model, q: &[Vec2<f64>; 3]) -> f64 {
    model.potential_energy(q).unwrap()
}

proptest! {
    #[test]
    fn level_roots_bracket_the_maximiser(shape in two_branch(), frac in 0.001f64..0.999) {
        let crit = shape.critical().unwrap();
        let eta = frac * crit.value;
        let r = shape.solve_level(eta).unwrap();
        let (lo, hi) = (r.low.unwrap(), r.high.unwrap());
        prop_assert!(shape.zero().unwrap() < lo && lo <= crit.x && crit.x <= hi);
        prop_assert!((shape.value(lo) - eta).abs() <= 1e-10 * crit.value);
        prop_assert!((shape.value(hi) - eta).abs() <= 1e-10 * crit.value);
        prop_assert!(shape.derivative(lo) >= 0.0 && shape.derivative(hi) <= 0.0);
    }

    #[test]
    fn scaling_moves_the_level_not_the_roots(shape in two_branch(), frac in 0.01f64..0.99, s in 0.2f64..5.0) {
        let eta = frac * shape.critical().unwrap().value;
        let a = shape.solve_level(eta).unwrap();
        let b = shape.scaled(s).solve_level(s * eta).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x;
        prop_assert!(close(a.low.unwrap(), b.low.unwrap()));
        prop_assert!(close(a.high.unwrap(), b.high.unwrap()));
    }

    #[test]
    fn gradient_matches_central_differences(
        m in prop_oneof![model(InteractionMode::AttractiveRepulsive), model(InteractionMode::AttractiveAttractive)],
        q in positions(),
    ) {
        let g = grad_potential(&q, &m).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            for axis in 0..2 {
                let shift = |d: f64| {
                    let mut p = q;
                    if axis == 0 { p[i].x += d } else { p[i].y += d }
                    potential(&m, &p)
                };
                let fd = (shift(h) - shift(-h)) / (2.0 * h);
                let exact = if axis == 0 { g[i].x } else { g[i].y };
                let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-3);
                prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{fd} vs {exact}");
            }
        }
        let total = g[0] + g[1] + g[2];
        prop_assert!(total.norm() <= 1e-12 * (g[0].norm() + g[1].norm() + g[2].norm()));
    }

    #[test]
    fn embedding_recovers_distances(
        a in 0.1f64..5.0, b in 0.1f64..5.0, t in 0.05f64..0.95,
        m in prop::array::uniform3(0.1f64..3.0),
    ) {
        // third side strictly between |a - b| and a + b
        let c = (a - b).abs() + t * (a + b - (a - b).abs());
        let config = Config::new(a, b, c).unwrap();
        prop_assume!(config.status() == TriangleStatus::NonDegenerate);
        let masses = Masses::new(m[0], m[1], m[2]).unwrap();
        let s = embed(&config, &masses).unwrap();
        for (d, want) in s.distances().iter().zip(config.as_array()) {
            prop_assert!((d - want).abs() <= 1e-12 * want.max(1.0));
        }
        prop_assert!(s.mass_moment(&masses).norm() <= 1e-12 * a.max(b));
        prop_assert!(s.positions[2].y >= s.positions[0].y);
    }
}

#[test]
fn single_precision_solves_the_canonical_level() {
    let s = ShapeFunction::<f32>::canonical();
    let r = s.solve_level(0.05).unwrap();
    assert!((r.low.unwrap() - 1.064_108).abs() < 1e-4);
    assert!((r.high.unwrap() - 2.224_639).abs() < 1e-4);
    let c = s.critical().unwrap();
    assert!((c.x - 4.0 / 3.0).abs() < 1e-5);
}
