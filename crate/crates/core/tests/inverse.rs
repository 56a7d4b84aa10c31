use charflow::cauchy::{build_solution, InitialData, Invariant};
use charflow::corpus::{get_example, ExampleId, ExampleParams};
use charflow::inverse::{recover_circle, recover_line, recover_pointwise, InverseError, TracedFamily};
use charflow::numerics::Bracket;
use charflow::plane::Direction;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn forward_then_inverse_round_trips(
        s in 0.5f64..1.5,
        amp in -0.2f64..0.2,
        n0 in -0.5f64..0.5,
        n1 in -0.3f64..0.3,
    ) {
        let tau = format!("{s}*x + {amp}*sin(x)");
        let nu = format!("{n0} + {n1}*x");
        let sol = build_solution(&InitialData::parse(-1.0, 1.0, &tau, &nu).unwrap()).unwrap();
        let f1 = TracedFamily::new(&sol, Invariant::First);
        let f2 = TracedFamily::new(&sol, Invariant::Second);
        let rec = recover_line(&f1, &f2, Bracket::new(-0.9, 0.9).unwrap(), 19, (0.0, 0.0)).unwrap();
        for p in rec.samples {
            prop_assert!((p.tau_prime - (s + amp * p.x.cos())).abs() < 1e-6);
            prop_assert!((p.nu - (n0 + n1 * p.x)).abs() < 1e-6);
        }
    }

    #[test]
    fn pointwise_recovery_ignores_scaling(
        tp in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
        nu in -2.0f64..2.0,
        k1 in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0],
        k2 in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0],
    ) {
        let m1 = Direction::raw(nu + 1.0, -tp);
        let m2 = Direction::raw(nu - 1.0, -tp);
        let (a, b) = recover_pointwise(m1, m2).unwrap();
        let (c, d) = recover_pointwise(m1.scaled(k1), m2.scaled(k2)).unwrap();
        prop_assert!((a - tp).abs() < 1e-12 * tp.abs().max(1.0));
        prop_assert!((b - nu).abs() < 1e-12 * nu.abs().max(1.0));
        prop_assert!((a - c).abs() <= 1e-12 * a.abs().max(1.0));
        prop_assert!((b - d).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn exchanging_the_pair_negates_both(
        dx1 in -3.0f64..3.0, dy1 in -3.0f64..3.0, dx2 in -3.0f64..3.0, dy2 in -3.0f64..3.0,
    ) {
        let (m1, m2) = (Direction::raw(dx1, dy1), Direction::raw(dx2, dy2));
        prop_assume!(m1.normalized_cross(&m2).abs() > 1e-3);
        let (a, b) = recover_pointwise(m1, m2).unwrap();
        let (c, d) = recover_pointwise(m2, m1).unwrap();
        prop_assert_eq!(a, -c);
        prop_assert_eq!(b, -d);
    }
}

#[test]
fn parallel_directions_are_degenerate() {
    let m = Direction::raw(1.0, 2.0);
    assert!(matches!(recover_pointwise(m, m.scaled(-3.0)), Err(InverseError::Degenerate { .. })));
}

#[test]
fn circle_radial_derivative_is_the_projection() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let thetas = Bracket::new(0.05, 6.2).unwrap().subdivide(30);
    let rec = recover_circle(&f1, &f2, &thetas, (thetas[0], 0.0)).unwrap();
    for s in rec.samples {
        assert_eq!(s.u_r, s.u_x * s.theta.cos() + s.u_y * s.theta.sin());
    }
}

#[test]
fn circle_rejects_the_singular_node() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let err = recover_circle(&f1, &f2, &[0.0, 1.0], (1.0, 0.0)).unwrap_err();
    assert!(matches!(err, InverseError::SingularPoint { .. }));
}

#[test]
fn families_must_be_paired_in_order() {
    let ex = get_example(ExampleId::Example1, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let err = recover_line(&f2, &f1, Bracket::new(-1.0, 1.0).unwrap(), 5, (0.0, 0.0)).unwrap_err();
    assert!(matches!(err, InverseError::ConventionMismatch { .. }));
}
