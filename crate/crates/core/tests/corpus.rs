use charflow::cauchy::{build_solution, CauchyError};
use charflow::corpus::{get_example, ExampleId, ExampleParams};
use charflow::numerics::Tolerance;
use std::f64::consts::PI;

#[test]
fn alpha_identity_holds_for_many_shapes() {
    for (a, b) in [(2.0, 1.0), (3.0, 1.0), (1.5, 0.4), (10.0, 9.5)] {
        let ex = get_example(ExampleId::Example3, ExampleParams { a, b }).unwrap();
        let r = ex.eval_oracle("alpha_squared_identity", &[]).unwrap();
        assert!(r.abs() <= 1e-14, "a = {a}, b = {b}: {r}");
    }
}

#[test]
fn polar_derivatives_are_consistent() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let h = 1e-6;
    for k in 0..64 {
        let theta = -PI + 2.0 * PI * (k as f64 + 0.5) / 64.0;
        let v = |n: &str, t: f64| ex.eval_oracle(n, &[("theta", t)]).unwrap();
        let (ux, uy) = (v("u_x", theta), v("u_y", theta));
        let ur = ux * theta.cos() + uy * theta.sin();
        assert!((ur - v("u_r", theta)).abs() <= 1e-10, "theta = {theta}");
        let ut = -ux * theta.sin() + uy * theta.cos();
        assert!((ut - v("u_theta", theta)).abs() <= 1e-10, "theta = {theta}");
        let fd = (v("u", theta + h) - v("u", theta - h)) / (2.0 * h);
        assert!((fd - v("u_theta", theta)).abs() <= 1e-8);
    }
}

#[test]
fn example1_solution_satisfies_its_closed_form() {
    let ex = get_example(ExampleId::Example1, ExampleParams::default()).unwrap();
    let sol = build_solution(ex.initial_data.as_ref().unwrap()).unwrap();
    let tol = Tolerance::new(1e-14, 1e-14, 200).unwrap();
    let mut solved = 0;
    for i in 0..=10 {
        for j in 0..=6 {
            let (x, y) = (-0.8 + 0.16 * i as f64, -0.3 + 0.1 * j as f64);
            let u = match sol.solve_u(x, y, &tol) {
                Ok(u) => u,
                Err(CauchyError::OutsideDomain { .. }) => continue,
                Err(e) => panic!("({x}, {y}): {e}"),
            };
            solved += 1;
            let r = ex
                .eval_oracle("implicit_residual", &[("u", u), ("x", x), ("y", y)])
                .unwrap();
            assert!(r.abs() <= 1e-10, "({x}, {y}): {r}");
        }
    }
    assert!(solved >= 50, "{solved} points solved");
}

#[test]
fn example2_slope_matches_closed_form() {
    let ex = get_example(ExampleId::Example2, ExampleParams::default()).unwrap();
    let fam = ex.families.0.clone().build().unwrap();
    let slope = ex.eval_oracle("first_slope_dx_dy", &[]).unwrap();
    let (_, d) = fam.eval_dual(&[0.0], 0.3, 0).unwrap();
    assert!((d - slope).abs() <= 1e-12, "{d} vs {slope}");
}

#[test]
fn names_round_trip() {
    for id in ExampleId::ALL {
        assert_eq!(id.name().parse::<ExampleId>().unwrap(), id);
    }
}
