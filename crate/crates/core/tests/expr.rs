use charflow::corpus::{get_example, ExampleId, ExampleParams};
use charflow::expr::{Bindings, Constant, Expression, Func, Node, Op};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ranges that keep every corpus expression mostly inside its domain.
fn random_point(rng: &mut ChaCha8Rng) -> Bindings {
    Bindings::new()
        .with("x", rng.gen_range(-0.9..0.9))
        .with("y", rng.gen_range(-0.9..-0.05))
        .with("u", rng.gen_range(-0.5..0.5))
        .with("c", rng.gen_range(-1.0..1.0))
        .with("r", rng.gen_range(0.2..1.5))
        .with("theta", rng.gen_range(0.05..6.2))
}

#[test]
fn dual_partials_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for id in ExampleId::ALL {
        let ex = get_example(id, ExampleParams::default()).unwrap();
        let mut exprs: Vec<(String, Expression)> = ex
            .oracle_names()
            .into_iter()
            .map(|n| (n.to_string(), ex.oracle(n).unwrap().clone()))
            .collect();
        exprs.push(("family 1".into(), ex.families.0.phi.clone()));
        exprs.push(("family 2".into(), ex.families.1.phi.clone()));
        for (name, e) in exprs {
            let vars: Vec<String> = e.variables().into_iter().filter(|v| v != "a" && v != "b").collect();
            let mut evaluated = 0;
            for _ in 0..100 {
                let mut b = random_point(&mut rng);
                b.set("a", ex.params.a);
                b.set("b", ex.params.b);
                for var in &vars {
                    let Ok((_, d)) = e.eval_dual(&b, var) else { continue };
                    let v0 = b.get(var).unwrap();
                    let h = 1e-6;
                    let (Ok(p), Ok(m)) = (e.eval(&b.clone().with(var, v0 + h)), e.eval(&b.clone().with(var, v0 - h))) else {
                        continue;
                    };
                    let fd = (p - m) / (2.0 * h);
                    let err = (d - fd).abs() / (1.0 + d.abs());
                    assert!(err < 1e-6, "{id} {name} d/d{var} at {b:?}: dual {d}, fd {fd}");
                    evaluated += 1;
                }
            }
            assert!(vars.is_empty() || evaluated >= 50, "{id} {name}: only {evaluated} evaluable partials");
        }
    }
}

fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(Node::Num),
        prop_oneof![Just(Constant::Pi), Just(Constant::E)].prop_map(Node::Const),
        prop_oneof![Just("x"), Just("y"), Just("c")].prop_map(|v| Node::Var(v.to_string())),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![Just(Op::Add), Just(Op::Sub), Just(Op::Mul), Just(Op::Div), Just(Op::Pow)];
        let func = prop_oneof![
            Just(Func::Exp),
            Just(Func::Ln),
            Just(Func::Sqrt),
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Tan),
            Just(Func::Atan),
            Just(Func::Abs),
        ];
        prop_oneof![
            inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Node::Bin(o, Box::new(a), Box::new(b))),
            (func, inner).prop_map(|(f, a)| Node::Call(f, Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip_is_stable(n in node()) {
        let e = Expression::from_node(n.clone());
        let once = Expression::parse(&e.to_string()).unwrap();
        prop_assert_eq!(once.root(), &n);
        let twice = Expression::parse(&once.to_string()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn evaluation_is_deterministic(n in node(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let e = Expression::from_node(n);
        let b = Bindings::new().with("x", x).with("y", y).with("c", 0.5);
        let p = e.compile(&["x", "y", "c"]).unwrap();
        let first = (e.eval(&b).map(f64::to_bits), p.eval(&[x, y, 0.5]).map(f64::to_bits));
        for _ in 0..3 {
            prop_assert_eq!(e.eval(&b).map(f64::to_bits), first.0.clone());
            prop_assert_eq!(p.eval(&[x, y, 0.5]).map(f64::to_bits), first.1);
        }
        if let (Ok(a), Ok(b)) = (&first.0, &first.1) {
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn parser_error_offsets() {
    let cases = [
        ("x +", 3),
        ("(x", 2),
        ("x)", 1),
        ("2 * * y", 4),
        ("sin x", 4),
        ("foo(1)", 0),
        ("1 + 2 $ 3", 6),
        ("", 0),
        ("3 4", 2),
        ("x ^ ^ 2", 4),
    ];
    for (text, offset) in cases {
        let err = Expression::parse(text).unwrap_err();
        assert_eq!(err.offset(), offset, "{text:?}: {err}");
    }
}
