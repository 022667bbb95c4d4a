use catint::algebra::{lower_triangular, Algebra, AlgebraElement, Arrow, LambdaAction, Quiver, TauMap};
use catint::engine::{theta, theta_recursive, TargetObject};
use catint::scalar::{parse_rational, Rational, Scalar, ScalarValue};
use catint::stepfn::StepFunction;
use catint::targets::{antiderive, weak_derivative, IntegrationTarget, PiecewiseLinear};
use catint::verify::{direct_sum, sample_measures};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=16).prop_map(|(n, d)| q(n, d))
}

fn step(dim: usize, max_level: u32) -> impl Strategy<Value = StepFunction<Rational>> {
    (0..=max_level).prop_flat_map(move |level| {
        prop::collection::vec(rational(), 1usize << (dim * level as usize))
            .prop_map(move |c| StepFunction::new(dim, level, c).unwrap())
    })
}

fn step_at(dim: usize, level: u32) -> impl Strategy<Value = StepFunction<Rational>> {
    prop::collection::vec(rational(), 1usize << (dim * level as usize))
        .prop_map(move |c| StepFunction::new(dim, level, c).unwrap())
}

fn targets(dim: usize) -> Vec<IntegrationTarget<Rational>> {
    sample_measures(dim)
        .into_iter()
        .map(|(_, bm)| IntegrationTarget::new(LambdaAction::ground(), bm).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refinement_preserves_integrals(f in step(2, 3), which in 0usize..3) {
        let t = &targets(2)[which];
        let bm = t.measure();
        let g = f.refine().unwrap();
        prop_assert_eq!(f.weighted_sum(bm).unwrap(), g.weighted_sum(bm).unwrap());
        prop_assert_eq!(f.norm_1(bm).unwrap(), g.norm_1(bm).unwrap());
        prop_assert!(f.equivalent(&g));
    }

    #[test]
    fn split_inverts_juxtapose(parts in prop::collection::vec(step_at(2, 2), 4)) {
        let whole = StepFunction::juxtapose(&parts).unwrap();
        prop_assert_eq!(whole.split().unwrap(), parts);
    }

    #[test]
    fn bottom_up_matches_recursion(f in step(1, 5), g in step(2, 3), which in 0usize..3) {
        let t1 = &targets(1)[which];
        let t2 = &targets(2)[which];
        prop_assert_eq!(theta(&f, t1).unwrap(), theta_recursive(&f, t1).unwrap());
        prop_assert_eq!(theta(&g, t2).unwrap(), theta_recursive(&g, t2).unwrap());
        prop_assert_eq!(theta(&g, t2).unwrap(), direct_sum(&g, t2.measure()).unwrap());
    }

    #[test]
    fn theta_is_linear(f in step(1, 4), g in step(1, 4), a in rational(), b in rational(), which in 0usize..3) {
        let t = &targets(1)[which];
        let combo = f.scale(&a).add(&g.scale(&b)).unwrap();
        let lhs = theta(&combo, t).unwrap();
        prop_assert_eq!(lhs, a * theta(&f, t).unwrap() + b * theta(&g, t).unwrap());
    }

    #[test]
    fn zero_unit_kills_everything(f in step(2, 3)) {
        let t = IntegrationTarget::zero_unit(LambdaAction::ground(), catint::measure::BoxMeasure::lebesgue_unit(2)).unwrap();
        prop_assert_eq!(theta(&f, &t).unwrap(), q(0, 1));
    }

    #[test]
    fn integral_is_monotone(f in step(1, 4), g in step(1, 4), which in 0usize..3) {
        let t = &targets(1)[which];
        let lo = f.zip_with(&g, |x, y| if x < y { x.clone() } else { y.clone() }).unwrap();
        prop_assert!(theta(&lo, t).unwrap() <= theta(&f, t).unwrap());
        prop_assert!(theta(&f.abs().unwrap(), t).unwrap() <= t.unit() * f.coeffs().iter().map(|c| c.norm()).max().unwrap());
    }

    #[test]
    fn calculus_round_trip(f in step(1, 8)) {
        let big_f = antiderive(&f, f.level()).unwrap();
        prop_assert_eq!(weak_derivative(&big_f), f.clone());
        prop_assert_eq!(big_f.end(), &theta(&f, &IntegrationTarget::lebesgue(1)).unwrap());
    }

    #[test]
    fn derivative_square(f in step(1, 4), g in step(1, 4)) {
        let (a, b) = (antiderive(&f, 0).unwrap(), antiderive(&g, 0).unwrap());
        let lhs = weak_derivative(&PiecewiseLinear::kappa(&a, &b).unwrap());
        let level = f.level().max(g.level());
        let rhs = StepFunction::juxtapose(&[f.refine_to(level).unwrap(), g.refine_to(level).unwrap()]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn triangular_algebra_laws(x in prop::collection::vec(rational(), 3), y in prop::collection::vec(rational(), 3), z in prop::collection::vec(rational(), 3)) {
        let alg: Algebra<Rational> = lower_triangular();
        let (x, y, z) = (AlgebraElement::new(x), AlgebraElement::new(y), AlgebraElement::new(z));
        let xy_z = alg.multiply(&alg.multiply(&x, &y).unwrap(), &z).unwrap();
        let x_yz = alg.multiply(&x, &alg.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(alg.multiply(&alg.one(), &x).unwrap(), x.clone());
        let sum = x.add(&y).unwrap();
        prop_assert!(alg.norm_1(&sum).unwrap() <= alg.norm_1(&x).unwrap() + alg.norm_1(&y).unwrap());
        let tau = TauMap::new(&alg, vec![q(0, 1), q(0, 1), q(1, 1)]).unwrap();
        prop_assert_eq!(
            tau.apply(&alg.multiply(&x, &y).unwrap()).unwrap(),
            tau.apply(&x).unwrap() * tau.apply(&y).unwrap()
        );
    }

    #[test]
    fn acyclic_path_algebras_are_valid(edges in prop::collection::vec((0usize..4, 0usize..4), 0..5), kill in prop::option::of(0usize..5)) {
        let vertices: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
        let arrows: Vec<Arrow> = edges
            .iter()
            .filter(|(s, t)| s < t)
            .enumerate()
            .map(|(i, &(s, t))| Arrow {
                name: format!("a{i}"),
                from: (s + 1).to_string(),
                to: (t + 1).to_string(),
            })
            .collect();
        let mut relations = vec![];
        if let Some(k) = kill {
            // a composable pair b∘a with target(a) = source(b)
            if let Some((a, b)) = arrows.iter().flat_map(|a| arrows.iter().map(move |b| (a, b))).filter(|(a, b)| a.to == b.from).nth(k) {
                relations.push(vec![b.name.clone(), a.name.clone()]);
            }
        }
        let quiver = Quiver { vertices, arrows, relations };
        let pa = quiver.path_algebra::<Rational>(4096).unwrap();
        prop_assert!(pa.algebra.validate().is_valid());
    }

    #[test]
    fn rational_literals_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&x.to_string()).unwrap(), x.clone());
        let v = ScalarValue::Rational(x);
        let back: ScalarValue = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(back, v);
    }
}
