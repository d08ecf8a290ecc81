mod common;

use ik6rp::io::{emit_chain, parse_chain_str};
use ik6rp::poly::real_roots;
use ik6rp::spaces::{family, FamilyEnd, ThreeChain};
use ik6rp::{forward_kinematics, DualQuat, Joints, Pattern, Poly1f, Poly2f, Quat, Study};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn quat() -> impl Strategy<Value = Quat> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(Quat::from_array)
}

fn rigid() -> impl Strategy<Value = DualQuat> {
    (prop::array::uniform3(-1.0f64..1.0), -3.0f64..3.0, prop::array::uniform3(-2.0f64..2.0)).prop_filter_map(
        "axis too short",
        |(axis, theta, t)| {
            let n = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            (n > 0.1).then(|| DualQuat::from_rotation_translation(axis.map(|v| v / n), theta, t).unwrap())
        },
    )
}

fn pattern() -> impl Strategy<Value = Pattern> {
    prop::sample::select(Pattern::all().to_vec())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quaternion_norm_is_multiplicative(p in quat(), q in quat()) {
        let lhs = p.mul_ref(&q).norm_sq();
        prop_assert!((lhs - p.norm_sq() * q.norm_sq()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn dual_quaternion_product_is_associative(a in rigid(), b in rigid(), c in rigid()) {
        let l = a.mul_ref(&b).mul_ref(&c).to_array();
        let r = a.mul_ref(&b.mul_ref(&c)).to_array();
        prop_assert!(close(&l, &r, 1e-12));
    }

    #[test]
    fn matrix_round_trip(a in rigid()) {
        let back = DualQuat::from_matrix(&a.to_matrix()).unwrap();
        let (p, q) = (Study::from_dual_quaternion(&a).unwrap(), Study::from_dual_quaternion(&back).unwrap());
        prop_assert!(p.projective_distance(&q) <= 1e-12);
    }

    #[test]
    fn canonical_is_projectively_equal_and_idempotent(a in rigid(), s in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]) {
        let p = Study::from_dual_quaternion(&a.scale(&s)).unwrap();
        let c = p.canonical();
        prop_assert!(p.projective_distance(&c) <= 1e-14);
        prop_assert_eq!(c.canonical(), c);
        prop_assert!(c.coords().contains(&1.0));
    }

    #[test]
    fn projection_lands_on_the_quadric(c in prop::array::uniform8(-3.0f64..3.0)) {
        prop_assume!(c[..4].iter().map(|v| v * v).sum::<f64>() > 0.1);
        let (p, _) = Study::new(c).unwrap().project_to_quadric().unwrap();
        prop_assert!(p.study_residual() <= 1e-14);
    }

    #[test]
    fn division_identity(a in prop::collection::vec(-3.0f64..3.0, 1..9), b in prop::collection::vec(-3.0f64..3.0, 1..5)) {
        let (a, b) = (Poly1f::new(a), Poly1f::new(b));
        prop_assume!(b.leading().abs() > 0.1);
        let (q, r) = a.div_rem(&b);
        let back = &(&q * &b) + &r;
        for x in [-1.3, 0.2, 0.9] {
            prop_assert!((back.eval(x) - a.eval(x)).abs() <= 1e-8 * (1.0 + a.eval_scale(x)));
        }
        prop_assert!(r.degree().unwrap_or(0) < b.degree().unwrap().max(1));
    }

    #[test]
    fn bivariate_product_evaluates_pointwise(
        f in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..4),
        g in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..3),
        u in -2.0f64..2.0, w in -2.0f64..2.0,
    ) {
        let (f, g) = (Poly2f::new(f), Poly2f::new(g));
        let fg = &f * &g;
        prop_assert!((fg.evaluate(u, w) - f.evaluate(u, w) * g.evaluate(u, w)).abs() <= 1e-10);
        prop_assert!((fg.evaluate_partial(u).eval(w) - fg.evaluate(u, w)).abs() <= 1e-10);
    }

    #[test]
    fn constructed_roots_are_found(mut r in prop::collection::vec(-4.0f64..4.0, 1..7)) {
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r.dedup_by(|a, b| (*a - *b).abs() < 0.1);
        let got = real_roots(&Poly1f::from_roots(&r), 1e-10).unwrap();
        prop_assert_eq!(got.len(), r.len());
        for (g, w) in got.iter().zip(&r) {
            prop_assert!((g.value - w).abs() <= 1e-9);
        }
    }

    #[test]
    fn joint_conversion_round_trip(seed in any::<u64>(), p in pattern()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng, p, 0.05);
        let q = random_joints(&mut rng, &chain);
        let back = Joints::from_external(&chain, q.to_external(&chain)).unwrap();
        prop_assert!(back.max_diff(&q) <= 1e-12);
    }

    #[test]
    fn chain_file_round_trip(seed in any::<u64>(), p in pattern()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng, p, 0.05).with_name(format!("chain {seed}"));
        let text = emit_chain(&chain);
        let back = parse_chain_str(&text).unwrap();
        prop_assert_eq!(&back, &chain);
        prop_assert_eq!(emit_chain(&back), text);
    }

    #[test]
    fn fk_is_on_the_quadric_and_splits_at_f4(seed in any::<u64>(), p in pattern()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng, p, 0.05);
        let q = random_joints(&mut rng, &chain);
        let pose = forward_kinematics(&chain, &q);
        prop_assert!(pose.study_residual() <= 1e-12);
        let f4 = Study::from_dual_quaternion(&chain.left_product(&q)).unwrap();
        let other = ik6rp::right_chain_pose(&chain, &pose, &q).unwrap();
        prop_assert!(f4.projective_distance(&other) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn families_contain_their_workspace(seed in any::<u64>(), p in pattern()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng, p, 0.05);
        let q = random_joints(&mut rng, &chain);
        let ee = forward_kinematics(&chain, &q);
        let f4 = chain.left_product(&q).to_array();
        let left = ThreeChain::left(&chain);
        let right = ThreeChain::right(&chain, &ee.to_dual_quaternion());
        for (three, outer, inner) in [(&left, q.values[0], q.values[2]), (&right, q.values[5], q.values[3])] {
            for (end, x) in [(FamilyEnd::Outer, outer), (FamilyEnd::Inner, inner)] {
                let fam = family(three, end).unwrap();
                prop_assert!(fam.residual(x, &f4) <= 1e-9, "{} residual {:e}", fam.label(), fam.residual(x, &f4));
            }
        }
    }
}
