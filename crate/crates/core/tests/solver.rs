mod common;

use ik6rp::solver::FormMatrix;
use ik6rp::spaces::{left_families, middle_joint_form, right_families, ThreeChain};
use ik6rp::{forward_kinematics, solve_ik, ChainSpec, JointVector, Pattern, SolverError, SolverOptions, Study};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn solutions_satisfy_the_linear_system() {
    let chain = chain_2r2p2r();
    let pose = pose_2r2p2r();
    let out = solve_ik(&chain, &pose, &SolverOptions::default()).unwrap();
    let ee = pose.canonical().project_to_quadric().unwrap().0;
    let (lc, rc) = (left_families(&chain), right_families(&chain, &ee));
    let m = FormMatrix::new(lc.preferred().unwrap(), rc.preferred().unwrap());
    for s in &out.solutions {
        let mut e = m.evaluate(s.u, s.w);
        e.normalize_rows();
        let c = s.f4_pose.coords();
        let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = e.mul_vec(c).iter().fold(0.0f64, |a, v| a.max(v.abs())) / n;
        assert!(r <= 1e-8, "form residual {r:e}");
        assert!(s.f4_pose.study_residual() <= 1e-12);
        assert!(s.residual <= 1e-6);
    }
    let th: Vec<f64> = out.solutions.iter().map(|s| s.external[0]).collect();
    assert!(th.windows(2).all(|w| w[0] <= w[1]), "not sorted: {th:?}");
}

#[test]
fn scale_invariance() {
    let chain = chain_2rp3r();
    let pose = pose_2rp3r();
    let opts = SolverOptions::default();
    let base = solve_ik(&chain, &pose, &opts).unwrap();
    for lambda in [-1.0, 0.5, 3.0] {
        let scaled = pose.scaled(lambda).unwrap();
        let out = solve_ik(&chain, &scaled, &opts).unwrap();
        assert_eq!(out.solutions.len(), base.solutions.len());
        for (a, b) in out.solutions.iter().zip(&base.solutions) {
            assert!(a.joints.max_diff(&b.joints) <= 1e-9, "λ = {lambda}");
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let chain = chain_2rp3r();
    let pose = pose_2rp3r();
    let a = solve_ik(&chain, &pose, &SolverOptions::default()).unwrap();
    let b = solve_ik(&chain, &pose, &SolverOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn off_quadric_pose_is_rejected() {
    let chain = chain_2rp3r();
    let pose = Study::new([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
    let err = solve_ik(&chain, &pose, &SolverOptions::default()).unwrap_err();
    assert!(matches!(err, SolverError::NotOnStudyQuadric { .. }));
}

#[test]
fn unreachable_pose_gives_empty_list() {
    // Link lengths are below 1, so a 6R arm cannot reach this far.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chain = random_chain(&mut rng, Pattern::RRRRRR, 0.05);
    let far = ik6rp::DualQuat::translation([50.0, -40.0, 30.0]);
    let out = solve_ik(&chain, &Study::from_dual_quaternion(&far).unwrap(), &SolverOptions::default()).unwrap();
    assert!(out.solutions.is_empty());
    assert!(!out.meta.notes.is_empty());
}

#[test]
fn both_left_families_degenerate_is_reported() {
    // a1 = 0 puts T(d3) in the quadric and α2 = 90° puts T(v1) there too.
    let chain = ChainSpec::from_table(&[
        ('R', None, Some(0.0), 0.0, 30.0),
        ('R', None, Some(0.2), 0.3, 90.0),
        ('P', Some(10.0), None, 0.25, 40.0),
        ('R', None, Some(0.1), 0.2, 50.0),
        ('R', None, Some(0.3), 0.15, -60.0),
        ('R', None, Some(0.0), 0.0, 0.0),
    ])
    .unwrap();
    let q = JointVector::from_external(&chain, [10.0, 20.0, 0.3, 40.0, 50.0, 60.0]).unwrap();
    let pose = forward_kinematics(&chain, &q);
    let err = solve_ik(&chain, &pose, &SolverOptions::default()).unwrap_err();
    assert!(matches!(err, SolverError::DegenerateChain(_)), "{err}");
}

#[test]
fn middle_joint_is_recovered_from_f4() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for pattern in Pattern::all() {
        let chain = random_chain(&mut rng, pattern, 0.05);
        let q = random_joints(&mut rng, &chain);
        let f4 = chain.left_product(&q).to_array();
        let left = middle_joint_form(&ThreeChain::left(&chain)).unwrap();
        assert!((left.solve(&f4).unwrap() - q.values[1]).abs() < 1e-9, "{pattern}");
        let ee = forward_kinematics(&chain, &q);
        let right = middle_joint_form(&ThreeChain::right(&chain, &ee.to_dual_quaternion())).unwrap();
        assert!((right.solve(&f4).unwrap() - q.values[4]).abs() < 1e-9, "{pattern}");
    }
}

#[test]
fn single_precision_forward_kinematics_agrees() {
    let c64 = chain_2rp3r();
    let c32 = ChainSpec::<f32>::from_table(&[
        ('R', None, Some(0.0), 0.1, 90.0),
        ('R', None, Some(0.0), -0.425, 0.0),
        ('P', Some(0.0), None, -0.39225, 0.0),
        ('R', None, Some(0.10915), 0.01, 90.0),
        ('R', None, Some(0.09465), 0.0, -90.0),
        ('R', None, Some(0.0), 0.0, 0.0),
    ])
    .unwrap();
    let ext = [60.0, -70.0, -0.2, 40.0, 19.0, 67.0];
    let p64 = forward_kinematics(&c64, &JointVector::from_external(&c64, ext).unwrap()).canonical();
    let p32 = forward_kinematics(&c32, &JointVector::from_external(&c32, ext.map(|v| v as f32)).unwrap()).canonical();
    for (a, b) in p64.coords().iter().zip(p32.coords()) {
        assert!((a - *b as f64).abs() < 1e-5);
    }
}
