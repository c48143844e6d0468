mod common;

use bodyschema::body::{apply_distortion, builtin, AxisScales, DistortionMap, TaxelKey};
use bodyschema::pipeline::{
    forward_kinematics, forward_kinematics_with, landmark_position, remap_touch_single, JointState,
    MissingJoints, ResponseMode, TouchEvent,
};
use bodyschema::{Error, Vec3};
use rand::Rng;

#[test]
fn random_trees_match_matrix_oracle() {
    let mut rng = common::rng(20);
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let chain = common::random_chain(&mut rng, n);
        let state = common::random_state(&mut rng, &chain.size);
        let angles: Vec<f64> = (0..n).map(|i| state.angles[&format!("j{i}")]).collect();
        let oracle = common::oracle_link_matrices(&chain, &angles);
        let poses = forward_kinematics(&chain.size, &state).unwrap();
        for (i, m) in oracle.iter().enumerate() {
            let lm = landmark_position(&chain.size, &poses, &format!("lm{i}")).unwrap();
            assert!(lm.max_abs_diff(&Vec3::from(common::apply(m, chain.offsets[i]))) < 1e-9);
        }
    }
}

#[test]
fn builtin_models_match_matrix_oracle() {
    let mut rng = common::rng(21);
    for name in ["planar_arm", "hand"] {
        let body = builtin(name).unwrap();
        for _ in 0..100 {
            let state = common::random_state(&mut rng, &body.size);
            let oracle = common::oracle_model_matrices(&body.size, &state);
            let poses = forward_kinematics(&body.size, &state).unwrap();
            for (id, lm) in &body.size.landmarks {
                let got = landmark_position(&body.size, &poses, id).unwrap();
                let want = Vec3::from(common::apply(&oracle[&lm.link], lm.offset.to_array()));
                assert!(got.max_abs_diff(&want) < 1e-9, "{name}/{id}");
            }
        }
    }
}

#[test]
fn planar_arm_elbow_quarter_turn() {
    let body = builtin("planar_arm").unwrap();
    let state = JointState::new()
        .with("shoulder", 0.0)
        .with("elbow", std::f64::consts::FRAC_PI_2)
        .with("wrist", 0.0);
    let poses = forward_kinematics(&body.size, &state).unwrap();
    let wrist = landmark_position(&body.size, &poses, "wrist").unwrap();
    assert!(wrist.max_abs_diff(&Vec3::new(300.0, 250.0, 0.0)) < 1e-9);
}

#[test]
fn missing_and_out_of_range_angles() {
    let body = builtin("planar_arm").unwrap();
    let partial = JointState::new().with("shoulder", 0.1);
    assert!(matches!(
        forward_kinematics(&body.size, &partial),
        Err(Error::State(_))
    ));
    let poses =
        forward_kinematics_with(&body.size, &partial, MissingJoints::DefaultToZero).unwrap();
    assert_eq!(
        poses.defaulted,
        vec!["elbow".to_string(), "wrist".to_string()]
    );
    let bad = JointState::new()
        .with("shoulder", 0.0)
        .with("elbow", 3.0)
        .with("wrist", 0.0);
    assert!(matches!(
        forward_kinematics(&body.size, &bad),
        Err(Error::State(_))
    ));
    let unknown = JointState::new()
        .with("shoulder", 0.0)
        .with("elbow", 0.0)
        .with("wrist", 0.0)
        .with("knee", 0.0);
    assert!(forward_kinematics(&body.size, &unknown).is_err());
}

#[test]
fn remapping_round_trip_on_every_taxel() {
    let body = builtin("planar_arm").unwrap();
    let mut rng = common::rng(22);
    for _ in 0..100 {
        let state = common::random_state(&mut rng, &body.size);
        let oracle = common::oracle_model_matrices(&body.size, &state);
        for k in body.shape.taxel_keys() {
            let r = remap_touch_single(
                &TouchEvent::single(k.clone()),
                &body.size,
                &body.shape,
                &state,
                ResponseMode::Pointing,
            )
            .unwrap();
            let truth = common::apply(
                &oracle[&k.link],
                body.shape.taxel(&k).unwrap().local.to_array(),
            );
            assert!(r.spatial.max_abs_diff(&Vec3::from(truth)) < 1e-9);
        }
    }
}

#[test]
fn identity_distortion_is_a_no_op() {
    let body = builtin("hand").unwrap();
    let (size, shape) =
        apply_distortion(&body.size, &body.shape, &DistortionMap::identity()).unwrap();
    assert_eq!(size, body.size);
    assert_eq!(shape, body.shape);
}

#[test]
fn distortion_scales_compose_multiplicatively_and_keep_topology() {
    let body = builtin("planar_arm").unwrap();
    let a = DistortionMap::identity().with_scale("forearm", AxisScales::new(0.8, 1.5, 1.0));
    let b = DistortionMap::identity().with_scale("forearm", AxisScales::new(1.25, 2.0, 1.0));
    let ab = DistortionMap::identity().with_scale("forearm", AxisScales::new(1.0, 3.0, 1.0));
    let (s1, h1) = apply_distortion(&body.size, &body.shape, &a).unwrap();
    let (s2, h2) = apply_distortion(&s1, &h1, &b).unwrap();
    let (s3, h3) = apply_distortion(&body.size, &body.shape, &ab).unwrap();
    for (j2, j3) in s2.joints.iter().zip(&s3.joints) {
        assert_eq!(
            (&j2.id, &j2.parent, &j2.child),
            (&j3.id, &j3.parent, &j3.child)
        );
        assert!(j2.pre_transform.max_abs_diff(&j3.pre_transform) < 1e-9);
    }
    for k in h3.taxel_keys() {
        assert!(
            h2.taxel(&k)
                .unwrap()
                .local
                .max_abs_diff(&h3.taxel(&k).unwrap().local)
                < 1e-9
        );
    }
    assert_eq!(s3.links, body.size.links);
    assert_eq!(h3.taxel_count(), body.shape.taxel_count());
    let t = h3.taxel(&TaxelKey::new("forearm", 0)).unwrap().local;
    assert!(t.max_abs_diff(&Vec3::new(12.5, -112.5, 0.0)) < 1e-12);
}

#[test]
fn distortion_rejects_bad_scales_and_unknown_links() {
    let body = builtin("planar_arm").unwrap();
    let zero = DistortionMap::identity().with_scale("forearm", AxisScales::new(0.0, 1.0, 1.0));
    assert!(apply_distortion(&body.size, &body.shape, &zero).is_err());
    let ghost = DistortionMap::identity().with_scale("tail", AxisScales::uniform(1.1));
    assert!(matches!(
        apply_distortion(&body.size, &body.shape, &ghost),
        Err(Error::Lookup(_))
    ));
}

#[test]
fn stored_forearm_stretch_moves_wrist_proportionally() {
    let body = builtin("planar_arm").unwrap();
    let d = DistortionMap::identity().with_scale("forearm", AxisScales::new(1.2, 1.0, 1.0));
    let (size, _) = apply_distortion(&body.size, &body.shape, &d).unwrap();
    let state = JointState::new()
        .with("shoulder", 0.0)
        .with("elbow", 0.0)
        .with("wrist", 0.0);
    let poses = forward_kinematics(&size, &state).unwrap();
    let wrist = landmark_position(&size, &poses, "wrist").unwrap();
    assert!(wrist.max_abs_diff(&Vec3::new(600.0, 0.0, 0.0)) < 1e-9);
}
