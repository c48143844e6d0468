mod common;

use bodyschema::{Pose, Rotation, Vec3};
use proptest::prelude::*;

fn quat() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("non-degenerate", |q| {
        q.iter().map(|c| c * c).sum::<f64>() > 0.01
    })
}

fn vec3() -> impl Strategy<Value = Vec3<f64>> {
    prop::array::uniform3(-500.0f64..500.0).prop_map(Vec3::from)
}

fn pose() -> impl Strategy<Value = Pose<f64>> {
    (quat(), vec3())
        .prop_map(|([w, x, y, z], t)| Pose::new(Rotation::from_quaternion(w, x, y, z).unwrap(), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn composition_is_associative(a in pose(), b in pose(), c in pose()) {
        prop_assert!(a.compose(&b).compose(&c).max_abs_diff(&a.compose(&b.compose(&c))) < 1e-9);
    }

    #[test]
    fn inverse_cancels_on_both_sides(a in pose()) {
        prop_assert!(a.compose(&a.inverse()).max_abs_diff(&Pose::identity()) < 1e-12);
        prop_assert!(a.inverse().compose(&a).max_abs_diff(&Pose::identity()) < 1e-12);
    }

    #[test]
    fn transform_respects_composition(a in pose(), b in pose(), p in vec3()) {
        let lhs = a.compose(&b).transform_point(&p);
        prop_assert!(lhs.max_abs_diff(&a.transform_point(&b.transform_point(&p))) < 1e-9);
    }

    #[test]
    fn rigid_motions_preserve_distances(a in pose(), p in vec3(), q in vec3()) {
        let d = a.transform_point(&p).distance(&a.transform_point(&q));
        prop_assert!((d - p.distance(&q)).abs() < 1e-9);
    }

    #[test]
    fn quaternions_stay_unit_and_canonical(a in pose(), b in pose()) {
        let mut acc = a;
        for _ in 0..100 {
            acc = acc.compose(&b);
        }
        prop_assert!((acc.rotation.norm() - 1.0).abs() < 1e-9);
        prop_assert!(acc.rotation.w() >= 0.0);
    }

    #[test]
    fn rotation_matrix_is_orthonormal(a in pose()) {
        let m = a.rotation.to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_quaternion_matrix_oracle(q in quat(), p in vec3()) {
        let r = Rotation::from_quaternion(q[0], q[1], q[2], q[3]).unwrap();
        let expected = common::quat_matrix(q) * nalgebra::Vector3::new(p.x, p.y, p.z);
        prop_assert!(r.rotate(&p).max_abs_diff(&Vec3::new(expected.x, expected.y, expected.z)) < 1e-9);
    }

    #[test]
    fn axis_angle_matches_rodrigues(axis in vec3(), angle in -6.3f64..6.3, p in vec3()) {
        prop_assume!(axis.norm() > 1.0);
        let r = Rotation::from_axis_angle(&axis, angle);
        let expected = common::axis_angle_matrix(axis.to_array(), angle) * nalgebra::Vector3::new(p.x, p.y, p.z);
        prop_assert!(r.rotate(&p).max_abs_diff(&Vec3::new(expected.x, expected.y, expected.z)) < 1e-9);
    }

    #[test]
    fn single_precision_composition_stays_close(a in pose(), b in pose(), p in vec3()) {
        let (a32, b32): (Pose<f32>, Pose<f32>) = (a.cast(), b.cast());
        let got = a32.compose(&b32).transform_point(&p.cast()).cast::<f64>();
        prop_assert!(got.max_abs_diff(&a.compose(&b).transform_point(&p)) < 0.05);
        prop_assert!((a32.compose(&b32).rotation.norm() - 1.0).abs() < 1e-5);
    }
}

#[test]
fn quarter_turn_worked_example() {
    let frame = Pose::new(
        Rotation::rz(std::f64::consts::FRAC_PI_2),
        Vec3::new(300.0, 0.0, 0.0),
    );
    let p = frame.transform_point(&Vec3::new(120.0, 15.0, 0.0));
    assert!(p.max_abs_diff(&Vec3::new(285.0, 120.0, 0.0)) < 1e-9);
}

#[test]
fn degenerate_quaternions_are_rejected() {
    assert!(Rotation::<f64>::from_quaternion(0.0, 0.0, 0.0, 0.0).is_none());
    assert!(Rotation::<f64>::from_quaternion(f64::NAN, 0.0, 0.0, 1.0).is_none());
}
