//! Fixtures and independent oracles shared by the integration tests. The
//! oracles use nalgebra and plain arithmetic only.
#![allow(dead_code)]

pub mod scenarios;

use std::collections::BTreeMap;

use bodyschema::body::{BodySizeModel, Joint, Landmark};
use bodyschema::pipeline::JointState;
use bodyschema::{Pose, Rotation, Vec3};
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Raw (unnormalized) quaternion drawn from a symmetric box.
pub fn raw_quaternion(r: &mut impl Rng) -> [f64; 4] {
    loop {
        let q = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let n: f64 = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 {
            return q;
        }
    }
}

pub fn random_pose(r: &mut impl Rng) -> Pose<f64> {
    let [w, x, y, z] = raw_quaternion(r);
    Pose::new(
        Rotation::from_quaternion(w, x, y, z).unwrap(),
        Vec3::new(
            r.random_range(-500.0..500.0),
            r.random_range(-500.0..500.0),
            r.random_range(-500.0..500.0),
        ),
    )
}

pub fn quat_matrix([w, x, y, z]: [f64; 4]) -> Matrix3<f64> {
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Rodrigues' formula.
pub fn axis_angle_matrix(axis: [f64; 3], angle: f64) -> Matrix3<f64> {
    let a = Vector3::from(axis).normalize();
    let k = Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

pub fn homogeneous(r: Matrix3<f64>, t: [f64; 3]) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    m[(0, 3)] = t[0];
    m[(1, 3)] = t[1];
    m[(2, 3)] = t[2];
    m
}

pub fn apply(m: &Matrix4<f64>, p: [f64; 3]) -> [f64; 3] {
    let v = m * Vector4::new(p[0], p[1], p[2], 1.0);
    [v.x, v.y, v.z]
}

/// A chain description kept in raw form for the oracle alongside the model
/// built from it.
pub struct RawJoint {
    pub parent: usize,
    pub quat: [f64; 4],
    pub xyz: [f64; 3],
    pub axis: [f64; 3],
}

pub struct RandomChain {
    pub raw: Vec<RawJoint>,
    pub offsets: Vec<[f64; 3]>,
    pub size: BodySizeModel<f64>,
}

/// Random kinematic tree with `n` revolute joints (link 0 is the base;
/// joint i places link i+1 on a random earlier link) and one landmark per
/// link.
pub fn random_chain(r: &mut impl Rng, n: usize) -> RandomChain {
    let links: Vec<String> = (0..=n).map(|i| format!("link{i}")).collect();
    let mut raw = Vec::new();
    let mut joints = Vec::new();
    for i in 0..n {
        let parent = r.random_range(0..=i);
        let quat = raw_quaternion(r);
        let xyz = [
            r.random_range(-300.0..300.0),
            r.random_range(-300.0..300.0),
            r.random_range(-300.0..300.0),
        ];
        let axis_raw = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0f64..1.0) + 1e-3,
        ];
        let an = axis_raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        let axis = axis_raw.map(|c| c / an);
        joints.push(Joint {
            id: format!("j{i}"),
            parent: links[parent].clone(),
            child: links[i + 1].clone(),
            axis: Vec3::from(axis),
            pre_transform: Pose::new(
                Rotation::from_quaternion(quat[0], quat[1], quat[2], quat[3]).unwrap(),
                Vec3::from(xyz),
            ),
            limits: (-std::f64::consts::PI, std::f64::consts::PI),
        });
        raw.push(RawJoint {
            parent,
            quat,
            xyz,
            axis,
        });
    }
    let offsets: Vec<[f64; 3]> = (0..=n)
        .map(|_| {
            [
                r.random_range(-200.0..200.0),
                r.random_range(-200.0..200.0),
                r.random_range(-200.0..200.0),
            ]
        })
        .collect();
    let landmarks = offsets
        .iter()
        .enumerate()
        .map(|(i, o)| {
            (
                format!("lm{i}"),
                Landmark {
                    link: links[i].clone(),
                    offset: Vec3::from(*o),
                },
            )
        })
        .collect();
    RandomChain {
        raw,
        offsets,
        size: BodySizeModel {
            base: links[0].clone(),
            links,
            joints,
            landmarks,
        },
    }
}

pub fn random_state(r: &mut impl Rng, size: &BodySizeModel<f64>) -> JointState<f64> {
    JointState {
        angles: size
            .joints
            .iter()
            .map(|j| (j.id.clone(), r.random_range(j.limits.0..=j.limits.1)))
            .collect(),
        timestamp_ms: 0.0,
    }
}

/// Naive homogeneous-matrix product along the tree.
pub fn oracle_link_matrices(chain: &RandomChain, angles: &[f64]) -> Vec<Matrix4<f64>> {
    let mut out = vec![Matrix4::identity()];
    for (j, a) in chain.raw.iter().zip(angles) {
        let m = out[j.parent]
            * homogeneous(quat_matrix(j.quat), j.xyz)
            * homogeneous(axis_angle_matrix(j.axis, *a), [0.0; 3]);
        out.push(m);
    }
    out
}

/// Oracle FK for an arbitrary body model given in link order, by matrices.
pub fn oracle_model_matrices(
    size: &BodySizeModel<f64>,
    state: &JointState<f64>,
) -> BTreeMap<String, Matrix4<f64>> {
    let mut out = BTreeMap::from([(size.base.clone(), Matrix4::identity())]);
    for j in &size.joints {
        let [w, x, y, z] = j.pre_transform.rotation.components();
        let pre = homogeneous(
            quat_matrix([w, x, y, z]),
            j.pre_transform.translation.to_array(),
        );
        let rot = homogeneous(
            axis_angle_matrix(j.axis.to_array(), state.angles[&j.id]),
            [0.0; 3],
        );
        let m = out[&j.parent] * pre * rot;
        out.insert(j.child.clone(), m);
    }
    out
}

/// Mean and variance of the normalized product of Gaussian densities
/// `(mean, variance)`, integrated numerically on a uniform grid.
pub fn grid_posterior(sources: &[(f64, f64)], lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    let logp: Vec<f64> = xs
        .iter()
        .map(|x| {
            sources
                .iter()
                .map(|(m, v)| -(x - m) * (x - m) / (2.0 * v))
                .sum::<f64>()
        })
        .collect();
    let max = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logp.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    let mean = xs.iter().zip(&w).map(|(x, p)| x * p).sum::<f64>() / z;
    let var = xs
        .iter()
        .zip(&w)
        .map(|(x, p)| (x - mean) * (x - mean) * p)
        .sum::<f64>()
        / z;
    (mean, var)
}
