use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::body::BodySizeModel;
use crate::error::{Error, Result};
use crate::geometry::{Pose, Rotation, Vec3};
use crate::scalar::Real;

/// Joint angles (radians) at a timestamp (ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState<T> {
    pub angles: BTreeMap<String, T>,
    #[serde(default)]
    pub timestamp_ms: f64,
}

impl<T: Real> Default for JointState<T> {
    fn default() -> Self {
        Self {
            angles: BTreeMap::new(),
            timestamp_ms: 0.0,
        }
    }
}

impl<T: Real> JointState<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, joint: impl Into<String>, angle: T) -> Self {
        self.angles.insert(joint.into(), angle);
        self
    }

    pub fn at(mut self, timestamp_ms: f64) -> Self {
        self.timestamp_ms = timestamp_ms;
        self
    }

    pub fn angle(&self, joint: &str) -> Option<T> {
        self.angles.get(joint).copied()
    }

    /// Clamps every angle into its joint's limits; returns the ids that moved.
    pub fn clamp_to_limits(&mut self, size: &BodySizeModel<T>) -> Vec<String> {
        let mut clamped = Vec::new();
        for j in &size.joints {
            if let Some(a) = self.angles.get_mut(&j.id) {
                let c = j.clamp(*a);
                if c != *a {
                    *a = c;
                    clamped.push(j.id.clone());
                }
            }
        }
        clamped
    }
}

/// What to do when the joint state omits a joint of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingJoints {
    #[default]
    Reject,
    /// Fall back to the canonical zero angle and record the joint.
    DefaultToZero,
}

/// Pose of every link frame in the body-centred base frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPoses<T> {
    pub poses: BTreeMap<String, Pose<T>>,
    /// Joints that were absent from the state and defaulted to zero.
    pub defaulted: Vec<String>,
}

impl<T: Real> LinkPoses<T> {
    pub fn get(&self, link: &str) -> Result<&Pose<T>> {
        self.poses
            .get(link)
            .ok_or_else(|| Error::Lookup(format!("no pose for link `{link}`")))
    }
}

pub fn forward_kinematics<T: Real>(
    size: &BodySizeModel<T>,
    state: &JointState<T>,
) -> Result<LinkPoses<T>> {
    forward_kinematics_with(size, state, MissingJoints::Reject)
}

pub fn forward_kinematics_with<T: Real>(
    size: &BodySizeModel<T>,
    state: &JointState<T>,
    missing: MissingJoints,
) -> Result<LinkPoses<T>> {
    for id in state.angles.keys() {
        if size.joint(id).is_none() {
            return Err(Error::State(format!("unknown joint `{id}` in joint state")));
        }
    }
    let mut poses = BTreeMap::new();
    poses.insert(size.base.clone(), Pose::identity());
    let mut defaulted = Vec::new();
    for j in &size.joints {
        let angle = match (state.angle(&j.id), missing) {
            (Some(a), _) => a,
            (None, MissingJoints::DefaultToZero) => {
                defaulted.push(j.id.clone());
                T::zero()
            }
            (None, MissingJoints::Reject) => {
                return Err(Error::State(format!("missing angle for joint `{}`", j.id)));
            }
        };
        if !angle.is_finite() || !j.admits(angle) {
            return Err(Error::State(format!(
                "joint `{}` angle {angle} outside limits [{}, {}]",
                j.id, j.limits.0, j.limits.1
            )));
        }
        let parent = *poses.get(&j.parent).ok_or_else(|| {
            Error::Structural(format!(
                "joint `{}`: parent link `{}` is not placed yet",
                j.id, j.parent
            ))
        })?;
        let rot = Pose::from_rotation(Rotation::from_axis_angle(&j.axis, angle));
        poses.insert(
            j.child.clone(),
            parent.compose(&j.pre_transform).compose(&rot),
        );
    }
    Ok(LinkPoses { poses, defaulted })
}

/// Canonical posture: every joint at zero, timestamp 0.
pub fn default_posture<T: Real>(size: &BodySizeModel<T>) -> JointState<T> {
    JointState {
        angles: size
            .joints
            .iter()
            .map(|j| (j.id.clone(), T::zero()))
            .collect(),
        timestamp_ms: 0.0,
    }
}

/// Landmark position from already computed link poses.
pub fn landmark_position<T: Real>(
    size: &BodySizeModel<T>,
    poses: &LinkPoses<T>,
    landmark: &str,
) -> Result<Vec3<T>> {
    let lm = size
        .landmark(landmark)
        .ok_or_else(|| Error::Lookup(format!("unknown landmark `{landmark}`")))?;
    Ok(poses.get(&lm.link)?.transform_point(&lm.offset))
}

pub fn localize_landmark<T: Real>(
    size: &BodySizeModel<T>,
    state: &JointState<T>,
    landmark: &str,
) -> Result<Vec3<T>> {
    if size.landmark(landmark).is_none() {
        return Err(Error::Lookup(format!("unknown landmark `{landmark}`")));
    }
    let poses = forward_kinematics(size, state)?;
    landmark_position(size, &poses, landmark)
}
