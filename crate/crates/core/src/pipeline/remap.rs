//! Tactile remapping from the skin frame into the body-centred frame.
//!
//! Two competing models are provided. The single-landmark model transforms
//! the somatic location by the pose of the touched link's frame. The
//! triangulation model instead estimates the position along the segment from
//! two noisy distance cues, one to each bounding landmark, fused by their
//! precisions; cue noise is proportional to the true distance (Weber
//! scaling), so localization is sharpest next to the landmarks.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kinematics::{forward_kinematics, landmark_position, JointState, LinkPoses};
use super::somatic::{somatic_localization, ResponseMode, SomaticLocation, TouchEvent};
use crate::body::{BodyShapeModel, BodySizeModel};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec3};
use crate::scalar::Real;

/// Lower bound on a distance-cue variance, mm².
pub const CUE_VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemapVariant {
    #[default]
    Single,
    Triangulation,
}

impl fmt::Display for RemapVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RemapVariant::Single => "single",
            RemapVariant::Triangulation => "triangulation",
        })
    }
}

impl FromStr for RemapVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "single-landmark" => Ok(Self::Single),
            "triangulation" => Ok(Self::Triangulation),
            other => Err(Error::Configuration(format!(
                "unknown remapping variant `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationResult<T> {
    pub somatic: SomaticLocation<T>,
    /// Body-centred position, mm.
    pub spatial: Vec3<T>,
    pub variant: RemapVariant,
    pub mode: ResponseMode,
}

pub fn remap_touch_single<T: Real>(
    touch: &TouchEvent<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    state: &JointState<T>,
    mode: ResponseMode,
) -> Result<LocalizationResult<T>> {
    let somatic = somatic_localization(touch, shape, mode)?;
    let poses = forward_kinematics(size, state)?;
    let spatial = spatial_single(&somatic, &poses)?;
    Ok(LocalizationResult {
        somatic,
        spatial,
        variant: RemapVariant::Single,
        mode,
    })
}

/// Single-landmark remapping of an already localized touch: the somatic
/// point transformed by its link's pose.
pub fn spatial_single<T: Real>(
    somatic: &SomaticLocation<T>,
    poses: &LinkPoses<T>,
) -> Result<Vec3<T>> {
    Ok(poses.get(&somatic.link)?.transform_point(&somatic.local))
}

/// Decomposition of a somatic location relative to the segment between the
/// touched patch's proximal and distal landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentFrame<T> {
    /// Signed distance along the segment from the proximal landmark, mm.
    pub along: T,
    /// Segment length, mm.
    pub length: T,
    /// Component of the somatic location orthogonal to the segment, in the
    /// link frame.
    pub perpendicular: Vec3<T>,
    pub proximal_world: Vec3<T>,
    pub distal_world: Vec3<T>,
    pub link_pose: Pose<T>,
}

impl<T: Real> SegmentFrame<T> {
    /// Body-frame point at `along` on the segment, carrying the preserved
    /// perpendicular offset.
    pub fn embed(&self, along: T) -> Vec3<T> {
        let axis = (self.distal_world - self.proximal_world) / self.length;
        self.proximal_world + axis * along + self.link_pose.transform_vector(&self.perpendicular)
    }
}

pub fn segment_frame<T: Real>(
    somatic: &SomaticLocation<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    poses: &LinkPoses<T>,
) -> Result<SegmentFrame<T>> {
    let patch = shape
        .patch(&somatic.link)
        .ok_or_else(|| Error::Lookup(format!("no skin patch on link `{}`", somatic.link)))?;
    let seg = patch.segment.as_ref().ok_or_else(|| {
        Error::Configuration(format!(
            "skin patch `{}` has no proximal/distal landmark pair",
            somatic.link
        ))
    })?;
    let link_pose = *poses.get(&somatic.link)?;
    let proximal_world = landmark_position(size, poses, &seg.proximal)?;
    let distal_world = landmark_position(size, poses, &seg.distal)?;

    let to_link = link_pose.inverse();
    let p0 = to_link.transform_point(&proximal_world);
    let p1 = to_link.transform_point(&distal_world);
    let length = p0.distance(&p1);
    let axis = match (p1 - p0).normalized() {
        Some(a) if length > T::epsilon() => a,
        _ => {
            return Err(Error::DegenerateSegment(
                seg.proximal.clone(),
                seg.distal.clone(),
            ))
        }
    };
    let rel = somatic.local - p0;
    let along = rel.dot(&axis);
    let perpendicular = rel - axis * along;
    Ok(SegmentFrame {
        along,
        length,
        perpendicular,
        proximal_world,
        distal_world,
        link_pose,
    })
}

/// Precision-weighted estimate of the along-segment coordinate from a cue
/// to the proximal landmark (`d1`, variance `var1`) and one to the distal
/// landmark (`d2`, variance `var2`). Variances are floored at
/// [`CUE_VARIANCE_FLOOR`].
pub fn fuse_distance_cues<T: Real>(d1: T, d2: T, var1: T, var2: T, length: T) -> T {
    let floor = T::lit(CUE_VARIANCE_FLOOR);
    let w1 = var1.max(floor).recip();
    let w2 = var2.max(floor).recip();
    (d1 * w1 + (length - d2) * w2) / (w1 + w2)
}

pub fn remap_touch_triangulated<T: Real, R: Rng + ?Sized>(
    touch: &TouchEvent<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    state: &JointState<T>,
    mode: ResponseMode,
    weber_fraction: T,
    rng: &mut R,
) -> Result<LocalizationResult<T>> {
    let somatic = somatic_localization(touch, shape, mode)?;
    let poses = forward_kinematics(size, state)?;
    let spatial = spatial_triangulated(&somatic, size, shape, &poses, weber_fraction, rng)?;
    Ok(LocalizationResult {
        spatial,
        somatic,
        variant: RemapVariant::Triangulation,
        mode,
    })
}

/// Triangulation remapping of an already localized touch. Draws exactly two
/// standard normals from `rng`.
pub fn spatial_triangulated<T: Real, R: Rng + ?Sized>(
    somatic: &SomaticLocation<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    poses: &LinkPoses<T>,
    weber_fraction: T,
    rng: &mut R,
) -> Result<Vec3<T>> {
    if !(weber_fraction >= T::zero()) || !weber_fraction.is_finite() {
        return Err(Error::Configuration(format!(
            "Weber fraction {weber_fraction} must be >= 0"
        )));
    }
    let frame = segment_frame(somatic, size, shape, poses)?;

    let d1_true = frame.along;
    let d2_true = frame.length - frame.along;
    let sd1 = weber_fraction * d1_true.abs();
    let sd2 = weber_fraction * d2_true.abs();
    let e1: f64 = rng.sample(StandardNormal);
    let e2: f64 = rng.sample(StandardNormal);
    let d1 = d1_true + sd1 * T::lit(e1);
    let d2 = d2_true + sd2 * T::lit(e2);
    let along = fuse_distance_cues(d1, d2, sd1 * sd1, sd2 * sd2, frame.length);
    Ok(frame.embed(along))
}

/// [`remap_touch_triangulated`] with a dedicated seeded stream.
#[allow(clippy::too_many_arguments)]
pub fn remap_touch_triangulated_seeded<T: Real>(
    touch: &TouchEvent<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    state: &JointState<T>,
    mode: ResponseMode,
    weber_fraction: T,
    seed: u64,
) -> Result<LocalizationResult<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    remap_touch_triangulated(touch, size, shape, state, mode, weber_fraction, &mut rng)
}

/// Dispatches on `variant`. The single-landmark variant draws nothing from
/// `rng`.
#[allow(clippy::too_many_arguments)]
pub fn remap_touch<T: Real, R: Rng + ?Sized>(
    variant: RemapVariant,
    touch: &TouchEvent<T>,
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    state: &JointState<T>,
    mode: ResponseMode,
    weber_fraction: T,
    rng: &mut R,
) -> Result<LocalizationResult<T>> {
    match variant {
        RemapVariant::Single => remap_touch_single(touch, size, shape, state, mode),
        RemapVariant::Triangulation => {
            remap_touch_triangulated(touch, size, shape, state, mode, weber_fraction, rng)
        }
    }
}
