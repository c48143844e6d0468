//! Perceptual processes: somatic localization of touch, forward kinematics,
//! spatial localization of body landmarks and two variants of tactile
//! remapping into the body-centred frame.

mod kinematics;
mod remap;
mod somatic;

pub use kinematics::{
    default_posture, forward_kinematics, forward_kinematics_with, landmark_position,
    localize_landmark, JointState, LinkPoses, MissingJoints,
};
pub use remap::{
    fuse_distance_cues, remap_touch, remap_touch_single, remap_touch_triangulated,
    remap_touch_triangulated_seeded, segment_frame, spatial_single, spatial_triangulated,
    LocalizationResult, RemapVariant, SegmentFrame, CUE_VARIANCE_FLOOR,
};
pub use somatic::{somatic_localization, ResponseMode, SomaticLocation, TouchEvent};
