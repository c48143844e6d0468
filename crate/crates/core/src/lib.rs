//! Body-model engine for tactile remapping and somatoperception simulation.
//!
//! The crate localizes touch on a skinned kinematic body, both on the skin
//! (somatic) and in a body-centred frame (spatial), estimates posture by
//! fusing priors with delayed noisy cues, and runs seeded Monte Carlo
//! experiments over stored (possibly distorted) versus veridical bodies.
//!
//! Core math is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common double-precision instantiations. Units are millimetres,
//! radians and milliseconds.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod pipeline;
pub mod posture;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{Pose, Rotation, Vec3};
pub use scalar::Real;

pub type Vec3f = Vec3<f64>;
pub type Rotationf = Rotation<f64>;
pub type Posef = Pose<f64>;
pub type Pose32 = Pose<f32>;
pub type BodySize = body::BodySizeModel<f64>;
pub type BodyShape = body::BodyShapeModel<f64>;
pub type Distortion = body::DistortionMap<f64>;
pub type State = pipeline::JointState<f64>;
pub type Touch = pipeline::TouchEvent<f64>;
pub type Localization = pipeline::LocalizationResult<f64>;
pub type Posterior = posture::PosteriorPosture<f64>;

/// Version string written into experiment summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
