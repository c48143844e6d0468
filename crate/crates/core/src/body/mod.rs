//! Long-term body representations: the kinematic stick figure (body size),
//! per-link taxel point clouds (body shape), and distortions of the stored
//! model relative to the veridical body.

mod distortion;
mod model;
mod spec;
mod validate;

pub use distortion::{apply_distortion, AxisScales, DistortionMap};
pub use model::{
    BodyShapeModel, BodySizeModel, GridMeta, Joint, Landmark, SegmentLandmarks, SkinPatch, Taxel,
    TaxelKey,
};
pub use spec::{
    builtin, load_body_spec, load_body_spec_file, load_body_spec_unchecked, BodySpec, BUILTIN_NAMES,
};
pub use validate::{validate_model, ValidationReport, Violation, ViolationKind};
