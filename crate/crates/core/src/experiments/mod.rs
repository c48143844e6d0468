//! Seeded Monte Carlo experiments over a veridical body and a stored
//! (possibly distorted) copy of it.
//!
//! Trial `i` of a run draws from its own ChaCha stream seeded with
//! `seed + i`, so runs are reproducible, parallel trials do not interact and
//! the two remapping variants can be compared on common random numbers.

mod report;
mod run;
mod scenario;
mod stats;
mod svg;

pub use report::{
    aggregate, ExperimentReport, ExtentJudgment, ProbeAggregate, ProfilePoint, TaskSummary,
    TrialRecord,
};
pub use run::{
    compare_remapping_models, run_distance_perception, run_landmark_localization,
    run_tactile_localization, Experiment,
};
pub use scenario::{
    BodyRef, EfferenceSpec, Extent, ExtentKind, JointNoise, NoiseModel, PairAxis, PriorSpec, Probe,
    Scenario, Task,
};
pub use stats::{is_unimodal, mean_vec, mid_near_ratio, variable_error};
pub use svg::render_profile_svg;
