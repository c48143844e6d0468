//! Short-term postural schema: per-joint Gaussian posterior combining
//! canonical-posture priors, delayed proprioceptive afference and efference
//! copies. Joints are independent; a cue contributes only once its latency
//! has elapsed (inclusive).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::body::BodySizeModel;
use crate::error::{Error, Result};
use crate::pipeline::JointState;
use crate::scalar::Real;

/// Gaussian belief about one joint angle, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Real> Gaussian<T> {
    pub fn new(mean: T, std: T) -> Self {
        Self { mean, std }
    }

    pub fn from_variance(mean: T, variance: T) -> Self {
        Self {
            mean,
            std: variance.sqrt(),
        }
    }

    pub fn variance(&self) -> T {
        self.std * self.std
    }

    pub fn precision(&self) -> T {
        self.variance().recip()
    }

    fn check(&self, what: &str) -> Result<()> {
        if !(self.std > T::zero()) || !self.std.is_finite() || !self.mean.is_finite() {
            return Err(Error::Invariant(format!(
                "{what}: std {} must be finite and > 0",
                self.std
            )));
        }
        Ok(())
    }
}

/// Canonical-posture prior, available immediately.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PosturalPrior<T> {
    pub joints: BTreeMap<String, Gaussian<T>>,
}

impl<T: Real> PosturalPrior<T> {
    /// Zero-mean prior with a common std on every joint of `size`.
    pub fn canonical(size: &BodySizeModel<T>, std: T) -> Self {
        Self {
            joints: size
                .joints
                .iter()
                .map(|j| (j.id.clone(), Gaussian::new(T::zero(), std)))
                .collect(),
        }
    }
}

/// A set of per-joint angle observations arriving after `latency_ms`.
/// Used both for proprioceptive afference and for efference copies.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AngleCue<T> {
    pub joints: BTreeMap<String, Gaussian<T>>,
    #[serde(default)]
    pub latency_ms: f64,
}

pub type ProprioceptiveCue<T> = AngleCue<T>;
pub type EfferenceCopy<T> = AngleCue<T>;

impl<T: Real> AngleCue<T> {
    pub fn new(latency_ms: f64) -> Self {
        Self {
            joints: BTreeMap::new(),
            latency_ms,
        }
    }

    pub fn with(mut self, joint: impl Into<String>, mean: T, std: T) -> Self {
        self.joints.insert(joint.into(), Gaussian::new(mean, std));
        self
    }

    pub fn arrived_by(&self, t_ms: f64) -> bool {
        self.latency_ms <= t_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointPosterior<T> {
    pub mean: T,
    pub variance: T,
    /// Sum of the precisions of every fused source.
    pub precision: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorPosture<T> {
    pub joints: BTreeMap<String, JointPosterior<T>>,
    pub timestamp_ms: f64,
}

impl<T: Real> PosteriorPosture<T> {
    pub fn mean_state(&self) -> JointState<T> {
        JointState {
            angles: self
                .joints
                .iter()
                .map(|(k, p)| (k.clone(), p.mean))
                .collect(),
            timestamp_ms: self.timestamp_ms,
        }
    }

    /// Posterior mean clamped into the joint limits of `size`, with the ids
    /// of the joints that had to be clamped.
    pub fn clamped_state(&self, size: &BodySizeModel<T>) -> (JointState<T>, Vec<String>) {
        let mut s = self.mean_state();
        let clamped = s.clamp_to_limits(size);
        (s, clamped)
    }
}

/// Precision-weighted product of Gaussians. A single source is returned
/// unchanged.
pub fn fuse_gaussians<T: Real>(sources: &[Gaussian<T>]) -> Option<JointPosterior<T>> {
    match sources {
        [] => None,
        [only] => Some(JointPosterior {
            mean: only.mean,
            variance: only.variance(),
            precision: only.precision(),
        }),
        _ => {
            let precision: T = sources.iter().map(Gaussian::precision).sum();
            let weighted: T = sources.iter().map(|g| g.mean * g.precision()).sum();
            Some(JointPosterior {
                mean: weighted / precision,
                variance: precision.recip(),
                precision,
            })
        }
    }
}

/// Fuses the prior and the already arrived cues for one joint.
pub fn fuse_cues<T: Real>(
    prior: Option<&PosturalPrior<T>>,
    cues: &[&AngleCue<T>],
    joint: &str,
) -> Result<JointPosterior<T>> {
    let mut sources = Vec::with_capacity(cues.len() + 1);
    if let Some(g) = prior.and_then(|p| p.joints.get(joint)) {
        g.check(&format!("prior.{joint}"))?;
        sources.push(*g);
    }
    for (i, c) in cues.iter().enumerate() {
        if let Some(g) = c.joints.get(joint) {
            g.check(&format!("cue[{i}].{joint}"))?;
            sources.push(*g);
        }
    }
    fuse_gaussians(&sources).ok_or_else(|| Error::Estimation(joint.to_string()))
}

/// Posterior over every joint mentioned by the prior or a cue, using only
/// cues whose latency is `<= t_ms`.
pub fn estimate_posture_at<T: Real>(
    t_ms: f64,
    prior: &PosturalPrior<T>,
    afference: &ProprioceptiveCue<T>,
    efference: Option<&EfferenceCopy<T>>,
) -> Result<PosteriorPosture<T>> {
    if !(t_ms >= 0.0) {
        return Err(Error::Configuration(format!(
            "query time {t_ms} ms must be >= 0"
        )));
    }
    let arrived: Vec<&AngleCue<T>> = std::iter::once(afference)
        .chain(efference)
        .filter(|c| c.arrived_by(t_ms))
        .collect();
    let mut ids: BTreeSet<&str> = prior.joints.keys().map(String::as_str).collect();
    for c in std::iter::once(afference).chain(efference) {
        ids.extend(c.joints.keys().map(String::as_str));
    }
    let mut joints = BTreeMap::new();
    for id in ids {
        joints.insert(id.to_string(), fuse_cues(Some(prior), &arrived, id)?);
    }
    Ok(PosteriorPosture {
        joints,
        timestamp_ms: t_ms,
    })
}
