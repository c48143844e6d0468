use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::body::{builtin, load_body_spec_file, BodySpec, DistortionMap, TaxelKey};
use crate::error::{Error, Result};
use crate::pipeline::{RemapVariant, ResponseMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    TactileLocalization,
    LandmarkLocalization,
    DistancePerception,
    ModelComparison,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::TactileLocalization => "tactile-localization",
            Task::LandmarkLocalization => "landmark-localization",
            Task::DistancePerception => "distance-perception",
            Task::ModelComparison => "model-comparison",
        })
    }
}

/// Afferent joint-angle noise: one std for every joint, or per joint
/// (unlisted joints are noiseless).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JointNoise {
    Uniform(f64),
    PerJoint(BTreeMap<String, f64>),
}

impl Default for JointNoise {
    fn default() -> Self {
        JointNoise::Uniform(0.0)
    }
}

impl JointNoise {
    pub fn std_for(&self, joint: &str) -> f64 {
        match self {
            JointNoise::Uniform(s) => *s,
            JointNoise::PerJoint(m) => m.get(joint).copied().unwrap_or(0.0),
        }
    }

    fn values(&self) -> Vec<(String, f64)> {
        match self {
            JointNoise::Uniform(s) => vec![("*".into(), *s)],
            JointNoise::PerJoint(m) => m.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub joint_std_rad: JointNoise,
    pub afferent_latency_ms: f64,
    /// Distance-cue noise std as a fraction of the true distance.
    pub weber_fraction: f64,
    /// Sensor noise on the somatic location (in-plane), mm.
    pub taxel_jitter_mm: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (joint, s) in self.joint_std_rad.values() {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::Scenario(format!(
                    "noise.joint_std_rad.{joint} = {s} must be >= 0"
                )));
            }
        }
        for (field, v) in [
            ("afferent_latency_ms", self.afferent_latency_ms),
            ("weber_fraction", self.weber_fraction),
            ("taxel_jitter_mm", self.taxel_jitter_mm),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Scenario(format!("noise.{field} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairAxis {
    Across,
    Along,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probe {
    Pair {
        a: TaxelKey,
        b: TaxelKey,
        axis: PairAxis,
    },
    Landmark {
        landmark: String,
    },
    Taxel(TaxelKey),
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::Taxel(k) => write!(f, "{k}"),
            Probe::Landmark { landmark } => f.write_str(landmark),
            Probe::Pair { a, b, axis } => {
                let axis = match axis {
                    PairAxis::Across => "across",
                    PairAxis::Along => "along",
                };
                write!(f, "{a}-{b}/{axis}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtentKind {
    Length,
    Width,
}

/// A judged body extent: the distance between two localized landmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub name: String,
    pub from: String,
    pub to: String,
    pub kind: ExtentKind,
}

/// Zero-mean (canonical-posture) prior on every joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub std_rad: f64,
}

/// Efference copy predicting the true posture with its own noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfferenceSpec {
    pub std_rad: f64,
    #[serde(default)]
    pub latency_ms: f64,
}

/// Body reference: `builtin:<name>` or a path, relative paths being resolved
/// against the scenario file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BodyRef(pub String);

impl BodyRef {
    pub fn builtin(name: &str) -> Self {
        Self(format!("builtin:{name}"))
    }

    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<BodySpec<f64>> {
        if let Some(name) = self.0.strip_prefix("builtin:") {
            return builtin(name);
        }
        let p = PathBuf::from(&self.0);
        let p = match base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        };
        load_body_spec_file(p)
    }
}

fn default_attenuation() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub body: BodyRef,
    /// Distortion of the stored model. When absent, the distortion declared
    /// in the body spec (if any) is used.
    #[serde(default)]
    pub stored_distortion: Option<DistortionMap<f64>>,
    #[serde(default)]
    pub noise: NoiseModel,
    pub task: Task,
    pub probes: Vec<Probe>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: ResponseMode,
    #[serde(default)]
    pub variant: RemapVariant,
    /// Fraction of the stored-model distortion removed before a distance
    /// judgment is expressed.
    #[serde(default = "default_attenuation")]
    pub attenuation: f64,
    /// True posture; unlisted joints are at zero.
    #[serde(default)]
    pub posture: BTreeMap<String, f64>,
    #[serde(default)]
    pub prior: Option<PriorSpec>,
    #[serde(default)]
    pub efference: Option<EfferenceSpec>,
    /// Time at which posture is read out; defaults to the latest cue latency.
    #[serde(default)]
    pub query_time_ms: Option<f64>,
    #[serde(default)]
    pub extents: Vec<Extent>,
}

impl Scenario {
    /// A scenario with defaults for everything but the essentials.
    pub fn new(
        id: impl Into<String>,
        body: BodyRef,
        task: Task,
        probes: Vec<Probe>,
        trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            id: id.into(),
            body,
            stored_distortion: None,
            noise: NoiseModel::default(),
            task,
            probes,
            trials,
            seed,
            mode: ResponseMode::default(),
            variant: RemapVariant::default(),
            attenuation: default_attenuation(),
            posture: BTreeMap::new(),
            prior: None,
            efference: None,
            query_time_ms: None,
            extents: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            field: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn query_time(&self) -> f64 {
        self.query_time_ms.unwrap_or_else(|| {
            let eff = self.efference.as_ref().map_or(0.0, |e| e.latency_ms);
            self.noise.afferent_latency_ms.max(eff)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Scenario("trials must be >= 1".into()));
        }
        if self.probes.is_empty() {
            return Err(Error::Scenario("probes must be non-empty".into()));
        }
        if !(0.0..=1.0).contains(&self.attenuation) {
            return Err(Error::Scenario(format!(
                "attenuation {} must lie in [0, 1]",
                self.attenuation
            )));
        }
        self.noise.validate()?;
        if let Some(p) = &self.prior {
            if !(p.std_rad > 0.0) || !p.std_rad.is_finite() {
                return Err(Error::Scenario(format!(
                    "prior.std_rad = {} must be > 0",
                    p.std_rad
                )));
            }
        }
        if let Some(e) = &self.efference {
            if !(e.std_rad >= 0.0) || !(e.latency_ms >= 0.0) {
                return Err(Error::Scenario(
                    "efference std_rad and latency_ms must be >= 0".into(),
                ));
            }
        }
        if let Some(t) = self.query_time_ms {
            if !(t >= 0.0) {
                return Err(Error::Scenario(format!("query_time_ms = {t} must be >= 0")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_probe_shapes() {
        let s = Scenario::from_json(
            r#"{
                "id": "x", "body": "builtin:planar_arm", "task": "distance-perception",
                "probes": [
                    {"link": "forearm", "id": 3},
                    {"landmark": "wrist"},
                    {"a": {"link": "forearm", "id": 0}, "b": {"link": "forearm", "id": 1}, "axis": "across"}
                ],
                "trials": 5, "seed": 1,
                "noise": {"joint_std_rad": {"elbow": 0.02}, "weber_fraction": 0.1}
            }"#,
        )
        .unwrap();
        assert_eq!(s.probes[0], Probe::Taxel(TaxelKey::new("forearm", 3)));
        assert_eq!(
            s.probes[1],
            Probe::Landmark {
                landmark: "wrist".into()
            }
        );
        assert!(matches!(
            s.probes[2],
            Probe::Pair {
                axis: PairAxis::Across,
                ..
            }
        ));
        assert_eq!(s.noise.joint_std_rad.std_for("elbow"), 0.02);
        assert_eq!(s.noise.joint_std_rad.std_for("wrist"), 0.0);
        assert_eq!(s.attenuation, 0.9);
        assert_eq!(s.probes[2].to_string(), "forearm:0-forearm:1/across");
    }

    #[test]
    fn parse_errors_name_field() {
        let err = Scenario::from_json(r#"{"id": "x", "body": "builtin:planar_arm", "task": "juggling", "probes": [], "trials": 1, "seed": 0}"#)
            .unwrap_err();
        assert!(
            matches!(err, Error::Parse { ref field, .. } if field == "task"),
            "{err}"
        );
    }

    #[test]
    fn validation() {
        let base = Scenario::new(
            "x",
            BodyRef::builtin("planar_arm"),
            Task::LandmarkLocalization,
            vec![Probe::Landmark {
                landmark: "wrist".into(),
            }],
            1,
            0,
        );
        assert!(base.validate().is_ok());
        let mut s = base.clone();
        s.trials = 0;
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.probes.clear();
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.attenuation = 1.5;
        assert!(s.validate().is_err());
        let mut s = base;
        s.noise.weber_fraction = -0.1;
        assert!(s.validate().is_err());
    }
}
