use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::body::{BodyShapeModel, TaxelKey};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// How the localization response is expressed. Silhouette judgments carry
/// the patch's constant skin bias; pointing responses do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseMode {
    #[default]
    Pointing,
    Silhouette,
}

impl fmt::Display for ResponseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponseMode::Pointing => "pointing",
            ResponseMode::Silhouette => "silhouette",
        })
    }
}

impl FromStr for ResponseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointing" => Ok(Self::Pointing),
            "silhouette" => Ok(Self::Silhouette),
            other => Err(Error::Configuration(format!(
                "unknown response mode `{other}`"
            ))),
        }
    }
}

/// Activated taxels with their intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchEvent<T> {
    pub active: Vec<(TaxelKey, T)>,
    pub onset_ms: f64,
}

impl<T: Real> TouchEvent<T> {
    pub fn new(active: Vec<(TaxelKey, T)>, onset_ms: f64) -> Result<Self> {
        let t = Self { active, onset_ms };
        t.validate()?;
        Ok(t)
    }

    pub fn single(key: TaxelKey) -> Self {
        Self {
            active: vec![(key, T::one())],
            onset_ms: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.active.is_empty() {
            return Err(Error::Invariant("touch has no active taxels".into()));
        }
        for (k, w) in &self.active {
            if !w.is_finite() || *w < T::zero() {
                return Err(Error::Invariant(format!(
                    "taxel {k} intensity {w} must be finite and >= 0"
                )));
            }
        }
        if self.active.iter().all(|(_, w)| *w == T::zero()) {
            return Err(Error::Invariant("all touch intensities are zero".into()));
        }
        Ok(())
    }
}

/// Where on the skin a touch was felt: a link and a point in its frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SomaticLocation<T> {
    pub link: String,
    pub local: Vec3<T>,
}

/// Intensity-weighted centroid of the active taxels' stored positions, plus
/// the patch bias in silhouette mode.
pub fn somatic_localization<T: Real>(
    touch: &TouchEvent<T>,
    shape: &BodyShapeModel<T>,
    mode: ResponseMode,
) -> Result<SomaticLocation<T>> {
    touch.validate()?;
    let links: BTreeSet<&str> = touch.active.iter().map(|(k, _)| k.link.as_str()).collect();
    if links.len() > 1 {
        return Err(Error::Ambiguous(
            links.into_iter().map(String::from).collect(),
        ));
    }
    let link = touch.active[0].0.link.clone();
    let patch = shape
        .patch(&link)
        .ok_or_else(|| Error::Lookup(format!("no skin patch on link `{link}`")))?;

    let mut sum = Vec3::zero();
    let mut total = T::zero();
    for (key, w) in &touch.active {
        let taxel = patch
            .taxel(key.id)
            .ok_or_else(|| Error::Lookup(format!("unknown taxel id {key}")))?;
        sum += taxel.local * *w;
        total = total + *w;
    }
    let mut local = sum / total;
    if mode == ResponseMode::Silhouette {
        local += patch.bias;
    }
    Ok(SomaticLocation { link, local })
}
