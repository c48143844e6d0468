use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{BodyShapeModel, BodySizeModel};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

fn one<T: Real>() -> T {
    T::one()
}

/// Per-link scale factors along the link frame axes: x is proximodistal,
/// y mediolateral and z normal to the skin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct AxisScales<T> {
    #[serde(default = "one")]
    pub proximodistal: T,
    #[serde(default = "one")]
    pub mediolateral: T,
    #[serde(default = "one")]
    pub normal: T,
}

impl<T: Real> AxisScales<T> {
    pub fn uniform(s: T) -> Self {
        Self {
            proximodistal: s,
            mediolateral: s,
            normal: s,
        }
    }

    pub fn new(proximodistal: T, mediolateral: T, normal: T) -> Self {
        Self {
            proximodistal,
            mediolateral,
            normal,
        }
    }

    pub fn as_vec(&self) -> Vec3<T> {
        Vec3::new(self.proximodistal, self.mediolateral, self.normal)
    }
}

impl<T: Real> Default for AxisScales<T> {
    fn default() -> Self {
        Self::uniform(T::one())
    }
}

/// Parametric error of a stored body model relative to the veridical body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DistortionMap<T> {
    /// Link id → axis scales.
    #[serde(default = "BTreeMap::new")]
    pub scales: BTreeMap<String, AxisScales<T>>,
    /// Patch (link) id → constant skin-frame bias, mm.
    #[serde(default = "BTreeMap::new", rename = "bias_mm")]
    pub bias: BTreeMap<String, Vec3<T>>,
}

impl<T: Real> Default for DistortionMap<T> {
    fn default() -> Self {
        Self {
            scales: BTreeMap::new(),
            bias: BTreeMap::new(),
        }
    }
}

impl<T: Real> DistortionMap<T> {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with_scale(mut self, link: impl Into<String>, scales: AxisScales<T>) -> Self {
        self.scales.insert(link.into(), scales);
        self
    }

    pub fn with_bias(mut self, patch: impl Into<String>, bias: Vec3<T>) -> Self {
        self.bias.insert(patch.into(), bias);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (link, s) in &self.scales {
            for (axis, v) in [
                ("proximodistal", s.proximodistal),
                ("mediolateral", s.mediolateral),
                ("normal", s.normal),
            ] {
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::Invariant(format!(
                        "distortion.scales.{link}.{axis} = {v} must be > 0"
                    )));
                }
            }
        }
        for (patch, b) in &self.bias {
            if !(b.x.is_finite() && b.y.is_finite() && b.z.is_finite()) {
                return Err(Error::Invariant(format!(
                    "distortion.bias_mm.{patch} is not finite"
                )));
            }
        }
        Ok(())
    }
}

/// Produces a stored model from `size`/`shape`: every translation expressed
/// in a scaled link's frame (child joint offsets, landmark offsets, taxel
/// positions) is scaled per axis. Patch biases are accumulated into the
/// stored shape but not applied to taxel positions.
pub fn apply_distortion<T: Real>(
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
    d: &DistortionMap<T>,
) -> Result<(BodySizeModel<T>, BodyShapeModel<T>)> {
    d.validate()?;
    for link in d.scales.keys() {
        if !size.has_link(link) {
            return Err(Error::Lookup(format!(
                "distortion.scales references unknown link `{link}`"
            )));
        }
    }
    for patch in d.bias.keys() {
        if shape.patch(patch).is_none() {
            return Err(Error::Lookup(format!(
                "distortion.bias_mm references unknown patch `{patch}`"
            )));
        }
    }

    let mut size = size.clone();
    let mut shape = shape.clone();
    for (link, s) in &d.scales {
        let s = s.as_vec();
        for j in size.joints.iter_mut().filter(|j| &j.parent == link) {
            j.pre_transform.translation = j.pre_transform.translation.scale_by(&s);
        }
        for lm in size.landmarks.values_mut().filter(|l| &l.link == link) {
            lm.offset = lm.offset.scale_by(&s);
        }
        if let Some(p) = shape.patches.get_mut(link) {
            for t in &mut p.taxels {
                t.local = t.local.scale_by(&s);
            }
        }
    }
    for (patch, b) in &d.bias {
        if let Some(p) = shape.patches.get_mut(patch) {
            p.bias += *b;
        }
    }
    Ok((size, shape))
}
