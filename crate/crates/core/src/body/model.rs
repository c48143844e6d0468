use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec3};
use crate::scalar::Real;

/// Revolute joint connecting a parent link to a child link. The child frame
/// is `parent ∘ pre_transform ∘ rotation(axis, angle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint<T> {
    pub id: String,
    pub parent: String,
    pub child: String,
    pub axis: Vec3<T>,
    pub pre_transform: Pose<T>,
    /// `(min, max)` in radians.
    pub limits: (T, T),
}

impl<T: Real> Joint<T> {
    pub fn admits(&self, angle: T) -> bool {
        angle >= self.limits.0 && angle <= self.limits.1
    }

    pub fn clamp(&self, angle: T) -> T {
        angle.max(self.limits.0).min(self.limits.1)
    }
}

/// Named anchor point fixed in a link frame ("wrist", "elbow", "knuckle-1").
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark<T> {
    pub link: String,
    pub offset: Vec3<T>,
}

/// The "stick figure": links, joints ordered from the body-centred base
/// frame outwards, and named landmark anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySizeModel<T> {
    pub base: String,
    pub links: Vec<String>,
    pub joints: Vec<Joint<T>>,
    pub landmarks: BTreeMap<String, Landmark<T>>,
}

impl<T: Real> BodySizeModel<T> {
    pub fn joint(&self, id: &str) -> Option<&Joint<T>> {
        self.joints.iter().find(|j| j.id == id)
    }

    pub fn landmark(&self, id: &str) -> Option<&Landmark<T>> {
        self.landmarks.get(id)
    }

    pub fn has_link(&self, link: &str) -> bool {
        self.links.iter().any(|l| l == link)
    }

    pub fn joint_ids(&self) -> impl Iterator<Item = &str> {
        self.joints.iter().map(|j| j.id.as_str())
    }

    pub fn cast<U: Real>(&self) -> BodySizeModel<U> {
        BodySizeModel {
            base: self.base.clone(),
            links: self.links.clone(),
            joints: self
                .joints
                .iter()
                .map(|j| Joint {
                    id: j.id.clone(),
                    parent: j.parent.clone(),
                    child: j.child.clone(),
                    axis: j.axis.cast(),
                    pre_transform: j.pre_transform.cast(),
                    limits: (
                        U::lit(j.limits.0.to_f64_lossy()),
                        U::lit(j.limits.1.to_f64_lossy()),
                    ),
                })
                .collect(),
            landmarks: self
                .landmarks
                .iter()
                .map(|(k, l)| {
                    (
                        k.clone(),
                        Landmark {
                            link: l.link.clone(),
                            offset: l.offset.cast(),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taxel<T> {
    pub id: u32,
    pub link: String,
    /// Position in the link frame, mm.
    pub local: Vec3<T>,
}

/// Addresses one taxel: ids are only unique within their patch.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaxelKey {
    pub link: String,
    pub id: u32,
}

impl TaxelKey {
    pub fn new(link: impl Into<String>, id: u32) -> Self {
        Self {
            link: link.into(),
            id,
        }
    }
}

impl fmt::Display for TaxelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.link, self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub rows: u32,
    pub cols: u32,
    pub spacing_mm: f64,
}

/// Landmarks bounding a skin patch along its segment, used by triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentLandmarks {
    pub proximal: String,
    pub distal: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkinPatch<T> {
    pub link: String,
    pub taxels: Vec<Taxel<T>>,
    pub grid: Option<GridMeta>,
    /// Constant skin-frame bias, added only for silhouette-mode responses.
    pub bias: Vec3<T>,
    pub segment: Option<SegmentLandmarks>,
}

impl<T: Real> SkinPatch<T> {
    pub fn taxel(&self, id: u32) -> Option<&Taxel<T>> {
        self.taxels.iter().find(|t| t.id == id)
    }
}

/// Skin spatial calibration: taxel point clouds keyed by link id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BodyShapeModel<T> {
    pub patches: BTreeMap<String, SkinPatch<T>>,
}

impl<T: Real> BodyShapeModel<T> {
    pub fn patch(&self, link: &str) -> Option<&SkinPatch<T>> {
        self.patches.get(link)
    }

    pub fn taxel(&self, key: &TaxelKey) -> Option<&Taxel<T>> {
        self.patch(&key.link).and_then(|p| p.taxel(key.id))
    }

    pub fn taxel_count(&self) -> usize {
        self.patches.values().map(|p| p.taxels.len()).sum()
    }

    pub fn taxel_keys(&self) -> impl Iterator<Item = TaxelKey> + '_ {
        self.patches.values().flat_map(|p| {
            p.taxels
                .iter()
                .map(move |t| TaxelKey::new(p.link.clone(), t.id))
        })
    }

    pub fn cast<U: Real>(&self) -> BodyShapeModel<U> {
        BodyShapeModel {
            patches: self
                .patches
                .iter()
                .map(|(k, p)| {
                    let patch = SkinPatch {
                        link: p.link.clone(),
                        taxels: p
                            .taxels
                            .iter()
                            .map(|t| Taxel {
                                id: t.id,
                                link: t.link.clone(),
                                local: t.local.cast(),
                            })
                            .collect(),
                        grid: p.grid,
                        bias: p.bias.cast(),
                        segment: p.segment.clone(),
                    };
                    (k.clone(), patch)
                })
                .collect(),
        }
    }
}
