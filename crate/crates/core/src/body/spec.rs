//! JSON body-spec documents and their conversion into validated models.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use super::distortion::DistortionMap;
use super::model::{
    BodyShapeModel, BodySizeModel, GridMeta, Joint, Landmark, SegmentLandmarks, SkinPatch, Taxel,
};
use super::validate::{validate_model, ViolationKind};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Rotation, Vec3};

const QUAT_TOL: f64 = 1e-6;

pub const BUILTIN_NAMES: &[&str] = &["planar_arm", "hand"];

const PLANAR_ARM: &str = include_str!("../../assets/planar_arm.json");
const HAND: &str = include_str!("../../assets/hand.json");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyDoc {
    #[serde(default)]
    name: Option<String>,
    links: Vec<String>,
    joints: Vec<JointDoc>,
    #[serde(default)]
    landmarks: BTreeMap<String, LandmarkDoc>,
    #[serde(default)]
    skin_patches: Vec<PatchDoc>,
    #[serde(default)]
    distortion: Option<DistortionMap<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDoc {
    id: String,
    parent: String,
    child: String,
    axis: [f64; 3],
    #[serde(default)]
    pre_transform: PreTransformDoc,
    limits_rad: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PreTransformDoc {
    /// `(w, x, y, z)`.
    #[serde(default = "identity_quat")]
    quat: [f64; 4],
    #[serde(default)]
    xyz_mm: [f64; 3],
}

fn identity_quat() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl Default for PreTransformDoc {
    fn default() -> Self {
        Self {
            quat: identity_quat(),
            xyz_mm: [0.0; 3],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LandmarkDoc {
    link: String,
    #[serde(default)]
    offset_mm: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchDoc {
    link: String,
    #[serde(default)]
    grid: Option<GridDoc>,
    #[serde(default)]
    taxels: Option<Vec<TaxelDoc>>,
    #[serde(default)]
    segment: Option<SegmentLandmarks>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    rows: u32,
    cols: u32,
    spacing_mm: f64,
    /// Position of taxel (row 0, col 0). Rows advance along +x, columns along +y.
    #[serde(default)]
    origin_mm: [f64; 3],
    #[serde(default)]
    first_id: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxelDoc {
    id: u32,
    xyz_mm: [f64; 3],
}

/// A loaded body: the veridical size/shape models plus the optional
/// distortion declared alongside them.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec<T> {
    pub name: String,
    pub size: BodySizeModel<T>,
    pub shape: BodyShapeModel<T>,
    pub distortion: Option<DistortionMap<T>>,
}

impl BodySpec<f64> {
    pub fn into_models(self) -> (BodySizeModel<f64>, BodyShapeModel<f64>) {
        (self.size, self.shape)
    }
}

/// Parses and validates a JSON body spec.
pub fn load_body_spec(document: &str) -> Result<BodySpec<f64>> {
    let doc = parse_doc(document)?;
    build(doc, true)
}

/// Parses a body spec without enforcing model invariants, so that
/// [`validate_model`] can list every violation. Schema errors still fail.
pub fn load_body_spec_unchecked(document: &str) -> Result<BodySpec<f64>> {
    let doc = parse_doc(document)?;
    build(doc, false)
}

pub fn load_body_spec_file(path: impl AsRef<Path>) -> Result<BodySpec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_body_spec(&text)
}

/// One of the embedded bodies: `planar_arm` or `hand`.
pub fn builtin(name: &str) -> Result<BodySpec<f64>> {
    match name {
        "planar_arm" => load_body_spec(PLANAR_ARM),
        "hand" => load_body_spec(HAND),
        other => Err(Error::Lookup(format!(
            "no builtin body `{other}` (have {BUILTIN_NAMES:?})"
        ))),
    }
}

fn parse_doc(document: &str) -> Result<BodyDoc> {
    let de = &mut serde_json::Deserializer::from_str(document);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        Error::Parse {
            field,
            message: e.into_inner().to_string(),
        }
    })
}

fn build(doc: BodyDoc, strict: bool) -> Result<BodySpec<f64>> {
    let mut joints = Vec::with_capacity(doc.joints.len());
    for (i, j) in doc.joints.into_iter().enumerate() {
        let [w, x, y, z] = j.pre_transform.quat;
        let qn = (w * w + x * x + y * y + z * z).sqrt();
        if (qn - 1.0).abs() > QUAT_TOL {
            return Err(Error::Invariant(format!(
                "joints[{i}].pre_transform.quat has norm {qn}, expected 1"
            )));
        }
        let rotation = Rotation::from_quaternion(w, x, y, z).ok_or_else(|| {
            Error::Invariant(format!("joints[{i}].pre_transform.quat is degenerate"))
        })?;
        joints.push(Joint {
            id: j.id,
            parent: j.parent,
            child: j.child,
            axis: Vec3::from(j.axis),
            pre_transform: Pose::new(rotation, Vec3::from(j.pre_transform.xyz_mm)),
            limits: (j.limits_rad[0], j.limits_rad[1]),
        });
    }

    let (base, joints) = if strict {
        let base = find_base(&doc.links, &joints)?;
        let joints = order_joints(&base, joints)?;
        (base, joints)
    } else {
        let base = find_base(&doc.links, &joints)
            .unwrap_or_else(|_| doc.links.first().cloned().unwrap_or_default());
        let ordered = order_joints(&base, joints.clone()).unwrap_or(joints);
        (base, ordered)
    };

    let landmarks = doc
        .landmarks
        .into_iter()
        .map(|(id, l)| {
            (
                id,
                Landmark {
                    link: l.link,
                    offset: Vec3::from(l.offset_mm),
                },
            )
        })
        .collect();

    let mut patches = BTreeMap::new();
    for (i, p) in doc.skin_patches.into_iter().enumerate() {
        let taxels = match (p.grid.as_ref(), p.taxels) {
            (Some(g), None) => grid_taxels(&p.link, g),
            (None, Some(list)) => list
                .into_iter()
                .map(|t| Taxel {
                    id: t.id,
                    link: p.link.clone(),
                    local: Vec3::from(t.xyz_mm),
                })
                .collect(),
            _ => {
                return Err(Error::Parse {
                    field: format!("skin_patches[{i}]"),
                    message: "exactly one of `grid` or `taxels` is required".into(),
                })
            }
        };
        let grid = p.grid.map(|g| GridMeta {
            rows: g.rows,
            cols: g.cols,
            spacing_mm: g.spacing_mm,
        });
        let patch = SkinPatch {
            link: p.link.clone(),
            taxels,
            grid,
            bias: Vec3::zero(),
            segment: p.segment,
        };
        if patches.insert(p.link.clone(), patch).is_some() && strict {
            return Err(Error::Structural(format!(
                "skin_patches[{i}]: second patch on link `{}`",
                p.link
            )));
        }
    }

    let size = BodySizeModel {
        base,
        links: doc.links,
        joints,
        landmarks,
    };
    let shape = BodyShapeModel { patches };
    if !strict {
        return Ok(BodySpec {
            name: doc.name.unwrap_or_else(|| "body".into()),
            size,
            shape,
            distortion: doc.distortion,
        });
    }
    let report = validate_model(&size, &shape);
    if let Some(v) = report
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::Structural)
    {
        return Err(Error::Structural(v.to_string()));
    }
    if let Some(v) = report.violations.first() {
        return Err(Error::Invariant(v.to_string()));
    }
    if let Some(d) = &doc.distortion {
        d.validate()?;
    }
    Ok(BodySpec {
        name: doc.name.unwrap_or_else(|| "body".into()),
        size,
        shape,
        distortion: doc.distortion,
    })
}

fn grid_taxels(link: &str, g: &GridDoc) -> Vec<Taxel<f64>> {
    let origin = Vec3::from(g.origin_mm);
    let mut out = Vec::with_capacity((g.rows * g.cols) as usize);
    for r in 0..g.rows {
        for c in 0..g.cols {
            let local = origin
                + Vec3::new(
                    f64::from(r) * g.spacing_mm,
                    f64::from(c) * g.spacing_mm,
                    0.0,
                );
            out.push(Taxel {
                id: g.first_id + r * g.cols + c,
                link: link.to_string(),
                local,
            });
        }
    }
    out
}

fn find_base(links: &[String], joints: &[Joint<f64>]) -> Result<String> {
    let children: BTreeSet<&str> = joints.iter().map(|j| j.child.as_str()).collect();
    let roots: Vec<&String> = links
        .iter()
        .filter(|l| !children.contains(l.as_str()))
        .collect();
    match roots.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(Error::Structural(
            "joint graph contains a cycle: every link is a joint child".into(),
        )),
        many => Err(Error::Structural(format!(
            "joint graph is not a single rooted tree: links {many:?} have no parent joint"
        ))),
    }
}

/// Orders joints so that every joint's parent link is placed before it.
fn order_joints(base: &str, joints: Vec<Joint<f64>>) -> Result<Vec<Joint<f64>>> {
    let mut placed = BTreeSet::from([base.to_string()]);
    let mut pending = joints;
    let mut ordered = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let (ready, rest): (Vec<_>, Vec<_>) = pending
            .into_iter()
            .partition(|j| placed.contains(&j.parent));
        if ready.is_empty() {
            let ids: Vec<&str> = rest.iter().map(|j| j.id.as_str()).collect();
            return Err(Error::Structural(format!(
                "joints {ids:?} are unreachable from base `{base}` (cycle or dangling parent link)"
            )));
        }
        for j in ready {
            placed.insert(j.child.clone());
            ordered.push(j);
        }
        pending = rest;
    }
    Ok(ordered)
}
