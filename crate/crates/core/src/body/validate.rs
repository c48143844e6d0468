use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::model::{BodyShapeModel, BodySizeModel};
use crate::scalar::Real;

const AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// Graph shape or dangling reference.
    Structural,
    /// Value-level invariant (limits, axis norm, empty patch...).
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending item, e.g. `joint elbow` or `landmark wrist`.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.subject.contains(name) || v.message.contains(name))
    }

    fn push(
        &mut self,
        kind: ViolationKind,
        subject: impl Into<String>,
        message: impl Into<String>,
    ) {
        self.violations.push(Violation {
            kind,
            subject: subject.into(),
            message: message.into(),
        });
    }
}

/// Checks every body-model invariant and lists the violations. An empty
/// report means the pair is usable by the pipeline.
pub fn validate_model<T: Real>(
    size: &BodySizeModel<T>,
    shape: &BodyShapeModel<T>,
) -> ValidationReport {
    use ViolationKind::*;
    let mut report = ValidationReport::default();

    let mut links = BTreeSet::new();
    for l in &size.links {
        if !links.insert(l.as_str()) {
            report.push(Structural, format!("link {l}"), "duplicate link id");
        }
    }
    if !links.contains(size.base.as_str()) {
        report.push(
            Structural,
            format!("base {}", size.base),
            "base link is not declared in links",
        );
    }

    let mut joint_ids = BTreeSet::new();
    let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
    for j in &size.joints {
        let subject = format!("joint {}", j.id);
        if !joint_ids.insert(j.id.as_str()) {
            report.push(Structural, &subject, "duplicate joint id");
        }
        for (role, link) in [("parent", &j.parent), ("child", &j.child)] {
            if !links.contains(link.as_str()) {
                report.push(
                    Structural,
                    &subject,
                    format!("{role} link `{link}` does not exist"),
                );
            }
        }
        if j.child == size.base {
            report.push(
                Structural,
                &subject,
                format!("base link `{}` cannot be a joint child", size.base),
            );
        }
        if parent_of
            .insert(j.child.as_str(), j.parent.as_str())
            .is_some()
        {
            report.push(
                Structural,
                &subject,
                format!("link `{}` has more than one parent joint", j.child),
            );
        }
        let n = j.axis.norm().to_f64_lossy();
        if !n.is_finite() || (n - 1.0).abs() > AXIS_TOL {
            report.push(Invariant, &subject, format!("axis norm {n} is not 1"));
        }
        let (lo, hi) = (j.limits.0.to_f64_lossy(), j.limits.1.to_f64_lossy());
        if !(lo <= 0.0 && 0.0 <= hi) {
            report.push(
                Invariant,
                &subject,
                format!("limits ({lo}, {hi}) must satisfy min <= 0 <= max"),
            );
        }
    }

    // Rooted tree: walking up from any link must reach the base without
    // revisiting a link; joints must be listed parent-first.
    for l in &size.links {
        let mut seen = BTreeSet::new();
        let mut cur = l.as_str();
        while cur != size.base {
            if !seen.insert(cur) {
                report.push(
                    Structural,
                    format!("link {l}"),
                    "joint graph contains a cycle",
                );
                break;
            }
            match parent_of.get(cur) {
                Some(p) => cur = p,
                None => {
                    report.push(
                        Structural,
                        format!("link {l}"),
                        "not reachable from the base link",
                    );
                    break;
                }
            }
        }
    }
    let mut resolved = BTreeSet::from([size.base.as_str()]);
    for j in &size.joints {
        if links.contains(j.parent.as_str()) && !resolved.contains(j.parent.as_str()) {
            report.push(
                Structural,
                format!("joint {}", j.id),
                "listed before the joint that places its parent link",
            );
        }
        resolved.insert(j.child.as_str());
    }

    for (id, lm) in &size.landmarks {
        if !links.contains(lm.link.as_str()) {
            report.push(
                Structural,
                format!("landmark {id}"),
                format!("link `{}` does not exist", lm.link),
            );
        }
    }

    for (key, patch) in &shape.patches {
        let subject = format!("skin patch {key}");
        if key != &patch.link {
            report.push(
                Structural,
                &subject,
                format!("keyed under `{key}` but declares link `{}`", patch.link),
            );
        }
        if !links.contains(patch.link.as_str()) {
            report.push(
                Structural,
                &subject,
                format!("link `{}` does not exist", patch.link),
            );
        }
        if patch.taxels.is_empty() {
            report.push(Invariant, &subject, "taxel set is empty");
        }
        let mut ids = BTreeSet::new();
        for t in &patch.taxels {
            if !ids.insert(t.id) {
                report.push(Invariant, &subject, format!("duplicate taxel id {}", t.id));
            }
            if t.link != patch.link {
                report.push(
                    Structural,
                    &subject,
                    format!("taxel {} references link `{}`", t.id, t.link),
                );
            }
        }
        if let Some(seg) = &patch.segment {
            for lm in [&seg.proximal, &seg.distal] {
                if !size.landmarks.contains_key(lm) {
                    report.push(
                        Structural,
                        &subject,
                        format!("segment landmark `{lm}` does not exist"),
                    );
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{builtin, Landmark};
    use crate::geometry::Vec3;

    #[test]
    fn default_spec_is_clean() {
        let b = builtin("planar_arm").unwrap();
        assert!(validate_model(&b.size, &b.shape).is_empty());
    }

    #[test]
    fn duplicate_taxel_id_is_named() {
        let b = builtin("planar_arm").unwrap();
        let mut shape = b.shape.clone();
        let p = shape.patches.get_mut("forearm").unwrap();
        p.taxels[3].id = 17;
        let r = validate_model(&b.size, &shape);
        assert_eq!(r.len(), 1);
        assert!(r.violations[0].message.contains("17"));
        assert_eq!(r.violations[0].kind, ViolationKind::Invariant);
    }

    #[test]
    fn landmark_on_missing_link_is_named() {
        let b = builtin("planar_arm").unwrap();
        let mut size = b.size.clone();
        size.landmarks.insert(
            "knee".into(),
            Landmark {
                link: "shin".into(),
                offset: Vec3::zero(),
            },
        );
        let r = validate_model(&size, &b.shape);
        assert_eq!(r.len(), 1);
        assert!(r.violations[0].subject.contains("knee"));
    }

    #[test]
    fn reports_every_violation() {
        let b = builtin("planar_arm").unwrap();
        let mut size = b.size.clone();
        size.joints[0].axis = Vec3::new(0.0, 0.0, 2.0);
        size.joints[1].limits = (0.1, 1.0);
        let mut shape = b.shape.clone();
        shape.patches.get_mut("forearm").unwrap().taxels.clear();
        let r = validate_model(&size, &shape);
        assert_eq!(r.len(), 3, "{:?}", r.violations);
        assert!(r.mentions("shoulder") && r.mentions("elbow") && r.mentions("forearm"));
    }

    #[test]
    fn cycle_detected() {
        let b = builtin("planar_arm").unwrap();
        let mut size = b.size.clone();
        // re-parent the upper arm onto the hand: upper_arm -> forearm -> hand -> upper_arm
        size.joints[0].parent = "hand".into();
        let r = validate_model(&size, &b.shape);
        assert!(
            r.violations.iter().any(|v| v.message.contains("cycle")),
            "{:?}",
            r.violations
        );
    }
}
