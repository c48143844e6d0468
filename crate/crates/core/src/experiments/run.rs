use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::report::{
    aggregate, ExperimentReport, ExtentJudgment, ProfilePoint, TaskSummary, TrialRecord,
};
use super::scenario::{ExtentKind, PairAxis, Probe, Scenario, Task};
use super::stats::{argmax, is_unimodal, mid_near_ratio};
use crate::body::{apply_distortion, BodyShapeModel, BodySizeModel, BodySpec, TaxelKey};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::pipeline::{
    default_posture, forward_kinematics, landmark_position, segment_frame, somatic_localization,
    spatial_single, spatial_triangulated, JointState, LinkPoses, RemapVariant, SomaticLocation,
    TouchEvent,
};
use crate::posture::{estimate_posture_at, AngleCue, PosturalPrior};

/// Smallest cue std handed to the posterior, rad. Noiseless cues are
/// represented as (almost) perfectly precise rather than rejected.
const MIN_CUE_STD: f64 = 1e-9;

/// Veridical world position and along-segment coordinate of a probe.
type ProbeTruth = (Vec3<f64>, f64);

/// A validated scenario bound to its veridical body and the derived stored
/// body.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scenario: Scenario,
    pub veridical: BodySpec<f64>,
    pub stored_size: BodySizeModel<f64>,
    pub stored_shape: BodyShapeModel<f64>,
    true_state: JointState<f64>,
    true_poses: LinkPoses<f64>,
}

struct Perceived {
    poses: LinkPoses<f64>,
    clamped: bool,
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

impl Experiment {
    pub fn new(scenario: Scenario, veridical: BodySpec<f64>) -> Result<Self> {
        scenario.validate()?;
        let distortion = scenario
            .stored_distortion
            .clone()
            .or_else(|| veridical.distortion.clone())
            .unwrap_or_default();
        let (stored_size, stored_shape) =
            apply_distortion(&veridical.size, &veridical.shape, &distortion)
                .map_err(|e| Error::Scenario(format!("stored_distortion: {e}")))?;

        let mut true_state = default_posture(&veridical.size);
        for (joint, angle) in &scenario.posture {
            let j = veridical
                .size
                .joint(joint)
                .ok_or_else(|| Error::Scenario(format!("posture.{joint}: unknown joint")))?;
            if !j.admits(*angle) {
                return Err(Error::Scenario(format!(
                    "posture.{joint} = {angle} outside joint limits"
                )));
            }
            true_state.angles.insert(joint.clone(), *angle);
        }
        if let super::scenario::JointNoise::PerJoint(m) = &scenario.noise.joint_std_rad {
            if let Some(j) = m.keys().find(|j| veridical.size.joint(j).is_none()) {
                return Err(Error::Scenario(format!(
                    "noise.joint_std_rad.{j}: unknown joint"
                )));
            }
        }
        let true_poses = forward_kinematics(&veridical.size, &true_state)?;
        Ok(Self {
            scenario,
            veridical,
            stored_size,
            stored_shape,
            true_state,
            true_poses,
        })
    }

    /// Builds an experiment from a scenario whose body reference is resolved
    /// relative to `base_dir`.
    pub fn from_scenario(scenario: Scenario, base_dir: Option<&Path>) -> Result<Self> {
        let body = scenario.body.resolve(base_dir)?;
        Self::new(scenario, body)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let scenario = Scenario::load(path)?;
        Self::from_scenario(scenario, path.parent())
    }

    pub fn true_state(&self) -> &JointState<f64> {
        &self.true_state
    }

    pub fn run(&self) -> Result<ExperimentReport> {
        match self.scenario.task {
            Task::TactileLocalization => run_tactile_localization(self),
            Task::LandmarkLocalization => run_landmark_localization(self),
            Task::DistancePerception => run_distance_perception(self),
            Task::ModelComparison => compare_remapping_models(self),
        }
    }

    fn require_task(&self, task: Task) -> Result<()> {
        if self.scenario.task != task {
            return Err(Error::Scenario(format!(
                "scenario task is {}, expected {task}",
                self.scenario.task
            )));
        }
        Ok(())
    }

    /// Samples afference (and efference), forms the posture estimate and
    /// runs FK on the stored body. Always draws one normal per joint per
    /// cue so the stream layout is independent of the noise levels.
    fn perceive(&self, rng: &mut ChaCha8Rng) -> Result<Perceived> {
        let sc = &self.scenario;
        let size = &self.stored_size;
        let mut aff = AngleCue::new(sc.noise.afferent_latency_ms);
        for j in &size.joints {
            let truth = self.true_state.angles[&j.id];
            let sd = sc.noise.joint_std_rad.std_for(&j.id);
            aff.joints.insert(
                j.id.clone(),
                crate::posture::Gaussian::new(truth + sd * normal(rng), sd.max(MIN_CUE_STD)),
            );
        }
        let eff = sc.efference.as_ref().map(|e| {
            let mut c = AngleCue::new(e.latency_ms);
            for j in &size.joints {
                let truth = self.true_state.angles[&j.id];
                c.joints.insert(
                    j.id.clone(),
                    crate::posture::Gaussian::new(
                        truth + e.std_rad * normal(rng),
                        e.std_rad.max(MIN_CUE_STD),
                    ),
                );
            }
            c
        });

        let t = sc.query_time();
        let mut state = match &sc.prior {
            Some(p) => {
                let prior = PosturalPrior::canonical(size, p.std_rad);
                estimate_posture_at(t, &prior, &aff, eff.as_ref())?.mean_state()
            }
            None => {
                let arrived: Vec<&AngleCue<f64>> = std::iter::once(&aff)
                    .chain(eff.as_ref())
                    .filter(|c| c.arrived_by(t))
                    .collect();
                let mut s = default_posture(size);
                for j in &size.joints {
                    let sources: Vec<_> = arrived
                        .iter()
                        .filter_map(|c| c.joints.get(&j.id).copied())
                        .collect();
                    if let Some(post) = crate::posture::fuse_gaussians(&sources) {
                        s.angles.insert(j.id.clone(), post.mean);
                    }
                }
                s
            }
        };
        state.timestamp_ms = t;
        let clamped = !state.clamp_to_limits(size).is_empty();
        Ok(Perceived {
            poses: forward_kinematics(size, &state)?,
            clamped,
        })
    }

    fn taxel_probes(&self) -> Result<Vec<TaxelKey>> {
        let mut keys = Vec::with_capacity(self.scenario.probes.len());
        for p in &self.scenario.probes {
            match p {
                Probe::Taxel(k) => keys.push(k.clone()),
                other => return Err(Error::Scenario(format!("probe `{other}` is not a taxel"))),
            }
        }
        if let Some(k) = keys.iter().find(|k| k.link != keys[0].link) {
            return Err(Error::Scenario(format!(
                "probe taxels span several patches (`{}` and `{}`)",
                keys[0].link, k.link
            )));
        }
        for k in &keys {
            if self.veridical.shape.taxel(k).is_none() {
                return Err(Error::Scenario(format!("probe taxel {k} does not exist")));
            }
        }
        Ok(keys)
    }

    fn tactile_trial(
        &self,
        key: &TaxelKey,
        truth: Vec3<f64>,
        variant: RemapVariant,
        index: usize,
        trial: usize,
    ) -> Result<(TrialRecord, bool)> {
        let sc = &self.scenario;
        let mut rng = trial_rng(sc.seed, index);
        let perceived = self.perceive(&mut rng)?;
        let touch = TouchEvent::single(key.clone());
        let mut somatic = somatic_localization(&touch, &self.stored_shape, sc.mode)?;
        let (jx, jy) = (normal(&mut rng), normal(&mut rng));
        somatic.local.x += sc.noise.taxel_jitter_mm * jx;
        somatic.local.y += sc.noise.taxel_jitter_mm * jy;
        let response = match variant {
            RemapVariant::Single => spatial_single(&somatic, &perceived.poses)?,
            RemapVariant::Triangulation => spatial_triangulated(
                &somatic,
                &self.stored_size,
                &self.stored_shape,
                &perceived.poses,
                sc.noise.weber_fraction,
                &mut rng,
            )?,
        };
        Ok((
            TrialRecord::new(key.to_string(), variant, trial, truth, response),
            perceived.clamped,
        ))
    }

    /// Veridical world position and along-segment coordinate of each probe.
    fn tactile_truths(&self, keys: &[TaxelKey]) -> Result<(Vec<ProbeTruth>, f64)> {
        let patch = self
            .veridical
            .shape
            .patch(&keys[0].link)
            .ok_or_else(|| Error::Scenario(format!("no skin patch on `{}`", keys[0].link)))?;
        let mut out = Vec::with_capacity(keys.len());
        let mut length = None;
        for k in keys {
            let somatic = SomaticLocation {
                link: k.link.clone(),
                local: patch.taxel(k.id).expect("checked").local,
            };
            let world = spatial_single(&somatic, &self.true_poses)?;
            let along = if patch.segment.is_some() {
                let f = segment_frame(
                    &somatic,
                    &self.veridical.size,
                    &self.veridical.shape,
                    &self.true_poses,
                )?;
                length = Some(f.length);
                f.along
            } else {
                somatic.local.x
            };
            out.push((world, along));
        }
        let length =
            length.unwrap_or_else(|| patch.taxels.iter().map(|t| t.local.x).fold(0.0, f64::max));
        Ok((out, length))
    }

    fn run_tactile_variant(
        &self,
        keys: &[TaxelKey],
        truths: &[ProbeTruth],
        variant: RemapVariant,
    ) -> Result<(Vec<TrialRecord>, usize)> {
        let trials = self.scenario.trials;
        let results: Vec<(TrialRecord, bool)> = (0..keys.len() * trials)
            .into_par_iter()
            .map(|index| {
                let (p, t) = (index / trials, index % trials);
                self.tactile_trial(&keys[p], truths[p].0, variant, index, t)
            })
            .collect::<Result<_>>()?;
        let clamped = results.iter().filter(|(_, c)| *c).count();
        Ok((results.into_iter().map(|(r, _)| r).collect(), clamped))
    }
}

fn profile(records: &[TrialRecord], keys: &[TaxelKey], truths: &[ProbeTruth]) -> Vec<ProfilePoint> {
    let aggs = aggregate(records);
    keys.iter()
        .zip(truths)
        .zip(aggs)
        .map(|((k, (_, along)), a)| {
            debug_assert_eq!(a.probe, k.to_string());
            ProfilePoint {
                probe: k.to_string(),
                along_mm: *along,
                variable_error: a.variable_error,
            }
        })
        .collect()
}

/// Localizes touches on each probe taxel across trials and summarizes the
/// variable-error profile along the patch segment.
pub fn run_tactile_localization(exp: &Experiment) -> Result<ExperimentReport> {
    exp.require_task(Task::TactileLocalization)?;
    let keys = exp.taxel_probes()?;
    let (truths, length) = exp.tactile_truths(&keys)?;
    let (records, clamped_trials) =
        exp.run_tactile_variant(&keys, &truths, exp.scenario.variant)?;
    let profile = profile(&records, &keys, &truths);
    let mut sorted: Vec<(f64, f64)> = profile
        .iter()
        .map(|p| (p.along_mm, p.variable_error))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ves: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    let peak = argmax(&ves);
    let summary = TaskSummary::TactileLocalization {
        segment_length_mm: length,
        mid_near_ratio: mid_near_ratio(&sorted, length),
        unimodal: is_unimodal(&ves),
        interior_peak: matches!(peak, Some(i) if i > 0 && i + 1 < ves.len()),
        profile,
    };
    Ok(ExperimentReport {
        scenario: exp.scenario.clone(),
        aggregates: aggregate(&records),
        records,
        summary,
        clamped_trials,
    })
}

/// Localizes landmarks with the stored body under the perceived posture and
/// judges the configured extents against the veridical body.
pub fn run_landmark_localization(exp: &Experiment) -> Result<ExperimentReport> {
    exp.require_task(Task::LandmarkLocalization)?;
    let sc = &exp.scenario;
    let mut names = Vec::with_capacity(sc.probes.len());
    for p in &sc.probes {
        match p {
            Probe::Landmark { landmark } => names.push(landmark.clone()),
            other => {
                return Err(Error::Scenario(format!(
                    "probe `{other}` is not a landmark"
                )))
            }
        }
    }
    for e in &sc.extents {
        names.extend([e.from.clone(), e.to.clone()]);
    }
    for n in &names {
        if exp.veridical.size.landmark(n).is_none() {
            return Err(Error::Scenario(format!("unknown landmark `{n}`")));
        }
    }
    let truth: BTreeMap<&str, Vec3<f64>> = names
        .iter()
        .map(|n| {
            Ok((
                n.as_str(),
                landmark_position(&exp.veridical.size, &exp.true_poses, n)?,
            ))
        })
        .collect::<Result<_>>()?;

    // one posture sample per trial; every landmark of a trial is read from it
    let per_trial: Vec<(BTreeMap<&str, Vec3<f64>>, bool)> = (0..sc.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(sc.seed, t);
            let p = exp.perceive(&mut rng)?;
            let judged = names
                .iter()
                .map(|n| {
                    Ok((
                        n.as_str(),
                        landmark_position(&exp.stored_size, &p.poses, n)?,
                    ))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok((judged, p.clamped))
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(sc.probes.len() * sc.trials);
    for (i, p) in sc.probes.iter().enumerate() {
        let name = names[i].as_str();
        for (t, (judged, _)) in per_trial.iter().enumerate() {
            records.push(TrialRecord::new(
                p.to_string(),
                sc.variant,
                t,
                truth[name],
                judged[name],
            ));
        }
    }
    let extents: Vec<ExtentJudgment> = sc
        .extents
        .iter()
        .map(|e| {
            let veridical = truth[e.from.as_str()].distance(&truth[e.to.as_str()]);
            let judged = per_trial
                .iter()
                .map(|(j, _)| j[e.from.as_str()].distance(&j[e.to.as_str()]))
                .sum::<f64>()
                / per_trial.len() as f64;
            ExtentJudgment {
                name: e.name.clone(),
                kind: e.kind,
                veridical_mm: veridical,
                judged_mean_mm: judged,
                ratio: judged / veridical,
            }
        })
        .collect();
    let mean_ratio = |kind: ExtentKind| {
        let r: Vec<f64> = extents
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.ratio)
            .collect();
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    };
    let summary = TaskSummary::LandmarkLocalization {
        length_ratio: mean_ratio(ExtentKind::Length),
        width_ratio: mean_ratio(ExtentKind::Width),
        extents,
    };
    Ok(ExperimentReport {
        scenario: sc.clone(),
        aggregates: aggregate(&records),
        records,
        summary,
        clamped_trials: per_trial.iter().filter(|(_, c)| *c).count(),
    })
}

/// Judges distances between taxel pairs from the stored skin model, with the
/// stored-model distortion attenuated by `attenuation` before expression.
pub fn run_distance_perception(exp: &Experiment) -> Result<ExperimentReport> {
    exp.require_task(Task::DistancePerception)?;
    let sc = &exp.scenario;
    struct Pair {
        label: String,
        axis: PairAxis,
        veridical: (Vec3<f64>, Vec3<f64>),
        stored: (Vec3<f64>, Vec3<f64>),
    }
    let lookup = |shape: &BodyShapeModel<f64>, k: &TaxelKey| {
        shape
            .taxel(k)
            .map(|t| t.local)
            .ok_or_else(|| Error::Scenario(format!("probe taxel {k} does not exist")))
    };
    let mut pairs = Vec::with_capacity(sc.probes.len());
    for p in &sc.probes {
        let Probe::Pair { a, b, axis } = p else {
            return Err(Error::Scenario(format!("probe `{p}` is not a taxel pair")));
        };
        if a.link != b.link {
            return Err(Error::Scenario(format!(
                "pair `{p}` spans patches `{}` and `{}`",
                a.link, b.link
            )));
        }
        pairs.push(Pair {
            label: p.to_string(),
            axis: *axis,
            veridical: (
                lookup(&exp.veridical.shape, a)?,
                lookup(&exp.veridical.shape, b)?,
            ),
            stored: (lookup(&exp.stored_shape, a)?, lookup(&exp.stored_shape, b)?),
        });
    }
    for axis in [PairAxis::Across, PairAxis::Along] {
        if !pairs.iter().any(|p| p.axis == axis) {
            return Err(Error::Scenario(format!(
                "distance perception needs at least one {axis:?} pair"
            )));
        }
    }

    let keep = 1.0 - sc.attenuation;
    let jitter = sc.noise.taxel_jitter_mm;
    let trials = sc.trials;
    let records: Vec<TrialRecord> = (0..pairs.len() * trials)
        .into_par_iter()
        .map(|index| {
            let (p, t) = (&pairs[index / trials], index % trials);
            let mut rng = trial_rng(sc.seed, index);
            let mut j = || Vec3::new(normal(&mut rng), normal(&mut rng), 0.0) * jitter;
            let (ja, jb) = (j(), j());
            let veridical = p.veridical.0.distance(&p.veridical.1);
            let stored = (p.stored.0 + ja).distance(&(p.stored.1 + jb));
            let expressed = veridical + keep * (stored - veridical);
            TrialRecord::new(
                p.label.clone(),
                sc.variant,
                t,
                Vec3::new(veridical, 0.0, 0.0),
                Vec3::new(expressed, 0.0, 0.0),
            )
        })
        .collect();

    let mean_of = |axis: PairAxis, f: &dyn Fn(&TrialRecord) -> f64| {
        let labels: Vec<&str> = pairs
            .iter()
            .filter(|p| p.axis == axis)
            .map(|p| p.label.as_str())
            .collect();
        let v: Vec<f64> = records
            .iter()
            .filter(|r| labels.contains(&r.probe.as_str()))
            .map(f)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let pair_mean = |axis: PairAxis, f: &dyn Fn(&Pair) -> f64| {
        let v: Vec<f64> = pairs.iter().filter(|p| p.axis == axis).map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let across_veridical = pair_mean(PairAxis::Across, &|p| {
        p.veridical.0.distance(&p.veridical.1)
    });
    let along_veridical = pair_mean(PairAxis::Along, &|p| p.veridical.0.distance(&p.veridical.1));
    let across_stored = pair_mean(PairAxis::Across, &|p| p.stored.0.distance(&p.stored.1));
    let along_stored = pair_mean(PairAxis::Along, &|p| p.stored.0.distance(&p.stored.1));
    let across_expressed = mean_of(PairAxis::Across, &|r| r.response.x);
    let along_expressed = mean_of(PairAxis::Along, &|r| r.response.x);
    let summary = TaskSummary::DistancePerception {
        across_veridical_mm: across_veridical,
        along_veridical_mm: along_veridical,
        across_expressed_mm: across_expressed,
        along_expressed_mm: along_expressed,
        predicted_ratio: (across_stored / across_veridical) / (along_stored / along_veridical),
        anisotropy_index: (across_expressed / across_veridical)
            / (along_expressed / along_veridical),
    };
    Ok(ExperimentReport {
        scenario: sc.clone(),
        aggregates: aggregate(&records),
        records,
        summary,
        clamped_trials: 0,
    })
}

/// Runs both remapping variants on the same probes with common per-trial
/// random streams.
pub fn compare_remapping_models(exp: &Experiment) -> Result<ExperimentReport> {
    exp.require_task(Task::ModelComparison)?;
    let keys = exp.taxel_probes()?;
    let (truths, length) = exp.tactile_truths(&keys)?;
    let (mut records, c1) = exp.run_tactile_variant(&keys, &truths, RemapVariant::Single)?;
    let (tri, c2) = exp.run_tactile_variant(&keys, &truths, RemapVariant::Triangulation)?;
    let single = profile(&records, &keys, &truths);
    let triangulation = profile(&tri, &keys, &truths);
    records.extend(tri);
    let difference = single
        .iter()
        .zip(&triangulation)
        .map(|(s, t)| t.variable_error - s.variable_error)
        .collect();
    let summary = TaskSummary::ModelComparison {
        segment_length_mm: length,
        single,
        triangulation,
        difference,
    };
    Ok(ExperimentReport {
        scenario: exp.scenario.clone(),
        aggregates: aggregate(&records),
        records,
        summary,
        clamped_trials: c1.max(c2),
    })
}
