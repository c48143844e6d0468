use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::scenario::{ExtentKind, Scenario, Task};
use super::stats::{mean_vec, variable_error};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::pipeline::{RemapVariant, ResponseMode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub probe: String,
    pub variant: RemapVariant,
    pub trial: usize,
    pub truth: Vec3<f64>,
    pub response: Vec3<f64>,
    pub error: Vec3<f64>,
}

impl TrialRecord {
    pub fn new(
        probe: String,
        variant: RemapVariant,
        trial: usize,
        truth: Vec3<f64>,
        response: Vec3<f64>,
    ) -> Self {
        Self {
            probe,
            variant,
            trial,
            truth,
            response,
            error: response - truth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeAggregate {
    pub probe: String,
    pub variant: RemapVariant,
    pub trials: usize,
    /// Mean signed error, mm.
    pub constant_error: Vec3<f64>,
    pub constant_error_norm: f64,
    /// Standard deviation of the error vectors, mm.
    pub variable_error: f64,
}

type Group<'a> = ((RemapVariant, &'a str), Vec<Vec3<f64>>);

/// Groups records by `(variant, probe)` in order of first appearance.
pub fn aggregate(records: &[TrialRecord]) -> Vec<ProbeAggregate> {
    let mut groups: Vec<Group> = Vec::new();
    for r in records {
        let key = (r.variant, r.probe.as_str());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, errs)) => errs.push(r.error),
            None => groups.push((key, vec![r.error])),
        }
    }
    groups
        .into_iter()
        .map(|((variant, probe), errs)| {
            let ce = mean_vec(&errs);
            ProbeAggregate {
                probe: probe.to_string(),
                variant,
                trials: errs.len(),
                constant_error: ce,
                constant_error_norm: ce.norm(),
                variable_error: variable_error(&errs),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub probe: String,
    /// Position along the patch segment from the proximal landmark, mm.
    pub along_mm: f64,
    pub variable_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtentJudgment {
    pub name: String,
    pub kind: ExtentKind,
    pub veridical_mm: f64,
    pub judged_mean_mm: f64,
    /// `judged_mean_mm / veridical_mm`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskSummary {
    TactileLocalization {
        segment_length_mm: f64,
        profile: Vec<ProfilePoint>,
        mid_near_ratio: f64,
        unimodal: bool,
        interior_peak: bool,
    },
    LandmarkLocalization {
        extents: Vec<ExtentJudgment>,
        length_ratio: Option<f64>,
        width_ratio: Option<f64>,
    },
    DistancePerception {
        across_veridical_mm: f64,
        along_veridical_mm: f64,
        across_expressed_mm: f64,
        along_expressed_mm: f64,
        /// Anisotropy of the raw stored-model distances (no attenuation).
        predicted_ratio: f64,
        anisotropy_index: f64,
    },
    ModelComparison {
        segment_length_mm: f64,
        single: Vec<ProfilePoint>,
        triangulation: Vec<ProfilePoint>,
        /// Triangulation minus single-landmark variable error, per probe.
        difference: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<ProbeAggregate>,
    pub summary: TaskSummary,
    /// Trials in which the perceived posture had to be clamped to joint limits.
    pub clamped_trials: usize,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    software: &'static str,
    version: &'static str,
    scenario_id: &'a str,
    task: Task,
    seed: u64,
    record_count: usize,
    clamped_trials: usize,
    aggregates: &'a [ProbeAggregate],
    summary: &'a TaskSummary,
    scenario: &'a Scenario,
}

impl ExperimentReport {
    pub fn task(&self) -> Task {
        self.scenario.task
    }

    pub fn mode(&self) -> ResponseMode {
        self.scenario.mode
    }

    /// Aggregates recomputed from the raw records.
    pub fn recompute_aggregates(&self) -> Vec<ProbeAggregate> {
        aggregate(&self.records)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| Error::Serialize(e.to_string());
        w.write_record([
            "scenario_id",
            "task",
            "variant",
            "mode",
            "probe",
            "trial",
            "truth_x",
            "truth_y",
            "truth_z",
            "response_x",
            "response_y",
            "response_z",
            "error_x",
            "error_y",
            "error_z",
        ])
        .map_err(ser)?;
        let id = self.scenario.id.as_str();
        let task = self.task().to_string();
        let mode = self.mode().to_string();
        for r in &self.records {
            let mut row = vec![
                id.to_string(),
                task.clone(),
                r.variant.to_string(),
                mode.clone(),
                r.probe.clone(),
                r.trial.to_string(),
            ];
            for v in [r.truth, r.response, r.error] {
                row.extend(v.to_array().iter().map(|c| c.to_string()));
            }
            w.write_record(&row).map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// JSON summary: aggregates, task summary, scenario echo, seed and
    /// software version. Per-trial records go to the CSV.
    pub fn summary_json(&self) -> Result<String> {
        let s = JsonSummary {
            software: "bodyschema",
            version: crate::VERSION,
            scenario_id: &self.scenario.id,
            task: self.task(),
            seed: self.scenario.seed,
            record_count: self.records.len(),
            clamped_trials: self.clamped_trials,
            aggregates: &self.aggregates,
            summary: &self.summary,
            scenario: &self.scenario,
        };
        serde_json::to_string_pretty(&s).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn svg(&self) -> String {
        super::svg::render_profile_svg(self)
    }

    /// Writes `<stem>.csv`, `<stem>.json` and `<stem>.svg` next to each other.
    pub fn write_all(&self, stem: &Path) -> Result<()> {
        let write = |ext: &str, body: &[u8]| {
            let p = stem.with_extension(ext);
            std::fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };
        write("csv", self.to_csv_string()?.as_bytes())?;
        write("json", self.summary_json()?.as_bytes())?;
        write("svg", self.svg().as_bytes())
    }
}
