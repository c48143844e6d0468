//! Scenario builders shared by the experiment and acceptance tests.
#![allow(dead_code)]

use bodyschema::body::{AxisScales, DistortionMap, TaxelKey};
use bodyschema::experiments::{
    BodyRef, Extent, ExtentKind, JointNoise, PairAxis, Probe, Scenario, Task,
};
use bodyschema::pipeline::RemapVariant;

/// Column-1 forearm taxels of the planar arm, proximal to distal.
pub fn forearm_column() -> Vec<Probe> {
    (0..10)
        .map(|r| Probe::Taxel(TaxelKey::new("forearm", 1 + 4 * r)))
        .collect()
}

pub fn tactile(
    variant: RemapVariant,
    weber: f64,
    joint_std: f64,
    trials: usize,
    seed: u64,
) -> Scenario {
    let mut s = Scenario::new(
        "tactile",
        BodyRef::builtin("planar_arm"),
        Task::TactileLocalization,
        forearm_column(),
        trials,
        seed,
    );
    s.variant = variant;
    s.noise.weber_fraction = weber;
    s.noise.joint_std_rad = JointNoise::Uniform(joint_std);
    s
}

pub fn comparison(weber: f64, joint_std: f64, trials: usize, seed: u64) -> Scenario {
    let mut s = tactile(RemapVariant::Single, weber, joint_std, trials, seed);
    s.id = "comparison".into();
    s.task = Task::ModelComparison;
    s
}

/// Hand landmark task: finger lengths `knuckle-i → tip-i` and the palm
/// width `knuckle-1 → knuckle-5`, with per-finger length scales and a palm
/// width scale in the stored model.
pub fn hand_landmarks(
    finger_scales: [f64; 5],
    width_scale: f64,
    trials: usize,
    joint_std: f64,
) -> Scenario {
    let mut probes = Vec::new();
    let mut extents = Vec::new();
    let mut d =
        DistortionMap::identity().with_scale("palm", AxisScales::new(1.0, width_scale, 1.0));
    for (i, s) in finger_scales.iter().enumerate() {
        let n = i + 1;
        d = d.with_scale(format!("finger_{n}"), AxisScales::new(*s, 1.0, 1.0));
        probes.push(Probe::Landmark {
            landmark: format!("tip-{n}"),
        });
        extents.push(Extent {
            name: format!("finger-{n}"),
            from: format!("knuckle-{n}"),
            to: format!("tip-{n}"),
            kind: ExtentKind::Length,
        });
    }
    extents.push(Extent {
        name: "width".into(),
        from: "knuckle-1".into(),
        to: "knuckle-5".into(),
        kind: ExtentKind::Width,
    });
    let mut s = Scenario::new(
        "hand",
        BodyRef::builtin("hand"),
        Task::LandmarkLocalization,
        probes,
        trials,
        7,
    );
    s.stored_distortion = Some(d);
    s.extents = extents;
    s.noise.joint_std_rad = JointNoise::Uniform(joint_std);
    s
}

/// Forearm distance judgments: two across pairs (same row) and two along
/// pairs (same column).
pub fn distance(across_scale: f64, along_scale: f64, attenuation: f64, trials: usize) -> Scenario {
    let k = |id| TaxelKey::new("forearm", id);
    let probes = vec![
        Probe::Pair {
            a: k(0),
            b: k(3),
            axis: PairAxis::Across,
        },
        Probe::Pair {
            a: k(20),
            b: k(22),
            axis: PairAxis::Across,
        },
        Probe::Pair {
            a: k(0),
            b: k(36),
            axis: PairAxis::Along,
        },
        Probe::Pair {
            a: k(5),
            b: k(13),
            axis: PairAxis::Along,
        },
    ];
    let mut s = Scenario::new(
        "distance",
        BodyRef::builtin("planar_arm"),
        Task::DistancePerception,
        probes,
        trials,
        11,
    );
    s.stored_distortion = Some(
        DistortionMap::identity()
            .with_scale("forearm", AxisScales::new(along_scale, across_scale, 1.0)),
    );
    s.attenuation = attenuation;
    s
}
