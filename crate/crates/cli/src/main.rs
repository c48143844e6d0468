//! `bodyschema` command-line front end.
//!
//! Exit status: 0 on success, 2 for a bad configuration or argument, 3 for a
//! runtime model error, 4 for an I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bodyschema::body::{
    builtin, load_body_spec, load_body_spec_unchecked, validate_model, BodySpec, TaxelKey,
};
use bodyschema::experiments::Experiment;
use bodyschema::pipeline::{
    forward_kinematics_with, landmark_position, remap_touch_single,
    remap_touch_triangulated_seeded, somatic_localization, JointState, MissingJoints, RemapVariant,
    ResponseMode, TouchEvent,
};
use bodyschema::posture::{estimate_posture_at, AngleCue, PosturalPrior};
use bodyschema::{Error, Vec3};

#[derive(Debug, Parser)]
#[command(
    name = "bodyschema",
    version,
    about = "Body-model engine and somatoperception simulator"
)]
struct Cli {
    /// Body spec (JSON path or `builtin:<name>`); scenario file for `experiment`.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output path (file, or file stem when writing every format).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Joint angles in radians, `name=value,...`.
    #[arg(long, global = true)]
    angles: Option<String>,
    #[arg(long = "time-ms", global = true)]
    time_ms: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Single,
    Triangulation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Pointing,
    Silhouette,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print landmark positions for a joint state.
    Fk,
    /// Somatic localization of a touch.
    Locate {
        /// Active taxels, `link:id[*intensity],...`.
        #[arg(long)]
        taxels: String,
    },
    /// Spatial localization of a touch with one remapping variant.
    Remap {
        #[arg(long)]
        taxels: String,
        /// Weber fraction of the distance cues (triangulation only).
        #[arg(long, default_value_t = 0.0)]
        weber: f64,
    },
    /// Posture posterior at `--time-ms` from a prior and an afferent reading given by `--angles`.
    Estimate {
        #[arg(long, default_value_t = 0.2)]
        prior_std: f64,
        #[arg(long, default_value_t = 0.05)]
        afferent_std: f64,
        #[arg(long, default_value_t = 0.0)]
        afferent_latency_ms: f64,
        /// Efference-copy predictions, `name=value,...`.
        #[arg(long)]
        efference: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        efference_std: f64,
        #[arg(long, default_value_t = 0.0)]
        efference_latency_ms: f64,
    },
    /// Run a scenario and write its reports.
    Experiment,
    /// Print the body-model validation report.
    Validate,
}

impl From<VariantArg> for RemapVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Single => RemapVariant::Single,
            VariantArg::Triangulation => RemapVariant::Triangulation,
        }
    }
}

impl From<ModeArg> for ResponseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pointing => ResponseMode::Pointing,
            ModeArg::Silhouette => ResponseMode::Silhouette,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        2
    } else if e.is_io() {
        4
    } else {
        3
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Validate => validate(cli),
        Command::Fk => fk(cli),
        Command::Locate { taxels } => locate(cli, taxels),
        Command::Remap { taxels, weber } => remap(cli, taxels, *weber),
        Command::Estimate {
            prior_std,
            afferent_std,
            afferent_latency_ms,
            efference,
            efference_std,
            efference_latency_ms,
        } => estimate(
            cli,
            *prior_std,
            (*afferent_std, *afferent_latency_ms),
            efference.as_deref(),
            (*efference_std, *efference_latency_ms),
        ),
        Command::Experiment => experiment(cli),
    }
}

fn read_config(cli: &Cli) -> Result<Option<String>, Error> {
    match cli.config.as_deref() {
        None => Ok(None),
        Some(c) if c.starts_with("builtin:") => Ok(None),
        Some(path) => std::fs::read_to_string(path)
            .map(Some)
            .map_err(|source| Error::Io {
                path: path.to_string(),
                source,
            }),
    }
}

fn load_body(cli: &Cli) -> Result<BodySpec<f64>, Error> {
    match read_config(cli)? {
        Some(text) => load_body_spec(&text),
        None => builtin(
            cli.config
                .as_deref()
                .and_then(|c| c.strip_prefix("builtin:"))
                .unwrap_or("planar_arm"),
        ),
    }
}

fn parse_angles(spec: &str, field: &str) -> Result<JointState<f64>, Error> {
    let mut s = JointState::new();
    for item in spec.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let bad = || Error::Parse {
            field: field.into(),
            message: format!("expected name=radians, got `{item}`"),
        };
        let (name, value) = item.split_once('=').ok_or_else(bad)?;
        let v: f64 = value.trim().parse().map_err(|_| bad())?;
        s.angles.insert(name.trim().to_string(), v);
    }
    Ok(s)
}

fn parse_taxels(spec: &str) -> Result<TouchEvent<f64>, Error> {
    let mut active = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let bad = || Error::Parse {
            field: "--taxels".into(),
            message: format!("expected link:id[*intensity], got `{item}`"),
        };
        let (key, w) = match item.split_once('*') {
            Some((k, w)) => (k, w.parse::<f64>().map_err(|_| bad())?),
            None => (item, 1.0),
        };
        let (link, id) = key.split_once(':').ok_or_else(bad)?;
        active.push((TaxelKey::new(link, id.parse().map_err(|_| bad())?), w));
    }
    TouchEvent::new(active, 0.0).map_err(|e| Error::Parse {
        field: "--taxels".into(),
        message: e.to_string(),
    })
}

fn fmt_vec(v: &Vec3<f64>) -> String {
    format!("({:.3}, {:.3}, {:.3})", v.x, v.y, v.z)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(cli: &Cli) -> Result<(), Error> {
    let body = match read_config(cli)? {
        Some(text) => load_body_spec_unchecked(&text)?,
        None => load_body(cli)?,
    };
    let report = validate_model(&body.size, &body.shape);
    let mut out = format!("{} violations\n", report.len());
    for v in &report.violations {
        out.push_str(&format!("  [{:?}] {v}\n", v.kind));
    }
    emit(cli, &out)?;
    if report.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(format!("{} violations", report.len())))
    }
}

/// Joint state from `--angles`, unlisted joints defaulting to the canonical
/// zero angle with a notice.
fn state_from_angles(
    cli: &Cli,
    body: &BodySpec<f64>,
) -> Result<(bodyschema::pipeline::LinkPoses<f64>, JointState<f64>), Error> {
    let state = parse_angles(cli.angles.as_deref().unwrap_or(""), "--angles")?;
    if let Some(j) = state.angles.keys().find(|j| body.size.joint(j).is_none()) {
        return Err(Error::Parse {
            field: "--angles".into(),
            message: format!("unknown joint `{j}`"),
        });
    }
    let poses = forward_kinematics_with(&body.size, &state, MissingJoints::DefaultToZero)?;
    for j in &poses.defaulted {
        eprintln!("notice: joint `{j}` not given; using canonical posture angle 0 rad");
    }
    Ok((poses, state))
}

fn fk(cli: &Cli) -> Result<(), Error> {
    let body = load_body(cli)?;
    let (poses, _) = state_from_angles(cli, &body)?;
    let mut out = String::new();
    let mut json = serde_json::Map::new();
    for name in body.size.landmarks.keys() {
        let p = landmark_position(&body.size, &poses, name)?;
        out.push_str(&format!("{name} {}\n", fmt_vec(&p)));
        json.insert(
            name.clone(),
            serde_json::to_value(p).expect("vector serializes"),
        );
    }
    match cli.format {
        Some(Format::Json) => emit(cli, &format!("{}\n", serde_json::Value::Object(json))),
        _ => emit(cli, &out),
    }
}

fn locate(cli: &Cli, taxels: &str) -> Result<(), Error> {
    let body = load_body(cli)?;
    let touch = parse_taxels(taxels)?;
    let mode = cli.mode.map(Into::into).unwrap_or_default();
    let s = somatic_localization(&touch, &body.shape, mode)?;
    emit(cli, &format!("{} {} [{mode}]\n", s.link, fmt_vec(&s.local)))
}

fn remap(cli: &Cli, taxels: &str, weber: f64) -> Result<(), Error> {
    let body = load_body(cli)?;
    let touch = parse_taxels(taxels)?;
    let (poses, mut state) = state_from_angles(cli, &body)?;
    for j in &poses.defaulted {
        state.angles.insert(j.clone(), 0.0);
    }
    let variant = cli.variant.map(Into::into).unwrap_or_default();
    let mode = cli.mode.map(Into::into).unwrap_or_default();
    let r = match variant {
        RemapVariant::Single => remap_touch_single(&touch, &body.size, &body.shape, &state, mode)?,
        RemapVariant::Triangulation => remap_touch_triangulated_seeded(
            &touch,
            &body.size,
            &body.shape,
            &state,
            mode,
            weber,
            cli.seed.unwrap_or(0),
        )?,
    };
    emit(
        cli,
        &format!(
            "somatic {} {}\nspatial {} [{variant}, {mode}]\n",
            r.somatic.link,
            fmt_vec(&r.somatic.local),
            fmt_vec(&r.spatial)
        ),
    )
}

fn estimate(
    cli: &Cli,
    prior_std: f64,
    (aff_std, aff_latency): (f64, f64),
    efference: Option<&str>,
    (eff_std, eff_latency): (f64, f64),
) -> Result<(), Error> {
    let body = load_body(cli)?;
    let observed = parse_angles(cli.angles.as_deref().unwrap_or(""), "--angles")?;
    let prior = PosturalPrior::canonical(&body.size, prior_std);
    let mut aff = AngleCue::new(aff_latency);
    for (j, a) in &observed.angles {
        if body.size.joint(j).is_none() {
            return Err(Error::Parse {
                field: "--angles".into(),
                message: format!("unknown joint `{j}`"),
            });
        }
        aff = aff.with(j.clone(), *a, aff_std);
    }
    let eff = efference
        .map(|e| parse_angles(e, "--efference"))
        .transpose()?
        .map(|s| {
            s.angles
                .into_iter()
                .fold(AngleCue::new(eff_latency), |c, (j, a)| {
                    c.with(j, a, eff_std)
                })
        });
    let t = cli.time_ms.unwrap_or(aff_latency.max(eff_latency));
    let post = estimate_posture_at(t, &prior, &aff, eff.as_ref())?;
    let mut out = format!("posterior at t = {t} ms\n");
    for (j, p) in &post.joints {
        out.push_str(&format!(
            "{j} mean {:.6} rad, variance {:.6e} rad^2\n",
            p.mean, p.variance
        ));
    }
    let (state, clamped) = post.clamped_state(&body.size);
    for j in &clamped {
        out.push_str(&format!("clamped {j} to its joint limits\n"));
    }
    let poses = forward_kinematics_with(&body.size, &state, MissingJoints::Reject)?;
    for name in body.size.landmarks.keys() {
        out.push_str(&format!(
            "{name} {}\n",
            fmt_vec(&landmark_position(&body.size, &poses, name)?)
        ));
    }
    match cli.format {
        Some(Format::Json) => emit(
            cli,
            &format!(
                "{}\n",
                serde_json::to_string_pretty(&post).map_err(|e| Error::Serialize(e.to_string()))?
            ),
        ),
        _ => emit(cli, &out),
    }
}

fn experiment(cli: &Cli) -> Result<(), Error> {
    let path = cli.config.as_deref().ok_or_else(|| {
        Error::Configuration("experiment requires --config <scenario.json>".into())
    })?;
    let mut scenario = bodyschema::experiments::Scenario::load(path)?;
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(v) = cli.variant {
        scenario.variant = v.into();
    }
    if let Some(m) = cli.mode {
        scenario.mode = m.into();
    }
    let exp = Experiment::from_scenario(scenario, Path::new(path).parent())?;
    let report = exp.run()?;
    if report.clamped_trials > 0 {
        eprintln!(
            "notice: perceived posture clamped to joint limits in {} trials",
            report.clamped_trials
        );
    }
    match (cli.format, &cli.out) {
        (None, Some(stem)) => report.write_all(stem),
        (Some(Format::Csv), _) => emit(cli, &report.to_csv_string()?),
        (Some(Format::Svg), _) => emit(cli, &report.svg()),
        (Some(Format::Json), _) | (None, None) => {
            emit(cli, &format!("{}\n", report.summary_json()?))
        }
    }
}
