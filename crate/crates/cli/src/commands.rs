//! Subcommands, registered by name and dispatched through [`Command`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use adsfront::caustic_maxwell::{br_caustic_slices, maxwell_slices, CausticCloud, MaxwellKind, MaxwellSet};
use adsfront::frames::{frames_along, frenet_residual, FrameData, FrameError};
use adsfront::fronts::{focal_curve, front_point_from, FocalCurve, FrontSample, SignChoice};
use adsfront::singularities::{analyze_curve, SingularityClass, SingularityEntry, SingularityReport};
use adsfront::worldsheet::SheetError;
use adsfront::{ExprError, MomentaryCurve, SampleGrid, SemiVector, Tolerances, ValidationReport, WorldSheet};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};
use crate::export::{self, FrontStrip};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("world sheet failed validation")]
    Validation(Box<ValidationReport>),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Sheet(#[from] SheetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    /// Process exit code: 2 for configuration and usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Everything a command needs, resolved from the config file and flags.
pub struct RunContext {
    pub config: RunConfig,
    pub sheet: WorldSheet,
    pub grid: SampleGrid,
    pub tol: Tolerances,
    pub signs: Vec<SignChoice>,
    /// Slices to process: the `t` grid, or the single `--t` value.
    pub ts: Vec<f64>,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn new(
        config: RunConfig,
        signs: Vec<SignChoice>,
        t: Option<f64>,
        out_dir: Option<PathBuf>,
    ) -> Result<Self, CommandError> {
        let sheet = config.world_sheet()?;
        let grid = config.sample_grid();
        let ts = match t {
            Some(t) => {
                let (lo, hi) = sheet.t_range();
                if !(lo..=hi).contains(&t) {
                    return Err(CommandError::Usage(format!("--t {t} outside [{lo}, {hi}]")));
                }
                vec![t]
            }
            None => grid.t_values(sheet.t_range()),
        };
        Ok(RunContext {
            tol: config.tolerances.clone(),
            out_dir: out_dir.unwrap_or_else(|| config.outputs.dir.clone()),
            config,
            sheet,
            grid,
            signs,
            ts,
        })
    }

    pub fn validation(&self) -> Result<ValidationReport, CommandError> {
        let n_t = if self.ts.len() == 1 { 1 } else { self.grid.n_t };
        Ok(self.sheet.validate(self.grid.n_s, n_t, &self.tol)?)
    }

    pub fn arc_grid(&self, curve: &MomentaryCurve<'_>) -> Vec<f64> {
        curve.arc_samples(self.grid.n_s)
    }

    fn frames(&self, t: f64) -> Result<(bool, Vec<FrameData>), CommandError> {
        let curve = self.sheet.curve(t, &self.tol)?;
        let ss = self.arc_grid(&curve);
        let frames = frames_along(&curve, &ss, &self.tol)?.iter().map(|f| f.data()).collect();
        Ok((curve.is_closed(), frames))
    }
}

/// Serialized artifact produced by a command.
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
    /// False when the command ran but its check failed (exit code 1).
    pub passed: bool,
}

pub trait Command: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Supported formats; the first one is the default.
    fn formats(&self) -> &'static [Format];
    fn requires_valid_sheet(&self) -> bool {
        true
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError>;
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    effective_config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn json_artifact<T: Serialize>(name: &str, ctx: &RunContext, body: T) -> Artifact {
    let doc = Document {
        effective_config: &ctx.config,
        body,
    };
    Artifact {
        file_name: format!("{name}.json"),
        bytes: export::to_json_string(&doc).into_bytes(),
        passed: true,
    }
}

fn csv_artifact(name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Artifact, CommandError> {
    let mut bytes = Vec::new();
    export::write_csv(&mut bytes, header, rows)?;
    Ok(Artifact {
        file_name: format!("{name}.csv"),
        bytes,
        passed: true,
    })
}

struct Validate;
struct Frames;
struct Curvatures;
struct Front;
struct Focal;
struct Caustic;
struct Maxwell;
struct Classify;
struct Report;

static REGISTRY: [&dyn Command; 9] = [
    &Validate,
    &Frames,
    &Curvatures,
    &Front,
    &Focal,
    &Caustic,
    &Maxwell,
    &Classify,
    &Report,
];

pub fn commands() -> &'static [&'static dyn Command] {
    &REGISTRY
}

pub fn command(name: &str) -> Option<&'static dyn Command> {
    REGISTRY.iter().copied().find(|c| c.name() == name)
}

/// Picks the `--format` flag, else the first configured format the command
/// supports, else the command's default.
pub fn resolve_format(cmd: &dyn Command, flag: Option<Format>, configured: &[Format]) -> Result<Format, CommandError> {
    if let Some(f) = flag {
        return if cmd.formats().contains(&f) {
            Ok(f)
        } else {
            Err(CommandError::Usage(format!(
                "{} does not support {}",
                cmd.name(),
                f.extension()
            )))
        };
    }
    Ok(configured
        .iter()
        .copied()
        .find(|f| cmd.formats().contains(f))
        .unwrap_or(cmd.formats()[0]))
}

#[derive(Serialize)]
struct ValidationBody<'a> {
    validation: &'a ValidationReport,
}

impl Command for Validate {
    fn name(&self) -> &'static str {
        "validate"
    }
    fn about(&self) -> &'static str {
        "check AdS membership and causal conditions on the grid"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Json]
    }
    fn requires_valid_sheet(&self) -> bool {
        false
    }
    fn run(&self, ctx: &RunContext, _: Format) -> Result<Artifact, CommandError> {
        let report = ctx.validation()?;
        let mut a = json_artifact(self.name(), ctx, ValidationBody { validation: &report });
        a.passed = report.passed;
        Ok(a)
    }
}

#[derive(Serialize)]
struct FramesBody {
    frames: Vec<FrameData>,
}

fn all_frames(ctx: &RunContext) -> Result<Vec<FrameData>, CommandError> {
    let mut out = Vec::new();
    for &t in &ctx.ts {
        out.extend(ctx.frames(t)?.1);
    }
    Ok(out)
}

impl Command for Frames {
    fn name(&self) -> &'static str {
        "frames"
    }
    fn about(&self) -> &'static str {
        "adapted frames {Gamma, b, n, t} and curvatures on the grid"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let frames = all_frames(ctx)?;
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, FramesBody { frames })),
            _ => csv_artifact(
                self.name(),
                &export::FRAME_COLUMNS,
                frames.iter().map(export::frame_row).collect(),
            ),
        }
    }
}

impl Command for Curvatures {
    fn name(&self) -> &'static str {
        "curvatures"
    }
    fn about(&self) -> &'static str {
        "geodesic curvature, normal curvature, geodesic torsion and their s-derivatives"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let frames = all_frames(ctx)?;
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, FramesBody { frames })),
            _ => csv_artifact(
                self.name(),
                &export::CURVATURE_COLUMNS,
                frames.iter().map(export::curvature_row).collect(),
            ),
        }
    }
}

#[derive(Serialize)]
struct FrontBody {
    samples: Vec<FrontSample>,
}

impl Command for Front {
    fn name(&self) -> &'static str {
        "front"
    }
    fn about(&self) -> &'static str {
        "momentary lightlike fronts sampled over (s, mu)"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Obj, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let mus = ctx.grid.mu_values();
        let mut samples = Vec::new();
        let mut layout = Vec::new();
        for &t in &ctx.ts {
            let (closed, frames) = ctx.frames(t)?;
            for &sign in &ctx.signs {
                let start = samples.len();
                for f in &frames {
                    samples.extend(mus.iter().map(|&mu| front_point_from(f, mu, sign)));
                }
                layout.push((t, sign, closed, frames.len(), start));
            }
        }
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, FrontBody { samples })),
            Format::Obj => {
                let points: Vec<SemiVector> = samples.iter().map(|p| p.point).collect();
                let n_mu = mus.len();
                let strips: Vec<FrontStrip> = layout
                    .iter()
                    .map(|&(t, sign, closed, n_s, start)| FrontStrip {
                        t,
                        sign,
                        n_s,
                        n_mu,
                        closed,
                        points: &points[start..start + n_s * n_mu],
                    })
                    .collect();
                let mut bytes = Vec::new();
                export::write_obj(&mut bytes, &strips)?;
                Ok(Artifact {
                    file_name: "front.obj".into(),
                    bytes,
                    passed: true,
                })
            }
            Format::Csv => csv_artifact(
                self.name(),
                &export::FRONT_COLUMNS,
                samples.iter().map(export::front_row).collect(),
            ),
        }
    }
}

#[derive(Serialize)]
struct FocalSlice {
    t: f64,
    sign: SignChoice,
    #[serde(flatten)]
    curve: FocalCurve,
}

#[derive(Serialize)]
struct FocalBody {
    slices: Vec<FocalSlice>,
}

impl Command for Focal {
    fn name(&self) -> &'static str {
        "focal"
    }
    fn about(&self) -> &'static str {
        "momentary focal curves with parabolic gaps"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let mut slices = Vec::new();
        for &t in &ctx.ts {
            let curve = ctx.sheet.curve(t, &ctx.tol)?;
            for &sign in &ctx.signs {
                slices.push(FocalSlice {
                    t,
                    sign,
                    curve: focal_curve(&curve, sign, ctx.grid.n_s, &ctx.tol)?,
                });
            }
        }
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, FocalBody { slices })),
            _ => csv_artifact(
                self.name(),
                &export::CAUSTIC_COLUMNS,
                slices
                    .iter()
                    .flat_map(|s| s.curve.samples.iter().map(export::caustic_row))
                    .collect(),
            ),
        }
    }
}

#[derive(Serialize)]
struct CausticBody {
    caustic: CausticCloud,
}

impl Command for Caustic {
    fn name(&self) -> &'static str {
        "caustic"
    }
    fn about(&self) -> &'static str {
        "union of the momentary focal curves over the t grid"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let cloud = br_caustic_slices(&ctx.sheet, &ctx.ts, ctx.grid.n_s, &ctx.signs, &ctx.tol)?;
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, CausticBody { caustic: cloud })),
            _ => csv_artifact(
                self.name(),
                &export::CAUSTIC_COLUMNS,
                cloud.samples.iter().map(export::caustic_row).collect(),
            ),
        }
    }
}

#[derive(Serialize)]
struct MaxwellBody {
    maxwell: MaxwellSet,
}

impl Command for Maxwell {
    fn name(&self) -> &'static str {
        "maxwell"
    }
    fn about(&self) -> &'static str {
        "self-intersections of the momentary fronts"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Csv, Format::Json]
    }
    fn run(&self, ctx: &RunContext, format: Format) -> Result<Artifact, CommandError> {
        let set = maxwell_slices(&ctx.sheet, &ctx.ts, &ctx.grid, &ctx.signs, &ctx.tol)?;
        match format {
            Format::Json => Ok(json_artifact(self.name(), ctx, MaxwellBody { maxwell: set })),
            _ => csv_artifact(
                self.name(),
                &export::MAXWELL_COLUMNS,
                set.samples.iter().map(export::maxwell_row).collect(),
            ),
        }
    }
}

fn singularity_reports(ctx: &RunContext) -> Result<Vec<SingularityReport>, CommandError> {
    let mut out = Vec::new();
    for &t in &ctx.ts {
        let curve = ctx.sheet.curve(t, &ctx.tol)?;
        for &sign in &ctx.signs {
            out.push(analyze_curve(&curve, sign, ctx.grid.n_s, &ctx.tol)?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ClassifyBody {
    reports: Vec<SingularityReport>,
}

impl Command for Classify {
    fn name(&self) -> &'static str {
        "classify"
    }
    fn about(&self) -> &'static str {
        "classify front singularities along every momentary curve"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Json]
    }
    fn run(&self, ctx: &RunContext, _: Format) -> Result<Artifact, CommandError> {
        Ok(json_artifact(
            self.name(),
            ctx,
            ClassifyBody {
                reports: singularity_reports(ctx)?,
            },
        ))
    }
}

/// Per-slice singularity summary: counts by class plus every entry that is
/// not a plain cuspidal edge or regular point.
#[derive(Serialize)]
struct SliceSummary {
    t: f64,
    sign: SignChoice,
    counts: BTreeMap<&'static str, usize>,
    special: Vec<SingularityEntry>,
}

fn class_name(c: SingularityClass) -> &'static str {
    match c {
        SingularityClass::RegularFrontPoint => "RegularFrontPoint",
        SingularityClass::CuspidalEdge => "CuspidalEdge",
        SingularityClass::Swallowtail => "Swallowtail",
        SingularityClass::DegenerateOrHigher => "DegenerateOrHigher",
        SingularityClass::ConstantFocal => "ConstantFocal",
    }
}

#[derive(Serialize)]
struct CausticSummary {
    samples: usize,
    gaps: usize,
    failed: usize,
    max_residual: f64,
}

#[derive(Serialize)]
struct MaxwellSummary {
    samples: usize,
    kinds: BTreeMap<&'static str, usize>,
    stats: adsfront::caustic_maxwell::MaxwellStats,
    max_residual: f64,
}

#[derive(Serialize)]
struct ResidualMaxima {
    frame_gram: f64,
    frenet: f64,
    caustic_height: f64,
    maxwell: f64,
    swallowtail_sigma: f64,
    swallowtail_ell_prime: f64,
    swallowtail_angle: f64,
}

#[derive(Serialize)]
struct ReportBody {
    validation: ValidationReport,
    singularities: Vec<SliceSummary>,
    caustic: CausticSummary,
    maxwell: MaxwellSummary,
    residual_maxima: ResidualMaxima,
}

/// Frenet residual checks per slice in `report`.
const FRENET_PROBES: usize = 16;

impl Command for Report {
    fn name(&self) -> &'static str {
        "report"
    }
    fn about(&self) -> &'static str {
        "full pipeline with a single JSON summary"
    }
    fn formats(&self) -> &'static [Format] {
        &[Format::Json]
    }
    fn requires_valid_sheet(&self) -> bool {
        false
    }
    fn run(&self, ctx: &RunContext, _: Format) -> Result<Artifact, CommandError> {
        let validation = ctx.validation()?;
        if !validation.passed {
            return Err(CommandError::Validation(Box::new(validation)));
        }
        let frame_stats: Vec<(f64, f64)> = ctx
            .ts
            .par_iter()
            .map(|&t| -> Result<(f64, f64), CommandError> {
                let curve = ctx.sheet.curve(t, &ctx.tol)?;
                let ss = ctx.arc_grid(&curve);
                let gram = frames_along(&curve, &ss, &ctx.tol)?
                    .iter()
                    .map(|f| f.data().gram_residual())
                    .fold(0.0, f64::max);
                let stride = (ss.len() / FRENET_PROBES).max(1);
                let mut frenet: f64 = 0.0;
                for &s in ss.iter().step_by(stride) {
                    frenet = frenet_residual(&curve, s, &ctx.tol)?.into_iter().fold(frenet, f64::max);
                }
                Ok((gram, frenet))
            })
            .collect::<Result<_, _>>()?;
        let reports = singularity_reports(ctx)?;
        let caustic = br_caustic_slices(&ctx.sheet, &ctx.ts, ctx.grid.n_s, &ctx.signs, &ctx.tol)?;
        let maxwell = maxwell_slices(&ctx.sheet, &ctx.ts, &ctx.grid, &ctx.signs, &ctx.tol)?;

        let mut st = (0.0f64, 0.0f64, 0.0f64);
        let singularities = reports
            .into_iter()
            .map(|r| {
                let mut counts = BTreeMap::new();
                for e in &r.entries {
                    *counts.entry(class_name(e.class)).or_insert(0) += 1;
                    if e.class == SingularityClass::Swallowtail {
                        st.0 = st.0.max(e.sigma.abs());
                        st.1 = st.1.max(e.residuals.ell_prime_norm);
                        st.2 = st.2.max(e.residuals.ell_pp_angle);
                    }
                }
                let special = r
                    .entries
                    .into_iter()
                    .filter(|e| {
                        matches!(
                            e.class,
                            SingularityClass::Swallowtail | SingularityClass::DegenerateOrHigher
                        )
                    })
                    .collect();
                SliceSummary {
                    t: r.t,
                    sign: r.sign,
                    counts,
                    special,
                }
            })
            .collect();
        let mut kinds = BTreeMap::new();
        for k in [
            MaxwellKind::CrossSheet,
            MaxwellKind::SameSheet,
            MaxwellKind::BaseCurve,
            MaxwellKind::FocalConcentration,
        ] {
            kinds.insert(k.name(), maxwell.samples.iter().filter(|s| s.kind == k).count());
        }
        let maxwell_max = maxwell.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
        let body = ReportBody {
            validation,
            singularities,
            caustic: CausticSummary {
                samples: caustic.samples.len(),
                gaps: caustic.gaps.len(),
                failed: caustic.failed,
                max_residual: caustic.max_residual,
            },
            maxwell: MaxwellSummary {
                samples: maxwell.samples.len(),
                kinds,
                stats: maxwell.stats,
                max_residual: maxwell_max,
            },
            residual_maxima: ResidualMaxima {
                frame_gram: frame_stats.iter().map(|f| f.0).fold(0.0, f64::max),
                frenet: frame_stats.iter().map(|f| f.1).fold(0.0, f64::max),
                caustic_height: caustic.max_residual,
                maxwell: maxwell_max,
                swallowtail_sigma: st.0,
                swallowtail_ell_prime: st.1,
                swallowtail_angle: st.2,
            },
        };
        Ok(json_artifact(self.name(), ctx, body))
    }
}

/// Runs one command: validation gate, computation, then a single write of
/// the artifact into the output directory. Returns the written path.
pub fn execute(cmd: &dyn Command, ctx: &RunContext, format: Format) -> Result<(PathBuf, bool), CommandError> {
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| {
        CommandError::Config(ConfigError::Invalid(format!(
            "cannot create output directory {}: {e}",
            ctx.out_dir.display()
        )))
    })?;
    if cmd.requires_valid_sheet() {
        let report = ctx.validation()?;
        if !report.passed {
            return Err(CommandError::Validation(Box::new(report)));
        }
    }
    let artifact = match cmd.run(ctx, format) {
        Err(CommandError::Validation(report)) => {
            write_validation_failure(ctx, &report)?;
            return Err(CommandError::Validation(report));
        }
        other => other?,
    };
    let path = ctx.out_dir.join(&artifact.file_name);
    std::fs::write(&path, &artifact.bytes)?;
    Ok((path, artifact.passed))
}

/// Writes `validation.json` describing a failed validation.
pub fn write_validation_failure(ctx: &RunContext, report: &ValidationReport) -> Result<PathBuf, CommandError> {
    let a = json_artifact("validation", ctx, ValidationBody { validation: report });
    let path = ctx.out_dir.join(&a.file_name);
    std::fs::write(&path, &a.bytes)?;
    Ok(path)
}
