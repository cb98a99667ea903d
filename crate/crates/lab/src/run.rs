//! Command dispatch and exit codes.

use std::io;
use std::path::PathBuf;

use pp_stability_core::bounds::bound_sets;
use pp_stability_core::equilibrium::coexistence_point;
use pp_stability_core::simulation::{integrate_reference, iterate_guarded, SimError};
use pp_stability_core::{classify_at_step, diagnose, Model, ModelError};
use thiserror::Error;

use crate::artifact::{write_all, ArtifactKind, RunArtifact};
use crate::cli::{self, CliError, Command, Verb};
use crate::parallel::sweep_parallel;
use crate::report::{self, *};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Usage(#[from] CliError),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Numeric(_) => EXIT_NUMERIC,
            RunError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ModelError> for RunError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Overflow(_) => RunError::Numeric(e.to_string()),
            other => RunError::Usage(CliError::Invalid {
                key: "params",
                reason: other.to_string(),
            }),
        }
    }
}

impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Model(m) => m.into(),
            other => RunError::Usage(CliError::Invalid {
                key: "simulate",
                reason: other.to_string(),
            }),
        }
    }
}

type Pending = Vec<(ArtifactKind, PathBuf, Vec<u8>)>;

/// Executes `cmd`, writing its artifacts into `cmd.out`.
pub fn run(cmd: &Command) -> Result<Vec<RunArtifact>, RunError> {
    let pending = match cmd.verb {
        Verb::Classify => classify(cmd)?,
        Verb::Bounds => bounds(cmd),
        Verb::Simulate => simulate(cmd)?,
        Verb::Sweep => sweep(cmd)?,
    };
    Ok(write_all(pending)?)
}

fn classify(cmd: &Command) -> Result<Pending, RunError> {
    let h = cmd.h.ok_or(CliError::Missing("h"))?;
    let reports = classify_at_step(cmd.kind, &cmd.params, h, cmd.tol)?;
    let doc = ClassificationDoc {
        command: CommandEcho::of(cmd),
        model: model_name(cmd.kind),
        params: (&cmd.params).into(),
        h,
        tolerance: cmd.tol,
        derived: DerivedDoc::of(&cmd.params),
        equilibria: reports.iter().map(Into::into).collect(),
    };
    Ok(vec![(
        ArtifactKind::ClassificationJson,
        cmd.out.join("classification.json"),
        to_json(&doc),
    )])
}

fn bounds(cmd: &Command) -> Pending {
    let sets = bound_sets(cmd.kind, &cmd.params, cmd.tol);
    let doc = BoundsDoc {
        command: CommandEcho::of(cmd),
        model: model_name(cmd.kind),
        params: (&cmd.params).into(),
        h: cmd.h,
        tolerance: cmd.tol,
        derived: DerivedDoc::of(&cmd.params),
        tables: sets.iter().map(|s| TableDoc::of(s, cmd.h, cmd.tol)).collect(),
    };
    vec![(ArtifactKind::BoundsJson, cmd.out.join("bounds.json"), to_json(&doc))]
}

fn simulate(cmd: &Command) -> Result<Pending, RunError> {
    let h = cmd.h.ok_or(CliError::Missing("h"))?;
    let model = Model::new(cmd.kind, cmd.params);
    let target = coexistence_point(&cmd.params);
    let x0 = cmd.x0.unwrap_or_else(|| target.scaled(0.9));
    if !(x0.is_finite() && x0.is_nonnegative()) {
        return Err(CliError::Invalid {
            key: "n0",
            reason: format!("default start 0.9 E3 = {x0:?} is infeasible; pass --n0 and --p0"),
        }
        .into());
    }
    let traj = if cmd.reference {
        integrate_reference(model, x0, cmd.steps as f64 * h, h)?
    } else {
        iterate_guarded(model, h, x0, cmd.steps, cmd.guard)?
    };
    if traj.overflowed() && traj.len() <= 1 {
        return Err(RunError::Numeric("overflow before the first step".into()));
    }
    let (diagnostics, note) = match diagnose(&traj, target, &cmd.diagnose) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let doc = DiagnosticsDoc {
        command: CommandEcho::of(cmd),
        model: model_name(cmd.kind),
        params: (&cmd.params).into(),
        h,
        continuous_reference: cmd.reference,
        samples: traj.len(),
        events: traj
            .events
            .iter()
            .map(|e| EventDoc { index: e.index, kind: e.kind })
            .collect(),
        config: cmd.diagnose,
        diagnostics,
        note,
    };
    Ok(vec![
        (
            ArtifactKind::TrajectoryCsv,
            cmd.out.join("trajectory.csv"),
            report::trajectory_csv(&traj),
        ),
        (
            ArtifactKind::DiagnosticsJson,
            cmd.out.join("diagnostics.json"),
            to_json(&doc),
        ),
    ])
}

fn sweep(cmd: &Command) -> Result<Pending, RunError> {
    let spec = cmd.grid.ok_or(CliError::Missing("axis"))?;
    let map = sweep_parallel(&spec).map_err(|e| CliError::Invalid {
        key: "grid",
        reason: e.to_string(),
    })?;
    Ok(vec![
        (ArtifactKind::RegionCsv, cmd.out.join("region.csv"), report::region_csv(&map)),
        (
            ArtifactKind::BoundaryCsv,
            cmd.out.join("boundary.csv"),
            report::boundary_csv(&map),
        ),
    ])
}

fn parse_with_config(args: &[String]) -> Result<Command, CliError> {
    let (config_path, rest) = cli::split_config_flag(args)?;
    let text = match config_path {
        Some(p) => Some(std::fs::read_to_string(&p).map_err(|e| CliError::ConfigFile {
            path: p.clone(),
            reason: e.to_string(),
        })?),
        None => None,
    };
    cli::parse(text.as_deref(), &rest)
}

/// Full CLI entry point: parses `args` (without the program name), runs,
/// prints the artifact list as JSON, and returns the exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.iter().any(|a| a == "--help" || a == "-h" || a == "--version" || a == "-V") {
        // clap renders help and version text
        return match cli::parse(None, args) {
            Err(CliError::Clap(msg)) => {
                print!("{msg}");
                EXIT_OK
            }
            _ => EXIT_USAGE,
        };
    }
    let result = parse_with_config(args)
        .map_err(RunError::from)
        .and_then(|cmd| run(&cmd));
    match result {
        Ok(artifacts) => {
            let text = serde_json::to_string_pretty(&artifacts).expect("artifact list serializes");
            println!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
