//! Flag and config-file parsing into a validated [`Command`].
//!
//! Config files hold `key=value` lines whose keys are the long flag names.
//! They are turned into leading `--key value` pairs, so any flag given on
//! the command line overrides the file.

use std::path::PathBuf;

use clap::{CommandFactory, Parser, ValueEnum};
use pp_stability_core::region::{AxisRange, FixedParams, GridSpec, SweepAxis};
use pp_stability_core::{DiagnoseConfig, ModelError, ModelKind, ModelParams, State, DEFAULT_TOLERANCE};
use thiserror::Error;

use pp_stability_core::simulation::DIVERGENCE_GUARD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Classify,
    Bounds,
    Simulate,
    Sweep,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Classify => "classify",
            Verb::Bounds => "bounds",
            Verb::Simulate => "simulate",
            Verb::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Ricker,
    LotkaVolterra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    H,
    C,
}

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("config line {line}: expected key=value")]
    ConfigSyntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required option `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("{0}")]
    Clap(String),
    #[error("cannot read config file {path}: {reason}")]
    ConfigFile { path: String, reason: String },
}

/// Analyze and simulate forward-Euler predator-prey maps.
#[derive(Debug, Parser)]
#[command(
    name = "pp-stability-lab",
    version,
    args_override_self = true,
    allow_negative_numbers = true
)]
struct RawArgs {
    /// What to do.
    #[arg(value_enum)]
    verb: Verb,

    /// Model family.
    #[arg(long, value_enum, default_value = "ricker")]
    model: KindArg,

    /// Prey growth rate.
    #[arg(long, default_value_t = 0.5)]
    r: f64,

    /// Prey carrying capacity.
    #[arg(long = "K", default_value_t = 2500.0)]
    k: f64,

    /// Predator attack rate.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Prey-to-predator conversion rate.
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,

    /// Predator starvation rate.
    #[arg(long, default_value_t = 0.2)]
    c: f64,

    /// Euler step size (classify, simulate, and sweep on the c axis).
    #[arg(long)]
    h: Option<f64>,

    /// Initial prey density (default 0.9 N*).
    #[arg(long)]
    n0: Option<f64>,

    /// Initial predator density (default 0.9 P*).
    #[arg(long)]
    p0: Option<f64>,

    /// Number of map steps.
    #[arg(long, default_value_t = 1000)]
    steps: usize,

    /// Simulate the continuous model with RK4, sampled every h.
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    reference: bool,

    /// Width of the non-hyperbolic band around |lambda| = 1.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,

    /// Relative final error below which a run is convergent.
    #[arg(long, default_value_t = 1e-3)]
    convergence_threshold: f64,

    /// Half-width of the peak-ratio band for bounded oscillation.
    #[arg(long, default_value_t = 1e-3)]
    peak_band: f64,

    /// Fraction of samples discarded before peak detection.
    #[arg(long, default_value_t = 0.2)]
    burn_in: f64,

    /// Consecutive peak ratios needed for a verdict.
    #[arg(long, default_value_t = 5)]
    min_peaks: usize,

    /// Coordinate magnitude that stops iteration.
    #[arg(long, default_value_t = DIVERGENCE_GUARD)]
    guard: f64,

    /// Sweep x axis.
    #[arg(long, value_enum, default_value = "h")]
    axis: AxisArg,

    /// Lower end of the x axis (h: 0.01, c: 0.01)
    #[arg(long)]
    x_lo: Option<f64>,

    /// Upper end of the x axis (h: 4, c: 0.6)
    #[arg(long)]
    x_hi: Option<f64>,

    /// Grid nodes along x, endpoints included
    #[arg(long, default_value_t = 400)]
    x_n: usize,

    /// Lower end of the beta = alpha*gamma axis
    #[arg(long, default_value_t = 0.0)]
    beta_lo: f64,

    /// Upper end of the beta axis
    #[arg(long, default_value_t = 8e-4)]
    beta_hi: f64,

    /// Grid nodes along beta, endpoints included
    #[arg(long, default_value_t = 400)]
    beta_n: usize,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// A fully validated request.
#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub kind: ModelKind,
    pub params: ModelParams,
    pub h: Option<f64>,
    pub x0: Option<State>,
    pub steps: usize,
    pub reference: bool,
    pub tol: f64,
    pub diagnose: DiagnoseConfig,
    pub guard: f64,
    pub grid: Option<GridSpec>,
    pub out: PathBuf,
}

/// Long flag names accepted on the command line and as config keys.
pub fn known_keys() -> Vec<String> {
    RawArgs::command()
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .filter(|k| k != "help" && k != "version")
        .collect()
}

/// Turns config text into `--key value` pairs.
pub fn config_args(text: &str) -> Result<Vec<String>, CliError> {
    let keys = known_keys();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(CliError::ConfigSyntax { line: i + 1 })?;
        let key = key.trim();
        if !keys.iter().any(|k| k == key) {
            return Err(CliError::UnknownKey(key.to_owned()));
        }
        out.push(format!("--{key}"));
        out.push(value.trim().to_owned());
    }
    Ok(out)
}

/// Removes `--config FILE` (or `--config=FILE`) from `args`, returning the path.
pub fn split_config_flag(args: &[String]) -> Result<(Option<String>, Vec<String>), CliError> {
    let mut path = None;
    let mut rest = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it.next().ok_or(CliError::Missing("config"))?;
            path = Some(p.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_owned());
        } else {
            rest.push(a.clone());
        }
    }
    Ok((path, rest))
}

/// Parses config text plus command-line flags (without the program name).
pub fn parse(config: Option<&str>, args: &[String]) -> Result<Command, CliError> {
    let mut argv = vec!["pp-stability-lab".to_owned()];
    if let Some(text) = config {
        argv.extend(config_args(text)?);
    }
    argv.extend(args.iter().cloned());
    let raw = RawArgs::try_parse_from(&argv).map_err(|e| {
        if let Some(arg) = unknown_arg(&e) {
            CliError::UnknownKey(arg)
        } else {
            CliError::Clap(e.to_string())
        }
    })?;
    validate(raw)
}

fn unknown_arg(e: &clap::Error) -> Option<String> {
    if e.kind() != clap::error::ErrorKind::UnknownArgument {
        return None;
    }
    match e.get(clap::error::ContextKind::InvalidArg) {
        Some(clap::error::ContextValue::String(s)) => {
            Some(s.trim_start_matches('-').split('=').next().unwrap_or(s).to_owned())
        }
        _ => None,
    }
}

fn invalid(key: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Invalid {
        key,
        reason: reason.into(),
    }
}

fn positive(key: &'static str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn validate(raw: RawArgs) -> Result<Command, CliError> {
    let kind = match raw.model {
        KindArg::Ricker => ModelKind::Ricker,
        KindArg::LotkaVolterra => ModelKind::LotkaVolterra,
    };
    let params = ModelParams::new(raw.r, raw.k, raw.alpha, raw.gamma, raw.c).map_err(|e| match e {
        ModelError::InvalidParameter { name, value } => {
            invalid(name, format!("must be positive and finite, got {value}"))
        }
        other => invalid("params", other.to_string()),
    })?;
    let h = raw.h.map(|h| positive("h", h)).transpose()?;
    if matches!(raw.verb, Verb::Classify | Verb::Simulate) && h.is_none() {
        return Err(CliError::Missing("h"));
    }
    let x0 = match (raw.n0, raw.p0) {
        (None, None) => None,
        (Some(n), Some(p)) => {
            for (key, v) in [("n0", n), ("p0", p)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(key, format!("must be finite and non-negative, got {v}")));
                }
            }
            Some(State::new(n, p))
        }
        (Some(_), None) => return Err(CliError::Missing("p0")),
        (None, Some(_)) => return Err(CliError::Missing("n0")),
    };
    if raw.steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    if !(raw.tol.is_finite() && raw.tol >= 0.0) {
        return Err(invalid("tol", "must be finite and non-negative"));
    }
    positive("convergence-threshold", raw.convergence_threshold)?;
    positive("peak-band", raw.peak_band)?;
    if !(0.0..1.0).contains(&raw.burn_in) {
        return Err(invalid("burn-in", "must lie in [0, 1)"));
    }
    if raw.min_peaks == 0 {
        return Err(invalid("min-peaks", "must be at least 1"));
    }
    let guard = positive("guard", raw.guard)?;
    let diagnose = DiagnoseConfig {
        convergence_threshold: raw.convergence_threshold,
        peak_band: raw.peak_band,
        burn_in: raw.burn_in,
        min_peaks: raw.min_peaks,
        ..DiagnoseConfig::default()
    };

    let grid = if raw.verb == Verb::Sweep {
        let axis = match raw.axis {
            AxisArg::H => SweepAxis::H,
            AxisArg::C => SweepAxis::C,
        };
        if axis == SweepAxis::C && h.is_none() {
            return Err(CliError::Missing("h"));
        }
        let (lo, hi) = match axis {
            SweepAxis::H => (0.01, 4.0),
            SweepAxis::C => (0.01, 0.6),
        };
        let spec = GridSpec {
            axis,
            x: AxisRange::new(raw.x_lo.unwrap_or(lo), raw.x_hi.unwrap_or(hi), raw.x_n),
            beta: AxisRange::new(raw.beta_lo, raw.beta_hi, raw.beta_n),
            fixed: FixedParams {
                r: params.r(),
                k: params.k(),
                gamma: params.gamma(),
                c: params.c(),
                h: h.unwrap_or(0.0),
            },
            kind,
            tol: raw.tol,
        };
        spec.validate().map_err(|e| invalid("grid", e.to_string()))?;
        Some(spec)
    } else {
        None
    };

    Ok(Command {
        verb: raw.verb,
        kind,
        params,
        h,
        x0,
        steps: raw.steps,
        reference: raw.reference,
        tol: raw.tol,
        diagnose,
        guard,
        grid,
        out: raw.out,
    })
}

impl Command {
    /// Canonical flag list; `parse(None, &cmd.to_args())` rebuilds `cmd`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec![self.verb.name().to_owned()];
        let mut push = |k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        let p = &self.params;
        push("model", self.kind.name().to_owned());
        push("r", p.r().to_string());
        push("K", p.k().to_string());
        push("alpha", p.alpha().to_string());
        push("gamma", p.gamma().to_string());
        push("c", p.c().to_string());
        if let Some(h) = self.h {
            push("h", h.to_string());
        }
        if let Some(x0) = self.x0 {
            push("n0", x0.prey.to_string());
            push("p0", x0.predator.to_string());
        }
        push("steps", self.steps.to_string());
        push("reference", self.reference.to_string());
        push("tol", self.tol.to_string());
        let d = &self.diagnose;
        push("convergence-threshold", d.convergence_threshold.to_string());
        push("peak-band", d.peak_band.to_string());
        push("burn-in", d.burn_in.to_string());
        push("min-peaks", d.min_peaks.to_string());
        push("guard", self.guard.to_string());
        if let Some(g) = &self.grid {
            push("axis", g.axis.name().to_owned());
            push("x-lo", g.x.lo.to_string());
            push("x-hi", g.x.hi.to_string());
            push("x-n", g.x.n.to_string());
            push("beta-lo", g.beta.lo.to_string());
            push("beta-hi", g.beta.hi.to_string());
            push("beta-n", g.beta.n.to_string());
        }
        push("out", self.out.display().to_string());
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn reference_flags_parse() {
        let cmd = parse(
            None,
            &args("classify --model ricker --r 0.5 --K 2500 --alpha 0.05 --gamma 0.01 --c 0.2 --h 1"),
        )
        .unwrap();
        assert_eq!(cmd.verb, Verb::Classify);
        assert_eq!(cmd.kind, ModelKind::Ricker);
        assert_eq!(cmd.params, ModelParams::reference());
        assert_eq!(cmd.h, Some(1.0));
        assert_eq!(cmd.tol, DEFAULT_TOLERANCE);
    }

    #[test]
    fn negative_rate_names_key() {
        let err = parse(None, &args("classify --r -1 --h 1")).unwrap_err();
        assert!(matches!(err, CliError::Invalid { key: "r", .. }), "{err:?}");
    }

    #[test]
    fn flags_override_config() {
        let cmd = parse(Some("h=0.5\n# comment\nalpha = 0.04\n"), &args("simulate --h 1")).unwrap();
        assert_eq!(cmd.h, Some(1.0));
        assert_eq!(cmd.params.alpha(), 0.04);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert_eq!(
            parse(Some("zeta=1"), &args("classify --h 1")).unwrap_err(),
            CliError::UnknownKey("zeta".into())
        );
        assert_eq!(
            parse(None, &args("classify --h 1 --zeta 2")).unwrap_err(),
            CliError::UnknownKey("zeta".into())
        );
        assert_eq!(
            parse(Some("just text"), &args("classify --h 1")).unwrap_err(),
            CliError::ConfigSyntax { line: 1 }
        );
    }

    #[test]
    fn missing_step_named() {
        assert_eq!(parse(None, &args("classify")).unwrap_err(), CliError::Missing("h"));
        assert_eq!(parse(None, &args("sweep --axis c")).unwrap_err(), CliError::Missing("h"));
        assert!(parse(None, &args("bounds")).is_ok());
        assert!(parse(None, &args("sweep")).is_ok());
    }

    #[test]
    fn round_trip() {
        for line in [
            "classify --h 0.9523809523809523 --alpha 0.048",
            "simulate --model lotka-volterra --h 0.5 --n0 360 --p0 7.56 --steps 20 --out /tmp/x",
            "sweep --axis c --h 0.7 --x-n 50 --beta-n 60 --tol 1e-8",
            "bounds --r 1.5",
        ] {
            let cmd = parse(None, &args(line)).unwrap();
            assert_eq!(parse(None, &cmd.to_args()).unwrap(), cmd, "{line}");
        }
    }

    #[test]
    fn config_flag_is_split_out() {
        let (p, rest) = split_config_flag(&args("classify --config a.cfg --h 1")).unwrap();
        assert_eq!(p.as_deref(), Some("a.cfg"));
        assert_eq!(rest, args("classify --h 1"));
        let (p, _) = split_config_flag(&args("classify --config=b.cfg")).unwrap();
        assert_eq!(p.as_deref(), Some("b.cfg"));
    }
}
