//! Map iteration, a fixed-step RK4 reference integrator, and trajectory
//! diagnostics.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::model::{Model, ModelError, ModelKind, ModelParams, State};

/// Coordinate magnitude at which iteration stops.
pub const DIVERGENCE_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("step size must be positive and finite")]
    InvalidStep,
    #[error("step count must be at least 1")]
    InvalidCount,
    #[error("initial state must be finite and non-negative")]
    InvalidInitial,
    #[error("duration and output spacing must be positive and finite")]
    InvalidSpan,
    #[error("trajectory has {got} samples, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Sample {
    pub t: f64,
    pub state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum EventKind {
    NegativePopulation,
    OverflowStop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrajectoryEvent {
    pub index: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: ModelKind,
    pub params: ModelParams,
    /// Map step size; `0.0` marks a continuous reference run.
    pub h: f64,
    pub samples: Vec<Sample>,
    pub events: Vec<TrajectoryEvent>,
}

impl Trajectory {
    pub fn last(&self) -> State {
        self.samples.last().map(|s| s.state).unwrap_or_default()
    }

    pub fn overflowed(&self) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::OverflowStop)
    }

    pub fn first_negative(&self) -> Option<usize> {
        self.events
            .iter()
            .find(|e| e.kind == EventKind::NegativePopulation)
            .map(|e| e.index)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn push(&mut self, t: f64, state: State, guard: f64) -> bool {
        let index = self.samples.len();
        if !state.is_finite() || state.max_abs() > guard {
            self.events.push(TrajectoryEvent {
                index,
                kind: EventKind::OverflowStop,
            });
            return false;
        }
        if !state.is_nonnegative() && self.first_negative().is_none() {
            self.events.push(TrajectoryEvent {
                index,
                kind: EventKind::NegativePopulation,
            });
        }
        self.samples.push(Sample { t, state });
        true
    }

    fn stop(&mut self) {
        let index = self.samples.len();
        self.events.push(TrajectoryEvent {
            index,
            kind: EventKind::OverflowStop,
        });
    }
}

fn check_initial(x0: State) -> Result<(), SimError> {
    if x0.is_finite() && x0.is_nonnegative() {
        Ok(())
    } else {
        Err(SimError::InvalidInitial)
    }
}

/// `n` applications of the step-`h` map from `x0`.
pub fn iterate(model: Model, h: f64, x0: State, n: usize) -> Result<Trajectory, SimError> {
    iterate_guarded(model, h, x0, n, DIVERGENCE_GUARD)
}

pub fn iterate_guarded(
    model: Model,
    h: f64,
    x0: State,
    n: usize,
    guard: f64,
) -> Result<Trajectory, SimError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(SimError::InvalidStep);
    }
    if n == 0 {
        return Err(SimError::InvalidCount);
    }
    check_initial(x0)?;
    let mut traj = Trajectory {
        kind: model.kind,
        params: model.params,
        h,
        samples: Vec::with_capacity(n + 1),
        events: Vec::new(),
    };
    traj.push(0.0, x0, guard);
    let mut s = x0;
    for k in 1..=n {
        s = match model.step(h, s) {
            Ok(next) => next,
            Err(ModelError::Overflow(_)) => {
                traj.stop();
                break;
            }
            Err(e) => return Err(e.into()),
        };
        if !traj.push(k as f64 * h, s, guard) {
            break;
        }
    }
    Ok(traj)
}

/// Default internal RK4 substep for an output spacing.
pub fn default_substep(dt_out: f64) -> f64 {
    libm::fmin(dt_out, 0.01) / 10.0
}

fn rk4_step(model: &Model, s: State, dt: f64) -> Result<State, ModelError> {
    let add = |a: State, k: State, f: f64| State::new(a.prey + f * k.prey, a.predator + f * k.predator);
    let k1 = model.rhs(s)?;
    let k2 = model.rhs(add(s, k1, 0.5 * dt))?;
    let k3 = model.rhs(add(s, k2, 0.5 * dt))?;
    let k4 = model.rhs(add(s, k3, dt))?;
    Ok(State::new(
        s.prey + dt / 6.0 * (k1.prey + 2.0 * k2.prey + 2.0 * k3.prey + k4.prey),
        s.predator + dt / 6.0 * (k1.predator + 2.0 * k2.predator + 2.0 * k3.predator + k4.predator),
    ))
}

/// Classical RK4 solution of the continuous model, sampled every `dt_out`.
pub fn integrate_reference(
    model: Model,
    x0: State,
    t_end: f64,
    dt_out: f64,
) -> Result<Trajectory, SimError> {
    integrate_with_substep(model, x0, t_end, dt_out, default_substep(dt_out))
}

/// As [`integrate_reference`] with an explicit internal substep. Each output
/// interval is split into `ceil(dt_out / substep)` equal substeps.
pub fn integrate_with_substep(
    model: Model,
    x0: State,
    t_end: f64,
    dt_out: f64,
    substep: f64,
) -> Result<Trajectory, SimError> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(t_end) && positive(dt_out) && positive(substep)) {
        return Err(SimError::InvalidSpan);
    }
    check_initial(x0)?;
    let n_out = libm::round(t_end / dt_out) as usize;
    let n_out = n_out.max(1);
    let per_out = libm::ceil(dt_out / substep - 1e-9).max(1.0) as usize;
    let dt = dt_out / per_out as f64;
    let mut traj = Trajectory {
        kind: model.kind,
        params: model.params,
        h: 0.0,
        samples: Vec::with_capacity(n_out + 1),
        events: Vec::new(),
    };
    traj.push(0.0, x0, DIVERGENCE_GUARD);
    let mut s = x0;
    'outer: for k in 1..=n_out {
        for _ in 0..per_out {
            s = match rk4_step(&model, s, dt) {
                Ok(next) if next.is_finite() => next,
                Ok(_) | Err(ModelError::Overflow(_)) => {
                    traj.stop();
                    break 'outer;
                }
                Err(e) => return Err(e.into()),
            };
        }
        if !traj.push(k as f64 * dt_out, s, DIVERGENCE_GUARD) {
            break;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Verdict {
    Convergent,
    BoundedOscillation,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Convergent => "CONVERGENT",
            Verdict::BoundedOscillation => "BOUNDED_OSCILLATION",
            Verdict::Divergent => "DIVERGENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Thresholds for [`diagnose`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiagnoseConfig {
    /// Relative final error below which a run counts as convergent.
    pub convergence_threshold: f64,
    /// Half-width of the band around one for "constant" peak ratios.
    pub peak_band: f64,
    /// Leading fraction of samples ignored for peak extraction.
    pub burn_in: f64,
    /// Consecutive peak ratios required for a growth or bounded verdict.
    pub min_peaks: usize,
    pub min_samples: usize,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            convergence_threshold: 1e-3,
            peak_band: 1e-3,
            burn_in: 0.2,
            min_peaks: 5,
            min_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostics {
    pub verdict: Verdict,
    pub target: State,
    /// Successive prey crest heights above the target after burn-in.
    pub peak_amplitudes: Vec<f64>,
    /// Max-norm distance of the last sample from the target over `max(1, |target|_inf)`.
    pub final_error: f64,
}

/// Heights of the strict local maxima of `N - N*` on the side above `N*`,
/// each refined by the vertex of the parabola through its three samples.
///
/// Only upper crests are used: `|N - N*|` peaks alternate between the two
/// swings of an asymmetric cycle, and raw sample maxima jitter by about
/// `1 - cos(pi / period)` relative.
pub fn crest_heights(deviation: &[f64], start: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let start = start.max(1);
    if deviation.len() < 3 {
        return out;
    }
    for i in start..deviation.len() - 1 {
        let (y0, y1, y2) = (deviation[i - 1], deviation[i], deviation[i + 1]);
        if y1 > 0.0 && y1 > y0 && y1 >= y2 {
            let curv = y0 - 2.0 * y1 + y2;
            let peak = if curv < 0.0 {
                y1 - (y0 - y2) * (y0 - y2) / (8.0 * curv)
            } else {
                y1
            };
            out.push(peak);
        }
    }
    out
}

fn longest_run(ratios: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &x in ratios {
        if pred(x) {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Classifies a trajectory's long-run behaviour relative to `target`.
///
/// Checked in order: convergent (final error below threshold), divergent
/// (`min_peaks` consecutive crest ratios above `1 + band`), bounded
/// oscillation (`min_peaks` consecutive ratios within `1 +- band`),
/// otherwise inconclusive.
pub fn diagnose(
    traj: &Trajectory,
    target: State,
    cfg: &DiagnoseConfig,
) -> Result<Diagnostics, SimError> {
    let n = traj.samples.len();
    if n < cfg.min_samples {
        return Err(SimError::TooShort {
            got: n,
            need: cfg.min_samples,
        });
    }
    let scale = libm::fmax(1.0, target.max_abs());
    let final_error = traj.last().distance(&target) / scale;
    let deviation: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| s.state.prey - target.prey)
        .collect();
    let burn = libm::floor(cfg.burn_in * n as f64) as usize;
    let peaks = crest_heights(&deviation, burn);
    let ratios: Vec<f64> = peaks.windows(2).map(|w| w[1] / w[0]).collect();
    let band = cfg.peak_band;

    let verdict = if final_error < cfg.convergence_threshold {
        Verdict::Convergent
    } else if longest_run(&ratios, |x| x > 1.0 + band) >= cfg.min_peaks {
        Verdict::Divergent
    } else if longest_run(&ratios, |x| libm::fabs(x - 1.0) <= band) >= cfg.min_peaks {
        Verdict::BoundedOscillation
    } else {
        Verdict::Inconclusive
    };
    Ok(Diagnostics {
        verdict,
        target,
        peak_amplitudes: peaks,
        final_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::coexistence_point;

    fn model(kind: ModelKind, alpha: f64) -> Model {
        Model::new(kind, ModelParams::reference().with_alpha(alpha).unwrap())
    }

    #[test]
    fn equilibrium_start_is_constant() {
        let m = model(ModelKind::Ricker, 0.04);
        let e3 = coexistence_point(&m.params);
        let traj = iterate(m, 1.0, e3, 200).unwrap();
        assert_eq!(traj.len(), 201);
        for s in &traj.samples {
            assert!(s.state.distance(&e3) <= 1e-12 * m.params.k());
        }
        let d = diagnose(&traj, e3, &DiagnoseConfig::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Convergent);
        assert!(d.final_error < 1e-14);
    }

    #[test]
    fn first_step_is_euler() {
        for kind in ModelKind::ALL {
            let m = model(kind, 0.05);
            let x0 = State::new(300.0, 6.0);
            let traj = iterate(m, 0.37, x0, 1).unwrap();
            let d = m.rhs(x0).unwrap();
            assert_eq!(
                traj.samples[1].state,
                State::new(x0.prey + 0.37 * d.prey, x0.predator + 0.37 * d.predator)
            );
            assert_eq!(traj.samples[1].t, 0.37);
        }
    }

    #[test]
    fn converges_for_alpha_004() {
        let m = model(ModelKind::Ricker, 0.04);
        let e3 = coexistence_point(&m.params);
        let traj = iterate(m, 1.0, State::new(450.0, 9.0), 5000).unwrap();
        let last = traj.last();
        assert!((last.prey - 500.0).abs() / 500.0 < 1e-3);
        assert!((last.predator - 10.0).abs() / 10.0 < 1e-3);
        let d = diagnose(&traj, e3, &DiagnoseConfig::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Convergent);
    }

    #[test]
    fn prey_peaks_grow_for_alpha_005() {
        let m = model(ModelKind::Ricker, 0.05);
        let e3 = coexistence_point(&m.params);
        let traj = iterate(m, 1.0, State::new(450.0, 9.0), 600).unwrap();
        let dev: Vec<f64> = traj.samples.iter().map(|s| s.state.prey - e3.prey).collect();
        let peaks = crest_heights(&dev, 1);
        assert!(peaks.len() >= 5);
        assert!(peaks.windows(2).take(10).all(|w| w[1] > w[0]));
    }

    #[test]
    fn negative_population_is_flagged_once() {
        // large h drives prey below zero under the Lotka-Volterra map
        let m = model(ModelKind::LotkaVolterra, 0.05);
        let traj = iterate(m, 3.0, State::new(2400.0, 30.0), 50).unwrap();
        let negs = traj
            .events
            .iter()
            .filter(|e| e.kind == EventKind::NegativePopulation)
            .count();
        assert!(negs <= 1);
        if let Some(i) = traj.first_negative() {
            assert!(!traj.samples[i].state.is_nonnegative());
        }
    }

    #[test]
    fn overflow_stops_iteration() {
        let m = model(ModelKind::LotkaVolterra, 0.05);
        let traj = iterate_guarded(m, 50.0, State::new(2400.0, 30.0), 1000, 1e6).unwrap();
        assert!(traj.overflowed());
        assert!(traj.len() < 1001);
        assert!(traj.samples.iter().all(|s| s.state.max_abs() <= 1e6));
    }

    #[test]
    fn axis_trajectories_stay_on_axes() {
        for kind in ModelKind::ALL {
            let m = model(kind, 0.05);
            let traj = iterate(m, 0.8, State::new(0.0, 5.0), 100).unwrap();
            assert!(traj.samples.iter().all(|s| s.state.prey == 0.0));
            let traj = iterate(m, 0.8, State::new(100.0, 0.0), 100).unwrap();
            assert!(traj.samples.iter().all(|s| s.state.predator == 0.0));
        }
    }

    #[test]
    fn invalid_arguments() {
        let m = model(ModelKind::Ricker, 0.05);
        assert_eq!(iterate(m, 0.0, State::new(1.0, 1.0), 5), Err(SimError::InvalidStep));
        assert_eq!(iterate(m, 1.0, State::new(1.0, 1.0), 0), Err(SimError::InvalidCount));
        assert_eq!(iterate(m, 1.0, State::new(-1.0, 1.0), 5), Err(SimError::InvalidInitial));
        assert_eq!(
            integrate_reference(m, State::new(1.0, 1.0), 0.0, 1.0),
            Err(SimError::InvalidSpan)
        );
        let short = iterate(m, 1.0, State::new(1.0, 1.0), 10).unwrap();
        assert_eq!(
            diagnose(&short, State::default(), &DiagnoseConfig::default()),
            Err(SimError::TooShort { got: 11, need: 100 })
        );
    }

    #[test]
    fn reference_integration_samples_on_grid() {
        let m = model(ModelKind::LotkaVolterra, 0.05);
        let traj = integrate_reference(m, State::new(360.0, 7.56), 10.0, 0.5).unwrap();
        assert_eq!(traj.h, 0.0);
        assert_eq!(traj.len(), 21);
        assert_eq!(traj.samples[20].t, 10.0);
        let e3 = coexistence_point(&m.params);
        let still = integrate_reference(m, e3, 5.0, 1.0).unwrap();
        assert!(still.samples.iter().all(|s| s.state.distance(&e3) < 1e-9));
    }

    #[test]
    fn crest_refinement_recovers_sine_amplitude() {
        let dev: Vec<f64> = (0..400)
            .map(|k| 2.0 * libm::sin(2.0 * core::f64::consts::PI * k as f64 / 21.3))
            .collect();
        let peaks = crest_heights(&dev, 1);
        assert!(peaks.len() > 10);
        for p in peaks {
            assert!((p - 2.0).abs() < 2.0 * 1e-3, "{p}");
        }
    }

    #[test]
    fn synthetic_verdicts() {
        let m = model(ModelKind::Ricker, 0.05);
        let make = |growth: f64| {
            let samples = (0..2000)
                .map(|k| {
                    let a = libm::pow(growth, k as f64);
                    let x = 400.0 + 10.0 * a * libm::sin(k as f64 * 0.3);
                    Sample { t: k as f64, state: State::new(x, 8.4) }
                })
                .collect();
            Trajectory { kind: m.kind, params: m.params, h: 1.0, samples, events: Vec::new() }
        };
        let target = State::new(400.0, 8.4);
        let cfg = DiagnoseConfig::default();
        assert_eq!(diagnose(&make(1.001), target, &cfg).unwrap().verdict, Verdict::Divergent);
        assert_eq!(
            diagnose(&make(1.0), target, &cfg).unwrap().verdict,
            Verdict::BoundedOscillation
        );
        assert_eq!(diagnose(&make(0.99999), target, &cfg).unwrap().verdict, Verdict::BoundedOscillation);
    }
}
