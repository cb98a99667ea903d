//! JSON documents and CSV tables written by the CLI.

use pp_stability_core::bounds::{BoundReport, BoundSet, Condition, StepBound};
use pp_stability_core::simulation::{EventKind, Trajectory};
use pp_stability_core::{
    Complex, DiagnoseConfig, Diagnostics, EigenPair, ModelKind, ModelParams, RegionMap, State,
    StabilityClass,
};
use serde::Serialize;

use crate::cli::Command;

#[derive(Debug, Serialize)]
pub struct CommandEcho {
    pub verb: &'static str,
    /// Flags that reproduce this command when parsed.
    pub args: Vec<String>,
}

impl CommandEcho {
    pub fn of(cmd: &Command) -> Self {
        Self {
            verb: cmd.verb.name(),
            args: cmd.to_args(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ParamsDoc {
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub c: f64,
}

impl From<&ModelParams> for ParamsDoc {
    fn from(p: &ModelParams) -> Self {
        Self {
            r: p.r(),
            k: p.k(),
            alpha: p.alpha(),
            gamma: p.gamma(),
            c: p.c(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DerivedDoc {
    pub theta: f64,
    #[serde(rename = "T")]
    pub neg_trace: f64,
    #[serde(rename = "D")]
    pub det: f64,
    pub beta: f64,
    pub theta_exact: Option<String>,
    #[serde(rename = "T_exact")]
    pub neg_trace_exact: Option<String>,
}

impl DerivedDoc {
    pub fn of(p: &ModelParams) -> Self {
        let d = p.derived();
        let ex = pp_stability_core::exact::ExactParams::from_params(p);
        Self {
            theta: d.theta,
            neg_trace: d.neg_trace,
            det: d.det,
            beta: d.beta,
            theta_exact: ex.and_then(|e| e.theta()).map(|x| x.to_string()),
            neg_trace_exact: ex.and_then(|e| e.neg_trace()).map(|x| x.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassDoc {
    pub class: &'static str,
    pub oscillatory: bool,
}

impl From<StabilityClass> for ClassDoc {
    fn from(c: StabilityClass) -> Self {
        Self {
            class: c.kind.name(),
            oscillatory: c.oscillatory,
        }
    }
}

fn pair(e: &EigenPair) -> [Complex; 2] {
    e.as_array()
}

#[derive(Debug, Serialize)]
pub struct BoundDoc {
    pub name: &'static str,
    pub expression: &'static str,
    /// `null` when unbounded.
    pub value: Option<f64>,
    pub exact: Option<String>,
    pub note: Option<&'static str>,
}

impl From<&StepBound> for BoundDoc {
    fn from(b: &StepBound) -> Self {
        Self {
            name: b.name,
            expression: b.expression,
            value: b.value.finite(),
            exact: b.exact.map(|e| e.to_string()),
            note: b.note,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConditionDoc {
    pub name: &'static str,
    /// `null` when undefined for these parameters.
    pub satisfied: Option<bool>,
    pub caveat: Option<&'static str>,
}

impl From<&Condition> for ConditionDoc {
    fn from(c: &Condition) -> Self {
        Self {
            name: c.name,
            satisfied: c.satisfied,
            caveat: c.caveat,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValueDoc {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct EquilibriumDoc {
    pub label: &'static str,
    pub point: State,
    pub feasible: bool,
    pub case: &'static str,
    pub continuous_eigenvalues: [Complex; 2],
    pub discrete_eigenvalues: [Complex; 2],
    pub continuous_closed_form: ClassDoc,
    pub continuous_oracle: ClassDoc,
    pub closed_form: ClassDoc,
    pub oracle: ClassDoc,
    pub is_sink: bool,
    pub agreement: bool,
    pub bounds: Vec<BoundDoc>,
    pub conditions: Vec<ConditionDoc>,
    pub values: Vec<ValueDoc>,
}

impl From<&BoundReport> for EquilibriumDoc {
    fn from(r: &BoundReport) -> Self {
        Self {
            label: r.equilibrium.name(),
            point: r.point,
            feasible: r.feasible,
            case: r.case.name(),
            continuous_eigenvalues: pair(&r.continuous_eigenvalues),
            discrete_eigenvalues: pair(&r.discrete_eigenvalues),
            continuous_closed_form: r.continuous_closed_form.into(),
            continuous_oracle: r.continuous_oracle.into(),
            closed_form: r.classification_closed_form.into(),
            oracle: r.classification_oracle.into(),
            is_sink: r.classification_oracle.is_sink(),
            agreement: r.agreement,
            bounds: r.bounds.iter().map(Into::into).collect(),
            conditions: r.conditions.iter().map(Into::into).collect(),
            values: r
                .values
                .iter()
                .map(|&(name, value)| ValueDoc { name, value })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassificationDoc {
    pub command: CommandEcho,
    pub model: &'static str,
    pub params: ParamsDoc,
    pub h: f64,
    pub tolerance: f64,
    pub derived: DerivedDoc,
    pub equilibria: Vec<EquilibriumDoc>,
}

#[derive(Debug, Serialize)]
pub struct TableDoc {
    pub equilibrium: &'static str,
    pub case: &'static str,
    pub continuous: ClassDoc,
    pub continuous_eigenvalues: [Complex; 2],
    pub bounds: Vec<BoundDoc>,
    /// Present when a step size was given.
    pub conditions: Option<Vec<ConditionDoc>>,
    pub closed_form_at_h: Option<ClassDoc>,
}

impl TableDoc {
    pub fn of(set: &BoundSet, h: Option<f64>, tol: f64) -> Self {
        Self {
            equilibrium: set.equilibrium.name(),
            case: set.case.name(),
            continuous: set.continuous.into(),
            continuous_eigenvalues: pair(&set.eigenvalues),
            bounds: set.bounds.iter().map(Into::into).collect(),
            conditions: h.map(|h| set.conditions(h, tol).iter().map(Into::into).collect()),
            closed_form_at_h: h.map(|h| set.closed_form_class(h, tol).into()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundsDoc {
    pub command: CommandEcho,
    pub model: &'static str,
    pub params: ParamsDoc,
    pub h: Option<f64>,
    pub tolerance: f64,
    pub derived: DerivedDoc,
    pub tables: Vec<TableDoc>,
}

#[derive(Debug, Serialize)]
pub struct EventDoc {
    pub index: usize,
    pub kind: EventKind,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsDoc {
    pub command: CommandEcho,
    pub model: &'static str,
    pub params: ParamsDoc,
    pub h: f64,
    pub continuous_reference: bool,
    pub samples: usize,
    pub events: Vec<EventDoc>,
    pub config: DiagnoseConfig,
    /// `null` when the trajectory is too short to diagnose.
    pub diagnostics: Option<Diagnostics>,
    pub note: Option<String>,
}

pub fn model_name(kind: ModelKind) -> &'static str {
    kind.name()
}

pub fn to_json<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s.into_bytes()
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory csv flush")
}

pub fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["t", "N", "P"]).expect("in-memory csv");
    for s in &traj.samples {
        w.write_record([num(s.t), num(s.state.prey), num(s.state.predator)])
            .expect("in-memory csv");
    }
    finish(w)
}

pub fn region_csv(map: &RegionMap) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["x", "beta", "label"]).expect("in-memory csv");
    for (x, beta, label) in map.rows() {
        w.write_record([num(x), num(beta), label.name().to_owned()])
            .expect("in-memory csv");
    }
    finish(w)
}

/// One row per x node, one column per named curve.
pub fn boundary_csv(map: &RegionMap) -> Vec<u8> {
    let mut w = csv_writer();
    let mut header = vec!["x".to_owned()];
    header.extend(map.boundary_curves.iter().map(|c| c.name.to_owned()));
    w.write_record(&header).expect("in-memory csv");
    let n = map.boundary_curves[0].points.len();
    for i in 0..n {
        let mut row = vec![num(map.boundary_curves[0].points[i].0)];
        row.extend(map.boundary_curves.iter().map(|c| num(c.points[i].1)));
        w.write_record(&row).expect("in-memory csv");
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pp_stability_core::region::{AxisRange, GridSpec};
    use pp_stability_core::{iterate, sweep, Model};

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(2500.0), "2.5000000000000000e3");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn trajectory_table_shape() {
        let m = Model::new(ModelKind::Ricker, ModelParams::reference());
        let traj = iterate(m, 1.0, State::new(360.0, 7.56), 3).unwrap();
        let text = String::from_utf8(trajectory_csv(&traj)).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "t,N,P");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[5], "");
        assert!(!text.contains('\r'));
        assert!(lines[1].starts_with("0.0000000000000000e0,3.6000000000000000e2,"));
    }

    #[test]
    fn region_and_boundary_tables() {
        let mut spec = GridSpec::step_plane(2);
        spec.x = AxisRange::new(0.5, 1.0, 2);
        spec.beta = AxisRange::new(0.0, 8e-4, 3);
        let map = sweep(&spec).unwrap();
        let text = String::from_utf8(region_csv(&map)).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().next(), Some("x,beta,label"));
        assert!(text.lines().nth(1).unwrap().ends_with(",E3_INFEASIBLE"));
        let text = String::from_utf8(boundary_csv(&map)).unwrap();
        assert_eq!(text.lines().next(), Some("x,upper_derived,upper_caption,lower"));
        assert_eq!(text.lines().count(), 3);
    }
}
