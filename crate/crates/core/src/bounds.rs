//! Closed-form step-size conditions for the forward-Euler maps, and their
//! cross-check against the eigenvalues of the discrete Jacobian.
//!
//! Every eigenvalue `lambda` of the continuous Jacobian maps to `1 + h lambda`
//! for the step-`h` map. A real negative `lambda` stays inside the unit disc
//! for `h < -2/lambda`; a conjugate pair `a +- ib` with `a < 0` for
//! `h < -2a/(a^2 + b^2)`; a positive `lambda` never does. The closed forms
//! below are those thresholds written in the model constants. The
//! eigenvalue oracle is authoritative: when a literal table condition
//! disagrees with it, the condition is still reported, with a caveat, but
//! it does not drive the closed-form class.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::classify::{classify_continuous, classify_discrete, StabilityClass, StabilityKind};
use crate::equilibrium::{equilibria, EquilibriumLabel};
use crate::exact::{Exact, ExactParams};
use crate::linalg::EigenPair;
use crate::model::{F64Display, Model, ModelError, ModelKind, ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum CaseTag {
    E1,
    E2ThetaNeg,
    E2ThetaPos,
    E2ThetaZero,
    E3Repeated,
    E3RealDistinct,
    E3Complex,
    E3ThetaNeg,
    E3ThetaZero,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::E1 => "E1",
            CaseTag::E2ThetaNeg => "E2_THETA_NEG",
            CaseTag::E2ThetaPos => "E2_THETA_POS",
            CaseTag::E2ThetaZero => "E2_THETA_ZERO",
            CaseTag::E3Repeated => "E3_REPEATED",
            CaseTag::E3RealDistinct => "E3_REAL_DISTINCT",
            CaseTag::E3Complex => "E3_COMPLEX",
            CaseTag::E3ThetaNeg => "E3_THETA_NEG",
            CaseTag::E3ThetaZero => "E3_THETA_ZERO",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundValue {
    Finite(f64),
    Unbounded,
}

impl BoundValue {
    fn of(x: f64) -> Self {
        if x.is_finite() {
            BoundValue::Finite(x)
        } else {
            BoundValue::Unbounded
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            BoundValue::Finite(x) => Some(*x),
            BoundValue::Unbounded => None,
        }
    }
}

/// A named step-size threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct StepBound {
    pub name: &'static str,
    pub expression: &'static str,
    pub value: BoundValue,
    /// Exact rational value when the expression and inputs allow one.
    pub exact: Option<Exact>,
    pub note: Option<&'static str>,
}

impl StepBound {
    fn new(name: &'static str, expression: &'static str, value: f64, exact: Option<Exact>) -> Self {
        Self {
            name,
            expression,
            value: BoundValue::of(value),
            exact,
            note: None,
        }
    }

    fn with_note(mut self, note: &'static str) -> Self {
        self.note = Some(note);
        self
    }
}

/// A tabulated condition evaluated at a step size.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    /// `None` when the condition is undefined for these parameters.
    pub satisfied: Option<bool>,
    pub caveat: Option<&'static str>,
}

impl Condition {
    fn new(name: &'static str, satisfied: bool) -> Self {
        Self {
            name,
            satisfied: Some(satisfied),
            caveat: None,
        }
    }

    fn inapplicable(name: &'static str, caveat: &'static str) -> Self {
        Self {
            name,
            satisfied: None,
            caveat: Some(caveat),
        }
    }

    fn with_caveat(mut self, caveat: &'static str) -> Self {
        self.caveat = Some(caveat);
        self
    }
}

const SPLIT_CAVEAT: &str =
    "literal table split; the window is non-empty exactly when its lower end is below its upper end";
const RK_THETA_POS_CAVEAT: &str =
    "literal table cell; 2/(1-exp(theta)) is negative for theta > 0, so the E2 saddle condition is h < 2/r";
const LN_CAVEAT: &str = "ln(1-r) undefined for r >= 1";
const REPEATED_NOTE: &str =
    "literal bound; |1 + h lambda| < 1 with lambda = -T/2 gives h < 4/T";
const AUX_CAVEAT: &str =
    "equals |1 + h lambda|^2 and is never negative; reported for reference only";
const THETA_ZERO_CAVEAT: &str =
    "a zero eigenvalue maps to modulus one for every h";

/// How one eigenvalue of the continuous Jacobian fares under the map.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Factor {
    /// Inside the unit disc iff `h` is below the threshold.
    Threshold(f64),
    /// Positive eigenvalue: always outside.
    Outside,
    /// Zero eigenvalue: always on the unit circle.
    OnCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Inside,
    On,
    Outside,
}

impl Factor {
    fn side(self, h: f64, tol: f64) -> Side {
        match self {
            Factor::Threshold(t) => {
                if libm::fabs(h - t) <= tol * libm::fabs(t) {
                    Side::On
                } else if h < t {
                    Side::Inside
                } else {
                    Side::Outside
                }
            }
            Factor::Outside => Side::Outside,
            Factor::OnCircle => Side::On,
        }
    }
}

fn combine(a: Side, b: Side) -> StabilityKind {
    match (a, b) {
        (Side::On, _) | (_, Side::On) => StabilityKind::NonHyperbolic,
        (Side::Inside, Side::Inside) => StabilityKind::Sink,
        (Side::Outside, Side::Outside) => StabilityKind::Source,
        _ => StabilityKind::Saddle,
    }
}

fn near(h: f64, target: f64, tol: f64) -> bool {
    libm::fabs(h - target) <= tol * libm::fabs(target)
}

/// The step-size independent part of the analysis at one equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub equilibrium: EquilibriumLabel,
    pub kind: ModelKind,
    pub params: ModelParams,
    pub case: CaseTag,
    pub bounds: Vec<StepBound>,
    /// Continuous eigenvalues from the closed-form expressions.
    pub eigenvalues: EigenPair,
    /// Continuous-time class from the sign conditions on theta.
    pub continuous: StabilityClass,
    factors: [Factor; 2],
    oscillatory: bool,
}

impl BoundSet {
    pub fn bound(&self, name: &str) -> Option<&StepBound> {
        self.bounds.iter().find(|b| b.name == name)
    }

    /// Discrete class implied by the closed-form thresholds.
    pub fn closed_form_class(&self, h: f64, tol: f64) -> StabilityClass {
        let kind = combine(self.factors[0].side(h, tol), self.factors[1].side(h, tol));
        StabilityClass::new(kind, self.oscillatory)
    }

    /// Threshold values that `h` is compared against.
    pub fn thresholds(&self) -> impl Iterator<Item = f64> + '_ {
        self.factors.iter().filter_map(|f| match f {
            Factor::Threshold(t) => Some(*t),
            _ => None,
        })
    }

    /// The tabulated conditions, evaluated literally at `h`.
    pub fn conditions(&self, h: f64, tol: f64) -> Vec<Condition> {
        let p = &self.params;
        let theta = p.derived().theta;
        let r = p.r();
        match self.equilibrium {
            EquilibriumLabel::E1 => {
                let b = self.bounds[0].value.finite().unwrap_or(f64::INFINITY);
                match self.kind {
                    ModelKind::Ricker => vec![
                        Condition::new("saddle: h(1-exp(-c)) < 2", h < b && !near(h, b, tol)),
                        Condition::new("non-hyperbolic: h = 2/(1-exp(-c))", near(h, b, tol)),
                    ],
                    ModelKind::LotkaVolterra => vec![
                        Condition::new("saddle: 0 < h c < 2", h < b && !near(h, b, tol)),
                        Condition::new("non-hyperbolic: h = 2/c", near(h, b, tol)),
                    ],
                }
            }
            EquilibriumLabel::E2 => self.e2_conditions(h, tol, theta, r),
            EquilibriumLabel::E3 => self.e3_conditions(h, tol),
        }
    }

    fn e2_conditions(&self, h: f64, tol: f64, theta: f64, r: f64) -> Vec<Condition> {
        let two_r = 2.0 / r;
        let ln1r = if r < 1.0 { Some(libm::log(1.0 - r)) } else { None };
        let theta_zero = self.case == CaseTag::E2ThetaZero;
        let theta_neg = self.case == CaseTag::E2ThetaNeg;
        match self.kind {
            ModelKind::Ricker => {
                let b = 2.0 / (1.0 - libm::exp(theta));
                let mut out = vec![
                    Condition::new(
                        "stable: theta < 0 and h < min(2/r, 2/(1-exp(theta)))",
                        theta_neg && h < two_r && h < b,
                    ),
                    Condition::new(
                        "saddle (i): theta < 0, theta < -r, 2/r < h < 2/(1-exp(theta))",
                        theta_neg && theta < -r && two_r < h && h < b,
                    )
                    .with_caveat(SPLIT_CAVEAT),
                    Condition::new(
                        "saddle (ii): theta < 0, theta > -r, 2/(1-exp(theta)) < h < 2/r",
                        theta_neg && theta > -r && b < h && h < two_r,
                    )
                    .with_caveat(SPLIT_CAVEAT),
                    Condition::new(
                        "saddle: theta > 0, h < {2/r, 2/(1-exp(theta))}",
                        self.case == CaseTag::E2ThetaPos && h < two_r && h < b,
                    )
                    .with_caveat(RK_THETA_POS_CAVEAT),
                    Condition::new(
                        "non-hyperbolic: theta = 0, h != 2/r",
                        theta_zero && !near(h, two_r, tol),
                    ),
                    Condition::new(
                        "non-hyperbolic: theta < 0, h = 2/(1-exp(theta)), h != 2/r",
                        theta_neg && near(h, b, tol) && !near(h, two_r, tol),
                    ),
                ];
                out.push(match ln1r {
                    Some(l) => Condition::new(
                        "non-hyperbolic: h = 2/r, theta != 0, theta != ln(1-r)",
                        near(h, two_r, tol) && !theta_zero && theta != l,
                    ),
                    None => Condition::inapplicable(
                        "non-hyperbolic: h = 2/r, theta != 0, theta != ln(1-r)",
                        LN_CAVEAT,
                    ),
                });
                out
            }
            ModelKind::LotkaVolterra => {
                let b = -2.0 / theta;
                let mut out = vec![Condition::new(
                    "stable: theta < 0 and h < min(2/r, -2/theta)",
                    theta_neg && h < two_r && h < b,
                )];
                match ln1r {
                    Some(l) => {
                        out.push(
                            Condition::new(
                                "saddle (i): theta < 0, theta < ln(1-r), 2/r < h < -2/theta",
                                theta_neg && theta < l && two_r < h && h < b,
                            )
                            .with_caveat(SPLIT_CAVEAT),
                        );
                        out.push(
                            Condition::new(
                                "saddle (ii): theta < 0, theta > ln(1-r), -2/theta < h < 2/r",
                                theta_neg && theta > l && b < h && h < two_r,
                            )
                            .with_caveat(SPLIT_CAVEAT),
                        );
                    }
                    None => {
                        out.push(Condition::inapplicable(
                            "saddle (i): theta < 0, theta < ln(1-r), 2/r < h < -2/theta",
                            LN_CAVEAT,
                        ));
                        out.push(Condition::inapplicable(
                            "saddle (ii): theta < 0, theta > ln(1-r), -2/theta < h < 2/r",
                            LN_CAVEAT,
                        ));
                    }
                }
                out.push(Condition::new(
                    "non-hyperbolic: theta = 0, h != 2/r",
                    theta_zero && !near(h, two_r, tol),
                ));
                out.push(Condition::new(
                    "non-hyperbolic: theta < 0, h = -2/theta",
                    theta_neg && near(h, b, tol),
                ));
                out.push(Condition::new(
                    "non-hyperbolic: h = 2/r, theta != 0, theta != -r",
                    near(h, two_r, tol) && !theta_zero && theta != -r,
                ));
                out
            }
        }
    }

    fn e3_conditions(&self, h: f64, tol: f64) -> Vec<Condition> {
        let d = self.params.derived();
        match self.case {
            CaseTag::E3Complex => vec![
                Condition::new(
                    "stable: theta > 0, T - 4 theta < 0, h < 1/theta",
                    h * d.theta < 1.0 && !near(h, 1.0 / d.theta, tol),
                ),
                Condition::new("non-hyperbolic: h = 1/theta", near(h, 1.0 / d.theta, tol)),
                Condition::new(
                    "0 < 1 + h T (h theta - 1)",
                    0.0 < 1.0 + h * d.neg_trace * (h * d.theta - 1.0),
                )
                .with_caveat(AUX_CAVEAT),
            ],
            CaseTag::E3RealDistinct => {
                let (lo, hi) = self.threshold_pair();
                vec![
                    Condition::new(
                        "stable: theta > 0, T - 4 theta > 0, h < min(-2/lambda1, -2/lambda2)",
                        h < lo && !near(h, lo, tol),
                    ),
                    Condition::new(
                        "saddle: -2/lambda_i < h < -2/lambda_j",
                        lo < h && h < hi && !near(h, lo, tol) && !near(h, hi, tol),
                    ),
                    Condition::new(
                        "non-hyperbolic: h = -2/lambda_i, h != -2/lambda_j",
                        near(h, lo, tol) != near(h, hi, tol),
                    ),
                ]
            }
            CaseTag::E3Repeated => vec![
                Condition::new(
                    "stable: theta > 0, T = 4 theta, 0 < h < T/4",
                    0.0 < h && h < d.neg_trace / 4.0,
                )
                .with_caveat(REPEATED_NOTE),
                Condition::new(
                    "stable: h < 4/T (from |1 + h lambda| < 1)",
                    h < 4.0 / d.neg_trace && !near(h, 4.0 / d.neg_trace, tol),
                ),
            ],
            CaseTag::E3ThetaNeg => {
                let t = self.thresholds().next().unwrap_or(f64::INFINITY);
                vec![Condition::new(
                    "non-hyperbolic: theta < 0, h = -2/lambda2, lambda2 < 0 < lambda1",
                    near(h, t, tol),
                )]
            }
            CaseTag::E3ThetaZero => vec![Condition::new(
                "non-hyperbolic: theta = 0, h != 2/T",
                !near(h, 2.0 / d.neg_trace, tol),
            )
            .with_caveat(THETA_ZERO_CAVEAT)],
            _ => Vec::new(),
        }
    }

    fn threshold_pair(&self) -> (f64, f64) {
        let mut it = self.thresholds();
        let a = it.next().unwrap_or(f64::INFINITY);
        let b = it.next().unwrap_or(a);
        (libm::fmin(a, b), libm::fmax(a, b))
    }

    /// Scalar quantities reported alongside the conditions.
    pub fn values(&self, h: f64) -> Vec<(&'static str, f64)> {
        let d = self.params.derived();
        match self.case {
            CaseTag::E3Complex => vec![(
                "1 + h T (h theta - 1)",
                1.0 + h * d.neg_trace * (h * d.theta - 1.0),
            )],
            _ => Vec::new(),
        }
    }
}

fn theta_is_zero(params: &ModelParams, tol: f64) -> bool {
    let d = params.derived();
    libm::fabs(d.theta) <= tol * libm::fmax(d.beta * params.k(), params.c())
}

/// Which of the coexistence-point cases applies.
pub fn e3_case(params: &ModelParams, tol: f64) -> CaseTag {
    let d = params.derived();
    if theta_is_zero(params, tol) {
        return CaseTag::E3ThetaZero;
    }
    if d.theta < 0.0 {
        return CaseTag::E3ThetaNeg;
    }
    let gap = d.neg_trace - 4.0 * d.theta;
    if libm::fabs(gap) <= tol * libm::fmax(d.neg_trace, 4.0 * d.theta) {
        CaseTag::E3Repeated
    } else if gap > 0.0 {
        CaseTag::E3RealDistinct
    } else {
        CaseTag::E3Complex
    }
}

/// Coexistence eigenvalues from `T` and `theta`:
/// `(-T +- sqrt(T (T - 4 theta))) / 2`. For real roots the first entry is
/// the more negative one.
pub fn e3_eigenvalues(params: &ModelParams) -> EigenPair {
    let d = params.derived();
    let t = d.neg_trace;
    let disc = t * (t - 4.0 * d.theta);
    if disc < 0.0 {
        return EigenPair::conjugate(-0.5 * t, 0.5 * libm::sqrt(-disc));
    }
    let big = -0.5 * (t + libm::sqrt(disc));
    EigenPair::real(big, d.det / big)
}

fn exact_params(params: &ModelParams) -> Option<ExactParams> {
    ExactParams::from_params(params)
}

/// Step-size analysis at the coexistence point.
pub fn e3_step_bound(kind: ModelKind, params: &ModelParams, tol: f64) -> BoundSet {
    let d = params.derived();
    let case = e3_case(params, tol);
    let ex = exact_params(params);
    let eig = e3_eigenvalues(params);
    let t = d.neg_trace;
    let (bounds, factors, oscillatory, continuous) = match case {
        CaseTag::E3Complex => {
            let exact = ex.and_then(|e| e.theta()?.recip());
            (
                vec![StepBound::new("h_max", "1/theta", 1.0 / d.theta, exact)
                    .with_note("equals -2a/(a^2+b^2) = T/D for eigenvalues a +- ib")],
                [Factor::Threshold(1.0 / d.theta); 2],
                true,
                StabilityClass::new(StabilityKind::Stable, true),
            )
        }
        CaseTag::E3RealDistinct => {
            let lo = -2.0 / eig.lambda1.re;
            let hi = -2.0 / eig.lambda2.re;
            (
                vec![
                    StepBound::new("h_max", "min(-2/lambda1, -2/lambda2)", lo, None),
                    StepBound::new("saddle_window_lo", "-2/lambda_i", lo, None),
                    StepBound::new("saddle_window_hi", "-2/lambda_j", hi, None),
                ],
                [Factor::Threshold(lo), Factor::Threshold(hi)],
                false,
                StabilityClass::new(StabilityKind::Stable, false),
            )
        }
        CaseTag::E3Repeated => {
            let literal = ex.and_then(|e| e.neg_trace()?.checked_div(Exact::from_int(4)));
            let derived = ex.and_then(|e| Exact::from_int(4).checked_div(e.neg_trace()?));
            (
                vec![
                    StepBound::new("h_max_literal", "T/4", t / 4.0, literal)
                        .with_note(REPEATED_NOTE),
                    StepBound::new("h_max", "4/T", 4.0 / t, derived),
                ],
                [Factor::Threshold(4.0 / t); 2],
                false,
                StabilityClass::new(StabilityKind::Stable, false),
            )
        }
        CaseTag::E3ThetaNeg => {
            // lambda1 < 0 < lambda2 in `eig`
            let b = -2.0 / eig.lambda1.re;
            (
                vec![StepBound::new("h_non_hyperbolic", "-2/lambda_neg", b, None)],
                [Factor::Threshold(b), Factor::Outside],
                false,
                StabilityClass::new(StabilityKind::Saddle, false),
            )
        }
        _ => {
            let exact = ex.and_then(|e| Exact::from_int(2).checked_div(e.neg_trace()?));
            (
                vec![StepBound::new("h_excluded", "2/T", 2.0 / t, exact)
                    .with_note("non-hyperbolic for every h other than this one")],
                [Factor::Threshold(2.0 / t), Factor::OnCircle],
                false,
                StabilityClass::new(StabilityKind::NonHyperbolic, false),
            )
        }
    };
    BoundSet {
        equilibrium: EquilibriumLabel::E3,
        kind,
        params: *params,
        case,
        bounds,
        eigenvalues: eig,
        continuous,
        factors,
        oscillatory,
    }
}

/// Step-size analysis at the prey-only point `(K, 0)`.
pub fn e2_bounds(kind: ModelKind, params: &ModelParams, tol: f64) -> BoundSet {
    let d = params.derived();
    let r = params.r();
    let ex = exact_params(params);
    let case = if theta_is_zero(params, tol) {
        CaseTag::E2ThetaZero
    } else if d.theta < 0.0 {
        CaseTag::E2ThetaNeg
    } else {
        CaseTag::E2ThetaPos
    };
    let two_r = StepBound::new(
        "h_prey",
        "2/r",
        2.0 / r,
        ex.and_then(|e| Exact::from_int(2).checked_div(e.r)),
    );
    let (pred_bound, pred_eig) = match kind {
        ModelKind::Ricker => {
            let b = StepBound::new(
                "h_predator",
                "2/(1-exp(theta))",
                2.0 / (1.0 - libm::exp(d.theta)),
                None,
            );
            (b, libm::expm1(d.theta))
        }
        ModelKind::LotkaVolterra => {
            let b = StepBound::new(
                "h_predator",
                "-2/theta",
                -2.0 / d.theta,
                ex.and_then(|e| Exact::from_int(-2).checked_div(e.theta()?)),
            );
            (b, d.theta)
        }
    };
    let (factor, continuous, pred_bound) = match case {
        CaseTag::E2ThetaNeg => (
            Factor::Threshold(pred_bound.value.finite().unwrap_or(f64::INFINITY)),
            StabilityKind::Stable,
            pred_bound,
        ),
        CaseTag::E2ThetaPos => (
            Factor::Outside,
            StabilityKind::Saddle,
            match kind {
                ModelKind::Ricker => pred_bound.with_note(RK_THETA_POS_CAVEAT),
                ModelKind::LotkaVolterra => pred_bound
                    .with_note("negative for theta > 0; the predator direction is always unstable"),
            },
        ),
        _ => (
            Factor::OnCircle,
            StabilityKind::NonHyperbolic,
            StepBound {
                value: BoundValue::Unbounded,
                exact: None,
                ..pred_bound
            }
            .with_note("theta = 0: predator eigenvalue is zero"),
        ),
    };
    BoundSet {
        equilibrium: EquilibriumLabel::E2,
        kind,
        params: *params,
        case,
        bounds: vec![two_r, pred_bound],
        eigenvalues: EigenPair::real(-r, pred_eig),
        continuous: StabilityClass::new(continuous, false),
        factors: [Factor::Threshold(2.0 / r), factor],
        oscillatory: false,
    }
}

/// Step-size analysis at the origin.
pub fn e1_bounds(kind: ModelKind, params: &ModelParams) -> BoundSet {
    let r = params.r();
    let c = params.c();
    let ex = exact_params(params);
    let (bound, eig) = match kind {
        ModelKind::Ricker => (
            StepBound::new("h_saddle", "2/(1-exp(-c))", 2.0 / -libm::expm1(-c), None),
            EigenPair::real(libm::expm1(r), libm::expm1(-c)),
        ),
        ModelKind::LotkaVolterra => (
            StepBound::new(
                "h_saddle",
                "2/c",
                2.0 / c,
                ex.and_then(|e| Exact::from_int(2).checked_div(e.c)),
            ),
            EigenPair::real(r, -c),
        ),
    };
    let threshold = bound.value.finite().unwrap_or(f64::INFINITY);
    BoundSet {
        equilibrium: EquilibriumLabel::E1,
        kind,
        params: *params,
        case: CaseTag::E1,
        bounds: vec![bound],
        eigenvalues: eig,
        continuous: StabilityClass::new(StabilityKind::Saddle, false),
        factors: [Factor::Outside, Factor::Threshold(threshold)],
        oscillatory: false,
    }
}

/// All three bound sets for a model.
pub fn bound_sets(kind: ModelKind, params: &ModelParams, tol: f64) -> [BoundSet; 3] {
    [
        e1_bounds(kind, params),
        e2_bounds(kind, params, tol),
        e3_step_bound(kind, params, tol),
    ]
}

/// Closed-form and eigenvalue classification of one equilibrium at step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub equilibrium: EquilibriumLabel,
    pub point: State,
    pub feasible: bool,
    pub case: CaseTag,
    pub h: f64,
    pub bounds: Vec<StepBound>,
    pub conditions: Vec<Condition>,
    pub values: Vec<(&'static str, f64)>,
    /// Eigenvalues of the continuous Jacobian evaluated at the point.
    pub continuous_eigenvalues: EigenPair,
    /// Eigenvalues of the step-`h` Jacobian evaluated at the point.
    pub discrete_eigenvalues: EigenPair,
    pub continuous_closed_form: StabilityClass,
    pub continuous_oracle: StabilityClass,
    pub classification_closed_form: StabilityClass,
    pub classification_oracle: StabilityClass,
    /// The two discrete classes match, or one of them sits in the boundary band.
    pub agreement: bool,
}

/// Evaluates every equilibrium at step `h`, by closed form and by eigenvalues.
pub fn classify_at_step(
    kind: ModelKind,
    params: &ModelParams,
    h: f64,
    tol: f64,
) -> Result<Vec<BoundReport>, ModelError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(ModelError::InvalidStep(F64Display(h)));
    }
    let model = Model::new(kind, *params);
    let sets = bound_sets(kind, params, tol);
    let eqs = equilibria(params);
    sets.into_iter()
        .zip(eqs)
        .map(|(set, eq)| {
            let cont = model.jacobian(eq.point)?.eigenvalues();
            let disc = model.discrete_jacobian(h, eq.point)?.eigenvalues();
            let oracle = classify_discrete(&disc, tol);
            let closed = set.closed_form_class(h, tol);
            let agreement =
                closed == oracle || closed.is_non_hyperbolic() || oracle.is_non_hyperbolic();
            Ok(BoundReport {
                equilibrium: eq.label,
                point: eq.point,
                feasible: eq.feasible,
                case: set.case,
                h,
                conditions: set.conditions(h, tol),
                values: set.values(h),
                continuous_eigenvalues: cont,
                discrete_eigenvalues: disc,
                continuous_closed_form: set.continuous,
                continuous_oracle: classify_continuous(&cont, tol),
                classification_closed_form: closed,
                classification_oracle: oracle,
                agreement,
                bounds: set.bounds,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DEFAULT_TOLERANCE as TOL;

    fn reference() -> ModelParams {
        ModelParams::reference()
    }

    fn e3_report(kind: ModelKind, p: &ModelParams, h: f64) -> BoundReport {
        classify_at_step(kind, p, h, TOL)
            .unwrap()
            .into_iter()
            .find(|r| r.equilibrium == EquilibriumLabel::E3)
            .unwrap()
    }

    #[test]
    fn e3_cases_of_reference_variants() {
        assert_eq!(e3_case(&reference(), TOL), CaseTag::E3Complex);
        let p = reference().with_alpha(0.04).unwrap();
        assert_eq!(e3_case(&p, TOL), CaseTag::E3Complex);
        let p = reference().with_alpha(0.008).unwrap();
        assert_eq!(e3_case(&p, TOL), CaseTag::E3ThetaZero);
        let p = reference().with_alpha(0.005).unwrap();
        assert_eq!(e3_case(&p, TOL), CaseTag::E3ThetaNeg);
    }

    #[test]
    fn e3_bound_of_reference_set() {
        let set = e3_step_bound(ModelKind::Ricker, &reference(), TOL);
        let b = set.bound("h_max").unwrap();
        assert!((b.value.finite().unwrap() - 20.0 / 21.0).abs() < 1e-12);
        assert_eq!(b.exact.unwrap().to_string_ratio(), "20/21");

        let p = reference().with_alpha(0.04).unwrap();
        let set = e3_step_bound(ModelKind::Ricker, &p, TOL);
        let b = set.bound("h_max").unwrap();
        assert!((b.value.finite().unwrap() - 1.25).abs() < 1e-12);
        assert_eq!(b.exact.unwrap().to_string_ratio(), "5/4");
    }

    #[test]
    fn e3_bound_for_shifted_starvation() {
        for eps in [1e-3, 0.01, 0.05] {
            let p = reference().with_c(0.25 + eps).unwrap();
            let set = e3_step_bound(ModelKind::LotkaVolterra, &p, TOL);
            let b = set.bound("h_max").unwrap().value.finite().unwrap();
            assert!((b - 1.0 / (1.0 - eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_case_reports_both_bounds() {
        // T = 4 theta: r c = 4 (bk - c) bk with c = 0.2, K = 2500, gamma = 0.01
        // choose theta = 0.05, bk = 0.25, T = 0.2 => r = 0.2 * 0.25 / 0.2 = 0.25
        let p = ModelParams::new(0.25, 2500.0, 0.01, 0.01, 0.2).unwrap();
        assert_eq!(e3_case(&p, TOL), CaseTag::E3Repeated);
        let set = e3_step_bound(ModelKind::Ricker, &p, TOL);
        assert!((set.bound("h_max_literal").unwrap().value.finite().unwrap() - 0.05).abs() < 1e-12);
        assert!((set.bound("h_max").unwrap().value.finite().unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(set.closed_form_class(19.0, TOL).kind, StabilityKind::Sink);
        let r = e3_report(ModelKind::Ricker, &p, 19.0);
        assert_eq!(r.classification_oracle.kind, StabilityKind::Sink);
    }

    #[test]
    fn e2_bounds_theta_negative() {
        // theta = 0.05*0.01*1000 - 1.0 = -0.5
        let p = ModelParams::new(0.5, 1000.0, 0.05, 0.01, 1.0).unwrap();
        assert!((p.derived().theta + 0.5).abs() < 1e-12);
        let rk = e2_bounds(ModelKind::Ricker, &p, TOL);
        assert_eq!(rk.case, CaseTag::E2ThetaNeg);
        assert!((rk.bound("h_prey").unwrap().value.finite().unwrap() - 4.0).abs() < 1e-12);
        let b = rk.bound("h_predator").unwrap().value.finite().unwrap();
        assert!((b - 2.0 / (1.0 - (-0.5f64).exp())).abs() < 1e-12);
        assert!((b - 5.083).abs() < 1e-3);
        assert_eq!(rk.closed_form_class(3.9, TOL).kind, StabilityKind::Sink);
        assert_eq!(rk.closed_form_class(4.5, TOL).kind, StabilityKind::Saddle);
        assert_eq!(rk.closed_form_class(5.5, TOL).kind, StabilityKind::Source);

        let lv = e2_bounds(ModelKind::LotkaVolterra, &p, TOL);
        assert!((lv.bound("h_predator").unwrap().value.finite().unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(lv.bound("h_predator").unwrap().exact.unwrap().to_string_ratio(), "4");
        assert_eq!(lv.closed_form_class(3.9, TOL).kind, StabilityKind::Sink);
        assert_eq!(lv.closed_form_class(4.0, TOL).kind, StabilityKind::NonHyperbolic);
    }

    #[test]
    fn e2_theta_zero_excludes_two_over_r() {
        let p = reference().with_alpha(0.008).unwrap();
        let set = e2_bounds(ModelKind::Ricker, &p, TOL);
        assert_eq!(set.case, CaseTag::E2ThetaZero);
        let at = |h: f64| {
            set.conditions(h, TOL)
                .into_iter()
                .find(|c| c.name == "non-hyperbolic: theta = 0, h != 2/r")
                .unwrap()
                .satisfied
        };
        assert_eq!(at(1.0), Some(true));
        assert_eq!(at(4.0), Some(false));
    }

    #[test]
    fn ln_condition_inapplicable_for_large_r() {
        let p = ModelParams::new(1.5, 1000.0, 0.05, 0.01, 1.0).unwrap();
        let set = e2_bounds(ModelKind::LotkaVolterra, &p, TOL);
        let conds = set.conditions(1.0, TOL);
        let c = conds.iter().find(|c| c.name.starts_with("saddle (i)")).unwrap();
        assert_eq!(c.satisfied, None);
        assert_eq!(c.caveat, Some(LN_CAVEAT));
    }

    #[test]
    fn e1_bounds_by_kind() {
        let lv = e1_bounds(ModelKind::LotkaVolterra, &reference());
        assert!((lv.bounds[0].value.finite().unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(lv.closed_form_class(9.0, TOL).kind, StabilityKind::Saddle);
        assert_eq!(lv.closed_form_class(10.0, TOL).kind, StabilityKind::NonHyperbolic);
        assert_eq!(lv.closed_form_class(11.0, TOL).kind, StabilityKind::Source);
        let rk = e1_bounds(ModelKind::Ricker, &reference());
        let b = rk.bounds[0].value.finite().unwrap();
        assert!((b - 11.033).abs() < 1e-3);
        assert_eq!(rk.continuous.kind, StabilityKind::Saddle);
    }

    #[test]
    fn alpha_triptych_classes() {
        for kind in ModelKind::ALL {
            let r = e3_report(kind, &reference(), 1.0);
            assert!(!r.classification_oracle.is_sink());
            assert_eq!(r.classification_oracle.kind, StabilityKind::Source);
            assert!(r.agreement);

            let p = reference().with_alpha(0.048).unwrap();
            let r = e3_report(kind, &p, 1.0);
            assert_eq!(r.classification_oracle.kind, StabilityKind::NonHyperbolic);
            assert!((r.discrete_eigenvalues.lambda1.norm() - 1.0).abs() < 1e-9);

            let p = reference().with_alpha(0.04).unwrap();
            let r = e3_report(kind, &p, 1.0);
            assert_eq!(r.classification_oracle, StabilityClass::new(StabilityKind::Sink, true));
            assert_eq!(r.classification_closed_form, r.classification_oracle);
        }
    }

    #[test]
    fn auxiliary_value_matches_squared_modulus() {
        let p = reference();
        let r = e3_report(ModelKind::Ricker, &p, 0.7);
        let aux = r.values[0].1;
        let m = r.discrete_eigenvalues.lambda1.norm();
        assert!((aux - m * m).abs() < 1e-12);
    }

    #[test]
    fn invalid_step_rejected() {
        assert!(classify_at_step(ModelKind::Ricker, &reference(), 0.0, TOL).is_err());
        assert!(classify_at_step(ModelKind::Ricker, &reference(), f64::NAN, TOL).is_err());
    }

    #[test]
    fn e3_theta_negative_saddle_then_source() {
        let p = reference().with_alpha(0.005).unwrap();
        let set = e3_step_bound(ModelKind::Ricker, &p, TOL);
        let b = set.bound("h_non_hyperbolic").unwrap().value.finite().unwrap();
        assert_eq!(set.closed_form_class(0.5 * b, TOL).kind, StabilityKind::Saddle);
        assert_eq!(set.closed_form_class(2.0 * b, TOL).kind, StabilityKind::Source);
        let r = e3_report(ModelKind::Ricker, &p, 0.5 * b);
        assert_eq!(r.classification_oracle.kind, StabilityKind::Saddle);
        assert!(!r.feasible);
    }
}
