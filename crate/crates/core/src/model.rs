//! Model parameters, growth exponents, vector fields and one-step maps.

use core::fmt;

use thiserror::Error;

/// Exponent above which `e^x` is treated as an overflow.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: F64Display },
    #[error("step size must be finite and non-negative, got {0}")]
    InvalidStep(F64Display),
    #[error("exponential overflow (exponent {0})")]
    Overflow(F64Display),
}

/// `f64` wrapper so error values stay `Eq` and print plainly.
#[derive(Clone, Copy)]
pub struct F64Display(pub f64);

impl PartialEq for F64Display {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for F64Display {}

impl fmt::Debug for F64Display {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for F64Display {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ModelKind {
    Ricker,
    LotkaVolterra,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Ricker, ModelKind::LotkaVolterra];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ricker => "ricker",
            ModelKind::LotkaVolterra => "lotka-volterra",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The five positive model constants.
///
/// * `r` - prey growth rate
/// * `k` - prey carrying capacity
/// * `alpha` - predator attack rate
/// * `gamma` - prey-to-predator conversion rate
/// * `c` - predator starvation rate
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModelParams {
    r: f64,
    k: f64,
    alpha: f64,
    gamma: f64,
    c: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value: F64Display(value),
        })
    }
}

impl ModelParams {
    pub fn new(r: f64, k: f64, alpha: f64, gamma: f64, c: f64) -> Result<Self, ModelError> {
        Ok(Self {
            r: check_positive("r", r)?,
            k: check_positive("K", k)?,
            alpha: check_positive("alpha", alpha)?,
            gamma: check_positive("gamma", gamma)?,
            c: check_positive("c", c)?,
        })
    }

    /// The annual-census parameter set `r=0.5, K=2500, alpha=0.05, gamma=0.01, c=0.2`.
    pub fn reference() -> Self {
        Self {
            r: 0.5,
            k: 2500.0,
            alpha: 0.05,
            gamma: 0.01,
            c: 0.2,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn with_r(self, r: f64) -> Result<Self, ModelError> {
        Self::new(r, self.k, self.alpha, self.gamma, self.c)
    }

    pub fn with_k(self, k: f64) -> Result<Self, ModelError> {
        Self::new(self.r, k, self.alpha, self.gamma, self.c)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.r, self.k, alpha, self.gamma, self.c)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self, ModelError> {
        Self::new(self.r, self.k, self.alpha, gamma, self.c)
    }

    pub fn with_c(self, c: f64) -> Result<Self, ModelError> {
        Self::new(self.r, self.k, self.alpha, self.gamma, c)
    }

    pub fn derived(&self) -> DerivedQuantities {
        derived_quantities(self)
    }
}

/// Quantities that govern the stability of the coexistence equilibrium.
///
/// At the coexistence equilibrium the characteristic polynomial of the
/// continuous Jacobian is `lambda^2 + neg_trace * lambda + det = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DerivedQuantities {
    /// `alpha gamma K - c`, the predator growth rate at carrying capacity.
    pub theta: f64,
    /// `r c / (alpha gamma K)`, minus the trace of the coexistence Jacobian.
    pub neg_trace: f64,
    /// `theta * neg_trace`, the determinant of the coexistence Jacobian.
    pub det: f64,
    /// `alpha gamma`, the composite predation efficiency.
    pub beta: f64,
}

pub fn derived_quantities(params: &ModelParams) -> DerivedQuantities {
    let beta = params.alpha * params.gamma;
    let beta_k = beta * params.k;
    let theta = beta_k - params.c;
    let neg_trace = params.r * params.c / beta_k;
    DerivedQuantities {
        theta,
        neg_trace,
        det: theta * neg_trace,
        beta,
    }
}

/// Prey and predator densities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct State {
    pub prey: f64,
    pub predator: f64,
}

impl State {
    pub const fn new(prey: f64, predator: f64) -> Self {
        Self { prey, predator }
    }

    pub fn is_finite(&self) -> bool {
        self.prey.is_finite() && self.predator.is_finite()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.prey >= 0.0 && self.predator >= 0.0
    }

    pub fn max_abs(&self) -> f64 {
        libm::fmax(libm::fabs(self.prey), libm::fabs(self.predator))
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &State) -> f64 {
        libm::fmax(
            libm::fabs(self.prey - other.prey),
            libm::fabs(self.predator - other.predator),
        )
    }

    pub fn scaled(&self, factor: f64) -> State {
        State::new(self.prey * factor, self.predator * factor)
    }
}

/// Per-capita growth exponents `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthExponents {
    pub prey: f64,
    pub predator: f64,
}

pub fn growth_exponents(params: &ModelParams, s: State) -> GrowthExponents {
    GrowthExponents {
        prey: params.r * (1.0 - s.prey / params.k) - params.alpha * s.predator,
        predator: params.alpha * params.gamma * s.prey - params.c,
    }
}

pub(crate) fn checked_exp(x: f64) -> Result<f64, ModelError> {
    if x > EXP_OVERFLOW_LIMIT || x.is_nan() {
        Err(ModelError::Overflow(F64Display(x)))
    } else {
        Ok(libm::exp(x))
    }
}

/// A model family bound to a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub params: ModelParams,
}

impl Model {
    pub const fn new(kind: ModelKind, params: ModelParams) -> Self {
        Self { kind, params }
    }

    pub fn exponents(&self, s: State) -> GrowthExponents {
        growth_exponents(&self.params, s)
    }

    /// Continuous-time right-hand side `(dN/dt, dP/dt)`.
    pub fn rhs(&self, s: State) -> Result<State, ModelError> {
        let g = self.exponents(s);
        let (fx, fy) = match self.kind {
            ModelKind::Ricker => (checked_exp(g.prey)? - 1.0, checked_exp(g.predator)? - 1.0),
            ModelKind::LotkaVolterra => (g.prey, g.predator),
        };
        Ok(State::new(s.prey * fx, s.predator * fy))
    }

    /// One forward-Euler step of size `h`. Negative outputs are returned as-is.
    pub fn step(&self, h: f64, s: State) -> Result<State, ModelError> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(ModelError::InvalidStep(F64Display(h)));
        }
        let d = self.rhs(s)?;
        Ok(State::new(s.prey + h * d.prey, s.predator + h * d.predator))
    }
}
