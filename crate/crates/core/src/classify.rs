//! Stability classification from eigenvalues.

use core::fmt;

use crate::linalg::EigenPair;

/// Width of the band around a stability boundary treated as non-hyperbolic.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum StabilityKind {
    /// Discrete: both moduli below one.
    Sink,
    /// Discrete: both moduli above one.
    Source,
    /// One eigenvalue on each side of the boundary.
    Saddle,
    /// At least one eigenvalue on the boundary.
    NonHyperbolic,
    /// Continuous: both real parts negative.
    Stable,
    /// Continuous: both real parts positive.
    Unstable,
}

impl StabilityKind {
    pub fn name(self) -> &'static str {
        match self {
            StabilityKind::Sink => "SINK",
            StabilityKind::Source => "SOURCE",
            StabilityKind::Saddle => "SADDLE",
            StabilityKind::NonHyperbolic => "NON_HYPERBOLIC",
            StabilityKind::Stable => "STABLE",
            StabilityKind::Unstable => "UNSTABLE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityClass {
    pub kind: StabilityKind,
    /// Eigenvalues form a complex-conjugate pair.
    pub oscillatory: bool,
}

impl StabilityClass {
    pub const fn new(kind: StabilityKind, oscillatory: bool) -> Self {
        Self { kind, oscillatory }
    }

    pub fn is_sink(&self) -> bool {
        self.kind == StabilityKind::Sink
    }

    pub fn is_non_hyperbolic(&self) -> bool {
        self.kind == StabilityKind::NonHyperbolic
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if self.oscillatory {
            f.write_str(" (oscillatory)")?;
        }
        Ok(())
    }
}

/// Sorts two signed distances from a boundary into a class.
fn by_sides(
    d1: f64,
    d2: f64,
    band: f64,
    inside: StabilityKind,
    outside: StabilityKind,
) -> StabilityKind {
    let on = |d: f64| libm::fabs(d) <= band;
    if on(d1) || on(d2) {
        StabilityKind::NonHyperbolic
    } else if d1 < 0.0 && d2 < 0.0 {
        inside
    } else if d1 > 0.0 && d2 > 0.0 {
        outside
    } else {
        StabilityKind::Saddle
    }
}

/// Flow classification by the sign of the real parts.
///
/// A real part counts as zero when `|Re| <= tol * max(|lambda1|, |lambda2|)`.
pub fn classify_continuous(eigs: &EigenPair, tol: f64) -> StabilityClass {
    let scale = libm::fmax(eigs.lambda1.norm(), eigs.lambda2.norm());
    let kind = by_sides(
        eigs.lambda1.re,
        eigs.lambda2.re,
        tol * scale,
        StabilityKind::Stable,
        StabilityKind::Unstable,
    );
    StabilityClass::new(kind, eigs.is_complex())
}

/// Map classification by eigenvalue modulus relative to one.
pub fn classify_discrete(eigs: &EigenPair, tol: f64) -> StabilityClass {
    let kind = by_sides(
        eigs.lambda1.norm() - 1.0,
        eigs.lambda2.norm() - 1.0,
        tol,
        StabilityKind::Sink,
        StabilityKind::Source,
    );
    StabilityClass::new(kind, eigs.is_complex())
}
