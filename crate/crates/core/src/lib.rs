//! Stability analysis for two-species predator-prey models.
//!
//! Two model families are covered, each in continuous time and under
//! forward-Euler discretization with an arbitrary step size `h`:
//!
//! * a Ricker-type model, `N' = N (e^X - 1)`, `P' = P (e^Y - 1)`;
//! * a logistic Lotka-Volterra model, `N' = N X`, `P' = P Y`;
//!
//! with growth exponents `X = r (1 - N/K) - alpha P` and `Y = alpha gamma N - c`.
//!
//! The crate computes the three equilibria, their continuous and discrete
//! Jacobians and eigenvalues, classifies them, evaluates closed-form
//! step-size bounds and cross-checks them against the eigenvalues, iterates
//! the maps, and labels 2-D parameter grids by stability.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod classify;
pub mod equilibrium;
pub mod exact;
pub mod linalg;
pub mod model;
pub mod region;
pub mod sampling;
pub mod simulation;

pub use bounds::{
    classify_at_step, e1_bounds, e2_bounds, e3_case, e3_step_bound, BoundReport, BoundSet,
    BoundValue, CaseTag, Condition, StepBound,
};
pub use classify::{
    classify_continuous, classify_discrete, StabilityClass, StabilityKind, DEFAULT_TOLERANCE,
};
pub use equilibrium::{equilibria, Equilibrium, EquilibriumLabel};
pub use linalg::{eigenvalues_2x2, Complex, EigenPair, Matrix2};
pub use model::{
    derived_quantities, DerivedQuantities, GrowthExponents, Model, ModelError, ModelKind, ModelParams, State,
};
pub use region::{
    boundary_curve, classify_cell, sweep, AxisRange, BoundaryCurve, FixedParams, GridError,
    GridSpec, RegionLabel, RegionMap, SweepAxis,
};
pub use simulation::{
    diagnose, integrate_reference, iterate, iterate_guarded, DiagnoseConfig, Diagnostics,
    EventKind, SimError, Trajectory, TrajectoryEvent, Verdict,
};
