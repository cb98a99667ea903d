//! Stability labels over `(h, beta)` and `(c, beta)` parameter grids.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::classify::{classify_discrete, StabilityKind};
use crate::equilibrium::coexistence_point;
use crate::model::{Model, ModelKind, ModelParams};

/// Smallest beta sampled; `alpha = beta / gamma` must stay positive.
pub const BETA_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepAxis {
    /// Step size varies, `c` fixed.
    H,
    /// Starvation rate varies, `h` fixed.
    C,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::H => "h",
            SweepAxis::C => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum RegionLabel {
    FixedPointConvergent,
    OscillatoryDivergent,
    Boundary,
    E3Infeasible,
    Other,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::FixedPointConvergent => "FIXED_POINT_CONVERGENT",
            RegionLabel::OscillatoryDivergent => "OSCILLATORY_DIVERGENT",
            RegionLabel::Boundary => "BOUNDARY",
            RegionLabel::E3Infeasible => "E3_INFEASIBLE",
            RegionLabel::Other => "OTHER",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("{axis} range must satisfy 0 <= lo < hi with finite ends")]
    BadRange { axis: &'static str },
    #[error("{axis} axis needs at least 2 cells")]
    TooFewCells { axis: &'static str },
    #[error("fixed parameter `{0}` must be positive and finite")]
    BadFixed(&'static str),
}

/// Inclusive axis `lo..=hi` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisRange {
    pub const fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    fn validate(&self, axis: &'static str) -> Result<(), GridError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo >= 0.0 && self.lo < self.hi) {
            return Err(GridError::BadRange { axis });
        }
        if self.n < 2 {
            return Err(GridError::TooFewCells { axis });
        }
        Ok(())
    }
}

/// Parameters held fixed across a sweep. On the `H` axis `c` is fixed and
/// `h` is ignored; on the `C` axis the reverse.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FixedParams {
    pub r: f64,
    pub k: f64,
    pub gamma: f64,
    pub c: f64,
    pub h: f64,
}

impl FixedParams {
    pub fn reference(h: f64) -> Self {
        let p = ModelParams::reference();
        Self {
            r: p.r(),
            k: p.k(),
            gamma: p.gamma(),
            c: p.c(),
            h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridSpec {
    pub axis: SweepAxis,
    pub x: AxisRange,
    pub beta: AxisRange,
    pub fixed: FixedParams,
    pub kind: ModelKind,
    pub tol: f64,
}

impl GridSpec {
    /// The `(h, beta)` map with `h in [0.01, 4]`, `beta in [0, 8e-4]`.
    pub fn step_plane(n: usize) -> Self {
        Self {
            axis: SweepAxis::H,
            x: AxisRange::new(0.01, 4.0, n),
            beta: AxisRange::new(0.0, 8e-4, n),
            fixed: FixedParams::reference(1.0),
            kind: ModelKind::Ricker,
            tol: crate::classify::DEFAULT_TOLERANCE,
        }
    }

    /// The `(c, beta)` map at fixed `h`, `c in [0.01, 0.6]`, `beta in [0, 8e-4]`.
    pub fn mortality_plane(h: f64, n: usize) -> Self {
        Self {
            axis: SweepAxis::C,
            x: AxisRange::new(0.01, 0.6, n),
            beta: AxisRange::new(0.0, 8e-4, n),
            fixed: FixedParams::reference(h),
            kind: ModelKind::Ricker,
            tol: crate::classify::DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        self.x.validate(self.axis.name())?;
        self.beta.validate("beta")?;
        if self.x.lo <= 0.0 {
            return Err(GridError::BadRange { axis: self.axis.name() });
        }
        let f = &self.fixed;
        let pos = |x: f64| x.is_finite() && x > 0.0;
        for (name, v) in [("r", f.r), ("K", f.k), ("gamma", f.gamma)] {
            if !pos(v) {
                return Err(GridError::BadFixed(name));
            }
        }
        match self.axis {
            SweepAxis::H if !pos(f.c) => return Err(GridError::BadFixed("c")),
            SweepAxis::C if !pos(f.h) => return Err(GridError::BadFixed("h")),
            _ => {}
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(GridError::BadFixed("tol"));
        }
        Ok(())
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x.node(i)
    }

    pub fn beta_at(&self, j: usize) -> f64 {
        libm::fmax(self.beta.node(j), BETA_FLOOR)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.x.n).map(|i| self.x_at(i)).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..self.beta.n).map(|j| self.beta_at(j)).collect()
    }

    /// `(h, c)` at a given x value.
    pub fn h_and_c(&self, x: f64) -> (f64, f64) {
        match self.axis {
            SweepAxis::H => (x, self.fixed.c),
            SweepAxis::C => (self.fixed.h, x),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.x.n * self.beta.n
    }
}

/// Label of one grid point from the discrete Jacobian's eigenvalues at E3.
pub fn classify_cell(spec: &GridSpec, x: f64, beta: f64) -> RegionLabel {
    let (h, c) = spec.h_and_c(x);
    let f = &spec.fixed;
    if beta * f.k - c <= 0.0 {
        return RegionLabel::E3Infeasible;
    }
    let params = match ModelParams::new(f.r, f.k, beta / f.gamma, f.gamma, c) {
        Ok(p) => p,
        Err(_) => return RegionLabel::Other,
    };
    let model = Model::new(spec.kind, params);
    let jd = match model.discrete_jacobian(h, coexistence_point(&params)) {
        Ok(m) => m,
        Err(_) => return RegionLabel::Other,
    };
    let eigs = jd.eigenvalues();
    let class = classify_discrete(&eigs, spec.tol);
    match class.kind {
        StabilityKind::NonHyperbolic => RegionLabel::Boundary,
        StabilityKind::Sink => RegionLabel::FixedPointConvergent,
        _ if eigs.is_complex() => RegionLabel::OscillatoryDivergent,
        _ => RegionLabel::Other,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundaryCurve {
    pub name: &'static str,
    /// `(x, beta)` pairs along the x axis.
    pub points: Vec<(f64, f64)>,
}

/// Upper stability boundary `(c + 1/h)/K` from `h < 1/theta`.
pub fn upper_boundary(c: f64, h: f64, k: f64) -> f64 {
    (c + 1.0 / h) / k
}

/// Feasibility boundary `c/K` where `theta = 0`.
pub fn lower_boundary(c: f64, k: f64) -> f64 {
    c / k
}

/// The derived upper boundary, the caption form `c/K + 1/h`, and the lower
/// boundary, each sampled at `xs`.
pub fn boundary_curve(spec: &GridSpec, xs: &[f64]) -> [BoundaryCurve; 3] {
    let k = spec.fixed.k;
    let sample = |f: &dyn Fn(f64, f64) -> f64| {
        xs.iter()
            .map(|&x| {
                let (h, c) = spec.h_and_c(x);
                (x, f(h, c))
            })
            .collect::<Vec<_>>()
    };
    [
        BoundaryCurve {
            name: "upper_derived",
            points: sample(&|h, c| upper_boundary(c, h, k)),
        },
        BoundaryCurve {
            name: "upper_caption",
            points: sample(&|h, c| c / k + 1.0 / h),
        },
        BoundaryCurve {
            name: "lower",
            points: sample(&|_, c| lower_boundary(c, k)),
        },
    ]
}

/// Labels stored column-major: `cells[i * n_beta + j]` is `(x_i, beta_j)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionMap {
    pub spec: GridSpec,
    pub cells: Vec<RegionLabel>,
    pub boundary_curves: [BoundaryCurve; 3],
}

impl RegionMap {
    /// Wraps labels computed elsewhere (for example in parallel).
    pub fn assemble(spec: GridSpec, cells: Vec<RegionLabel>) -> Self {
        assert_eq!(cells.len(), spec.cell_count(), "cell count mismatch");
        let boundary_curves = boundary_curve(&spec, &spec.xs());
        Self {
            spec,
            cells,
            boundary_curves,
        }
    }

    pub fn label_at(&self, i: usize, j: usize) -> RegionLabel {
        self.cells[i * self.spec.beta.n + j]
    }

    pub fn column(&self, i: usize) -> &[RegionLabel] {
        let n = self.spec.beta.n;
        &self.cells[i * n..(i + 1) * n]
    }

    /// Index of the x node closest to `x`.
    pub fn nearest_x(&self, x: f64) -> usize {
        nearest(&self.spec.x, x)
    }

    pub fn nearest_beta(&self, beta: f64) -> usize {
        nearest(&self.spec.beta, beta)
    }

    /// `(x, beta, label)` for every cell, x-major.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, RegionLabel)> + '_ {
        let n = self.spec.beta.n;
        self.cells
            .iter()
            .enumerate()
            .map(move |(idx, &l)| (self.spec.x_at(idx / n), self.spec.beta_at(idx % n), l))
    }

    pub fn count(&self, label: RegionLabel) -> usize {
        self.cells.iter().filter(|&&l| l == label).count()
    }
}

fn nearest(axis: &AxisRange, v: f64) -> usize {
    let t = libm::round((v - axis.lo) / axis.spacing());
    (t.max(0.0) as usize).min(axis.n - 1)
}

pub fn sweep(spec: &GridSpec) -> Result<RegionMap, GridError> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.cell_count());
    for i in 0..spec.x.n {
        let x = spec.x_at(i);
        for j in 0..spec.beta.n {
            cells.push(classify_cell(spec, x, spec.beta_at(j)));
        }
    }
    Ok(RegionMap::assemble(*spec, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_h_spec() -> GridSpec {
        let mut s = GridSpec::step_plane(2);
        s.x = AxisRange::new(1.0, 2.5, 4);
        s.beta = AxisRange::new(0.0, 8e-4, 81);
        s
    }

    #[test]
    fn reference_cells() {
        let spec = GridSpec::step_plane(400);
        assert_eq!(classify_cell(&spec, 1.0, 5e-4), RegionLabel::OscillatoryDivergent);
        assert_eq!(classify_cell(&spec, 1.0, 4e-4), RegionLabel::FixedPointConvergent);
        assert_eq!(classify_cell(&spec, 1.0, 7e-5), RegionLabel::E3Infeasible);
        assert_eq!(classify_cell(&spec, 1.0, 4.8e-4), RegionLabel::Boundary);
    }

    #[test]
    fn boundary_values() {
        assert!((upper_boundary(0.2, 1.0, 2500.0) - 4.8e-4).abs() < 1e-18);
        assert!((lower_boundary(0.2, 2500.0) - 8e-5).abs() < 1e-18);
        assert!((upper_boundary(0.2, 1e12, 2500.0) - 8e-5).abs() < 1e-15);
        let spec = GridSpec::step_plane(400);
        let [up, cap, lo] = boundary_curve(&spec, &[1.0, 2.0]);
        assert_eq!(up.name, "upper_derived");
        assert_eq!(cap.points[0], (1.0, 0.2 / 2500.0 + 1.0));
        assert_eq!(lo.points[1].1, 0.2 / 2500.0);
        assert!((up.points[1].1 - 0.7 / 2500.0).abs() < 1e-18);
    }

    #[test]
    fn grid_nodes_inclusive() {
        let spec = GridSpec::step_plane(400);
        assert_eq!(spec.x_at(0), 0.01);
        assert_eq!(spec.x_at(399), 4.0);
        assert!((spec.x_at(99) - 1.0).abs() < 1e-12);
        assert_eq!(spec.beta_at(0), BETA_FLOOR);
        assert!((spec.beta_at(399) - 8e-4).abs() < 1e-18);
    }

    #[test]
    fn sweep_labels_every_cell() {
        let spec = small_h_spec();
        let map = sweep(&spec).unwrap();
        assert_eq!(map.cells.len(), 4 * 81);
        assert_eq!(map.rows().count(), 4 * 81);
        for i in 0..4 {
            let col = map.column(i);
            // infeasible below c/K, convergent band, then oscillatory
            let first_conv = col
                .iter()
                .position(|&l| l == RegionLabel::FixedPointConvergent)
                .unwrap();
            assert!(col[..first_conv].iter().all(|&l| l == RegionLabel::E3Infeasible || l == RegionLabel::Other));
            assert_eq!(*col.last().unwrap(), RegionLabel::OscillatoryDivergent);
        }
    }

    #[test]
    fn c_axis_sweep() {
        let mut spec = GridSpec::mortality_plane(1.0, 2);
        spec.x = AxisRange::new(0.05, 0.4, 8);
        spec.beta = AxisRange::new(0.0, 8e-4, 41);
        let map = sweep(&spec).unwrap();
        for i in 0..8 {
            let c = spec.x_at(i);
            for j in 0..41 {
                let b = spec.beta_at(j);
                let l = map.label_at(i, j);
                if b * 2500.0 < c * (1.0 - 1e-6) {
                    assert_eq!(l, RegionLabel::E3Infeasible);
                }
                if b > upper_boundary(c, 1.0, 2500.0) * (1.0 + 1e-6) {
                    assert_eq!(l, RegionLabel::OscillatoryDivergent);
                }
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = small_h_spec();
        s.x.n = 1;
        assert_eq!(sweep(&s).unwrap_err(), GridError::TooFewCells { axis: "h" });
        let mut s = small_h_spec();
        s.beta = AxisRange::new(1e-4, 1e-5, 10);
        assert_eq!(sweep(&s).unwrap_err(), GridError::BadRange { axis: "beta" });
        let mut s = small_h_spec();
        s.x.lo = 0.0;
        assert!(sweep(&s).is_err());
        let mut s = small_h_spec();
        s.fixed.gamma = -1.0;
        assert_eq!(sweep(&s).unwrap_err(), GridError::BadFixed("gamma"));
    }

    #[test]
    fn nearest_index() {
        let map = sweep(&small_h_spec()).unwrap();
        assert_eq!(map.nearest_x(1.5), 1);
        assert_eq!(map.nearest_x(100.0), 3);
        assert_eq!(map.nearest_beta(4.8e-4), 48);
    }
}
