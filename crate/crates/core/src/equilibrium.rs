//! Equilibria and analytic Jacobians.

use core::fmt;

use crate::linalg::Matrix2;
use crate::model::{checked_exp, F64Display, Model, ModelError, ModelKind, ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EquilibriumLabel {
    /// Extinction `(0, 0)`.
    E1,
    /// Prey only `(K, 0)`.
    E2,
    /// Coexistence.
    E3,
}

impl EquilibriumLabel {
    pub const ALL: [EquilibriumLabel; 3] =
        [EquilibriumLabel::E1, EquilibriumLabel::E2, EquilibriumLabel::E3];

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumLabel::E1 => "E1",
            EquilibriumLabel::E2 => "E2",
            EquilibriumLabel::E3 => "E3",
        }
    }
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub point: State,
    /// Both coordinates non-negative.
    pub feasible: bool,
}

impl Equilibrium {
    fn new(label: EquilibriumLabel, point: State) -> Self {
        Self {
            label,
            point,
            feasible: point.is_nonnegative(),
        }
    }
}

/// The coexistence point `(c/(alpha gamma), (r/alpha)(1 - c/(K alpha gamma)))`.
pub fn coexistence_point(params: &ModelParams) -> State {
    let beta = params.alpha() * params.gamma();
    State::new(
        params.c() / beta,
        params.r() / params.alpha() * (1.0 - params.c() / (params.k() * beta)),
    )
}

/// `[E1, E2, E3]`; the same for both model kinds.
pub fn equilibria(params: &ModelParams) -> [Equilibrium; 3] {
    [
        Equilibrium::new(EquilibriumLabel::E1, State::new(0.0, 0.0)),
        Equilibrium::new(EquilibriumLabel::E2, State::new(params.k(), 0.0)),
        Equilibrium::new(EquilibriumLabel::E3, coexistence_point(params)),
    ]
}

pub fn equilibrium(params: &ModelParams, label: EquilibriumLabel) -> Equilibrium {
    equilibria(params)[label as usize]
}

/// Continuous Jacobian at the coexistence point in closed form:
/// `[[-rc/(alpha gamma K), -c/gamma], [r gamma (1 - c/(alpha gamma K)), 0]]`.
pub fn coexistence_jacobian(params: &ModelParams) -> Matrix2 {
    let d = params.derived();
    let beta_k = d.beta * params.k();
    Matrix2::new(
        -d.neg_trace,
        -params.c() / params.gamma(),
        params.r() * params.gamma() * (1.0 - params.c() / beta_k),
        0.0,
    )
}

impl Model {
    /// Jacobian of the continuous vector field at `s`.
    pub fn jacobian(&self, s: State) -> Result<Matrix2, ModelError> {
        let p = &self.params;
        let g = self.exponents(s);
        let rk = p.r() / p.k();
        let ag = p.alpha() * p.gamma();
        Ok(match self.kind {
            ModelKind::Ricker => {
                let ex = checked_exp(g.prey)?;
                let ey = checked_exp(g.predator)?;
                Matrix2::new(
                    ex - 1.0 - rk * s.prey * ex,
                    -p.alpha() * s.prey * ex,
                    ag * s.predator * ey,
                    ey - 1.0,
                )
            }
            ModelKind::LotkaVolterra => Matrix2::new(
                g.prey - rk * s.prey,
                -p.alpha() * s.prey,
                ag * s.predator,
                g.predator,
            ),
        })
    }

    /// Jacobian of the step-`h` map, from its own closed-form entries.
    /// Equal to `I + h * jacobian(s)`.
    pub fn discrete_jacobian(&self, h: f64, s: State) -> Result<Matrix2, ModelError> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(ModelError::InvalidStep(F64Display(h)));
        }
        let p = &self.params;
        let g = self.exponents(s);
        let rk = p.r() / p.k();
        let ag = p.alpha() * p.gamma();
        Ok(match self.kind {
            ModelKind::Ricker => {
                let ex = checked_exp(g.prey)?;
                let ey = checked_exp(g.predator)?;
                Matrix2::new(
                    1.0 + h * (ex - 1.0 - rk * s.prey * ex),
                    -p.alpha() * s.prey * h * ex,
                    ag * s.predator * h * ey,
                    1.0 + h * (ey - 1.0),
                )
            }
            ModelKind::LotkaVolterra => Matrix2::new(
                1.0 + h * (g.prey - rk * s.prey),
                -p.alpha() * h * s.prey,
                ag * h * s.predator,
                1.0 + h * g.predator,
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_2x2;

    fn assert_mat_close(a: &Matrix2, b: &Matrix2, tol: f64) {
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!(
                (x - y).abs() <= tol * y.abs().max(1.0),
                "{a:?} vs {b:?}"
            );
        }
    }

    #[test]
    fn equilibrium_points() {
        let p = ModelParams::reference();
        let [e1, e2, e3] = equilibria(&p);
        assert_eq!(e1.point, State::new(0.0, 0.0));
        assert_eq!(e2.point, State::new(2500.0, 0.0));
        assert!((e3.point.prey - 400.0).abs() < 1e-10);
        assert!((e3.point.predator - 8.4).abs() < 1e-12);
        assert!(e3.feasible);

        let p = p.with_alpha(0.04).unwrap();
        let e3 = equilibrium(&p, EquilibriumLabel::E3);
        assert!((e3.point.prey - 500.0).abs() < 1e-10);
        assert!((e3.point.predator - 10.0).abs() < 1e-12);
    }

    #[test]
    fn coexistence_infeasible_iff_theta_negative() {
        let p = ModelParams::new(0.5, 2500.0, 0.005, 0.01, 0.2).unwrap();
        assert!(p.derived().theta < 0.0);
        let e3 = equilibrium(&p, EquilibriumLabel::E3);
        assert!(!e3.feasible);
        assert!(e3.point.predator < 0.0);
    }

    #[test]
    fn lotka_volterra_jacobian_at_origin() {
        let p = ModelParams::reference();
        let m = Model::new(ModelKind::LotkaVolterra, p);
        let j = m.jacobian(State::new(0.0, 0.0)).unwrap();
        assert_eq!(j, Matrix2::diag(0.5, -0.2));
    }

    #[test]
    fn ricker_jacobian_at_prey_only_point() {
        let p = ModelParams::reference();
        let m = Model::new(ModelKind::Ricker, p);
        let j = m.jacobian(State::new(p.k(), 0.0)).unwrap();
        let theta = p.derived().theta;
        let expected = Matrix2::new(-0.5, -2500.0 * 0.05, 0.0, theta.exp() - 1.0);
        assert_mat_close(&j, &expected, 1e-12);
    }

    #[test]
    fn coexistence_jacobian_by_hand() {
        let p = ModelParams::reference();
        let expected = Matrix2::new(-0.08, -20.0, 0.0042, 0.0);
        assert_mat_close(&coexistence_jacobian(&p), &expected, 1e-12);
        let e3 = coexistence_point(&p);
        for kind in ModelKind::ALL {
            let j = Model::new(kind, p).jacobian(e3).unwrap();
            assert_mat_close(&j, &expected, 1e-12);
            let jd = Model::new(kind, p).discrete_jacobian(1.0, e3).unwrap();
            assert_mat_close(&jd, &Matrix2::new(0.92, -20.0, 0.0042, 1.0), 1e-12);
        }
    }

    #[test]
    fn discrete_jacobian_zero_step_is_identity() {
        let p = ModelParams::reference();
        for kind in ModelKind::ALL {
            let jd = Model::new(kind, p)
                .discrete_jacobian(0.0, State::new(123.0, 4.0))
                .unwrap();
            assert_eq!(jd, Matrix2::IDENTITY);
        }
    }

    #[test]
    fn ricker_discrete_jacobian_at_origin() {
        let m = Model::new(ModelKind::Ricker, ModelParams::reference());
        let jd = m.discrete_jacobian(1.0, State::new(0.0, 0.0)).unwrap();
        assert_mat_close(&jd, &Matrix2::diag(0.5f64.exp(), (-0.2f64).exp()), 1e-14);
    }

    #[test]
    fn coexistence_eigenvalues_reference_set() {
        let e = eigenvalues_2x2(&coexistence_jacobian(&ModelParams::reference()));
        let im = 206f64.sqrt() / 50.0;
        assert!((e.lambda1.re + 0.04).abs() < 1e-12);
        assert!((e.lambda1.im - im).abs() < 1e-12);
        assert_eq!(e.lambda2, e.lambda1.conj());
    }
}
