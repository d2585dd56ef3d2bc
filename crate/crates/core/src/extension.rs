//! One-parameter self-adjoint extensions and their boundary conditions.

use std::f64::consts::{E, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary;
use crate::deficiency::DeficiencyReport;
use crate::domain::{reduce_angle, BoundaryCondition, Interval, OperatorKind, RobinParameter};
use crate::error::{Error, Result};
use crate::fd;
use crate::grid::GridFunction;

/// Phase `gamma` of the unitary `U = exp(i gamma)` between the deficiency
/// spaces, stored in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParameter {
    gamma: f64,
}

impl ExtensionParameter {
    pub fn new(gamma: f64) -> Self {
        ExtensionParameter { gamma: reduce_angle(gamma) }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn unitary(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumExtension {
    pub gamma: f64,
    /// `xi(1) / xi(0)`
    pub ratio: Complex64,
    pub theta: f64,
}

impl MomentumExtension {
    pub fn boundary_condition(&self) -> BoundaryCondition {
        BoundaryCondition::phase(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineExtension {
    pub gamma: f64,
    pub alpha: RobinParameter,
    /// Imaginary part of `xi'(0) / xi(0)` before it was discarded.
    pub ratio_imag: f64,
    /// Set for the Dirichlet end of the family.
    pub limit_case: bool,
}

impl HalfLineExtension {
    pub fn boundary_condition(&self) -> BoundaryCondition {
        BoundaryCondition::Robin { alpha: self.alpha }
    }
}

/// `xi(1)/xi(0)` for `xi = psi_+ + exp(i gamma) psi_-` built from the
/// normalized deficiency functions of momentum on [0, 1].
pub fn momentum_ratio(gamma: f64) -> Complex64 {
    let n = (E * E - 1.0).sqrt();
    let (n_plus, n_minus) = (SQRT_2 * E / n, SQRT_2 / n);
    let beta = Complex64::from_polar(1.0, gamma);
    let at0 = n_plus + beta * n_minus;
    let at1 = n_plus / E + beta * (n_minus * E);
    at1 / at0
}

pub fn momentum_bc_from_unitary(gamma: f64) -> Result<MomentumExtension> {
    let gamma = reduce_angle(gamma);
    let ratio = momentum_ratio(gamma);
    if (ratio.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Indeterminate(format!("|xi(1)/xi(0)| = {} is not 1", ratio.norm())));
    }
    Ok(MomentumExtension { gamma, ratio, theta: reduce_angle(ratio.arg()) })
}

/// `|cos(gamma/2)|` below which the map returns the Dirichlet condition.
pub const DIRICHLET_THRESHOLD: f64 = 1e-12;

pub fn halfline_bc_from_unitary(gamma: f64) -> Result<HalfLineExtension> {
    let gamma = reduce_angle(gamma);
    let half = 0.5 * gamma;
    if half.cos().abs() < DIRICHLET_THRESHOLD {
        return Ok(HalfLineExtension { gamma, alpha: RobinParameter::Dirichlet, ratio_imag: 0.0, limit_case: true });
    }
    // psi_+- = 2^(1/4) exp(k_+- x); the common factor cancels in xi'/xi.
    // Both terms are multiplied by exp(-i gamma/2) so numerator and
    // denominator are each a sum of conjugate pairs.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k_plus = Complex64::new(-s, s);
    let k_minus = Complex64::new(-s, -s);
    let w = Complex64::from_polar(1.0, -half);
    let num = k_plus * w + k_minus * w.conj();
    let den = w + w.conj();
    let ratio = num / den;
    if ratio.im.abs() > 1e-12 * ratio.re.abs().max(1.0) {
        return Err(Error::Indeterminate(format!("xi'(0)/xi(0) has imaginary part {}", ratio.im)));
    }
    let alpha = ratio.re;
    let one_plus_cos = 2.0 * half.cos().powi(2);
    let check = alpha * alpha * one_plus_cos - (1.0 - gamma.sin());
    if check.abs() > 1e-12 * (1.0 + alpha * alpha * one_plus_cos) {
        return Err(Error::Indeterminate(format!("modulus identity off by {check}")));
    }
    Ok(HalfLineExtension { gamma, alpha: RobinParameter::Finite(alpha), ratio_imag: ratio.im, limit_case: false })
}

/// Closed-form `alpha(gamma) = (tan(gamma/2) - 1)/sqrt(2)`, for comparison.
pub fn alpha_closed_form(gamma: f64) -> f64 {
    ((0.5 * gamma).tan() - 1.0) / SQRT_2
}

/// Tolerance on the raw boundary condition of the underlying function.
pub const RAW_TOLERANCE: f64 = 1e-8;

/// `xi = psi + psi_+ + exp(i gamma) psi_-` on the grid of `underlying`.
///
/// The result keeps a closed-form extender when `underlying` has one.
pub fn assemble_domain_element(
    underlying: &GridFunction,
    gamma: f64,
    report: &DeficiencyReport,
) -> Result<GridFunction> {
    if report.indices() != (1, 1) {
        return Err(Error::UnsupportedExtension(format!(
            "need deficiency indices (1,1), got ({},{})",
            report.n_plus, report.n_minus
        )));
    }
    let xs = underlying.xs();
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    match (report.op.kind, &report.op.interval) {
        (OperatorKind::Momentum, Interval::Finite { a, b }) => {
            if (x0 - a).abs() > 1e-12 || (x1 - b).abs() > 1e-12 {
                return Err(Error::Precondition("grid must span the interval".into()));
            }
            let worst = underlying.first().norm().max(underlying.last().norm());
            if worst > RAW_TOLERANCE {
                return Err(Error::Precondition(format!("underlying function is {worst} at an endpoint")));
            }
        }
        (OperatorKind::FreeHamiltonian, Interval::HalfLine { a }) => {
            if (x0 - a).abs() > 1e-12 {
                return Err(Error::Precondition("grid must start at the boundary".into()));
            }
            if underlying.len() < 5 {
                return Err(Error::DegenerateGrid("need 5 points for the boundary derivative".into()));
            }
            let (v, dv) = boundary::left_value_and_slope(underlying);
            let worst = v.norm().max(dv.norm());
            if worst > RAW_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "underlying function or derivative is {worst} at the boundary"
                )));
            }
        }
        (kind, interval) => {
            return Err(Error::UnsupportedExtension(format!("{} on {}", kind.name(), interval.name())));
        }
    }
    let u = ExtensionParameter::new(gamma).unitary();
    let plus = report.basis_plus[0].closed_form.clone();
    let minus = report.basis_minus[0].closed_form.clone();
    let values = xs
        .iter()
        .zip(underlying.values())
        .map(|(&x, &v)| v + plus.value(x) + u * minus.value(x))
        .collect();
    let out = GridFunction::new(xs.to_vec(), values, underlying.weight())?;
    Ok(match underlying.extender() {
        Some(ext) => {
            let ext = Arc::clone(ext);
            let profile = move |x: f64| ext.eval(x) + plus.value(x) + u * minus.value(x);
            out.with_extender(Arc::new(profile))
        }
        None => out,
    })
}

/// `f'(a)/f(a)` at the left end of the grid: from the extender with a
/// central stencil when available, otherwise a 5-point one-sided stencil.
pub fn log_derivative_at_start(f: &GridFunction) -> Result<Complex64> {
    let x0 = f.xs()[0];
    let (v, dv) = match f.extender() {
        Some(ext) => (ext.eval(x0), fd::derivative_at(|x| ext.eval(x), x0, 1e-3, 1, 8)),
        None => {
            if f.len() < 5 {
                return Err(Error::DegenerateGrid("need 5 points for the boundary derivative".into()));
            }
            boundary::left_value_and_slope(f)
        }
    };
    if v.norm() == 0.0 {
        return Err(Error::Indeterminate("function vanishes at the boundary".into()));
    }
    Ok(dv / v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deficiency::solve_deficiency;
    use crate::domain::OperatorSpec;
    use crate::grid::{linspace, Weight};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn momentum_examples() {
        assert_eq!(momentum_bc_from_unitary(0.0).unwrap().theta, 0.0);
        let m = momentum_bc_from_unitary(PI).unwrap();
        assert!((m.theta - PI).abs() < 1e-12);
        // independent oracle: direct complex division
        let oracle = Complex64::new(1.0, E) / Complex64::new(E, 1.0);
        let m = momentum_bc_from_unitary(FRAC_PI_2).unwrap();
        assert!((m.theta - reduce_angle(oracle.arg())).abs() < 1e-12);
        assert!((m.ratio.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halfline_examples() {
        let h = halfline_bc_from_unitary(FRAC_PI_2).unwrap();
        assert!(h.alpha.finite().unwrap().abs() < 1e-15);
        let h = halfline_bc_from_unitary(0.0).unwrap();
        assert!((h.alpha.finite().unwrap() + 1.0 / SQRT_2).abs() < 1e-15);
        let h = halfline_bc_from_unitary(PI).unwrap();
        assert_eq!(h.alpha, RobinParameter::Dirichlet);
        assert!(h.limit_case);
        for g in [0.3, 1.0, 2.0, 4.0, 6.0] {
            let a = halfline_bc_from_unitary(g).unwrap().alpha.finite().unwrap();
            assert!((a - alpha_closed_form(g)).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn assemble_momentum() {
        let report = solve_deficiency(&OperatorSpec::momentum_unit_interval(), 1.0).unwrap();
        let psi = GridFunction::sample(
            |x: f64| Complex64::new((PI * x).sin() * x * (1.0 - x), 0.0),
            0.0,
            1.0,
            1001,
        )
        .unwrap();
        let xi = assemble_domain_element(&psi, 0.0, &report).unwrap();
        assert!((xi.last() / xi.first() - 1.0).norm() < 1e-8);

        let zero = GridFunction::new(linspace(0.0, 1.0, 101), vec![Complex64::new(0.0, 0.0); 101], Weight::Unit)
            .unwrap();
        let xi = assemble_domain_element(&zero, PI, &report).unwrap();
        assert!((xi.last() + xi.first()).norm() < 1e-12);

        let theta = momentum_bc_from_unitary(1.234).unwrap().theta;
        let xi = assemble_domain_element(&psi, 1.234, &report).unwrap();
        let expect = Complex64::from_polar(1.0, theta);
        assert!((xi.last() / xi.first() - expect).norm() < 1e-8);
    }

    #[test]
    fn assemble_hamiltonian() {
        let report = solve_deficiency(&OperatorSpec::hamiltonian_half_line(), 1.0).unwrap();
        let zero = GridFunction::sample(|_x: f64| Complex64::new(0.0, 0.0), 0.0, 40.0, 4001).unwrap();
        let xi = assemble_domain_element(&zero, FRAC_PI_2, &report).unwrap();
        assert!(log_derivative_at_start(&xi).unwrap().norm() < 1e-8);

        let g = 2.5;
        let xi = assemble_domain_element(&zero, g, &report).unwrap();
        let alpha = halfline_bc_from_unitary(g).unwrap().alpha.finite().unwrap();
        assert!((log_derivative_at_start(&xi).unwrap() - alpha).norm() < 1e-8);
    }

    #[test]
    fn assemble_errors() {
        let report = solve_deficiency(&OperatorSpec::momentum_unit_interval(), 1.0).unwrap();
        let bad = GridFunction::sample(|_x: f64| Complex64::new(1.0, 0.0), 0.0, 1.0, 11).unwrap();
        assert!(matches!(assemble_domain_element(&bad, 0.0, &report), Err(Error::Precondition(_))));
        let half = OperatorSpec::new(OperatorKind::Momentum, Interval::positive_half_line()).unwrap();
        let report = solve_deficiency(&half, 1.0).unwrap();
        assert!(matches!(
            assemble_domain_element(&bad, 0.0, &report),
            Err(Error::UnsupportedExtension(_))
        ));
    }
}
