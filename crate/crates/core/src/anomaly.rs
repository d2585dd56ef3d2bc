//! The scale anomaly of the Robin half-line Hamiltonian.
//!
//! `D = tH - G` with `G psi = -(i/4)(2x psi' + psi)`, and the anomaly is
//! `A = i[(H psi, D psi) - (psi, H D psi)]`, which vanishes for any pair on
//! which `H` is symmetric. Derivatives are finite differences; functions with
//! a closed-form extender get ghost points beyond the grid so the same
//! central stencil is used everywhere. For the bound state itself the closed
//! form is differentiated exactly and the difference result is kept as a
//! cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{self, MonomialObservable};
use crate::domain::RobinParameter;
use crate::error::{Error, Result};
use crate::fd;
use crate::grid::{linspace, ExpPoly, GridFunction, Weight};
use crate::quadrature;
use crate::spectral;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Step of the anomaly grid in units of `1/|alpha|`.
pub const ANOMALY_STEP: f64 = 0.05;
/// Accuracy order of the central stencils used for the anomaly.
pub const ANOMALY_FD_ORDER: usize = 8;
/// Tolerance of the Robin condition for `heisenberg_correction` inputs.
pub const DOMAIN_TOLERANCE: f64 = 1e-6;

/// `t H psi - G psi` by 4th-order differences (one-sided near the ends, or
/// central with ghost points when `psi` has an extender).
pub fn apply_dilatation(psi: &GridFunction, t: f64) -> Result<GridFunction> {
    if psi.len() < 5 {
        return Err(Error::DegenerateGrid(format!("need at least 5 points, got {}", psi.len())));
    }
    let h = psi
        .uniform_step()
        .ok_or_else(|| Error::DegenerateGrid("dilatation needs a uniform grid".into()))?;
    let (d1, d2) = derivatives(psi, h, 4)?;
    let values = psi
        .xs()
        .iter()
        .zip(psi.values())
        .zip(d1.iter().zip(&d2))
        .map(|((&x, &v), (&dv, &ddv))| -t * ddv + 0.25 * I * (2.0 * x * dv + v))
        .collect();
    GridFunction::new(psi.xs().to_vec(), values, psi.weight())
}

/// First and second derivatives on the grid of `f`.
fn derivatives(f: &GridFunction, h: f64, order: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    match f.extender() {
        Some(ext) => {
            let ghost = ghost_count(order);
            let ext_vals = extended_values(f, h, ghost, |x| ext.eval(x));
            let d1 = central(&ext_vals, h, 1, order, ghost, f.len());
            let d2 = central(&ext_vals, h, 2, order, ghost, f.len());
            Ok((d1, d2))
        }
        None => Ok((fd::derivative(f.values(), h, 1, order)?, fd::derivative(f.values(), h, 2, order)?)),
    }
}

fn half_width(order: usize) -> usize {
    order / 2
}

fn ghost_count(order: usize) -> usize {
    3 * half_width(order) + 2
}

fn extended_values<F: Fn(f64) -> Complex64>(f: &GridFunction, h: f64, ghost: usize, eval: F) -> Vec<Complex64> {
    let x0 = f.xs()[0];
    let n = f.len();
    (0..n + 2 * ghost)
        .map(|e| {
            if e >= ghost && e < ghost + n {
                f.values()[e - ghost]
            } else {
                eval(x0 + (e as f64 - ghost as f64) * h)
            }
        })
        .collect()
}

/// Central `m`-th derivative on extended indices `start..start+len`.
fn central(vals: &[Complex64], h: f64, m: usize, order: usize, start: usize, len: usize) -> Vec<Complex64> {
    let hw = half_width(order) as i64;
    let offsets: Vec<i64> = (-hw..=hw).collect();
    let w = fd::stencil(m, 0.0, &offsets, h);
    (start..start + len)
        .map(|e| offsets.iter().zip(&w).map(|(&o, w)| vals[(e as i64 + o) as usize] * *w).sum())
        .collect()
}

/// `(H psi, D psi)` and `(psi, H D psi)` on the grid of `psi`.
fn anomaly_terms(psi: &GridFunction, t: f64, order: usize) -> Result<(Complex64, Complex64)> {
    let h = psi
        .uniform_step()
        .ok_or_else(|| Error::DegenerateGrid("anomaly needs a uniform grid".into()))?;
    let n = psi.len();
    let weights = quadrature::gregory_weights(n, h)?;
    let x0 = psi.xs()[0];
    let (h_psi, d_psi, hd_psi, psi_vals): (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) =
        match psi.extender() {
            Some(ext) => {
                let hw = half_width(order);
                let ghost = ghost_count(order);
                let vals = extended_values(psi, h, ghost, |x| ext.eval(x));
                // D psi on main grid widened by hw on each side
                let lo = ghost - hw;
                let len = n + 2 * hw;
                let d1 = central(&vals, h, 1, order, lo, len);
                let d2 = central(&vals, h, 2, order, lo, len);
                let mut d_wide = vec![Complex64::new(0.0, 0.0); vals.len()];
                for k in 0..len {
                    let e = lo + k;
                    let x = x0 + (e as f64 - ghost as f64) * h;
                    d_wide[e] = -t * d2[k] + 0.25 * I * (2.0 * x * d1[k] + vals[e]);
                }
                let hd: Vec<Complex64> = central(&d_wide, h, 2, order, ghost, n).into_iter().map(|v| -v).collect();
                let hp: Vec<Complex64> = d2[hw..hw + n].iter().map(|v| -v).collect();
                (hp, d_wide[ghost..ghost + n].to_vec(), hd, psi.values().to_vec())
            }
            None => {
                let vals = psi.values();
                let d1 = fd::derivative(vals, h, 1, order)?;
                let d2 = fd::derivative(vals, h, 2, order)?;
                let d: Vec<Complex64> = (0..n)
                    .map(|j| -t * d2[j] + 0.25 * I * (2.0 * psi.xs()[j] * d1[j] + vals[j]))
                    .collect();
                let hd = fd::derivative(&d, h, 2, order)?.into_iter().map(|v| -v).collect();
                (d2.into_iter().map(|v| -v).collect(), d, hd, vals.to_vec())
            }
        };
    let w = psi.weight();
    let mut term_hd = Complex64::new(0.0, 0.0);
    let mut term_hhd = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let wj = weights[j] * w.at(psi.xs()[j]);
        term_hd += h_psi[j].conj() * d_psi[j] * wj;
        term_hhd += psi_vals[j].conj() * hd_psi[j] * wj;
    }
    Ok((term_hd, term_hhd))
}

/// The same two terms with derivatives taken from the closed form, so only
/// the integrals are numeric.
fn anomaly_terms_exact(form: &ExpPoly, xs: &[f64], t: f64) -> Result<(Complex64, Complex64)> {
    if xs.len() < 2 {
        return Err(Error::DegenerateGrid(format!("need at least 2 points, got {}", xs.len())));
    }
    let weights = quadrature::gregory_weights(xs.len(), xs[1] - xs[0])?;
    let derivs: Vec<ExpPoly> = (0..5).map(|k| form.nth_derivative(k)).collect();
    let mut term_hd = Complex64::new(0.0, 0.0);
    let mut term_hhd = Complex64::new(0.0, 0.0);
    for (&x, &w) in xs.iter().zip(&weights) {
        let d: Vec<Complex64> = derivs.iter().map(|f| f.value(x)).collect();
        let h_psi = -d[2];
        let d_psi = -t * d[2] + 0.25 * I * (2.0 * x * d[1] + d[0]);
        // H D psi = -(D psi)''
        let hd_psi = t * d[4] - 0.25 * I * (2.0 * x * d[3] + 5.0 * d[2]);
        term_hd += h_psi.conj() * d_psi * w;
        term_hhd += d[0].conj() * hd_psi * w;
    }
    Ok((term_hd, term_hhd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub alpha: f64,
    pub t: f64,
    /// `(H psi, D psi)`
    pub term_hd: Complex64,
    /// `(psi, H D psi)`
    pub term_hhd: Complex64,
    pub anomaly: f64,
    pub anomaly_imag: f64,
    pub bound_energy: f64,
    pub residual: f64,
    /// `alpha^4 t + (i alpha^3/2) int exp(2 alpha x)(2 alpha x + 1) dx`
    pub reference_r1: Complex64,
    /// `alpha^4 t + (i alpha^3/2) int exp(2 alpha x)(2 alpha x + 5) dx`
    pub reference_r2: Complex64,
    /// Same functional with order-8 finite differences on the grid. Its
    /// imaginary part carries roundoff of order `1e-10 alpha^4 |t|`.
    pub anomaly_fd: Complex64,
    pub grid_points: usize,
}

/// Grid used for the bound state in [`anomaly_quadrature`].
pub fn anomaly_grid(alpha: f64) -> Vec<f64> {
    let x_max = spectral::HALF_LINE_EXTENT / alpha.abs();
    let n = (spectral::HALF_LINE_EXTENT / ANOMALY_STEP).round() as usize + 1;
    linspace(0.0, x_max, n)
}

/// Anomaly of the normalized bound state `sqrt(2|alpha|) exp(alpha x)`.
pub fn anomaly_quadrature(alpha: f64, t: f64) -> Result<AnomalyReport> {
    if !(alpha < 0.0) || !alpha.is_finite() {
        return Err(Error::NoBoundState(format!("alpha = {alpha} has no bound state")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    let form = spectral::bound_state_profile(alpha);
    let xs = anomaly_grid(alpha);
    let (term_hd, term_hhd) = anomaly_terms_exact(&form, &xs, t)?;
    let a = I * (term_hd - term_hhd);
    let psi = GridFunction::from_profile(std::sync::Arc::new(form), xs, Weight::Unit)?;
    let (fd_hd, fd_hhd) = anomaly_terms(&psi, t, ANOMALY_FD_ORDER)?;
    let bound_energy = -alpha * alpha;
    let x_max = spectral::HALF_LINE_EXTENT / alpha.abs();
    let integral = |c: f64| {
        quadrature::integrate(
            |x| Complex64::new((2.0 * alpha * x).exp() * (2.0 * alpha * x + c), 0.0),
            0.0,
            x_max,
            64,
            16,
        )
    };
    let a3 = alpha.powi(3);
    let a4t = Complex64::new(alpha.powi(4) * t, 0.0);
    Ok(AnomalyReport {
        alpha,
        t,
        term_hd,
        term_hhd,
        anomaly: a.re,
        anomaly_imag: a.im,
        bound_energy,
        residual: (a.re - bound_energy).abs(),
        reference_r1: a4t + 0.5 * I * a3 * integral(1.0),
        reference_r2: a4t + 0.5 * I * a3 * integral(5.0),
        anomaly_fd: I * (fd_hd - fd_hhd),
        grid_points: psi.len(),
    })
}

fn check_robin(psi: &GridFunction, alpha: RobinParameter) -> Result<()> {
    if psi.xs()[0] != 0.0 {
        return Err(Error::Precondition(format!("grid must start at 0, starts at {}", psi.xs()[0])));
    }
    let (v, dv) = match psi.extender() {
        Some(ext) => (ext.eval(0.0), fd::derivative_at(|x| ext.eval(x), 0.0, 1e-3, 1, 8)),
        None => {
            let h = psi.uniform_step().unwrap_or(psi.xs()[1] - psi.xs()[0]);
            (psi.first(), fd::derivative(&psi.values()[..9.min(psi.len())], h, 1, 4)?[0])
        }
    };
    let scale = psi.values().iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
    let mismatch = match alpha {
        RobinParameter::Finite(a) => (dv - a * v).norm(),
        RobinParameter::Dirichlet => v.norm(),
    };
    if mismatch > DOMAIN_TOLERANCE * scale {
        return Err(Error::DomainViolation(format!(
            "Robin condition ({alpha}) violated by {mismatch:.3e}"
        )));
    }
    Ok(())
}

/// `i[(H psi, D psi) - (psi, H D psi)]` at `t = 0` for a `psi` in the
/// Robin(`alpha`) domain, sampled on a uniform grid starting at 0.
pub fn heisenberg_correction(psi: &GridFunction, alpha: RobinParameter) -> Result<Complex64> {
    heisenberg_correction_at(psi, alpha, 0.0)
}

pub fn heisenberg_correction_at(psi: &GridFunction, alpha: RobinParameter, t: f64) -> Result<Complex64> {
    check_robin(psi, alpha)?;
    let (hd, hhd) = anomaly_terms(psi, t, ANOMALY_FD_ORDER)?;
    Ok(I * (hd - hhd))
}

/// The same correction after integrating by parts: `-i delta_H(psi, D psi)`
/// at the origin, from exact derivatives of the closed form.
pub fn heisenberg_correction_by_parts(psi: &ExpPoly, t: f64) -> Complex64 {
    let d: Vec<Complex64> = (0..4).map(|k| psi.nth_derivative(k).value(0.0)).collect();
    // D psi = -t psi'' + (i/4)(2x psi' + psi)
    let d_psi = -t * d[2] + 0.25 * I * d[0];
    let d_psi_prime = -t * d[3] + 0.25 * I * 3.0 * d[1];
    let form = d[0].conj() * d_psi_prime - d[1].conj() * d_psi;
    -I * form
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalVerdict {
    pub bracket_h_d: String,
    pub bracket_equals_h: bool,
    pub total_derivative: String,
    pub conserved: bool,
    pub conserved_with_inverse_square: bool,
}

/// `{H, D} = H` and `dD/dt = 0` for `H = p^2`, `D = tH - qp/2`, and again
/// with `q^-2` added to `H`.
pub fn classical_symmetry_check() -> ClassicalVerdict {
    let h = MonomialObservable::p_squared();
    let d = classical::dilatation_observable(&h);
    let bracket = classical::poisson_bracket(&h, &d);
    let total = classical::total_time_derivative(&d, &h);
    let h2 = h.add(&MonomialObservable::term(1, -2, 0, 0));
    let d2 = classical::dilatation_observable(&h2);
    let total2 = classical::total_time_derivative(&d2, &h2);
    ClassicalVerdict {
        bracket_h_d: bracket.to_string(),
        bracket_equals_h: bracket == h,
        total_derivative: total.to_string(),
        conserved: total.is_zero(),
        conserved_with_inverse_square: total2.is_zero(),
    }
}
