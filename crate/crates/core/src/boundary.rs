//! Boundary forms of the momentum and free Hamiltonian.

use num_complex::Complex64;

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::fd;
use crate::grid::GridFunction;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn max_abs(f: &GridFunction) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Whether `conj(xi) * eta` is negligible at the given end of the grid.
fn decays(xi: &GridFunction, eta: &GridFunction, at_start: bool) -> bool {
    let (u, v) = if at_start { (xi.first(), eta.first()) } else { (xi.last(), eta.last()) };
    (u.conj() * v).norm() <= 1e-8 * (1.0 + max_abs(xi) * max_abs(eta))
}

fn check_pair(xi: &GridFunction, eta: &GridFunction) -> Result<()> {
    if xi.len() != eta.len() || xi.xs().iter().zip(eta.xs()).any(|(a, b)| a != b) {
        return Err(Error::GridMismatch("boundary form of functions on different grids".into()));
    }
    Ok(())
}

fn endpoint_matches(x: f64, target: f64) -> bool {
    (x - target).abs() <= 1e-12 * (1.0 + target.abs())
}

/// `delta_p = -i [conj(xi(b)) eta(b) - conj(xi(a)) eta(a)]`.
///
/// On a half-line or the full line the missing endpoint contributes nothing,
/// provided both functions have decayed there on the sampled grid.
pub fn boundary_form_momentum(xi: &GridFunction, eta: &GridFunction, interval: &Interval) -> Result<Complex64> {
    check_pair(xi, eta)?;
    let xs = xi.xs();
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let left = match interval {
        Interval::Finite { a, .. } | Interval::HalfLine { a } => {
            if !endpoint_matches(x0, *a) {
                return Err(Error::Precondition(format!("grid starts at {x0}, interval at {a}")));
            }
            xi.first().conj() * eta.first()
        }
        Interval::FullLine => {
            if !decays(xi, eta, true) {
                return Err(Error::UnsupportedBoundary(
                    "full line: inputs do not decay at the left end of the grid".into(),
                ));
            }
            Complex64::new(0.0, 0.0)
        }
    };
    let right = match interval {
        Interval::Finite { b, .. } => {
            if !endpoint_matches(x1, *b) {
                return Err(Error::Precondition(format!("grid ends at {x1}, interval at {b}")));
            }
            xi.last().conj() * eta.last()
        }
        _ => {
            if !decays(xi, eta, false) {
                return Err(Error::UnsupportedBoundary(format!(
                    "{}: inputs do not decay at the right end of the grid",
                    interval.name()
                )));
            }
            Complex64::new(0.0, 0.0)
        }
    };
    Ok(-I * (right - left))
}

/// Value and 4th-order one-sided first derivative at the left end.
pub(crate) fn left_value_and_slope(f: &GridFunction) -> (Complex64, Complex64) {
    let xs = f.xs();
    let nodes: Vec<f64> = xs[..5].iter().map(|x| x - xs[0]).collect();
    let w = fd::fornberg(0.0, &nodes, 1);
    let slope = w[1].iter().zip(&f.values()[..5]).map(|(w, v)| v * w).sum();
    (f.first(), slope)
}

/// `delta_H = conj(xi(0)) eta'(0) - conj(xi'(0)) eta(0)` on a grid starting
/// at 0, with derivatives from 5-point one-sided stencils.
pub fn boundary_form_hamiltonian(xi: &GridFunction, eta: &GridFunction) -> Result<Complex64> {
    if xi.len() < 5 || eta.len() < 5 {
        return Err(Error::DegenerateGrid(format!(
            "one-sided boundary derivative needs 5 points, got {}",
            xi.len().min(eta.len())
        )));
    }
    check_pair(xi, eta)?;
    if xi.xs()[0] != 0.0 {
        return Err(Error::Precondition(format!("grid must start at 0, starts at {}", xi.xs()[0])));
    }
    if !decays(xi, eta, false) {
        return Err(Error::UnsupportedBoundary("inputs do not decay at the far end of the grid".into()));
    }
    let (u, du) = left_value_and_slope(xi);
    let (v, dv) = left_value_and_slope(eta);
    Ok(u.conj() * dv - du.conj() * v)
}
