//! Spectra of the catalog operators.

pub mod eigen;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{Interval, RobinParameter};
use crate::error::{Error, Result};
use crate::grid::{linspace, ExpPoly, GridFunction, Weight};
use crate::ode::{self, OdeOptions};

pub use eigen::EigenPair;

/// Default samples for eigenfunctions.
pub const DEFAULT_GRID_N: usize = 10_001;

/// Half-line grids stop at `HALF_LINE_EXTENT / |alpha|`.
pub const HALF_LINE_EXTENT: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub n: i64,
    pub value: f64,
    pub eigenfunction: GridFunction,
}

/// Continuous part: `[threshold, inf)` with reflection phase `-arg R(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Continuum {
    pub threshold: f64,
    pub alpha: RobinParameter,
}

impl Continuum {
    pub fn reflection_phase(&self, k: f64) -> Result<f64> {
        Ok(reflection_coefficient(k, self.alpha)?.phase)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SpectrumResult {
    pub discrete: Vec<Eigenpair>,
    pub continuous: Option<Continuum>,
}

fn check_range(n_min: i64, n_max: i64) -> Result<()> {
    if n_min > n_max {
        return Err(Error::InvalidIndex(format!("empty index range {n_min}..={n_max}")));
    }
    Ok(())
}

/// `p_n = (2 n pi + theta)/L` with eigenfunctions `exp(i p_n (x-a))/sqrt(L)`.
pub fn momentum_spectrum(theta: f64, interval: &Interval, n_min: i64, n_max: i64, grid_n: usize) -> Result<SpectrumResult> {
    let (a, b) = match *interval {
        Interval::Finite { a, b } => (a, b),
        _ => {
            return Err(Error::UnsupportedBoundary(format!(
                "momentum has no self-adjoint realization on the {}",
                interval.name()
            )))
        }
    };
    check_range(n_min, n_max)?;
    let l = b - a;
    let amp = 1.0 / l.sqrt();
    let discrete = (n_min..=n_max)
        .map(|n| {
            let p = (2.0 * PI * n as f64 + theta) / l;
            let form = ExpPoly::exp(Complex64::from_polar(amp, -p * a), Complex64::new(0.0, p));
            let eigenfunction = GridFunction::from_profile(Arc::new(form), linspace(a, b, grid_n), Weight::Unit)?;
            Ok(Eigenpair { n, value: p, eigenfunction })
        })
        .collect::<Result<_>>()?;
    Ok(SpectrumResult { discrete, continuous: None })
}

/// Infinite well of width `a` (Dirichlet at both ends): `E_n = (n pi/a)^2`,
/// `psi_n = sqrt(2/a) sin(n pi x/a)`.
pub fn well_spectrum(a: f64, n_min: i64, n_max: i64, grid_n: usize) -> Result<SpectrumResult> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("well width must be positive, got {a}")));
    }
    if n_min <= 0 {
        return Err(Error::InvalidIndex(format!("well levels start at n = 1, got {n_min}")));
    }
    check_range(n_min, n_max)?;
    let amp = (2.0 / a).sqrt();
    let discrete = (n_min..=n_max)
        .map(|n| {
            let k = n as f64 * PI / a;
            // sqrt(2/a) sin(kx) = -i sqrt(2/a)/2 (e^{ikx} - e^{-ikx})
            let c = Complex64::new(0.0, -0.5 * amp);
            let form = ExpPoly::exp(c, Complex64::new(0.0, k)).plus(ExpPoly::exp(-c, Complex64::new(0.0, -k)));
            let xs = linspace(0.0, a, grid_n);
            let values = xs.iter().map(|&x| Complex64::new(amp * (k * x).sin(), 0.0)).collect();
            let f = GridFunction::new(xs, values, Weight::Unit)?.with_extender(Arc::new(form));
            Ok(Eigenpair { n, value: k * k, eigenfunction: f })
        })
        .collect::<Result<_>>()?;
    Ok(SpectrumResult { discrete, continuous: None })
}

/// Lowest `count` eigenvalues of the second-order finite-difference
/// Dirichlet Laplacian on `[0, a]` with `intervals` cells.
pub fn well_spectrum_fd(a: f64, intervals: usize, count: usize) -> Result<Vec<f64>> {
    if intervals < 2 {
        return Err(Error::TooCoarse(format!("need at least 2 cells, got {intervals}")));
    }
    let h = a / intervals as f64;
    let m = intervals - 1;
    let diag = vec![2.0 / (h * h); m];
    let off = vec![-1.0 / (h * h); m.saturating_sub(1)];
    eigen::tridiagonal_lowest(&diag, &off, count)
}

/// Richardson extrapolation of second-order results at `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub psi: GridFunction,
}

/// Normalized bound state of the Robin half-line, present only for `alpha < 0`.
pub fn bound_state(alpha: f64, grid_n: usize) -> Result<Option<BoundState>> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    if alpha >= 0.0 {
        return Ok(None);
    }
    let form = bound_state_profile(alpha);
    let xs = linspace(0.0, HALF_LINE_EXTENT / alpha.abs(), grid_n);
    let psi = GridFunction::from_profile(Arc::new(form), xs, Weight::Unit)?;
    Ok(Some(BoundState { energy: -alpha * alpha, psi }))
}

/// `sqrt(2|alpha|) exp(alpha x)`
pub fn bound_state_profile(alpha: f64) -> ExpPoly {
    ExpPoly::exp(Complex64::new((2.0 * alpha.abs()).sqrt(), 0.0), Complex64::new(alpha, 0.0))
}

/// Robin half-line: the bound state (if any) as level 0 and the continuum
/// from 0.
pub fn robin_spectrum(alpha: RobinParameter, grid_n: usize) -> Result<SpectrumResult> {
    let discrete = match alpha {
        RobinParameter::Finite(a) => bound_state(a, grid_n)?
            .map(|b| vec![Eigenpair { n: 0, value: b.energy, eigenfunction: b.psi }])
            .unwrap_or_default(),
        RobinParameter::Dirichlet => Vec::new(),
    };
    Ok(SpectrumResult { discrete, continuous: Some(Continuum { threshold: 0.0, alpha }) })
}

/// Mismatch `psi'(0)/psi(0) - alpha` of the solution started at `x_max`
/// with decaying data `exp(-sqrt(-E) x)` and integrated inward.
pub fn shooting_mismatch(alpha: f64, energy: f64, x_max: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(Error::InvalidParameter(format!("shooting needs E < 0, got {energy}")));
    }
    let kappa = (-energy).sqrt();
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-300, ..Default::default() };
    let tr = ode::integrate(
        |_x, y, d| {
            d[0] = y[1];
            d[1] = -energy * y[0];
        },
        x_max,
        &[1.0, -kappa],
        0.0,
        &opts,
        |_, _| Ok(()),
    )?;
    let end = tr.last();
    if end[0] == 0.0 {
        return Err(Error::Indeterminate("shooting solution vanishes at 0".into()));
    }
    Ok(end[1] / end[0] - alpha)
}

/// Bound-state energy from inward shooting and bisection on the Robin
/// mismatch. `x_max` defaults to `30/|alpha|`.
pub fn bound_state_shooting(alpha: f64, bracket: (f64, f64), x_max: Option<f64>) -> Result<f64> {
    if !(alpha < 0.0) {
        return Err(Error::NoBoundState(format!("alpha = {alpha} >= 0")));
    }
    let x_max = x_max.unwrap_or(HALF_LINE_EXTENT / alpha.abs());
    let (mut lo, mut hi) = if bracket.0 < bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let mut f_lo = shooting_mismatch(alpha, lo, x_max)?;
    let f_hi = shooting_mismatch(alpha, hi, x_max)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot(format!("no sign change of the Robin mismatch on [{lo}, {hi}]")));
    }
    while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        let f_mid = shooting_mismatch(alpha, mid, x_max)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reflection {
    pub r: Complex64,
    /// `-arg R`
    pub phase: f64,
}

/// `R = (ik + alpha)/(ik - alpha)`; `R = -1` for the Dirichlet condition.
pub fn reflection_coefficient(k: f64, alpha: RobinParameter) -> Result<Reflection> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let r = match alpha {
        RobinParameter::Dirichlet => Complex64::new(-1.0, 0.0),
        RobinParameter::Finite(0.0) => {
            if k == 0.0 {
                return Err(Error::Indeterminate("k = 0 with alpha = 0".into()));
            }
            Complex64::new(1.0, 0.0)
        }
        RobinParameter::Finite(a) => Complex64::new(a, k) / Complex64::new(-a, k),
    };
    Ok(Reflection { r, phase: -r.arg() })
}

/// `exp(-ikx) + R exp(ikx)`, unnormalized, sampled at `xs`.
pub fn scattering_state(k: f64, alpha: RobinParameter, xs: Vec<f64>) -> Result<GridFunction> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let r = reflection_coefficient(k, alpha)?.r;
    let one = Complex64::new(1.0, 0.0);
    let form = ExpPoly::exp(one, Complex64::new(0.0, -k)).plus(ExpPoly::exp(r, Complex64::new(0.0, k)));
    GridFunction::from_profile(Arc::new(form), xs, Weight::Unit)
}

/// Minimum size of the discretized momentum matrix.
pub const MIN_DISCRETE_N: usize = 64;

/// Closed-form eigenvalue `(-i N)(exp(i phi) - 1)`, `phi = (2 pi n + theta)/N`,
/// of the twisted forward-difference matrix.
pub fn discretized_momentum_exact(theta: f64, size: usize, n: i64) -> Complex64 {
    let phi = (2.0 * PI * n as f64 + theta) / size as f64;
    Complex64::new(0.0, -(size as f64)) * (Complex64::from_polar(1.0, phi) - 1.0)
}

/// The `count` eigenpairs of smallest modulus of the twisted
/// forward-difference momentum on [0, 1] with `size` points.
pub fn discretized_momentum_modes(theta: f64, size: usize, count: usize) -> Result<Vec<EigenPair>> {
    if size < MIN_DISCRETE_N {
        return Err(Error::TooCoarse(format!("need N >= {MIN_DISCRETE_N}, got {size}")));
    }
    let op = eigen::TwistedDifference { n: size, theta };
    eigen::lowest_modes(&op, count.min(size), 60, 0x5eed)
}

/// Eigenvalues only, sorted by modulus. They are complex: the scheme is
/// first order and each eigenvalue carries an `O(p^2 h)` imaginary part.
pub fn discretized_momentum_eigs(theta: f64, size: usize, count: usize) -> Result<Vec<Complex64>> {
    Ok(discretized_momentum_modes(theta, size, count)?.into_iter().map(|p| p.value).collect())
}

/// All eigenvalues from a dense Schur decomposition (reference for small N).
pub fn discretized_momentum_dense(theta: f64, size: usize) -> Result<Vec<Complex64>> {
    if size < MIN_DISCRETE_N {
        return Err(Error::TooCoarse(format!("need N >= {MIN_DISCRETE_N}, got {size}")));
    }
    eigen::dense_eigenvalues(eigen::TwistedDifference { n: size, theta }.dense())
}
