//! Finite-dimensional and basis-matrix demonstrations of the canonical
//! commutation relation going wrong.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub re: f64,
    pub im: f64,
    /// Tolerance at which the value is asserted.
    pub tolerance: f64,
}

impl Quantity {
    pub fn real(name: &str, value: f64, tolerance: f64) -> Self {
        Quantity { name: name.to_string(), re: value, im: 0.0, tolerance }
    }

    pub fn complex(name: &str, value: Complex64, tolerance: f64) -> Self {
        Quantity { name: name.to_string(), re: value.re, im: value.im, tolerance }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub id: u8,
    pub quantities: Vec<Quantity>,
    pub verdict: String,
}

impl ParadoxReport {
    pub fn get(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// `Tr(XP - PX)` summed elementwise.
pub fn trace_commutator(x: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * p[(j, i)] - p[(i, j)] * x[(j, i)];
        }
    }
    acc
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Paradox 2: the trace of a finite commutator vanishes, but the canonical
/// relation would need it to be `i hbar N`.
pub fn trace_commutator_check(n: usize, trials: usize, hbar: f64, seed: u64) -> Result<ParadoxReport> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for _ in 0..trials {
        let x = random_hermitian(n, &mut rng);
        let p = random_hermitian(n, &mut rng);
        let tr = trace_commutator(&x, &p).norm();
        max_abs = max_abs.max(tr);
        max_rel = max_rel.max(tr / (x.norm() * p.norm()));
    }
    Ok(ParadoxReport {
        id: 2,
        quantities: vec![
            Quantity::real("max_abs_trace", max_abs, (n * n) as f64 * f64::EPSILON * 16.0 * n as f64),
            Quantity::real("max_rel_trace", max_rel, 1e-10),
            Quantity::complex("target_i_hbar_dim", Complex64::new(0.0, hbar * n as f64), 0.0),
            Quantity::real("trials", trials as f64, 0.0),
        ],
        verdict: format!(
            "Tr[X,P] stays at {max_rel:.1e} relative over {trials} Hermitian pairs, while the canonical relation needs {}i",
            hbar * n as f64
        ),
    })
}

#[derive(Debug, Clone)]
pub struct CosineBasisReport {
    pub l: f64,
    /// `p[(m-1, n-1)] = (e_m, p e_n)`
    pub p: DMatrix<Complex64>,
    /// `conj(p_nm) - p_mn`
    pub defect: DMatrix<Complex64>,
    /// Largest deviation from the closed forms of `p_mn`.
    pub analytic_deviation: f64,
}

/// Closed form of `(e_m, -i e_n')` for `e_n = sqrt(2/l) cos(n pi x/l)`.
pub fn cosine_basis_element(l: f64, m: usize, n: usize) -> Complex64 {
    if (m + n).is_multiple_of(2) {
        return Complex64::new(0.0, 0.0);
    }
    let (m, n) = (m as f64, n as f64);
    Complex64::new(0.0, 4.0 / l * n * n / (n * n - m * m))
}

/// Paradox 4: momentum matrix in the cosine basis (indices from 1) by
/// Gauss–Legendre quadrature, and its hermiticity defect.
pub fn cosine_basis_momentum_matrix(l: f64, size: usize) -> Result<CosineBasisReport> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("basis size must be at least 2, got {size}")));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("length must be positive, got {l}")));
    }
    let amp = (2.0 / l).sqrt();
    let mut p = DMatrix::zeros(size, size);
    let mut dev: f64 = 0.0;
    for m in 1..=size {
        for n in 1..=size {
            let (km, kn) = (m as f64 * PI / l, n as f64 * PI / l);
            // e_m * (-i e_n') with e_n' = -amp kn sin(kn x)
            let integrand = |x: f64| Complex64::new(0.0, amp * amp * kn * (km * x).cos() * (kn * x).sin());
            let v = quadrature::integrate(integrand, 0.0, l, 8 * size, 16);
            dev = dev.max((v - cosine_basis_element(l, m, n)).norm());
            p[(m - 1, n - 1)] = v;
        }
    }
    let defect = DMatrix::from_fn(size, size, |i, j| p[(j, i)].conj() - p[(i, j)]);
    Ok(CosineBasisReport { l, p, defect, analytic_deviation: dev })
}

impl CosineBasisReport {
    /// Paradox report with the extreme defects on both sublattices.
    pub fn summary(&self) -> ParadoxReport {
        let size = self.p.nrows();
        let mut even: f64 = 0.0;
        let mut odd_dev: f64 = 0.0;
        let target = Complex64::new(0.0, -4.0 / self.l);
        for i in 0..size {
            for j in 0..size {
                let d = self.defect[(i, j)];
                if (i + j) % 2 == 0 {
                    even = even.max(d.norm());
                } else {
                    odd_dev = odd_dev.max((d - target).norm());
                }
            }
        }
        ParadoxReport {
            id: 4,
            quantities: vec![
                Quantity::real("max_defect_even", even, 1e-12),
                Quantity::real("max_defect_odd_minus_target", odd_dev, 1e-10),
                Quantity::complex("odd_target", target, 0.0),
                Quantity::real("analytic_deviation", self.analytic_deviation, 1e-10),
            ],
            verdict: format!(
                "p_mn is not Hermitian: conj(p_nm) - p_mn = {}i on every m+n odd entry",
                -4.0 / self.l
            ),
        }
    }
}

/// Paradox 1: on an exact eigenvector of the discretized momentum,
/// `(psi, [X,P] psi)` vanishes instead of equalling `i hbar`.
pub fn eigenvector_commutator_demo(theta: f64, size: usize, hbar: f64) -> Result<ParadoxReport> {
    let modes = spectral::discretized_momentum_modes(theta, size, 1)?;
    let mode = &modes[0];
    let psi = &mode.vector;
    let op = spectral::eigen::TwistedDifference { n: size, theta };
    let xs: Vec<f64> = (0..size).map(|j| j as f64 / size as f64).collect();
    // P here is -i d/dx in hbar = 1 units; scale by hbar.
    let p_psi: Vec<Complex64> = op.apply(psi).into_iter().map(|z| z * hbar).collect();
    let x_psi: Vec<Complex64> = psi.iter().zip(&xs).map(|(z, x)| z * x).collect();
    let p_x_psi: Vec<Complex64> = op.apply(&x_psi).into_iter().map(|z| z * hbar).collect();
    let x_p_psi: Vec<Complex64> = p_psi.iter().zip(&xs).map(|(z, x)| z * x).collect();
    let expectation: Complex64 = psi.iter().zip(x_p_psi.iter().zip(&p_x_psi)).map(|(a, (b, c))| a.conj() * (b - c)).sum();
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    Ok(ParadoxReport {
        id: 1,
        quantities: vec![
            Quantity::complex("commutator_expectation", expectation, 1e-8),
            Quantity::complex("target_i_hbar", Complex64::new(0.0, hbar * norm_sq), 0.0),
            Quantity::complex("eigenvalue", mode.value * hbar, 0.0),
            Quantity::real("eigen_residual", mode.residual, 1e-8),
        ],
        verdict: format!(
            "(psi,[X,P]psi) = {:.1e} on a momentum eigenvector, not i hbar",
            expectation.norm()
        ),
    })
}

/// Paradox 3: the well eigenfunctions are not momentum eigenfunctions;
/// `r_n` is the relative size of the part of `p psi_n` orthogonal to `psi_n`.
pub fn commuting_observables_demo(a: f64, n_max: usize) -> Result<ParadoxReport> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("well width must be positive, got {a}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidIndex("n_max must be at least 1".into()));
    }
    let amp = (2.0 / a).sqrt();
    let mut quantities = Vec::new();
    let mut min_r = f64::INFINITY;
    for n in 1..=n_max {
        let k = n as f64 * PI / a;
        let psi = |x: f64| Complex64::new(amp * (k * x).sin(), 0.0);
        let p_psi = |x: f64| Complex64::new(0.0, -amp * k * (k * x).cos());
        let panels = 16 * n;
        let overlap = quadrature::integrate(|x| psi(x).conj() * p_psi(x), 0.0, a, panels, 16);
        let norm_sq = quadrature::integrate(|x| Complex64::new(psi(x).norm_sqr(), 0.0), 0.0, a, panels, 16).re;
        let c = overlap / norm_sq;
        let rest = quadrature::integrate(|x| Complex64::new((p_psi(x) - c * psi(x)).norm_sqr(), 0.0), 0.0, a, panels, 16).re;
        let full = quadrature::integrate(|x| Complex64::new(p_psi(x).norm_sqr(), 0.0), 0.0, a, panels, 16).re;
        let r = (rest / full).sqrt();
        min_r = min_r.min(r);
        quantities.push(Quantity::real(&format!("r_{n}"), r, 1e-10));
    }
    Ok(ParadoxReport {
        id: 3,
        quantities,
        verdict: format!("p psi_n is orthogonal to psi_n (min r_n = {min_r:.12}), so H and p share no eigenfunctions"),
    })
}
