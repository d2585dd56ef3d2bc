//! Small eigensolvers: Sturm bisection for symmetric tridiagonal matrices,
//! shift-invert Arnoldi for the twisted difference operator, and a dense
//! reference.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix by
/// bisection on Sturm counts.
pub fn tridiagonal_lowest(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n {
        return Err(Error::InvalidParameter("off-diagonal must have length n - 1".into()));
    }
    if count > n {
        return Err(Error::InvalidIndex(format!("asked for {count} of {n} eigenvalues")));
    }
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// The `N x N` forward-difference momentum matrix with twisted wraparound:
/// row `j` is `(-i/h)(psi_{j+1} - psi_j)`, the last row uses
/// `exp(i theta) psi_0` for `psi_N`. `h = 1/N`.
#[derive(Debug, Clone, Copy)]
pub struct TwistedDifference {
    pub n: usize,
    pub theta: f64,
}

impl TwistedDifference {
    fn c(&self) -> Complex64 {
        Complex64::new(0.0, -(self.n as f64))
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let c = self.c();
        let twist = Complex64::from_polar(1.0, self.theta);
        (0..n)
            .map(|j| {
                let next = if j + 1 < n { x[j + 1] } else { twist * x[0] };
                c * (next - x[j])
            })
            .collect()
    }

    /// Solves `(A - sigma) x = b` in O(N) by sweeping the bidiagonal part
    /// and closing the cycle through `x_0`.
    pub fn solve_shifted(&self, sigma: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let c = self.c();
        let d = c + sigma;
        let mut p = vec![Complex64::new(0.0, 0.0); n];
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        q[0] = Complex64::new(1.0, 0.0);
        for j in 0..n - 1 {
            p[j + 1] = (b[j] + d * p[j]) / c;
            q[j + 1] = d * q[j] / c;
        }
        let twist = Complex64::from_polar(1.0, self.theta);
        let denom = c * twist - d * q[n - 1];
        if denom.norm() == 0.0 || !denom.is_finite() {
            return Err(Error::Indeterminate(format!("shift {sigma} is an eigenvalue")));
        }
        let x0 = (b[n - 1] + d * p[n - 1]) / denom;
        Ok((0..n).map(|j| p[j] + q[j] * x0).collect())
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let c = self.c();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = -c;
            if j + 1 < n {
                m[(j, j + 1)] = c;
            } else {
                m[(j, 0)] = c * Complex64::from_polar(1.0, self.theta);
            }
        }
        m
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenpair refined by inverse iteration; the vector has unit 2-norm.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// The `count` eigenvalues of smallest modulus via shift-invert Arnoldi
/// with full reorthogonalization, each refined by inverse iteration.
pub fn lowest_modes(op: &TwistedDifference, count: usize, krylov: usize, seed: u64) -> Result<Vec<EigenPair>> {
    let n = op.n;
    let m = krylov.min(n).max(count + 2);
    // Im of every eigenvalue is >= 0, so a shift below the real axis is safe.
    let sigma = Complex64::new(0.0, -0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v0: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let s = norm(&v0);
    v0.iter_mut().for_each(|z| *z /= s);
    let mut basis = vec![v0];
    let mut h = DMatrix::<Complex64>::zeros(m + 1, m);
    let mut dim = m;
    for j in 0..m {
        let mut w = op.solve_shifted(sigma, &basis[j])?;
        for _ in 0..2 {
            for (i, vi) in basis.iter().enumerate() {
                let coef = dot(vi, &w);
                h[(i, j)] += coef;
                w.iter_mut().zip(vi).for_each(|(a, b)| *a -= coef * b);
            }
        }
        let beta = norm(&w);
        h[(j + 1, j)] = Complex64::new(beta, 0.0);
        if beta < 1e-14 {
            dim = j + 1;
            break;
        }
        w.iter_mut().for_each(|z| *z /= beta);
        basis.push(w);
    }
    let hm = h.view((0, 0), (dim, dim)).into_owned();
    let ritz = hm
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Indeterminate("Schur decomposition did not converge".into()))?;
    let mut values: Vec<Complex64> = ritz
        .iter()
        .filter(|mu| mu.norm() > 1e-300)
        .map(|mu| sigma + Complex64::new(1.0, 0.0) / mu)
        .collect();
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    values.truncate(count);
    let mut out = Vec::with_capacity(count);
    for lam in values {
        out.push(refine(op, lam, &mut rng)?);
    }
    out.sort_by(|a, b| a.value.norm().total_cmp(&b.value.norm()));
    Ok(out)
}

fn refine(op: &TwistedDifference, guess: Complex64, rng: &mut ChaCha8Rng) -> Result<EigenPair> {
    let n = op.n;
    let shift = guess + Complex64::new(1e-9, -1e-9) * (1.0 + guess.norm());
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let mut value = guess;
    for _ in 0..3 {
        let mut w = op.solve_shifted(shift, &v)?;
        let s = norm(&w);
        w.iter_mut().for_each(|z| *z /= s);
        v = w;
        let av = op.apply(&v);
        value = dot(&v, &av);
    }
    let av = op.apply(&v);
    let residual = norm(&av.iter().zip(&v).map(|(a, x)| a - value * x).collect::<Vec<_>>());
    Ok(EigenPair { value, vector: v, residual })
}

/// All eigenvalues of a dense complex matrix, sorted by modulus.
pub fn dense_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let ev: DVector<Complex64> = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Indeterminate("Schur decomposition did not converge".into()))?;
    let mut v: Vec<Complex64> = ev.iter().copied().collect();
    v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(v)
}
