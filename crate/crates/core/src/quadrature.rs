//! Composite quadrature rules.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::uniform_step;

/// Quadrature weights for samples at `xs`: composite Simpson when the grid is
/// uniform (with a 3/8 panel at the end for an odd number of intervals),
/// trapezoid otherwise.
pub fn weights(xs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateGrid(format!("need at least 2 points, got {n}")));
    }
    match uniform_step(xs) {
        Some(h) => Ok(simpson_weights(n, h)),
        None => Ok(trapezoid_weights(xs)),
    }
}

pub fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = xs[i + 1] - xs[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let intervals = n - 1;
    let mut w = vec![0.0; n];
    if intervals == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let simpson_intervals = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    for k in (0..simpson_intervals).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if intervals % 2 == 1 {
        let s = simpson_intervals;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

// Endpoint weights of the order-8 Gregory rule (in units of h); every other
// node has weight 1.
const GREGORY8: [f64; 8] = [
    1070017.0 / 3628800.0,
    5537111.0 / 3628800.0,
    103613.0 / 403200.0,
    261115.0 / 145152.0,
    298951.0 / 725760.0,
    515677.0 / 403200.0,
    3349879.0 / 3628800.0,
    3662753.0 / 3628800.0,
];

/// Gregory endpoint-corrected trapezoid weights on a uniform grid of `n`
/// points. Exact for polynomials of degree 7 and, unlike Simpson, uniform in
/// the interior so that discrete summation by parts holds away from the ends.
pub fn gregory_weights(n: usize, h: f64) -> Result<Vec<f64>> {
    if n < 2 * GREGORY8.len() {
        return Err(Error::TooCoarse(format!("Gregory rule needs at least 16 points, got {n}")));
    }
    let mut w = vec![h; n];
    for (k, c) in GREGORY8.iter().enumerate() {
        w[k] = c * h;
        w[n - 1 - k] = c * h;
    }
    Ok(w)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut wts = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        wts[i] = w;
        wts[n - 1 - i] = w;
    }
    (nodes, wts)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre integral of a complex integrand over [a, b].
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Complex64 {
    let (nodes, wts) = gauss_legendre(order);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(&wts) {
            acc += f(mid + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        for n in [3usize, 4, 5, 6, 7, 10, 11] {
            let h = 2.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let s: f64 = (0..n).map(|i| {
                let x = i as f64 * h;
                w[i] * (x * x * x - x + 1.0)
            }).sum();
            assert!((s - 4.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn gregory_exact_for_degree_seven() {
        let n = 40;
        let h = 1.0 / (n - 1) as f64;
        let w = gregory_weights(n, h).unwrap();
        let s: f64 = (0..n).map(|i| w[i] * (i as f64 * h).powi(7)).sum();
        assert!((s - 0.125).abs() < 1e-14);
        assert!(gregory_weights(15, h).is_err());
    }

    #[test]
    fn gauss_legendre_exact() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let v = integrate(|x| Complex64::new(x.cos(), 0.0), 0.0, 1.0, 4, 10);
        assert!((v.re - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn nonuniform_trapezoid() {
        let xs = [0.0, 0.1, 0.5, 1.0];
        let w = weights(&xs).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
