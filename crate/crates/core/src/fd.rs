//! Finite-difference stencils.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Fornberg's algorithm: weights `c[k][j]` for the `k`-th derivative at `x0`
/// from samples at `nodes`, for all `k <= max_order`.
pub fn fornberg(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights for the `m`-th derivative at offset `at` from integer offsets
/// `offsets`, scaled by `h^-m`.
pub fn stencil(m: usize, at: f64, offsets: &[i64], h: f64) -> Vec<f64> {
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let scale = h.powi(-(m as i32));
    fornberg(at, &nodes, m).swap_remove(m).into_iter().map(|w| w * scale).collect()
}

/// `m`-th derivative of uniformly spaced samples with formal accuracy `order`
/// (even). Central stencils in the interior, one-sided stencils of
/// `m + order` points near the ends.
pub fn derivative(values: &[Complex64], h: f64, m: usize, order: usize) -> Result<Vec<Complex64>> {
    let n = values.len();
    let order = order.max(2) + order % 2;
    let half = m.div_ceil(2) + order / 2 - 1;
    let width_side = m + order;
    if n < width_side.max(2 * half + 1) {
        return Err(Error::DegenerateGrid(format!(
            "{n} points cannot support a derivative of order {m} at accuracy {order}"
        )));
    }
    let central_offsets: Vec<i64> = (-(half as i64)..=half as i64).collect();
    let central = stencil(m, 0.0, &central_offsets, h);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, slot) in out.iter_mut().enumerate() {
        if i >= half && i + half < n {
            *slot = central
                .iter()
                .zip(&values[i - half..=i + half])
                .map(|(w, v)| v * w)
                .sum();
        } else {
            let start = if i < half { 0 } else { n - width_side };
            let offsets: Vec<i64> = (0..width_side as i64).collect();
            let w = stencil(m, (i - start) as f64, &offsets, h);
            *slot = w.iter().zip(&values[start..start + width_side]).map(|(w, v)| v * w).sum();
        }
    }
    Ok(out)
}

/// `m`-th derivative at `x0` evaluated from the closed form `f` with a
/// central stencil of accuracy `order` and step `h`.
pub fn derivative_at<F: Fn(f64) -> Complex64>(f: F, x0: f64, h: f64, m: usize, order: usize) -> Complex64 {
    let half = (m.div_ceil(2) + order / 2 - 1) as i64;
    let offsets: Vec<i64> = (-half..=half).collect();
    let w = stencil(m, 0.0, &offsets, h);
    offsets.iter().zip(&w).map(|(&o, w)| f(x0 + o as f64 * h) * *w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_stencils() {
        let w = stencil(2, 0.0, &[-1, 0, 1], 1.0);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = stencil(1, 0.0, &[0, 1, 2, 3, 4], 1.0);
        let expect = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_exponential() {
        let h = 1e-2;
        let vals: Vec<Complex64> = (0..200).map(|i| Complex64::new((-(i as f64) * h).exp(), 0.0)).collect();
        let d1 = derivative(&vals, h, 1, 4).unwrap();
        let d2 = derivative(&vals, h, 2, 4).unwrap();
        for i in 0..200 {
            assert!((d1[i] + vals[i]).norm() < 1e-8, "{i}");
            assert!((d2[i] - vals[i]).norm() < 1e-6, "{i}");
        }
        assert!(derivative(&vals[..3], h, 2, 4).is_err());
    }
}
