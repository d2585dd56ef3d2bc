use serde::{Deserialize, Serialize};

use super::{scale_condition_residual, PowerLawPotential};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};

/// Trajectories with `q` below this are treated as having hit the
/// singularity of `q^s`, `s < 0`.
pub const Q_GUARD: f64 = 1e-8;

/// `D = H t - q p / 2`
pub fn dilatation(q: f64, p: f64, t: f64, h_value: f64) -> f64 {
    h_value * t - 0.5 * q * p
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub ts: Vec<f64>,
    pub qs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `int_0^t g(1 + s/2) q^s dt'` along the path.
    pub predicted_drift: Vec<f64>,
    pub energy_drift: f64,
}

/// Adaptive Dormand–Prince flow of `H = p^2 + g q^s`: `q' = 2p`,
/// `p' = -V'(q)`. The predicted dilatation drift is integrated alongside.
pub fn integrate_flow(v: &PowerLawPotential, q0: f64, p0: f64, t_end: f64, tol: f64) -> Result<FlowTrajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be finite and non-negative, got {t_end}")));
    }
    let positive = v.needs_positive_q();
    if positive && !(q0 > 0.0) {
        return Err(Error::InvalidParameter(format!("q0 must be positive for s = {}, got {q0}", v.s)));
    }
    let force = v.observable().d_q();
    let rate = scale_condition_residual(v);
    let opts = OdeOptions { rtol: tol, atol: tol * 1e-3, ..Default::default() };
    let tr = ode::integrate(
        |_t, y, d| {
            d[0] = 2.0 * y[1];
            d[1] = -force.eval(y[0], 0.0, 0.0);
            d[2] = rate.eval(y[0], 0.0, 0.0);
        },
        0.0,
        &[q0, p0, 0.0],
        t_end,
        &opts,
        |t, y| {
            if positive && y[0] < Q_GUARD {
                Err(Error::SingularityReached(format!("q = {} at t = {t}", y[0])))
            } else {
                Ok(())
            }
        },
    )?;
    let energy = |q: f64, p: f64| p * p + v.value(q);
    let e0 = energy(q0, p0);
    let mut out = FlowTrajectory::default();
    let mut worst: f64 = 0.0;
    for (t, y) in tr.ts.iter().zip(&tr.ys) {
        out.ts.push(*t);
        out.qs.push(y[0]);
        out.ps.push(y[1]);
        out.predicted_drift.push(y[2]);
        worst = worst.max((energy(y[0], y[1]) - e0).abs());
    }
    out.energy_drift = if e0 != 0.0 { worst / e0.abs() } else { worst };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// `max |D(t) - D(0)|`
    pub drift: f64,
    /// `max |int_0^t g(1 + s/2) q^s|`
    pub predicted_drift: f64,
    /// `max |measured - predicted| / max |predicted|` (absolute when the
    /// prediction vanishes)
    pub mismatch: f64,
    pub energy_drift: f64,
    pub steps: usize,
}

pub fn dilatation_drift(v: &PowerLawPotential, q0: f64, p0: f64, t_end: f64, tol: f64) -> Result<DriftReport> {
    let tr = integrate_flow(v, q0, p0, t_end, tol)?;
    let h = |q: f64, p: f64| p * p + v.value(q);
    let d0 = dilatation(q0, p0, 0.0, h(q0, p0));
    let mut drift: f64 = 0.0;
    let mut predicted: f64 = 0.0;
    let mut diff: f64 = 0.0;
    for i in 0..tr.ts.len() {
        let (q, p, t) = (tr.qs[i], tr.ps[i], tr.ts[i]);
        let measured = dilatation(q, p, t, h(q, p)) - d0;
        drift = drift.max(measured.abs());
        predicted = predicted.max(tr.predicted_drift[i].abs());
        diff = diff.max((measured - tr.predicted_drift[i]).abs());
    }
    let mismatch = if predicted > 0.0 { diff / predicted } else { diff };
    Ok(DriftReport { drift, predicted_drift: predicted, mismatch, energy_drift: tr.energy_drift, steps: tr.ts.len() })
}
