//! Radial momentum in curvilinear coordinates: the connection term that
//! keeps `p_r = -i(d/dr + omega)` symmetric under a weighted measure.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::{GridFunction, Weight};
use crate::quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Determinant of the metric as a function of the coordinate of interest
/// (the others held fixed at generic values).
#[derive(Clone)]
pub enum Metric {
    Flat,
    /// `g = r^2`
    Polar,
    /// `g = r^4 sin^2 theta`
    Spherical,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Flat => "flat",
            Metric::Polar => "polar",
            Metric::Spherical => "spherical",
            Metric::Custom(_) => "custom",
        }
    }

    /// Radial measure weight `sqrt(g)` with angles factored out.
    pub fn radial_weight(&self) -> Option<Weight> {
        match self {
            Metric::Flat => Some(Weight::Unit),
            Metric::Polar => Some(Weight::Power(1)),
            Metric::Spherical => Some(Weight::Power(2)),
            Metric::Custom(_) => None,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "flat" | "cartesian" => Ok(Metric::Flat),
            "polar" => Ok(Metric::Polar),
            "spherical" => Ok(Metric::Spherical),
            other => Err(Error::InvalidMetric(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub coordinate: String,
    pub weight: Weight,
    pub metric: Metric,
}

impl MeasureSpec {
    pub fn polar_radial() -> Self {
        MeasureSpec { coordinate: "r".into(), weight: Weight::Power(1), metric: Metric::Polar }
    }

    pub fn spherical_radial() -> Self {
        MeasureSpec { coordinate: "r".into(), weight: Weight::Power(2), metric: Metric::Spherical }
    }

    pub fn flat() -> Self {
        MeasureSpec { coordinate: "x".into(), weight: Weight::Unit, metric: Metric::Flat }
    }
}

/// `omega_j(x) = (1/2) d_j log sqrt(g)`, the real part of the connection.
#[derive(Clone)]
pub struct Connection {
    metric: Metric,
    coordinate: usize,
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Connection({}, {})", self.metric.name(), self.coordinate)
    }
}

impl Connection {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match (&self.metric, self.coordinate) {
            (Metric::Flat, _) | (Metric::Polar, 1) => Ok(0.0),
            (Metric::Polar, 0) => positive(x).map(|r| 0.5 / r),
            (Metric::Spherical, 0) => positive(x).map(|r| 1.0 / r),
            // d_theta log sqrt(sin^2 theta) / 2
            (Metric::Spherical, 1) => {
                let s = x.sin();
                if s == 0.0 {
                    return Err(Error::InvalidMetric(format!("sin(theta) vanishes at {x}")));
                }
                Ok(0.5 * x.cos() / s)
            }
            (Metric::Spherical, 2) => Ok(0.0),
            (Metric::Custom(g), _) => {
                let h = 1e-5 * (1.0 + x.abs());
                let samples: Vec<f64> = (-2..=2).map(|k| g(x + k as f64 * h)).collect();
                if let Some(bad) = samples.iter().find(|v| !(**v > 0.0)) {
                    return Err(Error::InvalidMetric(format!("metric determinant {bad} near {x}")));
                }
                let logs: Vec<Complex64> = samples.iter().map(|v| Complex64::new(0.5 * v.ln(), 0.0)).collect();
                let w = fd::stencil(1, 0.0, &[-2, -1, 0, 1, 2], h);
                Ok(0.5 * w.iter().zip(&logs).map(|(w, l)| l.re * w).sum::<f64>())
            }
            (m, j) => Err(Error::InvalidMetric(format!("{} metric has no coordinate {j}", m.name()))),
        }
    }
}

fn positive(r: f64) -> Result<f64> {
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::InvalidMetric(format!("metric determinant vanishes at r = {r}")))
    }
}

/// The connection term fixed by `2 Re(omega_j) = d_j log sqrt(g)`.
/// Coordinate 0 is radial.
pub fn connection_condition(metric: &Metric, coordinate: usize) -> Result<Connection> {
    let c = Connection { metric: metric.clone(), coordinate };
    // surface unknown coordinates immediately
    if !matches!(metric, Metric::Custom(_)) {
        c.eval(1.0)?;
    }
    Ok(c)
}

/// Values and 8th-order derivatives of a function supported inside the grid.
fn support_checked(f: &GridFunction, name: &str) -> Result<(f64, Vec<Complex64>)> {
    let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let tiny = 1e-14 * scale.max(1e-300);
    for (&r, v) in f.xs().iter().zip(f.values()) {
        if r <= 0.0 && v.norm() > tiny {
            return Err(Error::SingularSupport(format!("{name} is nonzero at r = {r}")));
        }
    }
    if f.first().norm() > tiny || f.last().norm() > tiny {
        return Err(Error::Precondition(format!("{name} must vanish at both ends of the grid")));
    }
    let h = f
        .uniform_step()
        .ok_or_else(|| Error::DegenerateGrid("uniform grid required".into()))?;
    Ok((h, fd::derivative(f.values(), h, 1, 8)?))
}

fn omega_at<W: Fn(f64) -> f64>(omega: &W, r: f64, active: bool) -> f64 {
    if active {
        omega(r)
    } else {
        0.0
    }
}

/// `(f, p_r g) - (p_r f, g)` under `r dr` with `p_r = -i(d/dr + omega)`.
pub fn radial_symmetry_defect<W: Fn(f64) -> f64>(omega: W, f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    weighted_symmetry_defect(Weight::Power(1), omega, f, g)
}

/// [`radial_symmetry_defect`] under `w(r) dr`.
pub fn weighted_symmetry_defect<W: Fn(f64) -> f64>(
    weight: Weight,
    omega: W,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch("defect of functions on different grids".into()));
    }
    let (_, df) = support_checked(f, "f")?;
    let (_, dg) = support_checked(g, "g")?;
    let w = quadrature::weights(f.xs())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..f.len() {
        let r = f.xs()[j];
        let (fv, gv) = (f.values()[j], g.values()[j]);
        let active = r > 0.0 && (fv.norm() > 0.0 || gv.norm() > 0.0);
        if !active {
            continue;
        }
        let om = omega_at(&omega, r, active);
        let pg = -I * (dg[j] + om * gv);
        let pf = -I * (df[j] + om * fv);
        acc += (fv.conj() * pg - pf.conj() * gv) * (w[j] * weight.at(r));
    }
    Ok(acc)
}

/// `int conj(f) g dr` (no measure weight), the unit of the defect.
pub fn flat_overlap(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    let w = quadrature::weights(f.xs())?;
    Ok(f.values().iter().zip(g.values()).zip(&w).map(|((a, b), w)| a.conj() * b * *w).sum())
}

/// `max |([r, p_r] - i) f|` over the grid.
pub fn commutator_preservation_check<W: Fn(f64) -> f64>(omega: W, f: &GridFunction) -> Result<f64> {
    let (h, df) = support_checked(f, "f")?;
    let rf: Vec<Complex64> = f.xs().iter().zip(f.values()).map(|(r, v)| v * *r).collect();
    let drf = fd::derivative(&rf, h, 1, 8)?;
    let mut worst: f64 = 0.0;
    for j in 0..f.len() {
        let r = f.xs()[j];
        let v = f.values()[j];
        let active = r > 0.0 && (v.norm() > 0.0 || rf[j].norm() > 0.0 || drf[j].norm() > 0.0);
        let om = omega_at(&omega, r, active);
        let r_p_f = r * (-I * (df[j] + om * v));
        let p_r_f = -I * (drf[j] + om * rf[j]);
        worst = worst.max((r_p_f - p_r_f - I * v).norm());
    }
    Ok(worst)
}
