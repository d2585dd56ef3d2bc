//! Sampled complex functions on one-dimensional grids.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// A function known in closed form, so it can be evaluated anywhere
/// (including outside the grid it was sampled on).
pub trait Profile: Send + Sync {
    fn eval(&self, x: f64) -> Complex64;
}

impl<F> Profile for F
where
    F: Fn(f64) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: f64) -> Complex64 {
        self(x)
    }
}

/// `poly(x) * exp(rate * x)` with complex polynomial coefficients (lowest degree first).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coeffs: Vec<Complex64>,
    pub rate: Complex64,
}

/// A finite sum of [`ExpTerm`]s. Closed under differentiation, which is what
/// every catalog eigenfunction, deficiency solution and scattering state needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

impl ExpPoly {
    /// `amp * exp(rate * x)`
    pub fn exp(amp: Complex64, rate: Complex64) -> Self {
        ExpPoly { terms: vec![ExpTerm { coeffs: vec![amp], rate }] }
    }

    pub fn poly_exp(coeffs: Vec<Complex64>, rate: Complex64) -> Self {
        ExpPoly { terms: vec![ExpTerm { coeffs, rate }] }
    }

    pub fn plus(mut self, other: ExpPoly) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for term in &mut self.terms {
            for c in &mut term.coeffs {
                *c *= factor;
            }
        }
        self
    }

    pub fn derivative(&self) -> ExpPoly {
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let n = term.coeffs.len();
                let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
                for (k, c) in term.coeffs.iter().enumerate() {
                    coeffs[k] += term.rate * c;
                    if k > 0 {
                        coeffs[k - 1] += *c * k as f64;
                    }
                }
                ExpTerm { coeffs, rate: term.rate }
            })
            .collect();
        ExpPoly { terms }
    }

    pub fn nth_derivative(&self, order: usize) -> ExpPoly {
        (0..order).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| {
                let poly = term
                    .coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
                poly * (term.rate * x).exp()
            })
            .sum()
    }
}

impl Profile for ExpPoly {
    fn eval(&self, x: f64) -> Complex64 {
        self.value(x)
    }
}

/// Smooth bump `amp * exp(1 - 1/(1-u^2))` supported on `(a, b)`, `u` the
/// position rescaled to `(-1, 1)`. Peak value `amp` at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
    pub amp: Complex64,
}

impl Bump {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::with_amplitude(a, b, Complex64::new(1.0, 0.0))
    }

    pub fn with_amplitude(a: f64, b: f64, amp: Complex64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("bump support needs a < b, got ({a}, {b})")));
        }
        Ok(Bump { a, b, amp })
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let s = 1.0 - u * u;
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.amp * (1.0 - 1.0 / s).exp()
    }
}

impl Profile for Bump {
    fn eval(&self, x: f64) -> Complex64 {
        self.value(x)
    }
}

/// Measure weight `w(x)` attached to a grid function: `w = 1` or `w = x^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weight {
    #[default]
    Unit,
    Power(u32),
}

impl Weight {
    pub fn at(&self, x: f64) -> f64 {
        match *self {
            Weight::Unit => 1.0,
            Weight::Power(k) => x.powi(k as i32),
        }
    }

    /// Stable identifier used in the JSON and CSV encodings.
    pub fn expr_id(&self) -> String {
        match self {
            Weight::Unit => "1".to_string(),
            Weight::Power(1) => "x".to_string(),
            Weight::Power(k) => format!("x^{k}"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "1" | "" | "unit" => Ok(Weight::Unit),
            "x" | "r" => Ok(Weight::Power(1)),
            _ => {
                let k = s
                    .strip_prefix("x^")
                    .or_else(|| s.strip_prefix("r^"))
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| Error::Serialization(format!("unknown weight expression '{s}'")))?;
                Ok(if k == 0 { Weight::Unit } else { Weight::Power(k) })
            }
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expr_id())
    }
}

/// Complex samples on a strictly increasing grid with a measure weight.
///
/// A grid function built from a [`Profile`] keeps it as an *extender*: code
/// that needs values beyond the sampled range (tail tests, ghost points for
/// boundary stencils) evaluates the closed form instead of extrapolating.
#[derive(Clone)]
pub struct GridFunction {
    xs: Vec<f64>,
    values: Vec<Complex64>,
    weight: Weight,
    extender: Option<Arc<dyn Profile>>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("len", &self.xs.len())
            .field("range", &(self.xs.first(), self.xs.last()))
            .field("weight", &self.weight)
            .field("extended", &self.extender.is_some())
            .finish()
    }
}

/// `n` equally spaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<Complex64>, weight: Weight) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::DegenerateGrid(format!("need at least 2 points, got {}", xs.len())));
        }
        if xs.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} sample points but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateGrid("non-finite sample point".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid("sample points must be strictly increasing".into()));
        }
        if xs.iter().any(|&x| weight.at(x) < 0.0) {
            return Err(Error::InvalidParameter(format!("weight {weight} is negative on the grid")));
        }
        Ok(GridFunction { xs, values, weight, extender: None })
    }

    /// Samples `profile` on `xs` and keeps it as the extender.
    pub fn from_profile(profile: Arc<dyn Profile>, xs: Vec<f64>, weight: Weight) -> Result<Self> {
        let values = xs.iter().map(|&x| profile.eval(x)).collect();
        let mut f = GridFunction::new(xs, values, weight)?;
        f.extender = Some(profile);
        Ok(f)
    }

    /// Uniform sampling of `profile` on `[a, b]` with `n` points and unit weight.
    pub fn sample<P: Profile + 'static>(profile: P, a: f64, b: f64, n: usize) -> Result<Self> {
        GridFunction::from_profile(Arc::new(profile), linspace(a, b, n), Weight::Unit)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn with_weight(mut self, weight: Weight) -> Result<Self> {
        if self.xs.iter().any(|&x| weight.at(x) < 0.0) {
            return Err(Error::InvalidParameter(format!("weight {weight} is negative on the grid")));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn extender(&self) -> Option<&Arc<dyn Profile>> {
        self.extender.as_ref()
    }

    pub fn with_extender(mut self, extender: Arc<dyn Profile>) -> Self {
        self.extender = Some(extender);
        self
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn first(&self) -> Complex64 {
        self.values[0]
    }

    pub fn last(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    /// Evaluates at `x`, preferring the closed-form extender; otherwise `None`
    /// unless `x` is exactly a grid point.
    pub fn eval(&self, x: f64) -> Option<Complex64> {
        if let Some(p) = &self.extender {
            return Some(p.eval(x));
        }
        self.xs.iter().position(|&g| g == x).map(|i| self.values[i])
    }

    /// Constant step if the grid is uniform to relative tolerance `1e-9`.
    pub fn uniform_step(&self) -> Option<f64> {
        uniform_step(&self.xs)
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.weight == other.weight
            && self.xs.len() == other.xs.len()
            && self.xs.iter().zip(&other.xs).all(|(a, b)| a == b)
    }

    /// Pointwise map keeping grid and weight; the extender is dropped.
    pub fn map_values<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> GridFunction {
        GridFunction {
            xs: self.xs.clone(),
            values: self.xs.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect(),
            weight: self.weight,
            extender: None,
        }
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(inner_product(self, self)?.re.max(0.0).sqrt())
    }

    pub fn to_json(&self) -> GridFunctionJson {
        GridFunctionJson {
            xs: self.xs.clone(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
            weight: self.weight.expr_id(),
        }
    }

    pub fn from_json(json: &GridFunctionJson) -> Result<Self> {
        if json.re.len() != json.xs.len() || json.im.len() != json.xs.len() {
            return Err(Error::GridMismatch("xs, re and im must have equal length".into()));
        }
        let values = json.re.iter().zip(&json.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        GridFunction::new(json.xs.clone(), values, json.weight.parse()?)
    }

    /// CSV with header `x,re,im,w`, `w` holding `w(x)` sampled.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        out.write_record(["x", "re", "im", "w"]).map_err(ser)?;
        for (&x, v) in self.xs.iter().zip(&self.values) {
            out.write_record(&[
                x.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                self.weight.at(x).to_string(),
            ])
            .map_err(ser)?;
        }
        out.flush().map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Reads the CSV written by [`GridFunction::write_csv`]. The weight column
    /// is matched against `1`, `x` and `x^k` for small `k`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        let mut xs = Vec::new();
        let mut values = Vec::new();
        let mut ws = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(ser)?;
            if record.len() != 4 {
                return Err(Error::Serialization(format!("expected 4 columns, got {}", record.len())));
            }
            let field = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Serialization(format!("bad number '{}'", &record[i])))
            };
            xs.push(field(0)?);
            values.push(Complex64::new(field(1)?, field(2)?));
            ws.push(field(3)?);
        }
        let weight = (0..=4)
            .map(|k| if k == 0 { Weight::Unit } else { Weight::Power(k) })
            .find(|w| {
                xs.iter()
                    .zip(&ws)
                    .all(|(&x, &wx)| (w.at(x) - wx).abs() <= 1e-12 * (1.0 + wx.abs()))
            })
            .ok_or_else(|| Error::Serialization("weight column matches no known expression".into()))?;
        GridFunction::new(xs, values, weight)
    }
}

/// JSON encoding `{xs, re, im, weight}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionJson {
    pub xs: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub weight: String,
}

pub(crate) fn uniform_step(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let tol = 1e-9 * h.abs();
    xs.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= tol).then_some(h)
}

/// `int conj(f) g w dx` by composite quadrature (Simpson on uniform grids,
/// trapezoid otherwise).
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if f.len() < 2 || g.len() < 2 {
        return Err(Error::DegenerateGrid("inner product needs at least 2 points".into()));
    }
    if !f.same_grid(g) {
        return Err(Error::GridMismatch("inner product of functions on different grids".into()));
    }
    let weights = quadrature::weights(&f.xs)?;
    let w = f.weight;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..f.len() {
        acc += f.values[i].conj() * g.values[i] * (weights[i] * w.at(f.xs[i]));
    }
    Ok(acc)
}
