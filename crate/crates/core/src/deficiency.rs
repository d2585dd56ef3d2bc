//! Deficiency indices of the catalog operators.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{Interval, OperatorKind, OperatorSpec};
use crate::error::{Error, Result};
use crate::grid::{linspace, ExpPoly, GridFunction, Weight};
use crate::quadrature;

/// Default number of samples for deficiency basis functions.
pub const DEFAULT_GRID_N: usize = 10_001;

/// Cutoffs, in units of the decay length `1/lambda`, for the tail test.
pub const DEFAULT_SCHEDULE: [f64; 3] = [10.0, 20.0, 40.0];

/// Half-line grids extend this many decay lengths of `|psi|^2`.
const TAIL_DECAY_LENGTHS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    EssentiallySelfAdjoint,
    HasExtensions { param_dim: usize },
    NoExtensions,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::EssentiallySelfAdjoint => "essentially_self_adjoint",
            Classification::HasExtensions { .. } => "has_extensions",
            Classification::NoExtensions => "no_extensions",
        }
    }
}

/// Von Neumann's classification from the deficiency indices.
pub fn classify(n_plus: usize, n_minus: usize) -> Classification {
    match (n_plus, n_minus) {
        (0, 0) => Classification::EssentiallySelfAdjoint,
        (p, m) if p == m => Classification::HasExtensions { param_dim: p * p },
        _ => Classification::NoExtensions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1` or `-1`.
    pub fn factor(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A normalized solution of `T^dagger psi = +- i lambda psi`.
#[derive(Debug, Clone)]
pub struct DeficiencyFunction {
    pub tag: String,
    pub sign: Sign,
    pub closed_form: ExpPoly,
    pub samples: GridFunction,
}

#[derive(Debug, Clone)]
pub struct DeficiencyReport {
    pub op: OperatorSpec,
    pub n_plus: usize,
    pub n_minus: usize,
    pub lambda: f64,
    pub basis_plus: Vec<DeficiencyFunction>,
    pub basis_minus: Vec<DeficiencyFunction>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub tag: String,
    pub xs: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReportJson {
    pub n_plus: usize,
    pub n_minus: usize,
    pub lambda: f64,
    pub classification: String,
    pub param_dim: usize,
    pub basis: Vec<BasisJson>,
}

impl DeficiencyReport {
    pub fn indices(&self) -> (usize, usize) {
        (self.n_plus, self.n_minus)
    }

    pub fn basis(&self) -> impl Iterator<Item = &DeficiencyFunction> {
        self.basis_plus.iter().chain(&self.basis_minus)
    }

    /// JSON view. `stride` thins the sampled basis functions (1 keeps all).
    pub fn to_json(&self, stride: usize) -> DeficiencyReportJson {
        let stride = stride.max(1);
        let basis = self
            .basis()
            .map(|b| {
                let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
                let xs = b.samples.xs();
                let re: Vec<f64> = b.samples.values().iter().map(|v| v.re).collect();
                let im: Vec<f64> = b.samples.values().iter().map(|v| v.im).collect();
                BasisJson { tag: b.tag.clone(), xs: pick(xs), re: pick(&re), im: pick(&im) }
            })
            .collect();
        DeficiencyReportJson {
            n_plus: self.n_plus,
            n_minus: self.n_minus,
            lambda: self.lambda,
            classification: self.classification.name().to_string(),
            param_dim: match self.classification {
                Classification::HasExtensions { param_dim } => param_dim,
                _ => 0,
            },
            basis,
        }
    }
}

/// Candidate closed-form solution before the integrability test.
struct Candidate {
    tag: String,
    sign: Sign,
    form: ExpPoly,
    /// Decay rate of `|psi|^2` towards +infinity (negative when growing).
    decay: f64,
}

/// Solutions of the deficiency equations, in closed form, for every catalog
/// operator. Exponents are measured from the left endpoint.
fn candidates(op: &OperatorSpec, lambda: f64) -> Result<Vec<Candidate>> {
    let one = Complex64::new(1.0, 0.0);
    let shifted = |rate: Complex64, a: f64| ExpPoly::exp((-rate * a).exp(), rate);
    match (op.kind, &op.interval) {
        (OperatorKind::Momentum, _) | (OperatorKind::TimeOperator, Interval::HalfLine { .. }) => {
            // -i hbar psi' = +- i lambda psi  =>  psi = exp(-+ (lambda/hbar) x)
            let k = lambda / op.units.momentum_scale();
            let a = op.interval.start().unwrap_or(0.0);
            let var = if op.kind == OperatorKind::TimeOperator { "(E-E0)" } else { "(x-a)" };
            Ok(vec![
                Candidate {
                    tag: format!("psi_plus = N exp(-{k} {var})"),
                    sign: Sign::Plus,
                    form: shifted(-one * k, a),
                    decay: 2.0 * k,
                },
                Candidate {
                    tag: format!("psi_minus = N exp({k} {var})"),
                    sign: Sign::Minus,
                    form: shifted(one * k, a),
                    decay: -2.0 * k,
                },
            ])
        }
        (OperatorKind::FreeHamiltonian, Interval::HalfLine { a }) => {
            // -(hbar^2/2m) psi'' = +- i lambda psi; keep the root with Re k < 0
            let kappa = (lambda / op.units.energy_scale()).sqrt() / std::f64::consts::SQRT_2;
            let k_plus = Complex64::new(-kappa, kappa);
            let k_minus = Complex64::new(-kappa, -kappa);
            Ok(vec![
                Candidate {
                    tag: format!("psi_plus = N exp({kappa}(i-1)(x-a))"),
                    sign: Sign::Plus,
                    form: shifted(k_plus, *a),
                    decay: 2.0 * kappa,
                },
                Candidate {
                    tag: format!("psi_minus = N exp({kappa}(-i-1)(x-a))"),
                    sign: Sign::Minus,
                    form: shifted(k_minus, *a),
                    decay: 2.0 * kappa,
                },
            ])
        }
        (kind, interval) => Err(Error::UnsupportedOperator(format!(
            "{} on {} is not in the catalog",
            kind.name(),
            interval.name()
        ))),
    }
}

/// Exact `int_a^b |psi|^2` for a single-exponential closed form.
fn closed_norm_sq(form: &ExpPoly, a: f64, b: Option<f64>) -> f64 {
    let term = &form.terms[0];
    let amp2 = term.coeffs[0].norm_sqr();
    let r = 2.0 * term.rate.re;
    match b {
        Some(b) if r.abs() < 1e-300 => amp2 * (b - a),
        Some(b) => amp2 * ((r * b).exp() - (r * a).exp()) / r,
        None => -amp2 * (r * a).exp() / r,
    }
}

fn sample_grid(interval: &Interval, decay: f64, n: usize) -> Vec<f64> {
    match *interval {
        Interval::Finite { a, b } => linspace(a, b, n),
        Interval::HalfLine { a } => linspace(a, a + TAIL_DECAY_LENGTHS / decay, n),
        Interval::FullLine => linspace(-1.0, 1.0, n),
    }
}

pub fn solve_deficiency(op: &OperatorSpec, lambda: f64) -> Result<DeficiencyReport> {
    solve_deficiency_on_grid(op, lambda, DEFAULT_GRID_N)
}

/// [`solve_deficiency`] with basis functions sampled on `n` points.
pub fn solve_deficiency_on_grid(op: &OperatorSpec, lambda: f64, n: usize) -> Result<DeficiencyReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if n < 5 {
        return Err(Error::DegenerateGrid(format!("need at least 5 samples, got {n}")));
    }
    let mut basis_plus = Vec::new();
    let mut basis_minus = Vec::new();
    for cand in candidates(op, lambda)? {
        let scale = cand.decay.abs().max(1e-12);
        let schedule: Vec<f64> = DEFAULT_SCHEDULE.iter().map(|c| c / scale * 2.0).collect();
        let probe = Arc::new(cand.form.clone());
        let probe_xs = match op.interval {
            Interval::FullLine => linspace(-1.0, 1.0, 5),
            _ => linspace(op.interval.start().unwrap(), op.interval.start().unwrap() + 1.0, 5),
        };
        let probe_fn = GridFunction::from_profile(probe, probe_xs, Weight::Unit)?;
        if !tail_integrability(&probe_fn, &op.interval, &schedule)? {
            continue;
        }
        let a = op.interval.start().unwrap_or(0.0);
        let norm = closed_norm_sq(&cand.form, a, op.interval.end()).sqrt();
        let form = cand.form.scaled(Complex64::new(1.0 / norm, 0.0));
        let xs = sample_grid(&op.interval, cand.decay, n);
        let samples = GridFunction::from_profile(Arc::new(form.clone()), xs, Weight::Unit)?;
        let f = DeficiencyFunction { tag: cand.tag, sign: cand.sign, closed_form: form, samples };
        match cand.sign {
            Sign::Plus => basis_plus.push(f),
            Sign::Minus => basis_minus.push(f),
        }
    }
    let (n_plus, n_minus) = (basis_plus.len(), basis_minus.len());
    Ok(DeficiencyReport {
        op: *op,
        n_plus,
        n_minus,
        lambda,
        basis_plus,
        basis_minus,
        classification: classify(n_plus, n_minus),
    })
}

/// Partial norms `int |f|^2` over growing windows, using the closed-form
/// extender of `f`.
///
/// Windows are `[a, a + X]` on a half-line, `[-X, X]` on the full line and
/// `[a, min(a + X, b)]` on a finite interval. Returns true when the last two
/// partial norms agree to relative `1e-8`.
pub fn tail_integrability(f: &GridFunction, interval: &Interval, schedule: &[f64]) -> Result<bool> {
    if schedule.len() < 3 {
        return Err(Error::InvalidSchedule(format!("need at least 3 cutoffs, got {}", schedule.len())));
    }
    if schedule.iter().any(|c| !(*c > 0.0) || !c.is_finite()) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("cutoffs must be positive, finite and increasing".into()));
    }
    let ext = f
        .extender()
        .ok_or_else(|| Error::Precondition("tail test needs a closed-form extender".into()))?;
    let density = |x: f64| Complex64::new(ext.eval(x).norm_sqr(), 0.0);
    let partial = |cut: f64| -> f64 {
        let (lo, hi) = match *interval {
            Interval::HalfLine { a } => (a, a + cut),
            Interval::Finite { a, b } => (a, (a + cut).min(b)),
            Interval::FullLine => (-cut, cut),
        };
        quadrature::integrate(density, lo, hi, 256, 16).re
    };
    let norms: Vec<f64> = schedule.iter().map(|&c| partial(c)).collect();
    let last = norms[norms.len() - 1];
    let prev = norms[norms.len() - 2];
    if !last.is_finite() || !prev.is_finite() {
        return Ok(false);
    }
    if last == 0.0 {
        return Ok(true);
    }
    Ok((last - prev).abs() / last.abs() < 1e-8)
}

/// Largest interior residual `|(T^dagger -+ i lambda) psi|` over the basis,
/// with `T^dagger` applied by second-order central differences.
pub fn verify_deficiency_numerically(op: &OperatorSpec, report: &DeficiencyReport) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for b in report.basis() {
        let xs = b.samples.xs();
        let v = b.samples.values();
        if xs.len() < 3 {
            return Err(Error::DegenerateGrid("residual check needs 3 points".into()));
        }
        let target = i * report.lambda * b.sign.factor();
        for j in 1..xs.len() - 1 {
            let (hl, hr) = (xs[j] - xs[j - 1], xs[j + 1] - xs[j]);
            let applied = match op.kind {
                OperatorKind::Momentum | OperatorKind::TimeOperator => {
                    -i * op.units.momentum_scale() * (v[j + 1] - v[j - 1]) / (hl + hr)
                }
                OperatorKind::FreeHamiltonian => {
                    let d2 = ((v[j + 1] - v[j]) / hr - (v[j] - v[j - 1]) / hl) * (2.0 / (hl + hr));
                    -d2 * op.units.energy_scale()
                }
            };
            worst = worst.max((applied - target * v[j]).norm());
        }
    }
    Ok(worst)
}
