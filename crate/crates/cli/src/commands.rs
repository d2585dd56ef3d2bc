use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use saext_core::anomaly::{anomaly_quadrature, ANOMALY_STEP};
use saext_core::classical::{
    dilatation, dilatation_drift, dilatation_observable, integrate_flow, scale_condition_residual,
    total_time_derivative, PowerLawPotential,
};
use saext_core::deficiency::{solve_deficiency_on_grid, verify_deficiency_numerically};
use saext_core::discrete::{
    commuting_observables_demo, cosine_basis_momentum_matrix, eigenvector_commutator_demo, trace_commutator_check,
};
use saext_core::domain::OperatorKind;
use saext_core::extension::{alpha_closed_form, halfline_bc_from_unitary, momentum_bc_from_unitary};
use saext_core::fd;
use saext_core::geometry::{
    commutator_preservation_check, connection_condition, flat_overlap, weighted_symmetry_defect, Metric,
};
use saext_core::grid::{inner_product, linspace, Bump, GridFunction, Weight};
use saext_core::spectral::{
    bound_state, bound_state_shooting, momentum_spectrum, reflection_coefficient, robin_spectrum, well_spectrum,
    Eigenpair, SpectrumResult, HALF_LINE_EXTENT,
};
use saext_core::{Complex64, Error, Interval, OperatorSpec, RobinParameter, UnitSystem};

use crate::args::*;
use crate::error::CliError;
use crate::output::{cplx, fmt_f64, Outcome, Table};

pub const DEFAULT_GRID_N: usize = 10_001;
pub const GEOMETRY_GRID_N: usize = 4001;

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub units: UnitSystem,
    /// Explicit tolerance from `--tol` or `SAEXT_TOL`.
    pub tol: Option<f64>,
    pub grid_n: Option<usize>,
    pub seed: u64,
}

impl Context {
    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn grid_or(&self, default: usize) -> usize {
        self.grid_n.unwrap_or(default)
    }

    fn natural_units(&self, command: &str) -> Result<(), CliError> {
        if self.units != UnitSystem::default() {
            return Err(CliError::Usage(format!("{command} works in natural units hbar = 2m = 1 only")));
        }
        Ok(())
    }
}

/// Tolerance each command checks against when no `--tol` is given, by
/// subcommand name.
pub fn default_tolerance(command: &str) -> Option<f64> {
    match command {
        "deficiency" | "spectrum" => Some(1e-4),
        "extend" => Some(1e-10),
        "boundstate" | "anomaly" => Some(1e-6),
        "scatter" => Some(1e-14),
        "paradox" | "geometry" => Some(1e-8),
        "classical" => Some(1e-5),
        _ => None,
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("payloads are objects"),
    }
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> Result<T, CliError> {
    s.parse::<T>().map_err(|e| CliError::Usage(e.message()))
}

pub fn run(command: &Command, ctx: &Context) -> Result<Outcome, CliError> {
    match command {
        Command::Deficiency(a) => deficiency(a, ctx),
        Command::Extend(a) => extend(a, ctx),
        Command::Spectrum(a) => spectrum(a, ctx),
        Command::Boundstate(a) => boundstate(a, ctx),
        Command::Scatter(a) => scatter(a, ctx),
        Command::Anomaly(a) => anomaly(a, ctx),
        Command::Paradox(a) => paradox(a, ctx),
        Command::Classical(a) => classical(a, ctx),
        Command::Geometry(a) => geometry(a, ctx),
        Command::Sweep(_) => Err(CliError::Usage("sweep cannot be nested".into())),
    }
}

fn deficiency(a: &DeficiencyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let kind: OperatorKind = parse(&a.op)?;
    let interval: Interval = parse(&a.interval)?;
    let op = OperatorSpec::with_units(kind, interval, ctx.units)?;
    let report = solve_deficiency_on_grid(&op, a.lambda, ctx.grid_or(DEFAULT_GRID_N))?;
    let residual = verify_deficiency_numerically(&op, &report)?;
    let tol = ctx.tol_or(1e-4);
    let view = report.to_json(a.stride);
    let mut out = obj(json!({
        "op": kind.name(),
        "interval": interval,
        "n_plus": view.n_plus,
        "n_minus": view.n_minus,
        "lambda": view.lambda,
        "classification": view.classification,
        "param_dim": view.param_dim,
        "residual": residual,
        "within_tol": residual <= tol,
    }));
    let mut table = Table::new(&["tag", "x", "re", "im"]);
    for b in &view.basis {
        for i in 0..b.xs.len() {
            table.push(vec![b.tag.clone(), fmt_f64(b.xs[i]), fmt_f64(b.re[i]), fmt_f64(b.im[i])]);
        }
    }
    out.insert("basis".into(), serde_json::to_value(&view.basis)?);
    Ok(Outcome::with_table(out, table))
}

fn extend(a: &ExtendArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("extend")?;
    let tol = ctx.tol_or(1e-10);
    let out = match a.operator.as_str() {
        "momentum" | "p" => {
            let m = momentum_bc_from_unitary(a.gamma)?;
            let dev = (m.ratio.norm() - 1.0).abs();
            json!({
                "operator": "momentum",
                "gamma": a.gamma,
                "bc_variant": m.boundary_condition().variant_name(),
                "value": m.theta,
                "ratio": cplx(m.ratio),
                "modulus_deviation": dev,
                "within_tol": dev <= tol,
            })
        }
        "hamiltonian" | "free_hamiltonian" | "H" => {
            let h = halfline_bc_from_unitary(a.gamma)?;
            let bc = h.boundary_condition();
            match h.alpha {
                RobinParameter::Finite(alpha) => {
                    let one_plus_cos = 2.0 * (0.5 * h.gamma).cos().powi(2);
                    let check = (alpha * alpha * one_plus_cos - (1.0 - h.gamma.sin())).abs();
                    json!({
                        "operator": "hamiltonian",
                        "gamma": a.gamma,
                        "bc_variant": bc.variant_name(),
                        "value": alpha,
                        "alpha_closed_form": alpha_closed_form(h.gamma),
                        "ratio_imag": h.ratio_imag,
                        "modulus_identity_error": check,
                        "within_tol": check <= tol && h.ratio_imag.abs() <= tol,
                    })
                }
                RobinParameter::Dirichlet => json!({
                    "operator": "hamiltonian",
                    "gamma": a.gamma,
                    "bc_variant": "dirichlet",
                    "value": null,
                    "alpha_closed_form": null,
                    "ratio_imag": h.ratio_imag,
                    "modulus_identity_error": null,
                    "within_tol": true,
                }),
            }
        }
        other => return Err(CliError::Usage(format!("extend supports momentum or hamiltonian, got '{other}'"))),
    };
    Ok(Outcome::new(obj(out)))
}

/// Largest interior residual of `L psi - value psi`, relative to `|value| + 1`.
fn eigen_residual(pair: &Eigenpair, second_order: bool) -> Result<f64, CliError> {
    let f = &pair.eigenfunction;
    let h = f.uniform_step().ok_or_else(|| Error::DegenerateGrid("uniform grid required".into()))?;
    let m = if second_order { 2 } else { 1 };
    let d = fd::derivative(f.values(), h, m, 4)?;
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for j in 4..f.len().saturating_sub(4) {
        let lhs = if second_order { -d[j] } else { -i * d[j] };
        worst = worst.max((lhs - pair.value * f.values()[j]).norm());
    }
    let scale = f.values().iter().fold(0.0f64, |s, v| s.max(v.norm())).max(1e-300);
    Ok(worst / (scale * (1.0 + pair.value.abs())))
}

fn spectrum(a: &SpectrumArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let grid_n = ctx.grid_or(DEFAULT_GRID_N);
    let tol = ctx.tol_or(1e-4);
    let (result, second_order, scale): (SpectrumResult, bool, f64) = match a.op.as_str() {
        "momentum" | "p" => {
            let interval: Interval = parse(&a.interval)?;
            (momentum_spectrum(a.theta, &interval, a.n_min, a.n_max, grid_n)?, false, ctx.units.momentum_scale())
        }
        "well" => (well_spectrum(a.a, a.n_min.max(1), a.n_max, grid_n)?, true, ctx.units.energy_scale()),
        "robin" => {
            let alpha: RobinParameter = parse(&a.alpha)?;
            (robin_spectrum(alpha, grid_n)?, true, ctx.units.energy_scale())
        }
        other => return Err(CliError::Usage(format!("spectrum supports momentum, well or robin, got '{other}'"))),
    };
    let mut discrete = Vec::new();
    let mut worst: f64 = 0.0;
    for pair in &result.discrete {
        let r = eigen_residual(pair, second_order)?;
        worst = worst.max(r);
        discrete.push(json!({ "n": pair.n, "value": pair.value * scale, "residual": r }));
    }
    let continuous = match result.continuous {
        Some(c) => {
            let mut samples = Vec::new();
            for j in 1..=a.k_count {
                let k = a.k_max * j as f64 / a.k_count as f64;
                samples.push(json!({ "k": k, "phase": c.reflection_phase(k)? }));
            }
            json!({ "threshold": c.threshold * scale, "phase_samples": samples })
        }
        None => Value::Null,
    };
    let params = json!({
        "op": a.op,
        "theta": a.theta,
        "n_min": a.n_min,
        "n_max": a.n_max,
        "grid_n": grid_n,
    });
    let out = obj(json!({
        "params": params,
        "discrete": discrete,
        "continuous": continuous,
        "max_residual": worst,
        "within_tol": worst <= tol,
    }));
    let table = if a.eigenfunctions {
        let mut t = Table::new(&["n", "x", "re", "im"]);
        for pair in &result.discrete {
            for (x, v) in pair.eigenfunction.xs().iter().zip(pair.eigenfunction.values()) {
                t.push(vec![pair.n.to_string(), fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im)]);
            }
        }
        t
    } else {
        let mut t = Table::new(&["n", "value", "residual"]);
        for (pair, row) in result.discrete.iter().zip(&discrete) {
            t.push(vec![pair.n.to_string(), fmt_f64(pair.value * scale), row["residual"].to_string()]);
        }
        t
    };
    Ok(Outcome::with_table(out, table))
}

fn boundstate(a: &BoundstateArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let grid_n = ctx.grid_or(DEFAULT_GRID_N);
    let tol = ctx.tol_or(1e-6);
    let scale = ctx.units.energy_scale();
    let out = match bound_state(a.alpha, grid_n)? {
        None => json!({ "alpha": a.alpha, "bound_state": null, "reason": "alpha >= 0" }),
        Some(b) => {
            let alpha = a.alpha;
            let a2 = alpha * alpha;
            // the only scale is alpha^2, so this bracket holds the root for any alpha
            let shot = bound_state_shooting(alpha, (-4.0 * a2, -0.25 * a2), None)?;
            let norm = inner_product(&b.psi, &b.psi)?.re;
            let err = (shot - b.energy).abs();
            json!({
                "alpha": alpha,
                "E": b.energy * scale,
                "E_shooting": shot * scale,
                "shooting_error": err * scale,
                "norm": norm,
                "x_max": HALF_LINE_EXTENT / alpha.abs(),
                "grid_n": grid_n,
                "within_tol": err <= tol,
            })
        }
    };
    Ok(Outcome::new(obj(out)))
}

fn robin_json(alpha: RobinParameter) -> Value {
    match alpha {
        RobinParameter::Finite(a) => json!(a),
        RobinParameter::Dirichlet => Value::Null,
    }
}

fn scatter(a: &ScatterArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("scatter")?;
    let alpha: RobinParameter = parse(&a.alpha)?;
    let tol = ctx.tol_or(1e-14);
    let r = reflection_coefficient(a.k, alpha)?;
    let dev = (r.r.norm() - 1.0).abs();
    let out = json!({
        "alpha": robin_json(alpha),
        "condition": if alpha == RobinParameter::Dirichlet { "dirichlet" } else { "robin" },
        "k": a.k,
        "R": cplx(r.r),
        "modulus": r.r.norm(),
        "phase": r.phase,
        "unitarity_error": dev,
        "within_tol": dev <= tol,
    });
    Ok(Outcome::new(obj(out)))
}

fn anomaly(a: &AnomalyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("anomaly")?;
    let tol = ctx.tol_or(1e-6);
    let r = anomaly_quadrature(a.alpha, a.t)?;
    let out = json!({
        "alpha": r.alpha,
        "t": r.t,
        "anomaly": r.anomaly,
        "anomaly_imag": r.anomaly_imag,
        "bound_energy": r.bound_energy,
        "residual": r.residual,
        "term_hd": cplx(r.term_hd),
        "term_hhd": cplx(r.term_hhd),
        "reference_r1": cplx(r.reference_r1),
        "reference_r2": cplx(r.reference_r2),
        "anomaly_fd": cplx(r.anomaly_fd),
        "grid_points": r.grid_points,
        "grid_step": ANOMALY_STEP / a.alpha.abs(),
        "within_tol": r.residual <= tol,
    });
    Ok(Outcome::new(obj(out)))
}

fn paradox(a: &ParadoxArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("paradox")?;
    let report = match a.id {
        1 => eigenvector_commutator_demo(a.theta, a.n.unwrap_or(256), 1.0)?,
        2 => trace_commutator_check(a.n.unwrap_or(8), a.trials, 1.0, ctx.seed)?,
        3 => commuting_observables_demo(a.l, a.n.unwrap_or(5))?,
        _ => cosine_basis_momentum_matrix(a.l, a.n.unwrap_or(12))?.summary(),
    };
    let mut table = Table::new(&["name", "re", "im", "tolerance"]);
    for q in &report.quantities {
        table.push(vec![q.name.clone(), fmt_f64(q.re), fmt_f64(q.im), fmt_f64(q.tolerance)]);
    }
    let out = obj(serde_json::to_value(&report)?);
    Ok(Outcome::with_table(out, table))
}

fn classical(a: &ClassicalArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("classical")?;
    let tol = ctx.tol_or(1e-5);
    let v = PowerLawPotential::from_f64(a.g, a.s)?;
    let report = dilatation_drift(&v, a.q0, a.p0, a.t_end, a.ode_tol)?;
    let h = v.hamiltonian();
    let residual = scale_condition_residual(&v);
    let noether = total_time_derivative(&dilatation_observable(&h), &h) == residual;
    let mut out = obj(json!({
        "s": v.s_f64(),
        "g": v.g_f64(),
        "hamiltonian": h.to_string(),
        "scale_residual": residual.to_string(),
        "conserved": residual.is_zero(),
        "noether_consistent": noether,
        "drift": report.drift,
        "predicted_drift": report.predicted_drift,
        "mismatch": report.mismatch,
        "energy_drift": report.energy_drift,
        "steps": report.steps,
        "within_tol": report.mismatch <= tol,
    }));
    if a.samples > 0 {
        let tr = integrate_flow(&v, a.q0, a.p0, a.t_end, a.ode_tol)?;
        let stride = (tr.ts.len() / a.samples).max(1);
        let samples: Vec<Value> = (0..tr.ts.len())
            .step_by(stride)
            .map(|i| {
                let (q, p, t) = (tr.qs[i], tr.ps[i], tr.ts[i]);
                json!({ "t": t, "q": q, "p": p, "D": dilatation(q, p, t, p * p + v.value(q)) })
            })
            .collect();
        out.insert("samples".into(), Value::Array(samples));
    }
    Ok(Outcome::new(out))
}

fn parse_probe(probe: &str) -> Result<(f64, f64), CliError> {
    let spec = probe
        .strip_prefix("bump:")
        .ok_or_else(|| CliError::Usage(format!("probe must look like bump:<a>,<b>, got '{probe}'")))?;
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("probe must look like bump:<a>,<b>, got '{probe}'")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad probe endpoint '{s}'")));
    Ok((num(parts[0])?, num(parts[1])?))
}

fn geometry(a: &GeometryArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.natural_units("geometry")?;
    let tol = ctx.tol_or(1e-8);
    let metric: Metric = parse(&a.metric)?;
    let weight = metric.radial_weight().unwrap_or(Weight::Unit);
    let (lo, hi) = parse_probe(&a.probe)?;
    let bump = Bump::new(lo, hi)?;
    let pad = 0.25 * (hi - lo);
    let xs = linspace(lo - pad, hi + pad, ctx.grid_or(GEOMETRY_GRID_N));
    let f = GridFunction::from_profile(Arc::new(bump), xs, Weight::Unit)?;
    let conn = connection_condition(&metric, 0)?;
    // the defect only evaluates omega where f is nonzero, i.e. inside (lo, hi)
    if lo <= 0.0 {
        return Err(Error::SingularSupport(format!("probe support [{lo}, {hi}] must lie in r > 0")).into());
    }
    let omega = |r: f64| conn.eval(r).unwrap_or(f64::NAN);
    let with = weighted_symmetry_defect(weight, omega, &f, &f)?;
    let without = weighted_symmetry_defect(weight, |_| 0.0, &f, &f)?;
    let overlap = flat_overlap(&f, &f)?;
    let comm = commutator_preservation_check(omega, &f)?;
    let mid = 0.5 * (lo + hi);
    let out = json!({
        "metric": metric.name(),
        "weight": weight.expr_id(),
        "probe": { "a": lo, "b": hi },
        "omega_at_center": { "r": mid, "omega": conn.eval(mid)? },
        "defect_with_connection": cplx(with),
        "defect_without_connection": cplx(without),
        "i_overlap": cplx(Complex64::new(0.0, 1.0) * overlap),
        "commutator_check": comm,
        "within_tol": with.norm() <= tol,
    });
    Ok(Outcome::new(obj(out)))
}
