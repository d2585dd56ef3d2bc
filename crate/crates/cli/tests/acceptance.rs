//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

mod common;

use std::error::Error;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use saext_core::anomaly::{anomaly_quadrature, heisenberg_correction};
use saext_core::classical::{dilatation_drift, poisson_bracket, MonomialObservable, PowerLawPotential};
use saext_core::deficiency::{solve_deficiency_on_grid, verify_deficiency_numerically};
use saext_core::discrete::{cosine_basis_momentum_matrix, eigenvector_commutator_demo, trace_commutator_check};
use saext_core::domain::{Interval, OperatorKind, OperatorSpec, RobinParameter};
use saext_core::extension::{halfline_bc_from_unitary, momentum_bc_from_unitary};
use saext_core::geometry::{commutator_preservation_check, flat_overlap, radial_symmetry_defect};
use saext_core::grid::{inner_product, linspace, Bump, GridFunction, Weight};
use saext_core::spectral::{
    bound_state, bound_state_shooting, discretized_momentum_eigs, reflection_coefficient, well_spectrum, well_spectrum_fd,
    DEFAULT_GRID_N,
};
use saext_core::Complex64;

type Check = Result<(bool, String), Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 20_241_018;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_amp(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn deficiency_catalog() -> Check {
    let table = [
        ("momentum [0,1]", OperatorKind::Momentum, Interval::unit(), (1, 1)),
        ("momentum R+", OperatorKind::Momentum, Interval::positive_half_line(), (1, 0)),
        ("momentum R", OperatorKind::Momentum, Interval::FullLine, (0, 0)),
        ("hamiltonian R+", OperatorKind::FreeHamiltonian, Interval::positive_half_line(), (1, 1)),
        ("time operator", OperatorKind::TimeOperator, Interval::half_line(0.0)?, (1, 0)),
    ];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, kind, interval, expected) in table {
        let op = OperatorSpec::new(kind, interval)?;
        let report = solve_deficiency_on_grid(&op, 1.0, 10_000)?;
        let residual = verify_deficiency_numerically(&op, &report)?;
        let idx = report.indices();
        ok &= idx == expected && residual <= 1e-4;
        worst = worst.max(residual);
        parts.push(format!("{name} {idx:?}"));
    }
    Ok((ok, format!("{}; max residual {worst:.1e}", parts.join(", "))))
}

fn extension_maps() -> Check {
    let count = 10_000;
    let mut ratio_dev: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut literal: f64 = 0.0;
    let mut skipped = 0;
    for j in 0..count {
        let gamma = TAU * j as f64 / count as f64;
        ratio_dev = ratio_dev.max((momentum_bc_from_unitary(gamma)?.ratio.norm() - 1.0).abs());
        let ext = halfline_bc_from_unitary(gamma)?;
        let Some(alpha) = ext.alpha.finite() else {
            skipped += 1;
            continue;
        };
        // 1 + cos g written as 2 cos^2(g/2) to avoid cancellation near g = pi
        let stable = alpha * alpha * 2.0 * (0.5 * gamma).cos().powi(2) - (1.0 - gamma.sin());
        identity = identity.max(stable.abs());
        literal = literal.max((alpha * alpha * (1.0 + gamma.cos()) - (1.0 - gamma.sin())).abs());
    }
    Ok((
        ratio_dev <= 1e-12 && identity <= 1e-10,
        format!(
            "max ||ratio|-1| {ratio_dev:.1e}; max identity error {identity:.1e} ({literal:.1e} with 1+cos evaluated directly); {skipped} Dirichlet point skipped"
        ),
    ))
}

/// Summed and worst relative error of the three lowest discrete modes.
fn momentum_mode_errors(theta: f64, size: usize) -> Result<(f64, f64), Box<dyn Error>> {
    let eigs = discretized_momentum_eigs(theta, size, 3)?;
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    for lam in eigs {
        let p = (-6..=6)
            .map(|n| TAU * n as f64 + theta)
            .min_by(|a, b| (lam - a).norm().total_cmp(&(lam - b).norm()))
            .unwrap();
        let err = (lam - p).norm();
        sum += err;
        worst = worst.max(err / p.abs().max(1.0));
    }
    Ok((sum, worst))
}

fn momentum_spectrum() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, theta) in [("0", 0.0), ("pi/3", PI / 3.0), ("pi", PI)] {
        let (e1, rel) = momentum_mode_errors(theta, 4096)?;
        let (e2, _) = momentum_mode_errors(theta, 8192)?;
        let ratio = e1 / e2;
        ok &= rel <= 1e-2 && (ratio - 2.0).abs() <= 0.3;
        parts.push(format!("theta={label}: rel {rel:.1e}, ratio {ratio:.3}"));
    }
    Ok((ok, parts.join("; ")))
}

fn bound_states() -> Check {
    let mut worst: f64 = 0.0;
    for alpha in [-0.25, -0.5, -1.0, -2.0, -3.0] {
        let e = bound_state_shooting(alpha, (-4.0 * alpha * alpha, -0.25 * alpha * alpha), None)?;
        worst = worst.max((e + alpha * alpha).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut present = 0;
    for k in 0..100 {
        let alpha = if k == 0 { 0.0 } else { rng.gen_range(0.0..50.0) };
        if bound_state(alpha, DEFAULT_GRID_N)?.is_some() {
            present += 1;
        }
    }
    Ok((
        worst <= 1e-6 && present == 0,
        format!("max shooting error {worst:.1e}; {present}/100 non-negative alpha gave a bound state"),
    ))
}

fn scattering() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = rng.gen_range(1e-3..100.0);
        let alpha = rng.gen_range(-100.0..100.0);
        worst = worst.max(reflection_coefficient(k, RobinParameter::Finite(alpha))?.r.norm() - 1.0);
    }
    let mut limits = true;
    for k in [1e-3, 0.5, 1.0, 7.0, 100.0] {
        limits &= reflection_coefficient(k, RobinParameter::Finite(0.0))?.r == c(1.0, 0.0);
        limits &= reflection_coefficient(k, RobinParameter::Dirichlet)?.r == c(-1.0, 0.0);
    }
    Ok((
        worst <= 1e-14 && limits,
        format!("max |R|-1 {worst:.1e} over 1000 draws; Neumann R=1 and Dirichlet R=-1 exact: {limits}"),
    ))
}

fn anomaly_identity() -> Check {
    let mut residual: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for alpha in [-0.25, -0.5, -1.0, -2.0, -4.0] {
        let base = anomaly_quadrature(alpha, 0.0)?;
        residual = residual.max((base.anomaly + alpha * alpha).abs());
        let z0 = c(base.anomaly, base.anomaly_imag);
        for t in [-10.0, -1.0, 0.5, 2.0, 7.3, 100.0] {
            let r = anomaly_quadrature(alpha, t)?;
            drift = drift.max((c(r.anomaly, r.anomaly_imag) - z0).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut correction: f64 = 0.0;
    for _ in 0..20 {
        let lo = rng.gen_range(0.5..3.0);
        let hi = lo + rng.gen_range(0.5..2.0);
        let bump = Bump::with_amplitude(lo, hi, random_amp(&mut rng))?;
        let psi = GridFunction::from_profile(Arc::new(bump), linspace(0.0, 6.0, 1201), Weight::Unit)?;
        let alpha = RobinParameter::Finite(rng.gen_range(-3.0..3.0));
        correction = correction.max(heisenberg_correction(&psi, alpha)?.norm());
    }
    Ok((
        residual <= 1e-6 && drift <= 1e-10 && correction <= 1e-8,
        format!("max |A+alpha^2| {residual:.1e}; max |A(t)-A(0)| {drift:.1e} for |t|<=100; max bump correction {correction:.1e}"),
    ))
}

fn paradoxes() -> Check {
    let mut trace: f64 = 0.0;
    for (k, n) in [8, 64].into_iter().enumerate() {
        let r = trace_commutator_check(n, 100, 1.0, SEED + k as u64)?;
        trace = trace.max(r.get("max_rel_trace").ok_or("missing max_rel_trace")?.re);
    }
    let mut even: f64 = 0.0;
    let mut odd: f64 = 0.0;
    for l in [1.0, 2.0, 4.0] {
        let r = cosine_basis_momentum_matrix(l, 12)?;
        for m in 0..12 {
            for n in 0..12 {
                let d = r.defect[(m, n)].norm();
                if (m + n) % 2 == 0 {
                    even = even.max(d);
                } else {
                    odd = odd.max((d - 4.0 / l).abs());
                }
            }
        }
    }
    let mut expectation: f64 = 0.0;
    let mut target: f64 = f64::INFINITY;
    for theta in [0.5, 1.0, 2.0] {
        let r = eigenvector_commutator_demo(theta, 256, 1.0)?;
        expectation = expectation.max(r.get("commutator_expectation").ok_or("missing expectation")?.value().norm());
        target = target.min(r.get("target_i_hbar").ok_or("missing target")?.value().norm());
    }
    Ok((
        trace <= 1e-10 && even <= 1e-12 && odd <= 1e-10 && expectation <= 1e-8,
        format!(
            "max rel trace {trace:.1e}; cosine defect even {even:.1e}, odd ||d|-4/l| {odd:.1e}; eigenvector (psi,[X,P]psi) {expectation:.1e} vs |target| {target:.3}"
        ),
    ))
}

fn well_spectrum_check() -> Check {
    let levels = 3;
    let errors = |cells: usize| -> Result<Vec<f64>, Box<dyn Error>> {
        let eigs = well_spectrum_fd(1.0, cells, levels)?;
        Ok(eigs.iter().enumerate().map(|(k, e)| (e - ((k + 1) as f64 * PI).powi(2)).abs()).collect())
    };
    let coarse = errors(200)?;
    let fine = errors(400)?;
    let orders: Vec<f64> = coarse.iter().zip(&fine).map(|(a, b)| (a / b).log2()).collect();
    let spectrum = well_spectrum(1.0, 1, 5, DEFAULT_GRID_N)?;
    let mut gram: f64 = 0.0;
    for a in &spectrum.discrete {
        for b in &spectrum.discrete {
            let expect = if a.n == b.n { 1.0 } else { 0.0 };
            gram = gram.max((inner_product(&a.eigenfunction, &b.eigenfunction)? - expect).norm());
        }
    }
    let ok = orders.iter().all(|p| (p - 2.0).abs() <= 0.2) && gram <= 1e-10;
    let shown: Vec<String> = orders.iter().map(|p| format!("{p:.3}")).collect();
    Ok((ok, format!("orders [{}]; max |<psi_m,psi_n>-delta| {gram:.1e}", shown.join(", "))))
}

fn random_monomial(rng: &mut ChaCha8Rng) -> MonomialObservable {
    let terms = rng.gen_range(1..=3);
    (0..terms).fold(MonomialObservable::zero(), |acc, _| {
        let t = MonomialObservable::monomial(
            Rational64::from_integer(rng.gen_range(-3..=3)),
            Rational64::new(rng.gen_range(-2..=3), rng.gen_range(1..=2)),
            rng.gen_range(-2..=3),
            rng.gen_range(0..=2),
        );
        acc.add(&t)
    })
}

fn classical() -> Check {
    let free = dilatation_drift(&PowerLawPotential::integer(1, -2), 1.0, 0.3, 5.0, 1e-10)?;
    let mut mismatch: f64 = 0.0;
    for s in [-3, -1, 0, 1, 2] {
        let r = dilatation_drift(&PowerLawPotential::integer(1, s), 1.0, 0.3, 5.0, 1e-10)?;
        mismatch = mismatch.max(r.mismatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let minus_one = Rational64::from_integer(-1);
    let mut violations = 0;
    for _ in 0..1000 {
        let (f, g, h) = (random_monomial(&mut rng), random_monomial(&mut rng), random_monomial(&mut rng));
        let antisym = poisson_bracket(&f, &g) == poisson_bracket(&g, &f).scale(minus_one);
        let jacobi = poisson_bracket(&f, &poisson_bracket(&g, &h))
            .add(&poisson_bracket(&g, &poisson_bracket(&h, &f)))
            .add(&poisson_bracket(&h, &poisson_bracket(&f, &g)))
            .is_zero();
        let leibniz = poisson_bracket(&f, &g.mul(&h))
            .sub(&poisson_bracket(&f, &g).mul(&h))
            .sub(&g.mul(&poisson_bracket(&f, &h)))
            .is_zero();
        if !(antisym && jacobi && leibniz) {
            violations += 1;
        }
    }
    Ok((
        free.drift <= 1e-7 && mismatch <= 1e-5 && violations == 0,
        format!(
            "s=-2 drift {:.1e}; max relative mismatch {mismatch:.1e}; {violations}/1000 triples violate a bracket law",
            free.drift
        ),
    ))
}

fn bump_on(lo: f64, hi: f64, amp: Complex64) -> Result<GridFunction, Box<dyn Error>> {
    Ok(GridFunction::sample(Bump::with_amplitude(lo, hi, amp)?, 0.5, 3.5, 3001)?)
}

fn geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut with_connection: f64 = 0.0;
    let mut without: f64 = 0.0;
    for _ in 0..50 {
        let mut draw = || {
            let lo = rng.gen_range(0.6..1.5);
            let hi = lo + rng.gen_range(0.5..1.5);
            (lo, hi, c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        };
        let (a, b, u) = draw();
        let (p, q, v) = draw();
        let f = bump_on(a, b, u)?;
        let g = bump_on(p, q, v)?;
        with_connection = with_connection.max(radial_symmetry_defect(|r| 0.5 / r, &f, &g)?.norm());
        let flat = radial_symmetry_defect(|_| 0.0, &f, &g)?;
        without = without.max((flat - c(0.0, 1.0) * flat_overlap(&f, &g)?).norm());
    }
    let mut commutator: f64 = 0.0;
    for _ in 0..20 {
        let (c0, c1, c2, k) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0));
        let f = bump_on(1.0, 2.5, c(0.8, 0.2))?;
        commutator = commutator.max(commutator_preservation_check(move |r| c0 + c1 / r + c2 * (k * r).sin(), &f)?);
    }
    Ok((
        with_connection <= 1e-8 && without <= 1e-6 && commutator <= 1e-6,
        format!(
            "max defect with 1/(2r) {with_connection:.1e}; max |defect - i<f,g>| at omega=0 {without:.1e}; max commutator error {commutator:.1e}"
        ),
    ))
}

fn cli_determinism() -> Check {
    let mut failures = Vec::new();
    for (schema, args) in common::GOLDEN {
        if let Err(e) = common::golden_check(schema, args) {
            failures.push(format!("`{}`: {e}", args.join(" ")));
        }
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} golden runs identical and schema-valid", common::GOLDEN.len())
        } else {
            failures.join("; ")
        },
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("deficiency catalog", deficiency_catalog),
        ("extension maps", extension_maps),
        ("momentum spectrum", momentum_spectrum),
        ("bound state", bound_states),
        ("scattering unitarity", scattering),
        ("anomaly identity", anomaly_identity),
        ("paradoxes", paradoxes),
        ("well spectrum", well_spectrum_check),
        ("classical dilatation", classical),
        ("geometry", geometry),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {detail} [{:.2}s]", k + 1, start.elapsed().as_secs_f64());
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
