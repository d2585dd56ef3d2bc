use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

use saext_core::anomaly::{anomaly_quadrature, heisenberg_correction};
use saext_core::boundary::{boundary_form_hamiltonian, boundary_form_momentum};
use saext_core::classical::{
    dilatation_observable, poisson_bracket, scale_condition_residual, total_time_derivative, MonomialObservable,
    PowerLawPotential,
};
use saext_core::deficiency::{classify, solve_deficiency, tail_integrability, Classification, DEFAULT_SCHEDULE};
use saext_core::discrete::trace_commutator_check;
use saext_core::domain::{Interval, OperatorKind, OperatorSpec, RobinParameter, UnitSystem};
use saext_core::extension::{
    alpha_closed_form, assemble_domain_element, halfline_bc_from_unitary, log_derivative_at_start, momentum_ratio,
};
use saext_core::geometry::{commutator_preservation_check, flat_overlap, radial_symmetry_defect};
use saext_core::grid::{inner_product, linspace, Bump, ExpPoly, GridFunction, Weight};
use saext_core::spectral::{bound_state, momentum_spectrum, reflection_coefficient};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

/// Smooth random function on [0, 3].
fn smooth(coeffs: &[Complex64]) -> GridFunction {
    let coeffs = coeffs.to_vec();
    GridFunction::sample(
        move |x: f64| coeffs.iter().enumerate().map(|(k, a)| a * (k as f64 * x).cos()).sum::<Complex64>() + c(0.0, 0.1 * x),
        0.0,
        3.0,
        301,
    )
    .unwrap()
}

/// `e^{i theta x} (c0 + c1 cos 2 pi x + c2 sin 2 pi x)`, in D_theta on [0, 1].
fn twisted(theta: f64, k: [Complex64; 3]) -> GridFunction {
    GridFunction::sample(
        move |x: f64| {
            let per = k[0] + k[1] * (TAU * x).cos() + k[2] * (TAU * x).sin();
            Complex64::from_polar(1.0, theta * x) * per
        },
        0.0,
        1.0,
        201,
    )
    .unwrap()
}

/// `(c0 + c0 (alpha + 1) x + c2 x^2) e^{-x}` satisfies `f'(0) = alpha f(0)`.
fn robin_profile(alpha: f64, c0: Complex64, c2: Complex64) -> GridFunction {
    let form = ExpPoly::poly_exp(vec![c0, c0 * (alpha + 1.0), c2], c(-1.0, 0.0));
    GridFunction::sample(form, 0.0, 60.0, 12_001).unwrap()
}

fn bump_on(lo: f64, hi: f64, amp: Complex64) -> GridFunction {
    GridFunction::sample(Bump::with_amplitude(lo, hi, amp).unwrap(), 0.5, 3.5, 3001).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_conjugate_symmetry(a in prop::collection::vec(cplx(), 4), b in prop::collection::vec(cplx(), 4)) {
        let (f, g) = (smooth(&a), smooth(&b));
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 4.0 * f64::EPSILON * fg.norm().max(1.0));
    }

    #[test]
    fn inner_product_positive(a in prop::collection::vec(cplx(), 4)) {
        let f = smooth(&a);
        let ff = inner_product(&f, &f).unwrap();
        prop_assert!(ff.re >= 0.0);
        prop_assert!(ff.im == 0.0);
    }

    #[test]
    fn momentum_form_vanishes_on_same_theta(
        theta in 0.0..TAU,
        k1 in prop::array::uniform3(cplx()),
        k2 in prop::array::uniform3(cplx()),
    ) {
        let unit = Interval::unit();
        let d = boundary_form_momentum(&twisted(theta, k1), &twisted(theta, k2), &unit).unwrap();
        prop_assert!(d.norm() <= 1e-12, "{d}");
    }

    #[test]
    fn hamiltonian_form_vanishes_for_same_robin(
        alpha in -3.0..3.0f64,
        a0 in cplx(), a2 in cplx(), b0 in cplx(), b2 in cplx(),
    ) {
        let f = robin_profile(alpha, a0, a2);
        let g = robin_profile(alpha, b0, b2);
        let d = boundary_form_hamiltonian(&f, &g).unwrap();
        prop_assert!(d.norm() <= 1e-6, "{d}");
    }

    #[test]
    fn classification_rules(n_plus in 0usize..=5, n_minus in 0usize..=5) {
        let expected = if n_plus == 0 && n_minus == 0 {
            Classification::EssentiallySelfAdjoint
        } else if n_plus == n_minus {
            Classification::HasExtensions { param_dim: n_plus * n_plus }
        } else {
            Classification::NoExtensions
        };
        prop_assert_eq!(classify(n_plus, n_minus), expected);
    }

    #[test]
    fn momentum_basis_scales_with_lambda(lambda in 0.1..5.0f64, x in 0.0..1.0f64) {
        let report = solve_deficiency(&OperatorSpec::momentum_unit_interval(), lambda).unwrap();
        let plus = &report.basis_plus[0].closed_form;
        let minus = &report.basis_minus[0].closed_form;
        // ratio to the value at 0 removes the normalization
        let rp = plus.value(x) / plus.value(0.0);
        let rm = minus.value(x) / minus.value(0.0);
        prop_assert!((rp - c((-lambda * x).exp(), 0.0)).norm() <= 1e-12);
        prop_assert!((rm - c((lambda * x).exp(), 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn tail_verdicts_lambda_independent(lambda in 0.1..5.0f64) {
        let half = OperatorSpec::new(OperatorKind::Momentum, Interval::positive_half_line()).unwrap();
        let unit_report = solve_deficiency(&half, 1.0).unwrap();
        let report = solve_deficiency(&half, lambda).unwrap();
        prop_assert_eq!(report.indices(), unit_report.indices());
        // cutoffs measured in decay lengths 1/lambda
        let schedule: Vec<f64> = DEFAULT_SCHEDULE.iter().map(|c| c / lambda).collect();
        for r in [-lambda, lambda] {
            let f = GridFunction::sample(ExpPoly::exp(c(1.0, 0.0), c(r, 0.0)), 0.0, 10.0, 1001).unwrap();
            prop_assert_eq!(tail_integrability(&f, &Interval::positive_half_line(), &schedule).unwrap(), r < 0.0);
        }
    }

    #[test]
    fn halfline_alpha_identity(gamma in 0.0..TAU) {
        prop_assume!((gamma - PI).abs() > 1e-6);
        let ext = halfline_bc_from_unitary(gamma).unwrap();
        let alpha = ext.alpha.finite().unwrap();
        prop_assert!(ext.ratio_imag.abs() <= 1e-10);
        let one_plus_cos = 2.0 * (0.5 * gamma).cos().powi(2);
        prop_assert!((alpha * alpha * one_plus_cos - (1.0 - gamma.sin())).abs() <= 1e-10);
        prop_assert!((alpha - alpha_closed_form(gamma)).abs() <= 1e-10 * (1.0 + alpha.abs()));
        prop_assert!((momentum_ratio(gamma).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn extension_round_trip(gamma in 0.0..TAU, amp in cplx()) {
        prop_assume!((gamma - PI).abs() > 1e-3);
        let report = solve_deficiency(&OperatorSpec::hamiltonian_half_line(), 1.0).unwrap();
        let underlying = GridFunction::from_profile(
            Arc::new(Bump::with_amplitude(1.0, 3.0, amp).unwrap()),
            linspace(0.0, 40.0, 4001),
            Weight::Unit,
        )
        .unwrap();
        let xi = assemble_domain_element(&underlying, gamma, &report).unwrap();
        let alpha = halfline_bc_from_unitary(gamma).unwrap().alpha.finite().unwrap();
        let got = log_derivative_at_start(&xi).unwrap();
        prop_assert!((got - alpha).norm() <= 1e-8 * (1.0 + alpha.abs()), "{got} vs {alpha}");
    }

    #[test]
    fn reflection_unitary(k in 1e-3..100.0f64, alpha in -100.0..100.0f64) {
        let r = reflection_coefficient(k, RobinParameter::Finite(alpha)).unwrap();
        prop_assert!((r.r.norm() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn bound_state_iff_negative(alpha in -50.0..50.0f64) {
        prop_assume!(alpha != 0.0);
        let present = bound_state(alpha, 257).unwrap().is_some();
        prop_assert_eq!(present, alpha < 0.0);
    }

    #[test]
    fn spectrum_shift_covariance(theta in 0.0..TAU, n in -20i64..20) {
        let unit = Interval::unit();
        let shifted = momentum_spectrum(theta + TAU, &unit, n, n, 65).unwrap();
        let base = momentum_spectrum(theta, &unit, n + 1, n + 1, 65).unwrap();
        let (a, b) = (shifted.discrete[0].value, base.discrete[0].value);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn bracket_laws(
        f in small_monomial(), g in small_monomial(), h in small_monomial(),
    ) {
        prop_assert_eq!(poisson_bracket(&f, &g), poisson_bracket(&g, &f).scale(Rational64::from_integer(-1)));
        let jacobi = poisson_bracket(&f, &poisson_bracket(&g, &h))
            .add(&poisson_bracket(&g, &poisson_bracket(&h, &f)))
            .add(&poisson_bracket(&h, &poisson_bracket(&f, &g)));
        prop_assert!(jacobi.is_zero(), "{jacobi}");
        let leibniz = poisson_bracket(&f, &g.mul(&h))
            .sub(&poisson_bracket(&f, &g).mul(&h))
            .sub(&g.mul(&poisson_bracket(&f, &h)));
        prop_assert!(leibniz.is_zero(), "{leibniz}");
    }

    #[test]
    fn noether_consistency(g in -5i64..=5, num in -8i64..=8, den in 1i64..=3) {
        let v = PowerLawPotential::new(Rational64::from_integer(g), Rational64::new(num, den));
        let h = v.hamiltonian();
        let d = dilatation_observable(&h);
        prop_assert_eq!(total_time_derivative(&d, &h), scale_condition_residual(&v));
    }

    #[test]
    fn trace_commutator_always_zero(seed in any::<u64>(), n in 2usize..16) {
        let r = trace_commutator_check(n, 3, 1.0, seed).unwrap();
        prop_assert!(r.get("max_rel_trace").unwrap().re <= 1e-12);
    }
}

fn small_monomial() -> impl Strategy<Value = MonomialObservable> {
    let term = (-3i64..=3, -2i64..=3, 1i64..=2, -2i32..=3, 0u32..=2).prop_map(|(k, qn, qd, pp, tp)| {
        MonomialObservable::monomial(Rational64::from_integer(k), Rational64::new(qn, qd), pp, tp)
    });
    prop::collection::vec(term, 1..=3).prop_map(|ts| ts.iter().fold(MonomialObservable::zero(), |acc, t| acc.add(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn anomaly_t_independent(alpha in -4.0..-0.25f64, t1 in -10.0..10.0f64, t2 in -10.0..10.0f64) {
        let a = anomaly_quadrature(alpha, t1).unwrap();
        let b = anomaly_quadrature(alpha, t2).unwrap();
        let za = Complex64::new(a.anomaly, a.anomaly_imag);
        let zb = Complex64::new(b.anomaly, b.anomaly_imag);
        prop_assert!((za - zb).norm() <= 1e-10, "{za} vs {zb}");
        prop_assert!(a.anomaly_imag.abs() <= 1e-10, "{}", a.anomaly_imag);
    }

    #[test]
    fn anomaly_local(lo in 0.5..2.0f64, width in 0.5..2.0f64, alpha in -3.0..3.0f64, amp in cplx()) {
        let bump = Bump::with_amplitude(lo, lo + width, amp).unwrap();
        let psi = GridFunction::from_profile(Arc::new(bump), linspace(0.0, 6.0, 1201), Weight::Unit).unwrap();
        let corr = heisenberg_correction(&psi, RobinParameter::Finite(alpha)).unwrap();
        prop_assert!(corr.norm() <= 1e-8, "{corr}");
    }

    #[test]
    fn defect_sesquilinear(
        lo1 in 0.6..1.5f64, lo2 in 0.6..1.5f64, w1 in 0.5..1.5f64, w2 in 0.5..1.5f64,
        a in cplx(), b in cplx(), eps in -1.0..1.0f64,
    ) {
        let omega = move |r: f64| (0.5 + eps) / r;
        let f1 = bump_on(lo1, lo1 + w1, c(1.0, 0.0));
        let f2 = bump_on(lo2, lo2 + w2, c(0.3, -0.7));
        let g = bump_on(lo2, lo2 + w1, c(1.0, 0.5));
        let comb = GridFunction::new(
            f1.xs().to_vec(),
            f1.values().iter().zip(f2.values()).map(|(x, y)| a * x + b * y).collect(),
            Weight::Unit,
        )
        .unwrap();
        let lhs = radial_symmetry_defect(omega, &comb, &g).unwrap();
        let d1 = radial_symmetry_defect(omega, &f1, &g).unwrap();
        let d2 = radial_symmetry_defect(omega, &f2, &g).unwrap();
        let rhs = a.conj() * d1 + b.conj() * d2;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn defect_linear_response(lo in 0.6..1.5f64, w in 0.5..1.5f64, eps in prop_oneof![-0.5..-0.01f64, 0.01..0.5f64]) {
        let f = bump_on(lo, lo + w, c(1.0, 0.0));
        let g = bump_on(lo + 0.1, lo + w + 0.3, c(0.4, 0.9));
        let d = radial_symmetry_defect(move |r| (0.5 + eps) / r, &f, &g).unwrap();
        let predicted = c(0.0, -2.0) * flat_overlap(&f, &g).unwrap();
        let slope = d / eps;
        prop_assert!((slope - predicted).norm() <= 0.05 * predicted.norm(), "{slope} vs {predicted}");
    }

    #[test]
    fn commutator_any_omega(c0 in -3.0..3.0f64, c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, k in 0.1..4.0f64) {
        let f = bump_on(1.0, 2.5, c(0.8, 0.2));
        let omega = move |r: f64| c0 + c1 / r + c2 * (k * r).sin();
        prop_assert!(commutator_preservation_check(omega, &f).unwrap() <= 1e-6);
    }
}

#[test]
fn momentum_form_generic_across_theta() {
    let unit = Interval::unit();
    let k = [c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.3)];
    let d = boundary_form_momentum(&twisted(0.3, k), &twisted(1.7, k), &unit).unwrap();
    assert!(d.norm() > 1e-3);
}

#[test]
fn units_scale_basis() {
    let units = UnitSystem::new(2.0, 1.0).unwrap();
    let op = OperatorSpec::with_units(OperatorKind::Momentum, Interval::unit(), units).unwrap();
    let report = solve_deficiency(&op, 1.0).unwrap();
    let f = &report.basis_plus[0].closed_form;
    let r = f.value(1.0) / f.value(0.0);
    assert!((r.re - (-0.5f64).exp()).abs() < 1e-12);
}
