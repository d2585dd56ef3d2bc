use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use saext_core::anomaly::anomaly_quadrature;
use saext_core::classical::{dilatation_drift, poisson_bracket, MonomialObservable, PowerLawPotential};
use saext_core::deficiency::{solve_deficiency_on_grid, verify_deficiency_numerically};
use saext_core::discrete::{cosine_basis_momentum_matrix, trace_commutator_check};
use saext_core::domain::{OperatorSpec, RobinParameter};
use saext_core::geometry::radial_symmetry_defect;
use saext_core::grid::{Bump, GridFunction};
use saext_core::spectral::{bound_state_shooting, discretized_momentum_eigs, reflection_coefficient, well_spectrum_fd};
use saext_core::Complex64;

fn deficiency(c: &mut Criterion) {
    let op = OperatorSpec::hamiltonian_half_line();
    c.bench_function("deficiency/hamiltonian_10k", |b| {
        b.iter(|| {
            let r = solve_deficiency_on_grid(black_box(&op), 1.0, 10_000).unwrap();
            verify_deficiency_numerically(&op, &r).unwrap()
        })
    });
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("discretized_momentum");
    g.sample_size(20);
    for n in [1024usize, 4096] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| discretized_momentum_eigs(black_box(1.0), n, 3).unwrap())
        });
    }
    g.finish();
    c.bench_function("well_fd/4000_cells", |b| b.iter(|| well_spectrum_fd(black_box(1.0), 4000, 5).unwrap()));
    c.bench_function("shooting/alpha=-1", |b| {
        b.iter(|| bound_state_shooting(black_box(-1.0), (-4.0, -0.25), None).unwrap())
    });
    c.bench_function("reflection", |b| {
        b.iter(|| reflection_coefficient(black_box(0.7), RobinParameter::Finite(-1.0)).unwrap())
    });
}

fn anomaly(c: &mut Criterion) {
    c.bench_function("anomaly/alpha=-1", |b| b.iter(|| anomaly_quadrature(black_box(-1.0), 0.5).unwrap()));
}

fn paradoxes(c: &mut Criterion) {
    c.bench_function("trace_commutator/64x10", |b| b.iter(|| trace_commutator_check(black_box(64), 10, 1.0, 7).unwrap()));
    c.bench_function("cosine_basis/12", |b| b.iter(|| cosine_basis_momentum_matrix(black_box(1.0), 12).unwrap()));
}

fn classical(c: &mut Criterion) {
    let v = PowerLawPotential::integer(1, -2);
    c.bench_function("dilatation_drift/s=-2", |b| {
        b.iter(|| dilatation_drift(black_box(&v), 1.0, 0.3, 5.0, 1e-10).unwrap())
    });
    let f = MonomialObservable::term(2, 3, 2, 1).add(&MonomialObservable::q());
    let h = v.hamiltonian();
    c.bench_function("poisson_bracket", |b| b.iter(|| poisson_bracket(black_box(&f), black_box(&h))));
}

fn geometry(c: &mut Criterion) {
    let f = GridFunction::sample(Bump::new(1.0, 2.0).unwrap(), 0.5, 3.5, 3001).unwrap();
    let g = GridFunction::sample(Bump::with_amplitude(1.2, 2.5, Complex64::new(0.3, 0.4)).unwrap(), 0.5, 3.5, 3001).unwrap();
    c.bench_function("radial_defect/3001", |b| {
        b.iter(|| radial_symmetry_defect(|r| 0.5 / r, black_box(&f), black_box(&g)).unwrap())
    });
}

criterion_group!(benches, deficiency, spectra, anomaly, paradoxes, classical, geometry);
criterion_main!(benches);
