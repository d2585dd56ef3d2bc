//! Self-adjoint extensions of one-dimensional quantum operators: deficiency
//! indices, boundary conditions, spectra, the scale anomaly and the classical
//! dilatation checks.
//!
//! Units default to `hbar = 1`, `2m = 1`, so the free Hamiltonian is
//! `-d^2/dx^2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anomaly;
pub mod boundary;
pub mod classical;
pub mod deficiency;
pub mod discrete;
pub mod domain;
pub mod error;
pub mod extension;
pub mod fd;
pub mod geometry;
pub mod grid;
pub mod ode;
pub mod quadrature;
pub mod spectral;

pub use num_complex::Complex64;

pub use anomaly::{anomaly_quadrature, apply_dilatation, heisenberg_correction, AnomalyReport};
pub use boundary::{boundary_form_hamiltonian, boundary_form_momentum};
pub use classical::{poisson_bracket, MonomialObservable, PowerLawPotential};
pub use deficiency::{solve_deficiency, Classification, DeficiencyReport};
pub use discrete::{ParadoxReport, Quantity};
pub use domain::{BoundaryCondition, Interval, OperatorKind, OperatorSpec, RobinParameter, UnitSystem};
pub use error::{Error, Result};
pub use extension::{halfline_bc_from_unitary, momentum_bc_from_unitary, ExtensionParameter};
pub use geometry::{Metric, MeasureSpec};
pub use grid::{inner_product, Bump, ExpPoly, GridFunction, GridFunctionJson, Profile, Weight};
pub use spectral::{reflection_coefficient, SpectrumResult};

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
