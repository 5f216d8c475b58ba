//! Pseudo-spectral laboratory for the fractional nonlinear Schrödinger
//! equation
//!
//! ```text
//! i ∂_t u + ν^{2σ} (-Δ)^σ u + μ |u|^{p-1} u = 0
//! ```
//!
//! on a periodic box. Linear and nonlinear sub-flows are integrated exactly
//! and composed by Strang splitting; all operators act spectrally.

// Guards of the form `!(x > 0.0)` are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod exponents;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod norms;
pub mod observables;
pub mod profile;
pub mod snapshot;
pub mod soliton;
pub mod symbol;
pub mod transform;

pub use error::{Error, Result};
pub use evolution::{
    evolve, linear_propagate, nonlinear_phase, scaling_transform, strang_step, EvolveConfig,
    ModelParams, Trajectory,
};
pub use exponents::{
    classify_regime, critical_exponents, is_admissible, strichartz_weight_exponent,
    verify_error_symbol_bound, Regime, RegimeReport,
};
pub use field::ComplexField;
pub use grid::Grid;
pub use lp::littlewood_paley_project;
pub use norms::{lebesgue_norm, sobolev_norm, Homogeneity};
pub use observables::{energy, mass, scattering_defect, spacetime_norm, SpacetimeNormSpec};
pub use symbol::{apply_multiplier, evaluate_symbol, SymbolSpec};
pub use transform::{modulate, spatial_shift};

pub use num_complex::Complex64;
