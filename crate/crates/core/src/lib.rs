//! Numerical toolkit for subspace perturbation bounds of self-adjoint
//! operators.
//!
//! Given a real symmetric operator `A`, an isolated spectral component
//! selected by an interval set `sigma` with gap `d`, and a symmetric
//! perturbation `V` with `||V|| < d/2`, the crate computes the exact maximal
//! angle between the unperturbed and perturbed spectral subspaces and
//! certifies it against a family of estimating functions of `x = ||V|| / d`:
//! the piecewise-arcsin bound `m_star` built on the kappa partition of
//! `[0, 1/2)`, the logarithmic bound `m_ms`, and the arcsin bound `m_kmm`.
//! Supporting machinery covers subspace geometry (angular operators, direct
//! rotations, spectral angles), Sylvester equations with the `pi/2` norm
//! certificate, Riccati residuals, projection paths along the coupling
//! homotopy, and a truncated harmonic-oscillator demonstration.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); concrete `f64` aliases live at the crate root.

// indexed loops mirror the textbook statements of the matrix algorithms;
// negated comparisons are deliberate so NaN inputs fail validation
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod matrix;
pub mod oscillator;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod sylvester;

pub use error::{Error, Result};
pub use scalar::{real, Real};

/// `f64` working aliases.
pub type Matrix64 = matrix::Matrix<f64>;
pub type SymmetricMatrix64 = matrix::SymmetricMatrix<f64>;
pub type SpectralSet64 = spectral::SpectralSet<f64>;
pub type Projector64 = geometry::Projector<f64>;
pub type PerturbationProblem64 = lab::PerturbationProblem<f64>;
pub type AnalysisRecord64 = lab::AnalysisRecord<f64>;
pub type Constants64 = bounds::Constants<f64>;
pub type OscillatorModel64 = oscillator::OscillatorModel<f64>;

/// `f32` aliases for the low-precision lane.
pub type Matrix32 = matrix::Matrix<f32>;
pub type SymmetricMatrix32 = matrix::SymmetricMatrix<f32>;
