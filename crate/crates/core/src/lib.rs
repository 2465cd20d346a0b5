//! Sampling discretization of the uniform norm on subspaces of trigonometric
//! polynomials.
//!
//! The crate is organised bottom-up:
//!
//! * [`freqset`] builds finite spectra `Q ⊂ Z^d` (boxes, lacunary sequences,
//!   hyperbolic crosses, sumset chains, random spectra).
//! * [`trigpoly`] holds sparse trigonometric polynomials with evaluation,
//!   products and grid-based norms.
//! * [`kernels`] builds Dirichlet, de la Vallée Poussin type and Riesz-product
//!   kernels whose coefficients equal one on a target spectrum.
//! * [`lpsolve`] is a dense simplex solver used by the estimators below.
//! * [`discretize`] estimates discretization constants of point sets and
//!   constructs ε-net point sets.
//! * [`experiments`] runs the seeded randomized lower-bound experiments.
//! * [`recovery`] implements the ℓ∞ (Chebyshev) sampling-recovery operator.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature
//! disabled everything runs sequentially and produces identical results.

pub mod discretize;
pub mod error;
pub mod experiments;
pub mod freqset;
pub mod kernels;
pub mod lpsolve;
pub mod par;
pub mod recovery;
pub mod rng;
pub mod trigpoly;

pub use error::{Error, Result};
pub use freqset::FrequencySet;
pub use trigpoly::{NormEstimate, NormKind, TrigPolynomial};

pub use num_complex::Complex64;
