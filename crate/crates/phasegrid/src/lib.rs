//! Sampling and reconstruction operators on regular grids, together with
//! discrete and continuous Wigner-type phase-space transforms.
//!
//! The crate verifies, at desk scale, the closed-form limit objects attached
//! to sampled and reconstructed high-frequency sequences: which phase-space
//! measures arise under a given sampling/reconstruction pair, when
//! oscillation is preserved, folded onto the frequency lattice, or filtered
//! out entirely.
//!
//! Module map:
//! - [`grid`]: windowed fields on ℝ^d (d = 1, 2), spectral transforms,
//!   Fourier multipliers, Bessel potentials;
//! - [`profiles`]: the catalog of sampling/reconstruction profiles φ with
//!   pointwise Fourier evaluation, the lattice Gram function τ and its tails,
//!   duals, Riesz/orthonormal classification;
//! - [`operators`]: the sampling operator S_φ^h, reconstruction T_φ^h,
//!   discretization, orthogonal projection, norm certificates, and the
//!   generalized Poisson summation identity;
//! - [`testfn`]: separable phase-space test functions;
//! - [`wigner`]: phase-space pairings m^ε / M^ε, the Wigner transform and its
//!   lattice-periodized series, energy densities, oscillation diagnostics;
//! - [`measures`]: symbolic predicted limit measures and the transformations
//!   induced by sampling, reconstruction, composition and periodization;
//! - [`experiments`]: sequence families, scale schedules, the convergence
//!   harness and the named experiment registry.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod measures;
pub mod operators;
pub mod profiles;
pub mod testfn;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::{C64, ContinuousField, Dim, DiscreteField, SpatialWindow};
