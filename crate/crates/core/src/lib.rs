//! Doubly periodic determinantal point processes on a rectangular torus.
//!
//! The library builds, validates, and samples the seven families of elliptic
//! determinantal point processes attached to the irreducible reduced affine
//! root systems (A, B, B∨, C, C∨, BC, D), together with their infinite-volume
//! strip limits, the Ginibre-like plane limits, and the three exactly solvable
//! one-component plasma models that sit on top of the A, C, and D families.
//!
//! Layering, bottom up:
//!
//! - [`theta`]: Jacobi theta functions, Dedekind eta, argument reduction,
//!   Jacobi's imaginary transformation.
//! - [`root_system`]: the seven family parameterizations, the row functions
//!   M_j, the Macdonald denominators, and the determinant identity.
//! - [`quadrature`]: deterministic tensor-product integration used by every
//!   numeric verification.
//! - [`orthogonality`]: closed-form norms for the M_j and the Gram-matrix
//!   checks behind the kernel construction.
//! - [`dpp`]: doubly periodic weights, partition functions, correlation
//!   kernels, correlation functions.
//! - [`sampler`]: exact chain-rule sampling of the projection DPPs and
//!   histogram/χ² validation helpers.
//! - [`limits`]: strip kernels, Ginibre-like kernels, Mittag–Leffler density
//!   profiles, and convergence scans.
//! - [`plasma`]: one-component plasma energies, solvability identities, exact
//!   partition functions, free-energy expansions, and the torus free-field
//!   comparison.
//! - [`suites`]: seeded verification suites aggregating the module-level
//!   identities into pass/fail reports (the CLI exposes these).

pub mod dpp;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod orthogonality;
pub mod plasma;
pub mod quadrature;
pub mod root_system;
pub mod sampler;
pub mod suites;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
