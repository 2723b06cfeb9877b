//! symker: kernels, maximal operators and weighted pointwise-convergence
//! experiments for evolution equations on real hyperbolic 3-space.
//!
//! The library evaluates the heat, fractional-heat and fractional-Poisson
//! kernels of the shifted Laplacian on H³ (exactly and through independent
//! quadrature routes), their two-sided envelopes for general rank-one root
//! data, radial convolution and local maximal operators, a symbolic
//! classifier for radial weight classes, a numerical certification suite
//! for the kernel-class axioms, and the experiment harness behind the
//! `symker` command-line tool.

pub mod classcert;
pub mod convolution;
pub mod envelopes;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod halfspace;
pub mod hiprec;
pub mod kernels;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod weights;

pub use error::{Result, SymkerError};
pub use roots::{ReducedRoot, RootData};
