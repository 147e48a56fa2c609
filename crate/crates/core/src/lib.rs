//! Numerics for generalized Sobolev (Hörmander) spaces `H^alpha` with
//! O-regularly varying weights `alpha`.
//!
//! * [`weights`]: weight trees, Matuszewska indices, interpolation parameters,
//!   dyadic integral tests for embeddings.
//! * [`spectra`]: periodic fields on `T^1`/`T^2`, `H^alpha` and Nikolskii norms,
//!   interpolation norms on the diagonal Fourier model.
//! * [`noise`]: Gaussian white noise with covariance and regularity checks.
//! * [`disk`]: Dirichlet problem for the Laplacian on the unit disk with rough
//!   boundary data, surrogate norms and a priori sweeps.
//! * [`stats`]: order statistics shared by the sweeps.

pub mod disk;
pub mod error;
pub mod noise;
pub mod spectra;
pub mod stats;
pub mod weights;

pub use error::{DiskError, NoiseError, SpectralError, WeightError};
pub use weights::WeightExpr;
