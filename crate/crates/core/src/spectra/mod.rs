//! Periodic fields on `T^1` and `T^2` and their spectral norms.
//!
//! Integer frequencies stand in for `R^n`; dyadic blocks follow
//! `Q_j = {2^{j-1} < |k| <= 2^j}` with strict lower and inclusive upper edges.

mod blocks;
mod field;
mod norms;

pub use blocks::{block_index, DyadicBlocks};
pub use field::{frequency, SpectralField};
pub use norms::{
    embedding_ratio_sweep, extremal_nikolskii_field, halpha_norm, halpha_weights, interp_norm, interp_weights,
    ln_brackets, nikolskii_norm, nikolskii_norm_sq_with, nikolskii_norm_with, weighted_norm, EmbeddingRatioRow,
    EmbeddingSweep, RowVerdict,
};
