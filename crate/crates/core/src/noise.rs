//! Gaussian white noise on `T^1` and `T^2`, truncated at `|k_i| <= N/2`.
//!
//! Coefficients: `g_0` and the other self-conjugate modes are real standard
//! normals; on a half-space `g_k = (a + ib)/sqrt 2` with independent standard
//! normals `a, b`, and `g_{-k} = conj(g_k)`. Hence `E|g_k|^2 = 1` and, with the
//! pairing `xi(v) = sum g_k conj(v_k)`,
//!
//! `E[xi(v1) conj(xi(v2))] = (v1, v2)`
//!
//! with constant exactly 1 for the normalized-measure inner product
//! [`SpectralField::inner`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::NoiseError;
use crate::spectra::{nikolskii_norm_sq_with, DyadicBlocks, SpectralField};
use crate::stats::{mean_var, Summary};

/// Variance constant of the white noise under the pairing convention above.
pub const VARIANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSample {
    pub field: SpectralField,
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
    pub variance: f64,
}

/// Stream id of the ChaCha generator: one stream per `(dim, N)` under each seed.
fn stream_id(dim: usize, n: usize) -> u64 {
    ((dim as u64) << 48) | n as u64
}

/// Draws one truncated white-noise realization. Deterministic in `(dim, N, seed)`.
pub fn sample_white_noise(dim: usize, n: usize, seed: u64) -> Result<NoiseSample, NoiseError> {
    let zero = SpectralField::zeros(dim, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(dim, n));
    let len = zero.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    for p in 0..len {
        let q = zero.partner(p);
        if q == p {
            coeffs[p] = Complex64::new(rng.sample(StandardNormal), 0.0);
        } else if q > p {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let g = Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2;
            coeffs[p] = g;
            coeffs[q] = g.conj();
        }
    }
    let field = SpectralField::from_coeffs(dim, n, coeffs)?;
    debug_assert!(field.is_hermitian());
    Ok(NoiseSample { field, seed, n, dim, variance: VARIANCE })
}

/// Samples for consecutive seeds, in seed order regardless of scheduling.
pub fn sample_ensemble(dim: usize, n: usize, seeds: &[u64]) -> Result<Vec<NoiseSample>, NoiseError> {
    seeds.par_iter().map(|&s| sample_white_noise(dim, n, s)).collect()
}

/// `xi(v) = sum_k g_k conj(v_k)`.
pub fn pairing(xi: &SpectralField, v: &SpectralField) -> Complex64 {
    v.inner(xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub count: usize,
    pub empirical: Complex64,
    pub expected: Complex64,
    /// Largest of the real- and imaginary-part z-scores of the empirical mean.
    pub z_score: f64,
}

pub const MIN_COVARIANCE_SAMPLES: usize = 1000;

fn z_part(values: &[f64], expected: f64) -> f64 {
    let (mean, var) = mean_var(values);
    let se = (var / values.len() as f64).sqrt();
    if se == 0.0 {
        if mean == expected {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (mean - expected).abs() / se
    }
}

fn summarize_pairings(products: &[Complex64], v1: &SpectralField, v2: &SpectralField) -> CovarianceCheck {
    let n = products.len() as f64;
    let empirical = products.iter().sum::<Complex64>() / n;
    let expected = v1.inner(v2) * VARIANCE;
    let re: Vec<f64> = products.iter().map(|z| z.re).collect();
    let im: Vec<f64> = products.iter().map(|z| z.im).collect();
    let z_score = z_part(&re, expected.re).max(z_part(&im, expected.im));
    CovarianceCheck { count: products.len(), empirical, expected, z_score }
}

fn check_grids(a: &SpectralField, b: &SpectralField) -> Result<(), NoiseError> {
    if (a.dim(), a.n()) != (b.dim(), b.n()) {
        return Err(NoiseError::InvalidParameter(format!(
            "test field grid (dim {}, N {}) differs from noise grid (dim {}, N {})",
            b.dim(),
            b.n(),
            a.dim(),
            a.n()
        )));
    }
    Ok(())
}

/// Empirical `E[xi(v1) conj(xi(v2))]` against `C (v1, v2)`.
pub fn covariance_check(samples: &[NoiseSample], v1: &SpectralField, v2: &SpectralField) -> Result<CovarianceCheck, NoiseError> {
    if samples.len() < MIN_COVARIANCE_SAMPLES {
        return Err(NoiseError::InsufficientSamples { needed: MIN_COVARIANCE_SAMPLES, got: samples.len() });
    }
    check_grids(&samples[0].field, v1)?;
    check_grids(&samples[0].field, v2)?;
    let products: Vec<Complex64> = samples
        .iter()
        .map(|s| pairing(&s.field, v1) * pairing(&s.field, v2).conj())
        .collect();
    Ok(summarize_pairings(&products, v1, v2))
}

/// Same as [`covariance_check`] but draws the samples for `seeds` on the fly
/// instead of holding them all in memory.
pub fn covariance_check_seeds(
    dim: usize,
    n: usize,
    seeds: &[u64],
    v1: &SpectralField,
    v2: &SpectralField,
) -> Result<CovarianceCheck, NoiseError> {
    if seeds.len() < MIN_COVARIANCE_SAMPLES {
        return Err(NoiseError::InsufficientSamples { needed: MIN_COVARIANCE_SAMPLES, got: seeds.len() });
    }
    let probe = SpectralField::zeros(dim, n)?;
    check_grids(&probe, v1)?;
    check_grids(&probe, v2)?;
    let products: Vec<Complex64> = seeds
        .par_iter()
        .map(|&s| {
            let xi = sample_white_noise(dim, n, s)?;
            Ok(pairing(&xi.field, v1) * pairing(&xi.field, v2).conj())
        })
        .collect::<Result<_, NoiseError>>()?;
    Ok(summarize_pairings(&products, v1, v2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityRow {
    pub dim: usize,
    pub s: f64,
    pub n: usize,
    pub seed_count: usize,
    /// Statistics of `||xi||_{s,inf}` over the seeds.
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    /// Median of `||xi||_{s,inf}^2`, the block-energy supremum itself.
    pub median_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularitySweep {
    pub dim: usize,
    pub s: f64,
    pub seeds: Vec<u64>,
    pub rows: Vec<RegularityRow>,
}

impl RegularitySweep {
    /// Largest over smallest median across the N list.
    pub fn median_spread(&self) -> f64 {
        let meds = self.rows.iter().map(|r| r.median);
        meds.clone().fold(f64::NEG_INFINITY, f64::max) / meds.fold(f64::INFINITY, f64::min)
    }

    /// Median at the largest N over median at the smallest N.
    pub fn median_growth(&self) -> f64 {
        self.rows.last().unwrap().median / self.rows[0].median
    }

    /// Same ratio for the squared norm.
    pub fn median_growth_sq(&self) -> f64 {
        self.rows.last().unwrap().median_sq / self.rows[0].median_sq
    }

    /// Growth predicted by block energies: a dyadic block `Q_j` holds about
    /// `c 2^{j dim}` unit-variance modes, so `4^{sj}` times its energy scales
    /// like `2^{(2s + dim) j}` and the norm like `N^{s + dim/2}`.
    pub fn predicted_growth(&self) -> f64 {
        let ratio = self.rows.last().unwrap().n as f64 / self.rows[0].n as f64;
        ratio.powf((self.s + self.dim as f64 / 2.0).max(0.0))
    }
}

pub const MIN_REGULARITY_SEEDS: usize = 100;

/// Nikolskii norms of white noise for several orders `s` at once; every `s`
/// sees the same realizations.
pub fn regularity_sweep_multi(
    dim: usize,
    s_list: &[f64],
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<RegularitySweep>, NoiseError> {
    if seeds.len() < MIN_REGULARITY_SEEDS {
        return Err(NoiseError::InvalidParameter(format!(
            "regularity sweep needs at least {MIN_REGULARITY_SEEDS} seeds, got {}",
            seeds.len()
        )));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NoiseError::InvalidParameter("N list must be non-empty and strictly ascending".into()));
    }
    let mut sweeps: Vec<RegularitySweep> = s_list
        .iter()
        .map(|&s| RegularitySweep { dim, s, seeds: seeds.to_vec(), rows: Vec::new() })
        .collect();
    for &n in n_list {
        let blocks = DyadicBlocks::new(dim, n).map_err(NoiseError::from)?;
        // squared norms, indexed [seed][s]
        let norms: Vec<Vec<f64>> = seeds
            .par_iter()
            .map(|&seed| {
                let xi = sample_white_noise(dim, n, seed)?;
                Ok(s_list.iter().map(|&s| nikolskii_norm_sq_with(&xi.field, s, &blocks)).collect())
            })
            .collect::<Result<_, NoiseError>>()?;
        for (i, sweep) in sweeps.iter_mut().enumerate() {
            let squares: Vec<f64> = norms.iter().map(|row| row[i]).collect();
            let column: Vec<f64> = squares.iter().map(|v| v.sqrt()).collect();
            let sum = Summary::of(&column);
            sweep.rows.push(RegularityRow {
                dim,
                s: sweep.s,
                n,
                seed_count: seeds.len(),
                median: sum.median,
                q25: sum.q25,
                q75: sum.q75,
                median_sq: Summary::of(&squares).median,
            });
        }
    }
    Ok(sweeps)
}

pub fn regularity_sweep(dim: usize, s: f64, n_list: &[usize], seeds: &[u64]) -> Result<RegularitySweep, NoiseError> {
    Ok(regularity_sweep_multi(dim, &[s], n_list, seeds)?.remove(0))
}
