//! Weighted `l2` norms on the Fourier side.
//!
//! All norms read `|w_k|^2` with the normalization of [`SpectralField`] and
//! the bracket `<k> = (1 + |k|^2)^{1/2}`:
//!
//! * `||w||_alpha^2 = sum alpha^2(<k>) |w_k|^2`
//! * `||w||_{s,inf}^2 = sup_j 4^{sj} sum_{Q_j} |w_k|^2`
//! * `||w||_psi^2 = sum <k>^{2 r0} psi^2(<k>^{r1-r0}) |w_k|^2`, the norm of the
//!   interpolation space `[H^{r0}, H^{r1}]_psi` (the generating operator is
//!   multiplication by `<k>^{r1-r0}`).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::DyadicBlocks;
use super::field::{check_shape, freq_of, SpectralField};
use crate::error::SpectralError;
use crate::error::WeightError;
use crate::weights::{embed_nikolskii, NikolskiiEmbedding, Verdict, WeightExpr};

/// `ln <k>` for every stored index.
pub fn ln_brackets(dim: usize, n: usize) -> Vec<f64> {
    let len = n.pow(dim as u32);
    (0..len)
        .map(|p| {
            let (a, b) = freq_of(dim, n, p);
            0.5 * ((a * a + b * b) as f64).ln_1p()
        })
        .collect()
}

/// `alpha^2(<k>)` for every stored index.
pub fn halpha_weights(dim: usize, n: usize, alpha: &WeightExpr) -> Vec<f64> {
    ln_brackets(dim, n).into_iter().map(|u| (2.0 * alpha.ln_eval(u)).exp()).collect()
}

/// `<k>^{2 r0} psi^2(<k>^{r1 - r0})` for every stored index.
pub fn interp_weights(dim: usize, n: usize, r0: f64, r1: f64, psi: &WeightExpr) -> Vec<f64> {
    ln_brackets(dim, n)
        .into_iter()
        .map(|u| (2.0 * (r0 * u + psi.ln_eval((r1 - r0) * u))).exp())
        .collect()
}

/// `(sum weights_k |w_k|^2)^{1/2}`.
pub fn weighted_norm(w: &SpectralField, weights: &[f64]) -> f64 {
    assert_eq!(w.len(), weights.len(), "weight table does not match the field grid");
    w.coeffs().iter().zip(weights).map(|(c, q)| q * c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn halpha_norm(w: &SpectralField, alpha: &WeightExpr) -> f64 {
    weighted_norm(w, &halpha_weights(w.dim(), w.n(), alpha))
}

/// Norm of `w` in the interpolation space between `H^{r0}` and `H^{r1}` with
/// parameter `psi`.
pub fn interp_norm(w: &SpectralField, r0: f64, r1: f64, psi: &WeightExpr) -> Result<f64, SpectralError> {
    if !(r0 < r1) {
        return Err(SpectralError::InvalidParameter(format!("interpolation needs r0 < r1, got {r0}, {r1}")));
    }
    Ok(weighted_norm(w, &interp_weights(w.dim(), w.n(), r0, r1, psi)))
}

/// `sup_j 4^{sj} sum_{Q_j} |w_k|^2`.
pub fn nikolskii_norm_sq_with(w: &SpectralField, s: f64, blocks: &DyadicBlocks) -> f64 {
    assert_eq!((w.dim(), w.n()), (blocks.dim(), blocks.n()), "blocks built for another grid");
    blocks
        .energies(w.coeffs())
        .iter()
        .enumerate()
        .map(|(j, e)| 4f64.powf(s * j as f64) * e)
        .fold(0.0, f64::max)
}

pub fn nikolskii_norm_with(w: &SpectralField, s: f64, blocks: &DyadicBlocks) -> f64 {
    nikolskii_norm_sq_with(w, s, blocks).sqrt()
}

/// Dyadic-block Nikolskii norm `||w||_{s,inf}`.
pub fn nikolskii_norm(w: &SpectralField, s: f64) -> f64 {
    let blocks = DyadicBlocks::new(w.dim(), w.n()).expect("field shape already validated");
    nikolskii_norm_with(w, s, &blocks)
}

/// The block-flat field with `|w_k| = 2^{-sj} (#Q_j)^{-1/2}` on `Q_j` and
/// phase `+1`; every block carries weighted energy exactly 1.
pub fn extremal_nikolskii_field(n: usize, s: f64, dim: usize) -> Result<SpectralField, SpectralError> {
    check_shape(dim, n, 4)?;
    let blocks = DyadicBlocks::new(dim, n)?;
    let card = blocks.cardinalities();
    let amp: Vec<f64> = card.iter().enumerate().map(|(j, &c)| 2f64.powf(-s * j as f64) / (c as f64).sqrt()).collect();
    let coeffs = (0..n.pow(dim as u32))
        .map(|p| Complex64::new(amp[blocks.block_of(p) as usize], 0.0))
        .collect();
    SpectralField::from_coeffs(dim, n, coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    /// Convergent embedding and `R^2 <= c (1 + slack)`.
    Bounded,
    /// Convergent embedding but the bound is exceeded.
    ExceedsBound,
    /// Divergent embedding and `R` grew from the previous row.
    Growing,
    /// Divergent embedding but `R` did not grow.
    NotGrowing,
    Undecided,
}

impl RowVerdict {
    pub fn is_pass(self) -> bool {
        matches!(self, RowVerdict::Bounded | RowVerdict::Growing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRatioRow {
    pub n: usize,
    pub ratio: f64,
    /// `sqrt(c (1 + slack))` when the embedding converges.
    pub constant_bound: Option<f64>,
    pub verdict: RowVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSweep {
    pub embedding: NikolskiiEmbedding,
    pub slack: f64,
    pub rows: Vec<EmbeddingRatioRow>,
}

/// `R(N) = ||v_N||_alpha / ||v_N||_{s,inf}` on the extremal fields `v_N`.
///
/// When `B^s_{2,inf} -> H^alpha` (convergent constant `c`), rows are checked
/// against `R^2 <= c (1 + slack)`; when it fails, against strict growth in `N`.
pub fn embedding_ratio_sweep(
    alpha: &WeightExpr,
    s: f64,
    n_list: &[usize],
    dim: usize,
    slack: f64,
    k_max: u64,
) -> Result<EmbeddingSweep, SpectralError> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::InvalidParameter("N list must be strictly ascending".into()));
    }
    let embedding = embed_nikolskii(alpha, s, k_max).map_err(weight_err)?;
    let ratios: Vec<f64> = n_list
        .par_iter()
        .map(|&n| {
            let v = extremal_nikolskii_field(n, s, dim)?;
            Ok(halpha_norm(&v, alpha) / nikolskii_norm(&v, s))
        })
        .collect::<Result<_, SpectralError>>()?;
    let bound = embedding.constant.map(|c| (c * (1.0 + slack)).sqrt());
    let rows = n_list
        .iter()
        .zip(&ratios)
        .enumerate()
        .map(|(i, (&n, &ratio))| {
            let verdict = match embedding.verdict() {
                Verdict::Converges => {
                    if ratio <= bound.unwrap() {
                        RowVerdict::Bounded
                    } else {
                        RowVerdict::ExceedsBound
                    }
                }
                Verdict::Diverges => {
                    if i == 0 || ratio > ratios[i - 1] {
                        RowVerdict::Growing
                    } else {
                        RowVerdict::NotGrowing
                    }
                }
                Verdict::Inconclusive => RowVerdict::Undecided,
            };
            EmbeddingRatioRow { n, ratio, constant_bound: bound, verdict }
        })
        .collect();
    Ok(EmbeddingSweep { embedding, slack, rows })
}

fn weight_err(e: WeightError) -> SpectralError {
    SpectralError::InvalidParameter(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_mode(dim: usize, n: usize, k1: i64, k2: i64) -> SpectralField {
        let mut f = SpectralField::zeros(dim, n).unwrap();
        let p = f.index_of(k1, k2).unwrap();
        let mut c = f.coeffs().to_vec();
        c[p] = Complex64::new(1.0, 0.0);
        f = SpectralField::from_coeffs(dim, n, c).unwrap();
        f
    }

    #[test]
    fn single_mode_norms() {
        let alpha = WeightExpr::product(vec![WeightExpr::power(0.7), WeightExpr::iter_log_power(1, 1.0).unwrap()]);
        let f = single_mode(1, 64, -9, 0);
        let expect = alpha.eval((1.0f64 + 81.0).sqrt()).unwrap();
        assert!((halpha_norm(&f, &alpha) - expect).abs() < 1e-14 * expect);
        assert_eq!(nikolskii_norm(&single_mode(1, 16, 0, 0), 0.3), 1.0);
        assert!((nikolskii_norm(&single_mode(1, 16, 4, 0), -0.5) - 0.5).abs() < 1e-15);
        // |k|^2 = 10 lies in Q_2
        assert!((nikolskii_norm(&single_mode(2, 16, 3, -1), -0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_power_is_l2() {
        let s: Vec<f64> = (0..128).map(|i| (i as f64 * 0.37).sin() + 0.1 * i as f64).collect();
        let f = SpectralField::from_real_samples(1, 128, &s).unwrap();
        assert!((halpha_norm(&f, &WeightExpr::one()) - f.energy().sqrt()).abs() < 1e-13 * f.energy().sqrt());
    }

    #[test]
    fn extremal_field_has_unit_norm() {
        for &(n, s, dim) in &[(16usize, -0.5, 1usize), (16, 0.0, 1), (32, -1.0, 2), (1 << 12, 0.75, 1)] {
            let v = extremal_nikolskii_field(n, s, dim).unwrap();
            assert!(v.is_hermitian());
            let got = nikolskii_norm(&v, s);
            assert!((got - 1.0).abs() < 1e-13, "n={n} s={s} dim={dim}: {got}");
            let blocks = DyadicBlocks::new(dim, n).unwrap();
            for (j, e) in blocks.energies(v.coeffs()).iter().enumerate() {
                assert!((4f64.powf(s * j as f64) * e - 1.0).abs() < 1e-13);
            }
        }
        // s = 0: L2 norm squared counts the blocks
        let v = extremal_nikolskii_field(16, 0.0, 1).unwrap();
        assert!((v.energy() - 4.0).abs() < 1e-14);
        assert!(extremal_nikolskii_field(2, 0.0, 1).is_err());
    }

    #[test]
    fn interp_norm_trivial_parameters() {
        let s: Vec<f64> = (0..256).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let f = SpectralField::from_real_samples(1, 256, &s).unwrap();
        let sqrt = WeightExpr::power(0.5);
        let a = interp_norm(&f, 0.0, 2.0, &sqrt).unwrap();
        let b = halpha_norm(&f, &WeightExpr::power(1.0));
        assert!((a - b).abs() <= 1e-13 * b);
        let a = interp_norm(&f, -0.5, 1.0, &WeightExpr::one()).unwrap();
        let b = halpha_norm(&f, &WeightExpr::power(-0.5));
        assert!((a - b).abs() <= 1e-13 * b);
        assert!(interp_norm(&f, 1.0, 1.0, &sqrt).is_err());
    }

    #[test]
    fn power_weight_ratio_counts_blocks() {
        let s = -0.5;
        let sweep = embedding_ratio_sweep(&WeightExpr::power(s), s, &[64, 256, 1024], 1, 0.1, 1 << 12).unwrap();
        assert_eq!(sweep.embedding.verdict(), Verdict::Diverges);
        for row in &sweep.rows {
            assert_eq!(row.verdict, RowVerdict::Growing);
            let blocks = (row.n as f64).log2() as usize;
            // each block contributes the block mean of (2^j / <k>), which lies in [0.8, 2]
            let r2 = row.ratio * row.ratio;
            assert!(r2 >= 0.8 * blocks as f64 && r2 <= 2.0 * blocks as f64, "{r2} vs {blocks}");
        }
    }

    #[test]
    fn geometric_weight_ratio_bounded() {
        let s = -0.5;
        let sweep = embedding_ratio_sweep(&WeightExpr::power(s - 0.1), s, &[64, 1024, 1 << 14], 1, 0.1, 1 << 12).unwrap();
        assert_eq!(sweep.embedding.verdict(), Verdict::Converges);
        assert!(sweep.rows.iter().all(|r| r.verdict == RowVerdict::Bounded));
    }

    #[test]
    fn sweep_rejects_unsorted_list() {
        assert!(embedding_ratio_sweep(&WeightExpr::one(), 0.0, &[64, 32], 1, 0.1, 1 << 10).is_err());
    }
}
