//! Convergence of `int_1^inf omega(t) dt/t` through the dyadic series
//! `sum_k omega(2^k)`, which is equivalent for every O-regularly varying `omega`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::expr::WeightExpr;
use crate::error::WeightError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecidedBy {
    /// `sigma1(omega) < 0` or `sigma0(omega) > 0`.
    Indices,
    /// Ratios of the block increments `S_{2^m} - S_{2^{m-1}}`.
    BlockTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicReport {
    pub verdict: Verdict,
    pub decided_by: DecidedBy,
    /// `(k, S_k)` at `k = 0, 1, 2, 4, ..., 2^M` where `S_k = sum_{i<=k} omega(2^i)`.
    /// Stops early once the sum overflows.
    pub partial_sums: Vec<(u64, f64)>,
    /// `D_m / D_{m-1}` for the block increments `D_m = S_{2^m} - S_{2^{m-1}}`.
    pub block_ratios: Vec<f64>,
    /// Estimated remainder `sum_{k > 2^M} omega(2^k)` when convergent.
    pub tail_estimate: Option<f64>,
}

impl DyadicReport {
    /// Last partial sum.
    pub fn truncated_sum(&self) -> f64 {
        self.partial_sums.last().map_or(0.0, |&(_, s)| s)
    }
}

pub const DEFAULT_K_MAX: u64 = 1 << 20;

/// Block ratios at or below this mean geometric decay of the increments.
const CONVERGE_RATIO: f64 = 0.9;
const TREND_BLOCKS: usize = 4;

/// Decides `sum_{k>=0} omega(2^k) < inf`.
///
/// Symbolic indices settle the question when `sigma1 < 0` or `sigma0 > 0`.
/// Otherwise the last four block ratios decide: all `<= 0.9` is convergent,
/// all `>= 1` (increments not decaying) is divergent, anything else is
/// reported as inconclusive.
pub fn dyadic_integral_test(omega: &WeightExpr, k_max: u64) -> DyadicReport {
    let levels = (k_max.max(1 << (TREND_BLOCKS + 1)) as f64).log2().floor() as u32;
    let term = |k: u64| omega.ln_eval(k as f64 * LN_2).exp();

    let mut partial_sums = vec![(0u64, term(0))];
    let mut blocks: Vec<f64> = Vec::with_capacity(levels as usize);
    let mut sum = term(0);
    for m in 0..=levels {
        let (lo, hi) = if m == 0 { (1u64, 1u64) } else { ((1u64 << (m - 1)) + 1, 1u64 << m) };
        let block: f64 = (lo..=hi).map(term).sum();
        sum += block;
        blocks.push(block);
        partial_sums.push((hi, sum));
        if !sum.is_finite() {
            break;
        }
    }
    let block_ratios: Vec<f64> = blocks.windows(2).map(|w| w[1] / w[0]).collect();

    let sym = omega.symbolic_indices();
    let (verdict, decided_by) = match sym {
        Some(ix) if ix.upper < 0.0 => (Verdict::Converges, DecidedBy::Indices),
        Some(ix) if ix.lower > 0.0 => (Verdict::Diverges, DecidedBy::Indices),
        _ => {
            let tail = &block_ratios[block_ratios.len().saturating_sub(TREND_BLOCKS)..];
            let v = if !sum.is_finite() || tail.iter().all(|&r| r >= 1.0) {
                Verdict::Diverges
            } else if tail.iter().all(|&r| r <= CONVERGE_RATIO) {
                Verdict::Converges
            } else {
                Verdict::Inconclusive
            };
            (v, DecidedBy::BlockTrend)
        }
    };

    let tail_estimate = (verdict == Verdict::Converges).then(|| {
        let k_last = partial_sums.last().unwrap().0;
        match sym {
            Some(ix) if ix.upper < 0.0 => {
                let q = 2f64.powf(ix.upper);
                term(k_last) * q / (1.0 - q)
            }
            _ => {
                let tail = &block_ratios[block_ratios.len().saturating_sub(TREND_BLOCKS)..];
                let rho = tail.iter().cloned().fold(0.0, f64::max);
                blocks.last().copied().unwrap_or(0.0) * rho / (1.0 - rho)
            }
        }
    });

    DyadicReport { verdict, decided_by, partial_sums, block_ratios, tail_estimate }
}

/// `int_1^inf t^{2p+n-1} alpha^{-2}(t) dt < inf`, the condition for
/// `H^alpha(R^n)` to embed into `C^p`.
pub fn embed_hormander(alpha: &WeightExpr, p: u32, n: u32, k_max: u64) -> Result<DyadicReport, WeightError> {
    if n == 0 {
        return Err(WeightError::InvalidParameter("dimension n must be >= 1".into()));
    }
    let omega = WeightExpr::product(vec![
        WeightExpr::power((2 * p + n) as f64),
        WeightExpr::pow(alpha.clone(), -2.0)?,
    ]);
    Ok(dyadic_integral_test(&omega, k_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NikolskiiEmbedding {
    pub report: DyadicReport,
    /// `sum_{k<=k_max} alpha^2(2^k) 4^{-sk}` when convergent.
    pub constant: Option<f64>,
    pub tail_bound: Option<f64>,
}

impl NikolskiiEmbedding {
    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }
}

/// `B^s_{2,inf} -> H^alpha` iff `int_1^inf alpha^2(t) t^{-2s-1} dt < inf`.
pub fn embed_nikolskii(alpha: &WeightExpr, s: f64, k_max: u64) -> Result<NikolskiiEmbedding, WeightError> {
    let omega = WeightExpr::product(vec![WeightExpr::pow(alpha.clone(), 2.0)?, WeightExpr::power(-2.0 * s)]);
    let report = dyadic_integral_test(&omega, k_max);
    let converges = report.verdict == Verdict::Converges;
    Ok(NikolskiiEmbedding {
        constant: converges.then(|| report.truncated_sum()),
        tail_bound: if converges { report.tail_estimate } else { None },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_power_converges_by_indices() {
        let r = dyadic_integral_test(&WeightExpr::power(-0.5), 1 << 10);
        assert_eq!(r.verdict, Verdict::Converges);
        assert_eq!(r.decided_by, DecidedBy::Indices);
        let exact = 1.0 / (1.0 - 2f64.powf(-0.5));
        let total = r.truncated_sum() + r.tail_estimate.unwrap();
        assert!((total - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn positive_power_diverges_by_indices() {
        let r = dyadic_integral_test(&WeightExpr::power(0.5), 1 << 12);
        assert_eq!(r.verdict, Verdict::Diverges);
        // summation stops at the first overflow
        let sums = &r.partial_sums;
        assert!(sums[..sums.len() - 1].iter().all(|&(_, s)| s.is_finite()));
    }

    // Oracle: sum_k (k log 2)^{-p} is a p-series; block ratios tend to 2^{1-p}.
    #[test]
    fn log_power_series() {
        let diverging = dyadic_integral_test(&WeightExpr::iter_log_power(1, -1.0).unwrap(), DEFAULT_K_MAX);
        assert_eq!(diverging.verdict, Verdict::Diverges);
        assert_eq!(diverging.decided_by, DecidedBy::BlockTrend);
        let converging = dyadic_integral_test(&WeightExpr::iter_log_power(1, -3.0).unwrap(), DEFAULT_K_MAX);
        assert_eq!(converging.verdict, Verdict::Converges);
        let last = *converging.block_ratios.last().unwrap();
        assert!((last - 0.25).abs() < 0.01, "{last}");
        let s = converging.truncated_sum() + converging.tail_estimate.unwrap();
        // 1 (k=0, glue) + 1 (k=1, 2 < e) + sum_{k>=2} (k ln 2)^-3
        let oracle: f64 = 2.0 + (2..2_000_000u64).map(|k| (k as f64 * LN_2).powi(-3)).sum::<f64>();
        assert!((s - oracle).abs() < 1e-6 * oracle, "{s} vs {oracle}");
    }

    #[test]
    fn constant_diverges() {
        let r = dyadic_integral_test(&WeightExpr::one(), 1 << 10);
        assert_eq!(r.verdict, Verdict::Diverges);
        assert_eq!(r.decided_by, DecidedBy::BlockTrend);
    }

    #[test]
    fn borderline_log_log_is_not_misclassified() {
        // sum 1/(k (log k)^2) converges, but far too slowly to see at 2^20
        let omega = WeightExpr::product(vec![
            WeightExpr::iter_log_power(1, -1.0).unwrap(),
            WeightExpr::iter_log_power(2, -2.0).unwrap(),
        ]);
        let r = dyadic_integral_test(&omega, DEFAULT_K_MAX);
        assert_ne!(r.verdict, Verdict::Diverges);
    }

    #[test]
    fn hormander_examples() {
        let conv = embed_hormander(&WeightExpr::power(1.5), 0, 2, 1 << 12).unwrap();
        assert_eq!(conv.verdict, Verdict::Converges);
        let div = embed_hormander(&WeightExpr::power(1.0), 0, 2, 1 << 12).unwrap();
        assert_eq!(div.verdict, Verdict::Diverges);
        for &(beta, expect) in &[(0.75, Verdict::Converges), (1.0, Verdict::Converges), (0.5, Verdict::Diverges), (0.25, Verdict::Diverges)] {
            let a = WeightExpr::product(vec![WeightExpr::power(1.0), WeightExpr::iter_log_power(1, beta).unwrap()]);
            let r = embed_hormander(&a, 0, 2, DEFAULT_K_MAX).unwrap();
            assert_eq!(r.verdict, expect, "beta = {beta}");
        }
    }

    fn remark_weight(s: f64, eps: f64) -> WeightExpr {
        WeightExpr::product(vec![WeightExpr::power(s), WeightExpr::one_plus_log_power(-eps - 0.5).unwrap()])
    }

    #[test]
    fn nikolskii_remark_weight() {
        let e = embed_nikolskii(&remark_weight(-0.5, 0.5), -0.5, DEFAULT_K_MAX).unwrap();
        assert_eq!(e.verdict(), Verdict::Converges);
        // oracle: sum_k (1 + k ln 2)^{-2}, integral tail bound beyond K
        let kmax = DEFAULT_K_MAX as f64;
        let head: f64 = (0..=DEFAULT_K_MAX).map(|k| (1.0 + k as f64 * LN_2).powi(-2)).sum();
        let tail = 1.0 / (LN_2 * (1.0 + kmax * LN_2));
        assert!((e.constant.unwrap() - head).abs() < 1e-10 * head);
        assert!((e.tail_bound.unwrap() - tail).abs() < 0.05 * tail);

        for &s in &[-1.0, 0.0, 0.7] {
            let e = embed_nikolskii(&remark_weight(s, 0.0), s, DEFAULT_K_MAX).unwrap();
            assert_eq!(e.verdict(), Verdict::Diverges, "s = {s}");
            assert!(e.constant.is_none());
        }
    }

    #[test]
    fn nikolskii_geometric_constant() {
        let s = -0.3;
        let e = embed_nikolskii(&WeightExpr::power(s - 0.1), s, 1 << 12).unwrap();
        assert_eq!(e.verdict(), Verdict::Converges);
        let exact = 1.0 / (1.0 - 4f64.powf(-0.1));
        let c = e.constant.unwrap() + e.tail_bound.unwrap();
        assert!((c - exact).abs() < 1e-12 * exact);
    }
}
