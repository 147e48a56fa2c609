//! Dirichlet problem `Lap u = f` in the unit disk, `u = g` on the circle.
//!
//! Sources live in the span of `r^{|m|} e^{im theta}` (that is `z^m` or
//! `conj(z)^{|m|}`), for which `a r^{|m|+2} e^{im theta} / (4(|m|+1))` is an
//! exact particular solution. The harmonic part is the Poisson series of the
//! corrected boundary data. Norms of `u` use the trace surrogate
//! `||u_h||_alpha ~ ||g||_{alpha rho^{-1/2}}` with `rho(t) = t`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::DiskError;
use crate::noise::sample_white_noise;
use crate::spectra::{frequency, nikolskii_norm_with, DyadicBlocks, SpectralField};
use crate::stats::Summary;
use crate::weights::{dyadic_integral_test, embed_hormander, Verdict, WeightExpr, DEFAULT_K_MAX};

/// Largest source frequency accepted.
pub const MAX_SOURCE_MODE: i64 = 1 << 20;

/// One source mode `a r^{|m|} e^{im theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTerm {
    pub m: i64,
    /// `[re, im]`
    pub a: Complex64,
}

impl SourceTerm {
    pub fn new(m: i64, a: Complex64) -> Self {
        SourceTerm { m, a }
    }

    /// `f = value`.
    pub fn constant(value: f64) -> Self {
        SourceTerm { m: 0, a: Complex64::new(value, 0.0) }
    }

    /// Trace on the circle of the particular solution for this mode.
    pub fn particular_trace(&self) -> Complex64 {
        self.a / (4.0 * (self.m.unsigned_abs() as f64 + 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    /// `c_k` of the harmonic part `sum c_k r^{|k|} e^{ik theta}`.
    pub boundary_coeffs: Option<SpectralField>,
    /// Source modes; the particular part is
    /// `sum a_m r^{|m|+2} e^{im theta} / (4(|m|+1))`.
    pub particular_terms: Vec<SourceTerm>,
    /// Boundary data the solution was built from, kept verbatim so the trace
    /// is reported exactly.
    boundary_data: Option<SpectralField>,
}

fn check_sources(terms: &[SourceTerm]) -> Result<(), DiskError> {
    let mut seen = std::collections::BTreeSet::new();
    for t in terms {
        if t.m.abs() > MAX_SOURCE_MODE {
            return Err(DiskError::UnsupportedSource(format!(
                "mode m = {} beyond the supported range |m| <= {MAX_SOURCE_MODE}",
                t.m
            )));
        }
        if !(t.a.re.is_finite() && t.a.im.is_finite()) {
            return Err(DiskError::UnsupportedSource(format!("mode m = {} has a non-finite coefficient", t.m)));
        }
        if !seen.insert(t.m) {
            return Err(DiskError::UnsupportedSource(format!("mode m = {} listed twice", t.m)));
        }
    }
    Ok(())
}

fn check_boundary(g: &SpectralField) -> Result<(), DiskError> {
    if g.dim() != 1 {
        return Err(DiskError::InvalidParameter(format!("boundary data must live on T^1, got dim {}", g.dim())));
    }
    Ok(())
}

/// Poisson extension `u_h = sum g_k r^{|k|} e^{ik theta}`.
pub fn harmonic_extension(g: &SpectralField) -> Result<HarmonicSolution, DiskError> {
    check_boundary(g)?;
    Ok(HarmonicSolution {
        boundary_coeffs: Some(g.clone()),
        particular_terms: Vec::new(),
        boundary_data: Some(g.clone()),
    })
}

pub fn particular_solution(f_terms: &[SourceTerm]) -> Result<HarmonicSolution, DiskError> {
    check_sources(f_terms)?;
    Ok(HarmonicSolution { boundary_coeffs: None, particular_terms: f_terms.to_vec(), boundary_data: None })
}

/// `u = u_p + harmonic_extension(g - trace u_p)`.
pub fn solve_dirichlet(f_terms: &[SourceTerm], g: &SpectralField) -> Result<HarmonicSolution, DiskError> {
    check_boundary(g)?;
    check_sources(f_terms)?;
    let mut c = g.coeffs().to_vec();
    for t in f_terms {
        let p = g.index_of(t.m, 0).ok_or_else(|| {
            DiskError::InvalidParameter(format!("source mode m = {} is not representable on the boundary grid N = {}", t.m, g.n()))
        })?;
        c[p] -= t.particular_trace();
    }
    let boundary_coeffs = SpectralField::from_coeffs(1, g.n(), c)?;
    Ok(HarmonicSolution {
        boundary_coeffs: Some(boundary_coeffs),
        particular_terms: f_terms.to_vec(),
        boundary_data: Some(g.clone()),
    })
}

impl HarmonicSolution {
    /// Boundary trace on the 1D grid of size `n`.
    pub fn trace(&self, n: usize) -> Result<SpectralField, DiskError> {
        if let Some(g) = &self.boundary_data {
            if g.n() == n {
                return Ok(g.clone());
            }
        }
        let mut c = match &self.boundary_coeffs {
            Some(b) => {
                let mut z = SpectralField::zeros(1, n)?.coeffs().to_vec();
                for (p, v) in b.coeffs().iter().enumerate() {
                    let k = frequency(p, b.n());
                    match index_1d(k, n) {
                        Some(q) => z[q] += v,
                        None if *v == Complex64::new(0.0, 0.0) => {}
                        None => {
                            return Err(DiskError::InvalidParameter(format!("mode {k} does not fit a grid of size {n}")))
                        }
                    }
                }
                z
            }
            None => SpectralField::zeros(1, n)?.coeffs().to_vec(),
        };
        for t in &self.particular_terms {
            let q = index_1d(t.m, n)
                .ok_or_else(|| DiskError::InvalidParameter(format!("source mode {} does not fit a grid of size {n}", t.m)))?;
            c[q] += t.particular_trace();
        }
        Ok(SpectralField::from_coeffs(1, n, c)?)
    }

    /// Harmonic coefficients as `(k, c_k)` with nonzero `c_k`.
    fn harmonic_modes(&self) -> Vec<(i64, Complex64)> {
        match &self.boundary_coeffs {
            Some(b) => b
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(p, &c)| (frequency(p, b.n()), c))
                .collect(),
            None => Vec::new(),
        }
    }

    /// `u(x, y)`.
    pub fn eval_xy(&self, x: f64, y: f64) -> Complex64 {
        self.harmonic_xy(x, y) + self.particular_xy(x, y)
    }

    /// Harmonic part at `(x, y)`, by Horner's rule in `z` and `conj(z)`.
    pub fn harmonic_xy(&self, x: f64, y: f64) -> Complex64 {
        let modes = self.harmonic_modes();
        analytic_sum(&modes, Complex64::new(x, y))
    }

    /// Particular part at `(x, y)`.
    pub fn particular_xy(&self, x: f64, y: f64) -> Complex64 {
        let z = Complex64::new(x, y);
        let modes: Vec<(i64, Complex64)> = self.particular_terms.iter().map(|t| (t.m, t.particular_trace())).collect();
        analytic_sum(&modes, z) * z.norm_sqr()
    }

    /// Source `f(x, y)`.
    pub fn source_xy(&self, x: f64, y: f64) -> Complex64 {
        let modes: Vec<(i64, Complex64)> = self.particular_terms.iter().map(|t| (t.m, t.a)).collect();
        analytic_sum(&modes, Complex64::new(x, y))
    }

    pub fn eval(&self, r: f64, theta: f64) -> Complex64 {
        self.eval_xy(r * theta.cos(), r * theta.sin())
    }

    /// Values on a polar grid, `out[i][j] = u(r_i, theta_j)`.
    pub fn eval_polar(&self, grid: PolarGrid) -> Vec<Vec<Complex64>> {
        let mut modes = self.harmonic_modes();
        let particular: Vec<(i64, Complex64, bool)> =
            self.particular_terms.iter().map(|t| (t.m, t.particular_trace(), true)).collect();
        let mut all: Vec<(i64, Complex64, bool)> = modes.drain(..).map(|(k, c)| (k, c, false)).collect();
        all.extend(particular);
        let ring = RingEvaluator::new(grid.n_theta);
        grid.radii()
            .into_par_iter()
            .map(|r| {
                ring.eval(all.iter().map(|&(k, c, part)| {
                    let rk = r.powi(k.unsigned_abs() as i32 + if part { 2 } else { 0 });
                    (k, c * rk)
                }))
            })
            .collect()
    }
}

fn index_1d(k: i64, n: usize) -> Option<usize> {
    let h = (n / 2) as i64;
    if k > h || k <= -h {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

/// `sum_{k>=0} c_k z^k + sum_{k<0} c_k conj(z)^{|k|}`.
fn analytic_sum(modes: &[(i64, Complex64)], z: Complex64) -> Complex64 {
    let top = modes.iter().map(|m| m.0.unsigned_abs()).max().unwrap_or(0) as usize;
    let mut pos = vec![Complex64::new(0.0, 0.0); top + 1];
    let mut neg = vec![Complex64::new(0.0, 0.0); top + 1];
    for &(k, c) in modes {
        if k >= 0 {
            pos[k as usize] += c;
        } else {
            neg[k.unsigned_abs() as usize] += c;
        }
    }
    let horner = |coef: &[Complex64], w: Complex64| coef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c);
    neg[0] = Complex64::new(0.0, 0.0);
    horner(&pos, z) + horner(&neg, z.conj())
}

/// Evaluates `sum_k d_k e^{ik theta_j}` at `theta_j = 2 pi j / M` by folding
/// frequencies modulo `M` (exact on the sample points) and one inverse FFT.
struct RingEvaluator {
    m: usize,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl RingEvaluator {
    fn new(m: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(m);
        RingEvaluator { m, fft }
    }

    fn eval(&self, modes: impl Iterator<Item = (i64, Complex64)>) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for (k, d) in modes {
            buf[k.rem_euclid(self.m as i64) as usize] += d;
        }
        self.fft.process(&mut buf);
        buf
    }
}

/// Polar grid with radii `i / (n_r - 1)` (so `r = 0` and `r = 1` are
/// included) and angles `2 pi j / n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarGrid {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid { n_r: 512, n_theta: 512 }
    }
}

impl PolarGrid {
    pub fn validate(&self) -> Result<(), DiskError> {
        if self.n_r < 2 || self.n_theta < 1 {
            return Err(DiskError::InvalidParameter(format!(
                "polar grid needs n_r >= 2 and n_theta >= 1, got {} x {}",
                self.n_r, self.n_theta
            )));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n_r).map(|i| i as f64 / (self.n_r - 1) as f64).collect()
    }
}

/// Compact nine-point Laplacian of `u` at `(x, y)` with spacing `h`.
///
/// On harmonic functions it is accurate to `O(h^6)`, and `O(h^4)` whenever
/// `Lap^2 u = 0`.
pub fn laplacian_9pt<F: Fn(f64, f64) -> Complex64>(u: F, x: f64, y: f64, h: f64) -> Complex64 {
    let edges = u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h);
    let corners = u(x + h, y + h) + u(x - h, y + h) + u(x + h, y - h) + u(x - h, y - h);
    (edges * 4.0 + corners - u(x, y) * 20.0) / (6.0 * h * h)
}

fn residual_points(r_max: f64, n_r: usize, n_theta: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = r_max * i as f64 / (n_r - 1).max(1) as f64;
        for j in 0..n_theta {
            let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
            pts.push((r * th.cos(), r * th.sin()));
        }
    }
    pts
}

/// Largest `|Lap (u - u_p)|` over a polar grid of radius `r_max`.
pub fn harmonic_residual(u: &HarmonicSolution, r_max: f64, n_r: usize, n_theta: usize, h: f64) -> f64 {
    residual_points(r_max, n_r, n_theta)
        .into_par_iter()
        .map(|(x, y)| laplacian_9pt(|a, b| u.harmonic_xy(a, b), x, y, h).norm())
        .reduce(|| 0.0, f64::max)
}

/// Largest `|Lap u_p - f|` and largest `|f|` over a polar grid of radius `r_max`.
pub fn particular_residual(u: &HarmonicSolution, r_max: f64, n_r: usize, n_theta: usize, h: f64) -> (f64, f64) {
    residual_points(r_max, n_r, n_theta)
        .into_par_iter()
        .map(|(x, y)| {
            let f = u.source_xy(x, y);
            ((laplacian_9pt(|a, b| u.particular_xy(a, b), x, y, h) - f).norm(), f.norm())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionNorms {
    pub snorm_alpha: f64,
    pub source_norm: f64,
    /// `||g||` in `H^{alpha rho^{-1/2}}` of the circle.
    pub boundary_norm: f64,
    pub lower_order: f64,
}

fn ln_bracket(k: i64) -> f64 {
    0.5 * ((k * k) as f64).ln_1p()
}

/// `sum alpha^2(<k>) <k>^{-1} |w_k|^2` over the 1D field `w`.
fn trace_energy(w: &SpectralField, alpha: &WeightExpr) -> f64 {
    w.coeffs()
        .iter()
        .enumerate()
        .map(|(p, c)| {
            let u = ln_bracket(frequency(p, w.n()));
            (2.0 * alpha.ln_eval(u) - u).exp() * c.norm_sqr()
        })
        .sum()
}

/// Surrogate norms of a disk solution.
pub fn snorm(u: &HarmonicSolution, alpha: &WeightExpr, lambda: f64) -> SolutionNorms {
    let particular_energy: f64 = u
        .particular_terms
        .iter()
        .map(|t| (2.0 * (lambda + 2.0) * ln_bracket(t.m)).exp() * t.particular_trace().norm_sqr())
        .sum();
    let source_norm = u
        .particular_terms
        .iter()
        .map(|t| (2.0 * lambda * ln_bracket(t.m)).exp() * t.a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let lower = WeightExpr::product(vec![alpha.clone(), WeightExpr::power(-1.0)]);
    let (harm, harm_lower) = match &u.boundary_coeffs {
        Some(c) => (trace_energy(c, alpha), trace_energy(c, &lower)),
        None => (0.0, 0.0),
    };
    let boundary_norm = match &u.boundary_data {
        Some(g) => trace_energy(g, alpha).sqrt(),
        None => u
            .particular_terms
            .iter()
            .map(|t| {
                let v = ln_bracket(t.m);
                (2.0 * alpha.ln_eval(v) - v).exp() * t.particular_trace().norm_sqr()
            })
            .sum::<f64>()
            .sqrt(),
    };
    SolutionNorms {
        snorm_alpha: (harm + particular_energy).sqrt(),
        source_norm,
        boundary_norm,
        lower_order: (harm_lower + particular_energy).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriRow {
    pub n: usize,
    pub seed: u64,
    pub ratio: f64,
    pub snorm: f64,
    pub source_norm: f64,
    /// Nikolskii norm `||g||_{s,inf}` of the boundary noise.
    pub boundary_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriSummary {
    pub n: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriSweep {
    pub rows: Vec<AprioriRow>,
    pub summaries: Vec<AprioriSummary>,
    /// Max ratio at the largest N over max ratio at the smallest N.
    pub growth: f64,
}

impl AprioriSweep {
    /// Boundedness contract: growth of the max ratio at most `1.5`.
    pub fn bounded(&self) -> bool {
        self.growth <= 1.5
    }
}

/// `alpha0 = alpha t^{-(s+1/2)}`.
pub fn apriori_alpha0(alpha: &WeightExpr, s: f64) -> WeightExpr {
    WeightExpr::product(vec![alpha.clone(), WeightExpr::power(-(s + 0.5))])
}

/// Checks that `alpha = t^{s+1/2} alpha0` with `int_1^inf alpha0^2(t) dt/t < inf`
/// and `lambda > -1/2`. All failures are reported together.
pub fn apriori_preconditions(alpha: &WeightExpr, lambda: f64, s: f64) -> Result<(), DiskError> {
    alpha.validate()?;
    let mut failed = Vec::new();
    if !(lambda > -0.5) {
        failed.push(format!("lambda > -1/2 fails (lambda = {lambda})"));
    }
    let alpha0_sq = WeightExpr::pow(apriori_alpha0(alpha, s), 2.0)?;
    let report = dyadic_integral_test(&alpha0_sq, DEFAULT_K_MAX);
    if report.verdict != Verdict::Converges {
        failed.push(format!(
            "int_1^inf alpha0^2(t) dt/t with alpha0 = alpha t^-(s+1/2) is not finite (dyadic test: {:?})",
            report.verdict
        ));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(DiskError::Precondition(failed.join("; ")))
    }
}

/// Ratios `||u||_alpha / (||f||_lambda + ||g||_{s,inf})` for white-noise
/// boundary data over seeds and truncations.
pub fn apriori_sweep(
    alpha: &WeightExpr,
    lambda: f64,
    s: f64,
    sources: &[SourceTerm],
    n_list: &[usize],
    seeds: &[u64],
) -> Result<AprioriSweep, DiskError> {
    apriori_preconditions(alpha, lambda, s)?;
    check_sources(sources)?;
    if n_list.is_empty() || seeds.is_empty() {
        return Err(DiskError::InvalidParameter("N list and seed list must be non-empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DiskError::InvalidParameter("N list must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len() * seeds.len());
    let mut summaries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let blocks = DyadicBlocks::new(1, n)?;
        let batch: Vec<AprioriRow> = seeds
            .par_iter()
            .map(|&seed| {
                let g = sample_white_noise(1, n, seed)?.field;
                let u = solve_dirichlet(sources, &g)?;
                let norms = snorm(&u, alpha, lambda);
                let nik = nikolskii_norm_with(&g, s, &blocks);
                Ok(AprioriRow {
                    n,
                    seed,
                    ratio: norms.snorm_alpha / (norms.source_norm + nik),
                    snorm: norms.snorm_alpha,
                    source_norm: norms.source_norm,
                    boundary_norm: nik,
                })
            })
            .collect::<Result<_, DiskError>>()?;
        let ratios: Vec<f64> = batch.iter().map(|r| r.ratio).collect();
        let sum = Summary::of(&ratios);
        summaries.push(AprioriSummary { n, max_ratio: sum.max, median_ratio: sum.median });
        rows.extend(batch);
    }
    let growth = summaries.last().unwrap().max_ratio / summaries[0].max_ratio;
    Ok(AprioriSweep { rows, summaries, growth })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub sup_error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.sup_error <= r.bound)
    }

    /// `E(K_last) / E(K_first)`.
    pub fn reduction(&self) -> f64 {
        self.rows.last().unwrap().sup_error / self.rows[0].sup_error
    }
}

/// `g_k = alpha^{-1}(<k>) <k>^{-1/2 - extra}`, a real even boundary profile
/// whose trace norm is finite uniformly in `n` when `extra > 0`.
pub fn decay_profile(alpha: &WeightExpr, n: usize, extra: f64) -> Result<SpectralField, DiskError> {
    let zero = SpectralField::zeros(1, n)?;
    let coeffs = (0..zero.len())
        .map(|p| {
            let u = ln_bracket(frequency(p, n));
            Complex64::new((-alpha.ln_eval(u) - (0.5 + extra) * u).exp(), 0.0)
        })
        .collect();
    Ok(SpectralField::from_coeffs(1, n, coeffs)?)
}

/// Sup-grid error of the truncated harmonic extensions against the
/// Cauchy-Schwarz tail bound
/// `T(K) = (sum_{|k|>K} <k> alpha^{-2}(<k>))^{1/2} ||g_{|k|>K}||_{alpha rho^{-1/2}}`,
/// both sums taken over the frequencies carried by `g`.
pub fn uniform_convergence_experiment(
    alpha: &WeightExpr,
    g: &SpectralField,
    k_list: &[usize],
    grid: PolarGrid,
) -> Result<ConvergenceTable, DiskError> {
    check_boundary(g)?;
    grid.validate()?;
    let report = embed_hormander(alpha, 0, 2, DEFAULT_K_MAX)?;
    if report.verdict != Verdict::Converges {
        return Err(DiskError::Precondition(format!(
            "int_1^inf t alpha^-2(t) dt is not finite (dyadic test: {:?})",
            report.verdict
        )));
    }
    if k_list.is_empty() {
        return Err(DiskError::InvalidParameter("K list must be non-empty".into()));
    }
    let modes: Vec<(i64, Complex64)> = g.coeffs().iter().enumerate().map(|(p, &c)| (frequency(p, g.n()), c)).collect();
    let radii = grid.radii();
    let ring = RingEvaluator::new(grid.n_theta);
    let rows = k_list
        .iter()
        .map(|&k_cut| {
            let tail: Vec<(i64, Complex64)> =
                modes.iter().copied().filter(|&(k, _)| k.unsigned_abs() as usize > k_cut).collect();
            let sup_error = radii
                .par_iter()
                .map(|&r| {
                    ring.eval(tail.iter().map(|&(k, c)| (k, c * r.powi(k.unsigned_abs() as i32))))
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            let (mut dual, mut energy) = (0.0, 0.0);
            for &(k, c) in &tail {
                let u = ln_bracket(k);
                dual += (u - 2.0 * alpha.ln_eval(u)).exp();
                energy += (2.0 * alpha.ln_eval(u) - u).exp() * c.norm_sqr();
            }
            ConvergenceRow { k: k_cut, sup_error, bound: (dual * energy).sqrt() }
        })
        .collect();
    Ok(ConvergenceTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(n: usize, k: i64, v: Complex64) -> SpectralField {
        let mut z = SpectralField::zeros(1, n).unwrap().coeffs().to_vec();
        z[index_1d(k, n).unwrap()] = v;
        SpectralField::from_coeffs(1, n, z).unwrap()
    }

    #[test]
    fn single_mode_extension() {
        let g = mode(16, 3, c(1.0, 0.0));
        let u = harmonic_extension(&g).unwrap();
        for &(r, th) in &[(0.3, 0.2), (0.9, 2.0), (1.0, -1.0)] {
            let want = Complex64::from_polar(r * r * r, 3.0 * th);
            assert!((u.eval(r, th) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn mean_value_property() {
        let g = sample_white_noise(1, 32, 5).unwrap().field;
        let u = harmonic_extension(&g).unwrap();
        assert!((u.eval(0.0, 0.0) - g.coeffs()[0]).norm() < 1e-15);
    }

    #[test]
    fn particular_closed_forms() {
        let u = particular_solution(&[SourceTerm::constant(1.0)]).unwrap();
        assert!((u.eval(0.5, 1.0) - c(0.0625, 0.0)).norm() < 1e-15);
        let u = particular_solution(&[SourceTerm::new(1, c(1.0, 0.0))]).unwrap();
        let want = Complex64::from_polar(0.7f64.powi(3) / 8.0, 0.4);
        assert!((u.eval(0.7, 0.4) - want).norm() < 1e-15);
        let u = particular_solution(&[]).unwrap();
        assert_eq!(u.eval(0.3, 0.3), c(0.0, 0.0));
    }

    #[test]
    fn unsupported_sources_are_rejected() {
        assert!(matches!(
            particular_solution(&[SourceTerm::constant(1.0), SourceTerm::constant(2.0)]),
            Err(DiskError::UnsupportedSource(_))
        ));
        assert!(particular_solution(&[SourceTerm::new(MAX_SOURCE_MODE + 1, c(1.0, 0.0))]).is_err());
        assert!(particular_solution(&[SourceTerm::new(0, c(f64::NAN, 0.0))]).is_err());
    }

    #[test]
    fn constant_source_zero_data() {
        let g = SpectralField::zeros(1, 8).unwrap();
        let u = solve_dirichlet(&[SourceTerm::constant(1.0)], &g).unwrap();
        assert_eq!(u.boundary_coeffs.as_ref().unwrap().coeffs()[0], c(-0.25, 0.0));
        for &r in &[0.0, 0.5, 1.0] {
            assert!((u.eval(r, 0.3).re - (r * r / 4.0 - 0.25)).abs() < 1e-15);
        }
        assert_eq!(u.trace(8).unwrap(), g);
    }

    #[test]
    fn trace_is_exact() {
        let g = sample_white_noise(1, 64, 9).unwrap().field;
        let f = [SourceTerm::constant(1.0), SourceTerm::new(-3, c(0.3, -0.7))];
        let u = solve_dirichlet(&f, &g).unwrap();
        assert_eq!(u.trace(64).unwrap(), g);
        // recomputed from the parts it agrees to rounding
        let rebuilt = HarmonicSolution { boundary_data: None, ..u.clone() }.trace(64).unwrap();
        for (a, b) in rebuilt.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn linearity() {
        let g1 = sample_white_noise(1, 32, 1).unwrap().field;
        let g2 = sample_white_noise(1, 32, 2).unwrap().field;
        let sum: Vec<Complex64> = g1.coeffs().iter().zip(g2.coeffs()).map(|(a, b)| a + b).collect();
        let g12 = SpectralField::from_coeffs(1, 32, sum).unwrap();
        let f = [SourceTerm::new(2, c(1.0, 0.5))];
        let a = solve_dirichlet(&f, &g12).unwrap();
        let b = solve_dirichlet(&f, &g1).unwrap();
        let d = solve_dirichlet(&[], &g2).unwrap();
        for &(r, th) in &[(0.2, 0.1), (0.8, 2.5), (1.0, 4.0)] {
            assert!((a.eval(r, th) - b.eval(r, th) - d.eval(r, th)).norm() <= 1e-12);
        }
    }

    #[test]
    fn laplacian_residuals() {
        let g = sample_white_noise(1, 32, 4).unwrap().field;
        let f = [SourceTerm::constant(1.0), SourceTerm::new(1, c(1.0, 0.0)), SourceTerm::new(-2, c(0.0, 0.5))];
        let u = solve_dirichlet(&f, &g).unwrap();
        assert!(harmonic_residual(&u, 0.95, 12, 16, 1e-3) <= 1e-8);
        let (res, fmax) = particular_residual(&u, 0.95, 12, 16, 1e-3);
        assert!(res <= 1e-6 * fmax, "{res} vs {fmax}");
    }

    #[test]
    fn polar_grid_matches_pointwise() {
        let g = sample_white_noise(1, 64, 3).unwrap().field;
        let u = solve_dirichlet(&[SourceTerm::new(1, c(0.2, 0.1))], &g).unwrap();
        let grid = PolarGrid { n_r: 5, n_theta: 16 };
        let vals = u.eval_polar(grid);
        for (i, r) in grid.radii().into_iter().enumerate() {
            for j in 0..16 {
                let th = std::f64::consts::TAU * j as f64 / 16.0;
                assert!((vals[i][j] - u.eval(r, th)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_norm() {
        let g = mode(16, 5, c(1.0, 0.0));
        let u = harmonic_extension(&g).unwrap();
        let alpha = WeightExpr::power(1.5);
        let n = snorm(&u, &alpha, 0.0);
        let b = 26f64.sqrt();
        assert!((n.snorm_alpha - b.powf(1.5) / b.sqrt()).abs() < 1e-12);
        assert_eq!(n.source_norm, 0.0);
    }

    #[test]
    fn constant_source_norm_by_hand() {
        let g = SpectralField::zeros(1, 8).unwrap();
        let u = solve_dirichlet(&[SourceTerm::constant(1.0)], &g).unwrap();
        let n = snorm(&u, &WeightExpr::power(1.0), 0.0);
        // harmonic c_0 = -1/4 and particular 1/4, both with weight 1
        assert!((n.snorm_alpha - (1.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((n.lower_order - (1.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert_eq!(n.source_norm, 1.0);
        assert_eq!(n.boundary_norm, 0.0);
    }

    #[test]
    fn snorm_monotone_in_order() {
        let g = sample_white_noise(1, 64, 12).unwrap().field;
        let u = solve_dirichlet(&[SourceTerm::constant(1.0)], &g).unwrap();
        let mut last = 0.0;
        for r in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let v = snorm(&u, &WeightExpr::power(r), 0.0).snorm_alpha;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn apriori_rejects_divergent_alpha0() {
        let seeds: Vec<u64> = (0..4).collect();
        let err = apriori_sweep(&WeightExpr::power(0.0), 0.0, -0.5, &[], &[64], &seeds).unwrap_err();
        assert!(err.to_string().contains("int_1^inf alpha0^2(t) dt/t"));
        let err = apriori_preconditions(&WeightExpr::iter_log_power(1, -0.75).unwrap(), -1.0, -0.5).unwrap_err();
        assert!(err.to_string().contains("lambda > -1/2"));
    }

    #[test]
    fn convergence_precondition_and_single_mode() {
        let alpha = WeightExpr::product(vec![WeightExpr::power(1.0), WeightExpr::iter_log_power(1, 0.75).unwrap()]);
        let g = mode(64, 10, c(1.0, 0.0));
        let grid = PolarGrid { n_r: 16, n_theta: 64 };
        let t = uniform_convergence_experiment(&alpha, &g, &[4, 8, 16], grid).unwrap();
        assert!((t.rows[0].sup_error - 1.0).abs() < 1e-12);
        assert!(t.rows[2].sup_error == 0.0);
        assert!(t.bound_holds());
        let err = uniform_convergence_experiment(&WeightExpr::power(1.0), &g, &[4], grid).unwrap_err();
        assert!(err.to_string().contains("int_1^inf t alpha^-2(t) dt"));
    }
}
