//! Matuszewska indices and the O-regular variation window check.
//!
//! Symbolic indices come from a rule table that is exact on the trees it
//! covers; window estimates sample `log(alpha(lambda t)/alpha(t)) / log lambda`
//! on finite grids and are only as good as the window.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::expr::{Weight, WeightExpr};
use crate::error::WeightError;

/// Lower and upper Matuszewska indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indices {
    pub lower: f64,
    pub upper: f64,
}

impl Indices {
    pub fn new(lower: f64, upper: f64) -> Self {
        Indices { lower, upper }
    }

    pub fn equal(r: f64) -> Self {
        Indices { lower: r, upper: r }
    }

    pub fn is_equal(&self) -> bool {
        self.lower == self.upper
    }

    fn scaled(self, c: f64) -> Self {
        if c >= 0.0 {
            Indices::new(c * self.lower, c * self.upper)
        } else {
            Indices::new(c * self.upper, c * self.lower)
        }
    }
}

impl WeightExpr {
    /// Symbolic Matuszewska indices, or `None` when the rule table does not
    /// cover the tree.
    ///
    /// Products are additive only if at least one factor has equal indices;
    /// compositions need an inner weight with equal positive indices.
    pub fn symbolic_indices(&self) -> Option<Indices> {
        use WeightExpr::*;
        match self {
            Power { r } => Some(Indices::equal(*r)),
            IterLogPower { .. } | OnePlusLogPower { .. } | Scale { .. } => Some(Indices::equal(0.0)),
            OscPower { theta, delta, lambda } => {
                let spread = if *lambda < 1.0 { *delta } else { SQRT_2 * delta };
                Some(Indices::new(theta - spread, theta + spread))
            }
            Product { args } => {
                let mut acc = Indices::equal(0.0);
                for a in args {
                    let ix = a.symbolic_indices()?;
                    if !acc.is_equal() && !ix.is_equal() {
                        return None;
                    }
                    acc = Indices::new(acc.lower + ix.lower, acc.upper + ix.upper);
                }
                Some(acc)
            }
            PowerCompose { inner, theta } => inner.symbolic_indices().map(|ix| ix.scaled(*theta)),
            Pow { base, exponent } => base.symbolic_indices().map(|ix| ix.scaled(*exponent)),
            Compose { outer, inner } => {
                let ii = inner.symbolic_indices()?;
                if !ii.is_equal() || ii.lower <= 0.0 {
                    return None;
                }
                let oi = outer.symbolic_indices()?;
                if oi.is_equal() || inner.pure_power_exponent().is_some() {
                    Some(oi.scaled(ii.lower))
                } else {
                    None
                }
            }
            PiecewiseGlue { above, .. } => above.symbolic_indices(),
        }
    }
}

/// Sampling window `[t_min, t_max]` for index estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t_min: f64,
    pub t_max: f64,
}

impl Window {
    pub fn new(t_min: f64, t_max: f64) -> Result<Self, WeightError> {
        if !(t_min >= 1.0 && t_max > t_min && t_max.is_finite()) {
            return Err(WeightError::InvalidParameter(format!(
                "window must satisfy 1 <= t_min < t_max < inf, got [{t_min}, {t_max}]"
            )));
        }
        Ok(Window { t_min, t_max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub sigma0_sym: Option<f64>,
    pub sigma1_sym: Option<f64>,
    /// Window estimates. For oscillating weights these only describe the
    /// window: the oscillation needs astronomically large `t` to develop.
    pub sigma0_win: f64,
    pub sigma1_win: f64,
    pub window: Window,
    pub lambda_max: f64,
}

const T_POINTS: usize = 256;
const LAMBDA_POINTS: usize = 48;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// Symbolic indices plus finite-window estimates.
///
/// For each `lambda` on a log grid in `(1, lambda_max]` the quotient
/// `log(alpha(lambda t)/alpha(t)) / log lambda` is minimized and maximized over
/// a log grid of `t` in the window; the estimates are the min and max of those.
pub fn indices(alpha: &WeightExpr, window: Window, lambda_max: f64) -> Result<IndexEstimate, WeightError> {
    if !(lambda_max > 1.0 && lambda_max.is_finite()) {
        return Err(WeightError::InvalidParameter(format!("lambda_max must be > 1, got {lambda_max}")));
    }
    let ln_lmax = lambda_max.ln();
    let ln_ts: Vec<f64> = log_grid(window.t_min, window.t_max, T_POINTS).collect();
    let base: Vec<f64> = ln_ts.iter().map(|&u| alpha.ln_eval(u)).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 1..=LAMBDA_POINTS {
        let ln_l = ln_lmax * i as f64 / LAMBDA_POINTS as f64;
        for (&u, &b) in ln_ts.iter().zip(&base) {
            let q = (alpha.ln_eval(u + ln_l) - b) / ln_l;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let sym = alpha.symbolic_indices();
    Ok(IndexEstimate {
        sigma0_sym: sym.map(|s| s.lower),
        sigma1_sym: sym.map(|s| s.upper),
        sigma0_win: lo,
        sigma1_win: hi,
        window,
        lambda_max,
    })
}

/// Grid for the OR window check: `t` on a log grid in `[1, t_max]`,
/// `lambda` uniform in `[1, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrGrid {
    pub t_max: f64,
    pub t_points: usize,
    pub lambda_points: usize,
    /// Optional ceiling on the constant; a callback whose ratio exceeds it is
    /// rejected even if every sample is finite.
    pub c_limit: Option<f64>,
}

impl Default for OrGrid {
    fn default() -> Self {
        OrGrid { t_max: 1e8, t_points: 400, lambda_points: 33, c_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrCheckResult {
    pub b: f64,
    pub c_est: f64,
    pub grid: OrGrid,
    pub pass: bool,
}

/// Estimates the constant `c` with `c^-1 <= alpha(lambda t)/alpha(t) <= c`
/// over the grid, for `lambda` in `[1, b]`.
pub fn check_or_window<W: Weight + ?Sized>(alpha: &W, b: f64, grid: OrGrid) -> Result<OrCheckResult, WeightError> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(WeightError::InvalidParameter(format!("b must be > 1, got {b}")));
    }
    if grid.t_points < 2 || grid.lambda_points < 2 || !(grid.t_max > 1.0) {
        return Err(WeightError::InvalidParameter("OR grid must have >= 2 points per axis and t_max > 1".into()));
    }
    let ln_b = b.ln();
    let mut max_dev = 0.0_f64;
    let mut sane = true;
    for u in log_grid(1.0, grid.t_max, grid.t_points) {
        let a0 = alpha.ln_value(u);
        if !a0.is_finite() {
            sane = false;
            break;
        }
        for j in 0..grid.lambda_points {
            let ln_l = ln_b * j as f64 / (grid.lambda_points - 1) as f64;
            let d = alpha.ln_value(u + ln_l) - a0;
            if !d.is_finite() {
                sane = false;
                break;
            }
            max_dev = max_dev.max(d.abs());
        }
        if !sane {
            break;
        }
    }
    let c_est = if sane { max_dev.exp() } else { f64::INFINITY };
    let pass = c_est.is_finite() && grid.c_limit.is_none_or(|cap| c_est <= cap);
    Ok(OrCheckResult { b, c_est, grid, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::expr::FnWeight;

    #[test]
    fn power_log_chain_has_equal_indices() {
        let w = WeightExpr::product(vec![
            WeightExpr::power(1.3),
            WeightExpr::iter_log_power(1, -2.0).unwrap(),
            WeightExpr::iter_log_power(2, 4.0).unwrap(),
        ]);
        assert_eq!(w.symbolic_indices(), Some(Indices::equal(1.3)));
    }

    #[test]
    fn osc_indices_closed_forms() {
        let w = WeightExpr::osc_power(0.5, 0.25, 0.5).unwrap();
        assert_eq!(w.symbolic_indices(), Some(Indices::new(0.25, 0.75)));
        let w = WeightExpr::osc_power(0.5, 0.25, 1.0).unwrap();
        let ix = w.symbolic_indices().unwrap();
        assert_eq!(ix.lower, 0.5 - SQRT_2 * 0.25);
        assert_eq!(ix.upper, 0.5 + SQRT_2 * 0.25);
    }

    #[test]
    fn product_of_two_oscillating_factors_is_not_covered() {
        let a = WeightExpr::osc_power(0.0, 1.0, 0.5).unwrap();
        let w = WeightExpr::product(vec![a.clone(), a.clone()]);
        assert_eq!(w.symbolic_indices(), None);
        let w = WeightExpr::product(vec![a, WeightExpr::power(2.0)]);
        assert_eq!(w.symbolic_indices(), Some(Indices::new(1.0, 3.0)));
    }

    #[test]
    fn pow_with_negative_exponent_swaps() {
        let a = WeightExpr::osc_power(1.0, 0.5, 0.5).unwrap();
        let w = WeightExpr::pow(a, -2.0).unwrap();
        assert_eq!(w.symbolic_indices(), Some(Indices::new(-3.0, -1.0)));
    }

    #[test]
    fn power_compose_scales() {
        let a = WeightExpr::osc_power(1.0, 0.5, 0.5).unwrap();
        let w = WeightExpr::power_compose(a, 0.5).unwrap();
        assert_eq!(w.symbolic_indices(), Some(Indices::new(0.25, 0.75)));
    }

    #[test]
    fn window_estimate_of_pure_power_is_exact() {
        let w = WeightExpr::power(-0.75);
        let est = indices(&w, Window::new(1.0, 1e6).unwrap(), 1e6).unwrap();
        assert!((est.sigma0_win + 0.75).abs() < 1e-12);
        assert!((est.sigma1_win + 0.75).abs() < 1e-12);
    }

    #[test]
    fn or_check_power_matches_closed_form() {
        for &r in &[-2.5, -0.5, 0.0, 1.0, 3.0] {
            for &b in &[1.5, 2.0, 10.0] {
                let res = check_or_window(&WeightExpr::power(r), b, OrGrid::default()).unwrap();
                let expect = b.powf(r.abs());
                assert!((res.c_est - expect).abs() <= 1e-12 * expect, "r={r} b={b}");
                assert!(res.pass);
            }
        }
    }

    #[test]
    fn or_check_rejects_exponential_callback() {
        let res = check_or_window(&FnWeight(|t: f64| t.exp()), 2.0, OrGrid::default()).unwrap();
        assert!(!res.pass);
        let capped = OrGrid { t_max: 100.0, c_limit: Some(1e6), ..OrGrid::default() };
        let res = check_or_window(&FnWeight(|t: f64| t.exp()), 2.0, capped).unwrap();
        assert!(res.c_est.is_finite());
        assert!(!res.pass);
        let res = check_or_window(&FnWeight(|t: f64| 2.0 + t.sin()), 2.0, capped).unwrap();
        assert!(res.pass);
    }

    #[test]
    fn or_check_rejects_bad_b() {
        assert!(check_or_window(&WeightExpr::one(), 1.0, OrGrid::default()).is_err());
    }
}
