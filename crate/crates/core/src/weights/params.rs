//! Interpolation parameters and the `eta` weight for rough boundary data.

use serde::{Deserialize, Serialize};

use super::expr::WeightExpr;
use crate::error::WeightError;

/// The interpolation parameter `psi` between `H^{r0}` and `H^{r1}` that
/// produces `H^alpha`:
///
/// `psi(t) = t^{-r0/(r1-r0)} alpha(t^{1/(r1-r0)})` for `t >= 1`, `alpha(1)` below.
pub fn interp_param(alpha: &WeightExpr, r0: f64, r1: f64) -> Result<WeightExpr, WeightError> {
    if !(r0 < r1) {
        return Err(WeightError::Constraint(format!("r0 < r1 violated: r0 = {r0}, r1 = {r1}")));
    }
    if let Some(ix) = alpha.symbolic_indices() {
        if !(r0 < ix.lower) {
            return Err(WeightError::Constraint(format!(
                "r0 < sigma0(alpha) violated: r0 = {r0}, sigma0 = {}",
                ix.lower
            )));
        }
        if !(r1 > ix.upper) {
            return Err(WeightError::Constraint(format!(
                "r1 > sigma1(alpha) violated: r1 = {r1}, sigma1 = {}",
                ix.upper
            )));
        }
    }
    let width = r1 - r0;
    let above = WeightExpr::product(vec![
        WeightExpr::power(-r0 / width),
        WeightExpr::power_compose(alpha.clone(), 1.0 / width)?,
    ]);
    let below = WeightExpr::scale(alpha.ln_eval(0.0).exp())?;
    WeightExpr::glue(1.0, below, above)
}

/// `t -> alpha0(t) psi(alpha1(t)/alpha0(t))`.
pub fn compose_param(alpha0: &WeightExpr, alpha1: &WeightExpr, psi: &WeightExpr) -> Result<WeightExpr, WeightError> {
    if let (Some(i0), Some(i1)) = (alpha0.symbolic_indices(), alpha1.symbolic_indices()) {
        if i0.lower > i1.upper {
            return Err(WeightError::Constraint(format!(
                "alpha0/alpha1 is unbounded at infinity: sigma0(alpha0) = {} > sigma1(alpha1) = {}",
                i0.lower, i1.upper
            )));
        }
    }
    let ratio = WeightExpr::product(vec![alpha1.clone(), WeightExpr::pow(alpha0.clone(), -1.0)?]);
    Ok(WeightExpr::product(vec![alpha0.clone(), WeightExpr::compose(psi.clone(), ratio)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaBranch {
    /// `sigma1(phi) >= -1/2`: `eta(t) = t^{(1-theta) s1} phi(t^theta)`.
    Interpolated,
    /// `sigma1(phi) < -1/2`: `eta(t) = t^lambda`.
    PlainPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaConstruction {
    pub eta: WeightExpr,
    /// `(s1 - lambda)/(s1 - s0)`; absent on the plain-power branch.
    pub theta: Option<f64>,
    pub branch: EtaBranch,
}

/// Builds the source-space weight `eta` from `phi` and `(s0, s1, lambda)`.
///
/// Requires `s0 < sigma0(phi)`, `s1 > sigma1(phi)`, `lambda > -1/2`, and
/// `lambda <= s1` when `sigma1(phi) >= -1/2` or `s1 < -1/2` otherwise.
pub fn eta_construct(phi: &WeightExpr, s0: f64, s1: f64, lambda: f64) -> Result<EtaConstruction, WeightError> {
    let ix = phi
        .symbolic_indices()
        .ok_or_else(|| WeightError::Constraint("indices of phi are not determined by the symbolic rules".into()))?;
    let mut violated = Vec::new();
    if !(s0 < ix.lower) {
        violated.push(format!("s0 < sigma0(phi) (s0 = {s0}, sigma0 = {})", ix.lower));
    }
    if !(s1 > ix.upper) {
        violated.push(format!("s1 > sigma1(phi) (s1 = {s1}, sigma1 = {})", ix.upper));
    }
    if !(lambda > -0.5) {
        violated.push(format!("lambda > -1/2 (lambda = {lambda})"));
    }
    let interpolated = ix.upper >= -0.5;
    if interpolated && !(lambda <= s1) {
        violated.push(format!("lambda <= s1 since sigma1(phi) >= -1/2 (lambda = {lambda}, s1 = {s1})"));
    }
    if !interpolated && !(s1 < -0.5) {
        violated.push(format!("s1 < -1/2 since sigma1(phi) < -1/2 (s1 = {s1})"));
    }
    if !violated.is_empty() {
        return Err(WeightError::Constraint(violated.join("; ")));
    }

    if !interpolated {
        return Ok(EtaConstruction { eta: WeightExpr::power(lambda), theta: None, branch: EtaBranch::PlainPower });
    }
    let theta = (s1 - lambda) / (s1 - s0);
    let eta = if theta == 0.0 {
        WeightExpr::product(vec![WeightExpr::power(s1), WeightExpr::scale(phi.ln_eval(0.0).exp())?])
    } else {
        WeightExpr::product(vec![
            WeightExpr::power((1.0 - theta) * s1),
            WeightExpr::power_compose(phi.clone(), theta)?,
        ])
    };
    Ok(EtaConstruction { eta, theta: Some(theta), branch: EtaBranch::Interpolated })
}

/// Maximum relative deviation between `eta(t)` and `t^lambda psi(t^{s1-lambda})`
/// on a log grid over `[1, t_max]`, where
/// `psi = interp_param(phi * t^{2q}, s0 + 2q, s1 + 2q)`.
pub fn eta_identity_error(
    phi: &WeightExpr,
    s0: f64,
    s1: f64,
    lambda: f64,
    two_q: f64,
    t_max: f64,
    points: usize,
) -> Result<f64, WeightError> {
    let eta = eta_construct(phi, s0, s1, lambda)?.eta;
    let alpha = WeightExpr::product(vec![phi.clone(), WeightExpr::power(two_q)]);
    let psi = interp_param(&alpha, s0 + two_q, s1 + two_q)?;
    let n = points.max(2);
    let ln_max = t_max.ln();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let u = ln_max * i as f64 / (n - 1) as f64;
        let lhs = eta.ln_eval(u);
        let rhs = lambda * u + psi.ln_eval((s1 - lambda) * u);
        worst = worst.max((rhs - lhs).exp_m1().abs());
    }
    Ok(worst)
}
