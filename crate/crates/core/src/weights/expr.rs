use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::WeightError;

/// A weight function on `[1, inf)` built from O-regularly varying primitives.
///
/// Evaluation runs in log space: [`WeightExpr::ln_eval`] takes `ln t` and
/// returns `ln alpha(t)`, so arguments up to `1e300` and compositions like
/// `alpha(t^theta)` never overflow. Every node is defined on all of `(0, inf)`;
/// the public [`WeightExpr::eval`] restricts to `t >= 1`.
///
/// The JSON form is tagged by `"op"`:
///
/// ```json
/// {"op":"product","args":[{"op":"power","r":-0.5},{"op":"iter_log_power","depth":1,"k":2.0}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightExpr {
    /// `t^r`.
    Power { r: f64 },
    /// `(log_j t)^k` with `log_j` the `j`-fold iterated logarithm, glued to 1
    /// where `log_j t <= 1` (so on `[1, e]` for depth 1, `[1, e^e]` for depth 2).
    IterLogPower { depth: u32, k: f64 },
    /// `(1 + log t)^k`.
    OnePlusLogPower { k: f64 },
    /// `t^(theta + delta sin((log log t)^lambda))` for `t > e`, `t^theta` below.
    OscPower { theta: f64, delta: f64, lambda: f64 },
    /// The constant `c`.
    Scale { c: f64 },
    Product { args: Vec<WeightExpr> },
    /// `t -> inner(t^theta)`.
    PowerCompose { inner: Box<WeightExpr>, theta: f64 },
    /// `t -> base(t)^exponent`.
    Pow { base: Box<WeightExpr>, exponent: f64 },
    /// `t -> outer(inner(t))`.
    Compose {
        outer: Box<WeightExpr>,
        inner: Box<WeightExpr>,
    },
    /// `below(t)` for `t < boundary`, `above(t)` otherwise.
    PiecewiseGlue {
        boundary: f64,
        below: Box<WeightExpr>,
        above: Box<WeightExpr>,
    },
}

fn finite(name: &str, v: f64) -> Result<(), WeightError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(WeightError::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl WeightExpr {
    pub fn power(r: f64) -> Self {
        WeightExpr::Power { r }
    }

    /// The constant weight 1.
    pub fn one() -> Self {
        WeightExpr::Power { r: 0.0 }
    }

    pub fn iter_log_power(depth: u32, k: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::IterLogPower { depth, k };
        w.validate()?;
        Ok(w)
    }

    pub fn one_plus_log_power(k: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::OnePlusLogPower { k };
        w.validate()?;
        Ok(w)
    }

    pub fn osc_power(theta: f64, delta: f64, lambda: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::OscPower { theta, delta, lambda };
        w.validate()?;
        Ok(w)
    }

    pub fn scale(c: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::Scale { c };
        w.validate()?;
        Ok(w)
    }

    pub fn product(args: Vec<WeightExpr>) -> Self {
        WeightExpr::Product { args }
    }

    pub fn power_compose(inner: WeightExpr, theta: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::PowerCompose { inner: Box::new(inner), theta };
        w.validate()?;
        Ok(w)
    }

    pub fn pow(base: WeightExpr, exponent: f64) -> Result<Self, WeightError> {
        let w = WeightExpr::Pow { base: Box::new(base), exponent };
        w.validate()?;
        Ok(w)
    }

    pub fn compose(outer: WeightExpr, inner: WeightExpr) -> Self {
        WeightExpr::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    pub fn glue(boundary: f64, below: WeightExpr, above: WeightExpr) -> Result<Self, WeightError> {
        let w = WeightExpr::PiecewiseGlue {
            boundary,
            below: Box::new(below),
            above: Box::new(above),
        };
        w.validate()?;
        Ok(w)
    }

    /// Checks every parameter constraint in the tree.
    pub fn validate(&self) -> Result<(), WeightError> {
        use WeightExpr::*;
        match self {
            Power { r } => finite("r", *r),
            IterLogPower { depth, k } => {
                if *depth == 0 {
                    return Err(WeightError::InvalidParameter("iterated log depth must be >= 1".into()));
                }
                finite("k", *k)
            }
            OnePlusLogPower { k } => finite("k", *k),
            OscPower { theta, delta, lambda } => {
                finite("theta", *theta)?;
                if !(*delta > 0.0 && delta.is_finite()) {
                    return Err(WeightError::InvalidParameter(format!("delta must be > 0, got {delta}")));
                }
                if !(*lambda > 0.0 && *lambda <= 1.0) {
                    return Err(WeightError::InvalidParameter(format!(
                        "lambda must lie in (0, 1] (lambda > 1 is not O-regularly varying), got {lambda}"
                    )));
                }
                Ok(())
            }
            Scale { c } => {
                if *c > 0.0 && c.is_finite() {
                    Ok(())
                } else {
                    Err(WeightError::InvalidParameter(format!("scale must be > 0, got {c}")))
                }
            }
            Product { args } => args.iter().try_for_each(|a| a.validate()),
            PowerCompose { inner, theta } => {
                if !(*theta > 0.0 && theta.is_finite()) {
                    return Err(WeightError::InvalidParameter(format!("compose exponent must be > 0, got {theta}")));
                }
                inner.validate()
            }
            Pow { base, exponent } => {
                finite("exponent", *exponent)?;
                base.validate()
            }
            Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()
            }
            PiecewiseGlue { boundary, below, above } => {
                if !(*boundary > 0.0 && boundary.is_finite()) {
                    return Err(WeightError::InvalidParameter(format!("glue boundary must be > 0, got {boundary}")));
                }
                below.validate()?;
                above.validate()
            }
        }
    }

    /// `ln alpha(t)` as a function of `ln t`. Total on the real line.
    pub fn ln_eval(&self, ln_t: f64) -> f64 {
        use WeightExpr::*;
        match self {
            Power { r } => r * ln_t,
            IterLogPower { depth, k } => {
                let mut x = ln_t;
                for _ in 1..*depth {
                    if x <= 1.0 {
                        return 0.0;
                    }
                    x = x.ln();
                }
                if x <= 1.0 {
                    0.0
                } else {
                    k * x.ln()
                }
            }
            OnePlusLogPower { k } => {
                if ln_t <= 0.0 {
                    0.0
                } else {
                    k * ln_t.ln_1p()
                }
            }
            OscPower { theta, delta, lambda } => {
                if ln_t <= 1.0 {
                    theta * ln_t
                } else {
                    (theta + delta * ln_t.ln().powf(*lambda).sin()) * ln_t
                }
            }
            Scale { c } => c.ln(),
            Product { args } => args.iter().map(|a| a.ln_eval(ln_t)).sum(),
            PowerCompose { inner, theta } => inner.ln_eval(theta * ln_t),
            Pow { base, exponent } => exponent * base.ln_eval(ln_t),
            Compose { outer, inner } => outer.ln_eval(inner.ln_eval(ln_t)),
            PiecewiseGlue { boundary, below, above } => {
                if ln_t < boundary.ln() {
                    below.ln_eval(ln_t)
                } else {
                    above.ln_eval(ln_t)
                }
            }
        }
    }

    /// `alpha(t)` for `t >= 1`.
    pub fn eval(&self, t: f64) -> Result<f64, WeightError> {
        if !(t >= 1.0) || t.is_infinite() {
            return Err(WeightError::Domain { t });
        }
        Ok(self.ln_eval(t.ln()).exp())
    }

    /// Evaluation on `(0, inf)`, used where a weight is fed values below 1
    /// (interpolation parameters applied to ratios).
    pub fn eval_extended(&self, t: f64) -> Result<f64, WeightError> {
        if !(t > 0.0) || t.is_infinite() {
            return Err(WeightError::Domain { t });
        }
        Ok(self.ln_eval(t.ln()).exp())
    }

    /// `Some(r)` when the tree is exactly `c * t^r` on all of `(0, inf)`.
    pub fn pure_power_exponent(&self) -> Option<f64> {
        use WeightExpr::*;
        match self {
            Power { r } => Some(*r),
            Scale { .. } => Some(0.0),
            Product { args } => args.iter().map(|a| a.pure_power_exponent()).sum(),
            PowerCompose { inner, theta } => inner.pure_power_exponent().map(|r| r * theta),
            Pow { base, exponent } => base.pure_power_exponent().map(|r| r * exponent),
            Compose { outer, inner } => {
                let a = outer.pure_power_exponent()?;
                let b = inner.pure_power_exponent()?;
                Some(a * b)
            }
            _ => None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, WeightError> {
        let w: WeightExpr = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weight trees always serialize")
    }
}

/// Upper end of the constant glue region of an iterated logarithm: `e`, `e^e`, ...
pub fn iter_log_glue_point(depth: u32) -> f64 {
    let mut t = 1.0;
    for _ in 0..depth {
        t = E.powf(t);
    }
    t
}

/// Anything that can be evaluated as a positive weight in log space.
///
/// Implemented by [`WeightExpr`] and by [`FnWeight`], which wraps a plain
/// callback so hand-written weights can go through the OR window check.
pub trait Weight {
    fn ln_value(&self, ln_t: f64) -> f64;
}

impl Weight for WeightExpr {
    fn ln_value(&self, ln_t: f64) -> f64 {
        self.ln_eval(ln_t)
    }
}

/// A callback weight `t -> alpha(t)`. Non-positive or non-finite values
/// propagate as non-finite logarithms.
pub struct FnWeight<F>(pub F);

impl<F: Fn(f64) -> f64> Weight for FnWeight<F> {
    fn ln_value(&self, ln_t: f64) -> f64 {
        let v = (self.0)(ln_t.exp());
        if v > 0.0 {
            v.ln()
        } else {
            f64::NAN
        }
    }
}
