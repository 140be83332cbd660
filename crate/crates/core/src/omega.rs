//! The bound template `Omega(x) = q^(c1 x/psi(x) + c2 (x/phi(x)) ln phi(x))`
//! and numeric checks of the product and monotonicity inequalities it obeys
//! when its exponent is increasing and concave.

use serde::Serialize;

use crate::catalogue::{check_delta, leq_with_slack, FunctionSpec, MixedExponent, Smooth};
use crate::error::{Error, Result};
use crate::logvalue::{LogValue, Rounding};

/// Grid used when verifying the concavity hypothesis of a single check.
const HYPOTHESIS_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaParams {
    pub q: u32,
    pub c1: f64,
    pub c2: f64,
    pub phi: FunctionSpec,
    pub psi: FunctionSpec,
}

impl OmegaParams {
    pub fn new(q: u32, c1: f64, c2: f64, phi: FunctionSpec, psi: FunctionSpec) -> Result<Self> {
        if q < 2 {
            return Err(Error::Input(format!("q must be at least 2, got {q}")));
        }
        for (name, c) in [("c1", c1), ("c2", c2)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Input(format!("{name} must be positive, got {c}")));
            }
        }
        Ok(OmegaParams {
            q,
            c1,
            c2,
            phi,
            psi,
        })
    }

    /// The exponent `f(x) = c1 x/psi(x) + c2 (x/phi(x)) ln phi(x)`.
    pub fn exponent_fn(&self) -> MixedExponent {
        MixedExponent {
            phi: self.phi,
            psi: self.psi,
            w1: self.c1,
            w2: self.c2,
        }
    }

    pub fn exponent(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::Input(format!(
                "Omega is evaluated for x >= 1, got {x}"
            )));
        }
        self.exponent_fn().eval(x)
    }

    fn require_concave(&self, lo: f64, hi: f64) -> Result<()> {
        let f = self.exponent_fn();
        let report = check_delta(&f, lo, hi, HYPOTHESIS_GRID)?;
        match report.first_violation {
            None => Ok(()),
            Some(v) => Err(Error::HypothesisNotVerified(format!(
                "Omega exponent is not increasing and concave on [{lo}, {hi}]: {} at x = {}",
                v.condition, v.x
            ))),
        }
    }
}

pub fn omega(x: f64, params: &OmegaParams) -> Result<LogValue> {
    let e = params.exponent(x)?;
    LogValue::from_exponent(params.q, e, Rounding::Nearest)
}

/// Both sides of a checked inequality, as base-q exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn compare(lhs: f64, rhs: f64) -> ExponentCheck {
    ExponentCheck {
        lhs,
        rhs,
        holds: leq_with_slack(lhs, rhs),
    }
}

/// `prod Omega(ceil(n_i/2)) <= Omega(n/(2p) + 1)^p` for a composition of `n`.
pub fn check_product_bound(parts: &[u64], params: &OmegaParams) -> Result<ExponentCheck> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(Error::Input(
            "parts must be a nonempty list of positive integers".into(),
        ));
    }
    let n: u64 = parts.iter().sum();
    let p = parts.len() as f64;
    let halves: Vec<f64> = parts.iter().map(|&m| m.div_ceil(2) as f64).collect();
    let mid = n as f64 / (2.0 * p) + 1.0;
    let lo = halves.iter().copied().fold(mid, f64::min);
    let hi = halves.iter().copied().fold(mid, f64::max);
    params.require_concave(lo, hi)?;
    let lhs = halves
        .iter()
        .map(|&x| params.exponent(x))
        .sum::<Result<f64>>()?;
    let rhs = p * params.exponent(mid)?;
    Ok(compare(lhs, rhs))
}

/// `Omega(n/(2p) + 1)^p <= Omega(n/(2(p+1)) + 1)^(p+1)`.
pub fn check_p_monotonicity(n: u64, p: u64, params: &OmegaParams) -> Result<ExponentCheck> {
    if p < 1 || n < 1 {
        return Err(Error::Input(format!(
            "need n, p >= 1, got n = {n}, p = {p}"
        )));
    }
    let (n, p) = (n as f64, p as f64);
    let at_p = n / (2.0 * p) + 1.0;
    let at_next = n / (2.0 * (p + 1.0)) + 1.0;
    params.require_concave(at_next, at_p)?;
    let lhs = p * params.exponent(at_p)?;
    let rhs = (p + 1.0) * params.exponent(at_next)?;
    Ok(compare(lhs, rhs))
}

/// `sum f(x_i) <= k f(mean)` for `f` verified increasing and concave on the
/// span of `xs`.
pub fn check_jensen(f: &dyn Smooth, xs: &[f64]) -> Result<ExponentCheck> {
    if xs.is_empty() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Input(
            "xs must be a nonempty list of positive reals".into(),
        ));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    let report = check_delta(f, lo, hi, HYPOTHESIS_GRID)?;
    if let Some(v) = report.first_violation {
        return Err(Error::HypothesisNotVerified(format!(
            "{} is not increasing and concave on [{lo}, {hi}]: {} at x = {}",
            f.describe(),
            v.condition,
            v.x
        )));
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let lhs = xs.iter().map(|&x| f.eval(x)).sum::<Result<f64>>()?;
    let rhs = k * f.eval(mean)?;
    Ok(compare(lhs, rhs))
}
