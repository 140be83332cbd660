//! Positive reals stored as base-q exponents with directed rounding.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
    Nearest,
}

/// The number `q^log_q`.
///
/// Every operation rounds its result exponent in the direction of the left
/// operand's [`Rounding`], by a margin that covers the libm error of the
/// transcendental steps involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogValue {
    q: u32,
    log_q: f64,
    rounding: Rounding,
}

/// Ulps of slack applied per rounded operation.
const ROUND_ULPS: f64 = 4.0;

fn directed(x: f64, mode: Rounding, scale: f64) -> f64 {
    let delta = ROUND_ULPS * f64::EPSILON * scale.abs().max(x.abs()).max(f64::MIN_POSITIVE);
    match mode {
        Rounding::Nearest => x,
        Rounding::Up => (x + delta).next_up(),
        Rounding::Down => (x - delta).next_down(),
    }
}

fn ln_q(q: u32) -> f64 {
    f64::from(q).ln()
}

impl LogValue {
    pub fn from_exponent(q: u32, log_q: f64, rounding: Rounding) -> Result<Self> {
        if q < 2 {
            return Err(Error::Input(format!(
                "log base must be at least 2, got {q}"
            )));
        }
        if !log_q.is_finite() {
            return Err(Error::Input(format!(
                "exponent must be finite, got {log_q}"
            )));
        }
        Ok(LogValue { q, log_q, rounding })
    }

    pub fn one(q: u32, rounding: Rounding) -> Self {
        LogValue {
            q,
            log_q: 0.0,
            rounding,
        }
    }

    /// Log of a positive integer, rounded as requested.
    pub fn from_count(q: u32, count: &BigUint, rounding: Rounding) -> Result<Self> {
        if count.is_zero() {
            return Err(Error::Input("a log-domain value must be positive".into()));
        }
        let bits = count.bits();
        let ln = if bits <= 53 {
            count.to_f64().expect("fits").ln()
        } else {
            let shift = bits - 53;
            let mut top = (count >> shift).to_f64().expect("53 bits fit");
            if rounding == Rounding::Up {
                top += 1.0;
            }
            top.ln() + shift as f64 * std::f64::consts::LN_2
        };
        let log_q = ln / ln_q(q);
        Self::from_exponent(q, directed(log_q, rounding, log_q), rounding)
    }

    pub fn from_u64(q: u32, count: u64, rounding: Rounding) -> Result<Self> {
        Self::from_count(q, &BigUint::from(count), rounding)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn log_q(&self) -> f64 {
        self.log_q
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn with_rounding(self, rounding: Rounding) -> Self {
        LogValue { rounding, ..self }
    }

    /// The represented value as an `f64` (may overflow to infinity).
    pub fn value(&self) -> f64 {
        (self.log_q * ln_q(self.q)).exp()
    }

    fn same_base(&self, other: &LogValue) {
        assert_eq!(self.q, other.q, "log-domain values over different bases");
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        self.same_base(other);
        let s = self.log_q + other.log_q;
        let scale = self.log_q.abs().max(other.log_q.abs());
        LogValue {
            log_q: directed(s, self.rounding, scale),
            ..*self
        }
    }

    pub fn powi(&self, k: u32) -> LogValue {
        self.powf(f64::from(k))
    }

    pub fn powf(&self, k: f64) -> LogValue {
        let s = self.log_q * k;
        LogValue {
            log_q: directed(s, self.rounding, s),
            ..*self
        }
    }

    /// `self + other` via `max + log_q(1 + q^(min - max))`.
    pub fn add(&self, other: &LogValue) -> LogValue {
        self.same_base(other);
        let (hi, lo) = if self.log_q >= other.log_q {
            (self.log_q, other.log_q)
        } else {
            (other.log_q, self.log_q)
        };
        let lq = ln_q(self.q);
        let tail = ((lo - hi) * lq).exp().ln_1p() / lq;
        LogValue {
            log_q: directed(hi + tail, self.rounding, hi.abs().max(lo.abs())),
            ..*self
        }
    }

    /// Conservative `self >= count`: compares against the count's exponent
    /// rounded up.
    pub fn certainly_ge_count(&self, count: &BigUint) -> bool {
        match LogValue::from_count(self.q, count, Rounding::Up) {
            Ok(c) => self.log_q >= c.log_q,
            Err(_) => true,
        }
    }
}

impl Eq for LogValue {}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.same_base(other);
        self.log_q.total_cmp(&other.log_q)
    }
}
