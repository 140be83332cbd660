//! Composition counts, the composition-count bound, and the recurrence bound
//! `B(n) = sum_{p=1}^{tau(n)} sum_{n_1+...+n_p=n} prod B(ceil(n_i/2))`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalogue::{FunctionSpec, Smooth};
use crate::error::{Error, Result};
use crate::logvalue::{LogValue, Rounding};

/// Compositions of `n` into `p` positive parts, `C(n-1, p-1)`.
pub fn compositions_count(n: u64, p: u64) -> Result<BigUint> {
    if p < 1 {
        return Err(Error::Input("a composition needs at least one part".into()));
    }
    if p > n {
        return Ok(BigUint::zero());
    }
    Ok(binomial(n - 1, p - 1))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Lower bound `E_NUM / E_DEN <= e` (e truncated after 15 decimals).
const E_NUM: u64 = 2_718_281_828_459_045;
const E_DEN: u64 = 1_000_000_000_000_000;

/// `sum_{p=1}^{L} C(n-1, p-1) <= (e n / L)^L`, with `e` replaced by a rational
/// lower bound so a `true` verdict is exact and conservative.
pub fn check_composition_bound(n: u64, l: u64) -> Result<bool> {
    if l < 1 || l > n {
        return Err(Error::Input(format!(
            "need 1 <= L <= n, got L = {l}, n = {n}"
        )));
    }
    let lhs: BigUint = (1..=l).map(|p| binomial(n - 1, p - 1)).sum();
    Ok(composition_bound_holds(&lhs, n, l))
}

fn composition_bound_holds(lhs: &BigUint, n: u64, l: u64) -> bool {
    let l32 = u32::try_from(l).expect("L fits u32");
    let left = lhs * BigUint::from(l).pow(l32) * BigUint::from(E_DEN).pow(l32);
    let right = BigUint::from(E_NUM).pow(l32) * BigUint::from(n).pow(l32);
    left <= right
}

/// Every `(n, L)` with `1 <= L <= n <= n_max` where the bound fails.
pub fn composition_bound_sweep(n_max: u64) -> Vec<(u64, u64)> {
    (1..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut lhs = BigUint::zero();
            let mut bad = Vec::new();
            let mut row = BigUint::one();
            for l in 1..=n {
                // row = C(n-1, l-1)
                if l > 1 {
                    row = row * (n - l + 1) / (l - 1);
                }
                lhs += &row;
                if !composition_bound_holds(&lhs, n, l) {
                    bad.push((n, l));
                }
            }
            bad
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactSeed,
    UpperBoundSeed,
    Recurrence,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ExactSeed => "exact-seed",
            Provenance::UpperBoundSeed => "upper-bound-seed",
            Provenance::Recurrence => "recurrence",
        }
    }
}

/// Integer-valued bound on the number of UPS parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tau {
    /// `tau(n) = n`.
    Identity,
    /// `tau(n) = k`.
    Constant { k: usize },
    /// `tau(n) = ceil(n / phi(n))`, falling back to `n` below phi's domain.
    Phi { phi: FunctionSpec },
}

impl Tau {
    pub fn at(&self, n: usize) -> usize {
        let t = match self {
            Tau::Identity => n,
            Tau::Constant { k } => *k,
            Tau::Phi { phi } => match phi.eval(n as f64) {
                Ok(v) if v > 0.0 => (n as f64 / v).ceil() as usize,
                _ => n,
            },
        };
        t.clamp(1, n.max(1))
    }

    pub fn describe(&self) -> String {
        match self {
            Tau::Identity => "identity".into(),
            Tau::Constant { k } => format!("constant {k}"),
            Tau::Phi { phi } => format!("ceil(n/phi(n)), phi = {phi}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub n: usize,
    pub value: LogValue,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    pub q: u32,
    pub entries: Vec<BoundEntry>,
    pub tau: Option<Tau>,
}

impl BoundTable {
    /// Seeds from exact counts `(n, R(n))`.
    pub fn exact_seeds(q: u32, counts: &[(usize, BigUint)]) -> Result<Self> {
        Self::seeds(q, counts, Provenance::ExactSeed)
    }

    /// Seeds from values only known to be upper bounds.
    pub fn upper_bound_seeds(q: u32, counts: &[(usize, BigUint)]) -> Result<Self> {
        Self::seeds(q, counts, Provenance::UpperBoundSeed)
    }

    fn seeds(q: u32, counts: &[(usize, BigUint)], provenance: Provenance) -> Result<Self> {
        let mut entries = counts
            .iter()
            .map(|(n, c)| {
                Ok(BoundEntry {
                    n: *n,
                    value: LogValue::from_count(q, c, Rounding::Up)?,
                    provenance,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by_key(|e| e.n);
        Ok(BoundTable {
            q,
            entries,
            tau: None,
        })
    }

    pub fn get(&self, n: usize) -> Option<&BoundEntry> {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// CSV with columns `n,exponent_log_q,provenance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,exponent_log_q,provenance\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{}",
                e.n,
                format_sig(e.value.log_q(), 15),
                e.provenance.as_str()
            )
            .expect("write to string");
        }
        out
    }
}

/// `printf("%.{digits}g")`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Extends `seeds` to `n_max` with the composition recurrence, rounding every
/// step up. `S_p(m)`, the `p`-fold convolution of `g(m) = B(ceil(m/2))`, is
/// built for all `m` in increasing order; `B(m)` for `m` past the seeds is
/// `sum_{p <= tau(m)} S_p(m)`.
pub fn recurrence_bound(seeds: &BoundTable, tau: &Tau, n_max: usize) -> Result<BoundTable> {
    let n_seed = seeds.entries.last().map_or(0, |e| e.n);
    for (expected, e) in (1..).zip(&seeds.entries) {
        if e.n != expected {
            return Err(Error::SeedGap { index: expected });
        }
    }
    if n_seed == 0 {
        return Err(Error::SeedGap { index: 1 });
    }
    let q = seeds.q;
    let mut bounds: Vec<Option<LogValue>> = vec![None; n_max.max(n_seed) + 1];
    let mut entries = Vec::with_capacity(n_max.max(n_seed));
    for e in &seeds.entries {
        bounds[e.n] = Some(e.value.with_rounding(Rounding::Up));
    }
    entries.extend(seeds.entries.iter().filter(|e| e.n <= n_max).cloned());

    let p_max = (n_seed + 1..=n_max).map(|n| tau.at(n)).max().unwrap_or(0);
    // conv[p][m] = S_{p+1}(m)
    let mut conv: Vec<Vec<Option<LogValue>>> = vec![vec![None; n_max + 1]; p_max];
    let mut g: Vec<Option<LogValue>> = vec![None; n_max + 1];
    for m in 1..=n_max {
        g[m] = bounds[m.div_ceil(2)];
        debug_assert!(g[m].is_some(), "B(ceil({m}/2)) computed before B({m})");
        if p_max == 0 {
            continue;
        }
        conv[0][m] = g[m];
        for p in 1..p_max.min(m) {
            let (prev, cur) = conv.split_at_mut(p);
            let prev = &prev[p - 1];
            let mut acc: Option<LogValue> = None;
            for j in 1..=m - p {
                if let (Some(gj), Some(s)) = (g[j], prev[m - j]) {
                    let term = gj.mul(&s);
                    acc = Some(match acc {
                        Some(a) => a.add(&term),
                        None => term,
                    });
                }
            }
            cur[0][m] = acc;
        }
        if m > n_seed {
            let mut total: Option<LogValue> = None;
            for row in conv.iter().take(tau.at(m)) {
                if let Some(s) = row[m] {
                    total = Some(match total {
                        Some(t) => t.add(&s),
                        None => s,
                    });
                }
            }
            let value = total.expect("S_1(m) is always present");
            bounds[m] = Some(value);
            entries.push(BoundEntry {
                n: m,
                value,
                provenance: Provenance::Recurrence,
            });
        }
    }
    Ok(BoundTable {
        q,
        entries,
        tau: Some(*tau),
    })
}
