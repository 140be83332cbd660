//! Analytic function family `f(x) = a * x^b * (ln x)^c * exp(u * (ln x)^v)`
//! with exact first and second derivatives, grid checks of the hypotheses the
//! bootstrap theorem needs, and the bootstrap map on `(c1, c2)`.
//!
//! Every grid check reports what it sampled. Passing a check means "no
//! violation on the sampled range", nothing more.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack for inequality checks evaluated in floating point.
pub const REL_SLACK: f64 = 1e-9;

/// `lhs <= rhs` up to [`REL_SLACK`] relative to the larger magnitude.
pub fn leq_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_SLACK * lhs.abs().max(rhs.abs())
}

/// Value with first and second derivative, propagated by the chain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet {
            v,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub fn variable(x: f64) -> Self {
        Jet {
            v: x,
            d1: 1.0,
            d2: 0.0,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Jet {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
        }
    }

    pub fn recip(self) -> Self {
        let g = self.v;
        Jet {
            v: 1.0 / g,
            d1: -self.d1 / (g * g),
            d2: (2.0 * self.d1 * self.d1 - g * self.d2) / (g * g * g),
        }
    }

    pub fn ln(self) -> Self {
        let g = self.v;
        Jet {
            v: g.ln(),
            d1: self.d1 / g,
            d2: self.d2 / g - self.d1 * self.d1 / (g * g),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

/// A real function of one variable with exact first and second derivatives.
pub trait Smooth: Sync {
    /// Smallest admissible argument.
    fn domain_min(&self) -> f64;

    fn jet(&self, x: f64) -> Result<Jet>;

    fn describe(&self) -> String;

    fn eval(&self, x: f64) -> Result<f64> {
        self.jet(x).map(|j| j.v)
    }
}

/// `f(x) = a * x^b * (ln x)^c * exp(u * (ln x)^v)` on `x >= domain_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u: f64,
    pub v: f64,
    pub domain_min: f64,
}

impl FunctionSpec {
    /// Floor used for members that involve `ln x`; above `e^2`.
    pub const LN_DOMAIN_FLOOR: f64 = 8.0;

    pub fn new(a: f64, b: f64, c: f64, u: f64, v: f64) -> Result<Self> {
        if ![a, b, c, u, v].iter().all(|p| p.is_finite()) {
            return Err(Error::Input("function parameters must be finite".into()));
        }
        if a <= 0.0 {
            return Err(Error::Input(format!(
                "function scale a must be positive, got {a}"
            )));
        }
        let spec = FunctionSpec {
            a,
            b,
            c,
            u,
            v,
            domain_min: 1.0,
        };
        let floor = if spec.involves_ln() {
            Self::LN_DOMAIN_FLOOR
        } else {
            1.0
        };
        Ok(FunctionSpec {
            domain_min: floor,
            ..spec
        })
    }

    pub fn identity() -> Self {
        FunctionSpec::new(1.0, 1.0, 0.0, 0.0, 1.0).expect("valid")
    }

    pub fn with_domain_min(self, domain_min: f64) -> Result<Self> {
        if !(domain_min >= 1.0) {
            return Err(Error::Input(format!(
                "domain_min must be >= 1, got {domain_min}"
            )));
        }
        Ok(FunctionSpec { domain_min, ..self })
    }

    pub fn involves_ln(&self) -> bool {
        self.c != 0.0 || self.u != 0.0
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let ln_ok = !self.involves_ln() || x > 1.0;
        if x.is_finite() && x >= self.domain_min && x >= 1.0 && ln_ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{self} is evaluated at x = {x}, below its domain (x >= {})",
                self.domain_min
            )))
        }
    }

    fn value_unchecked(&self, x: f64) -> f64 {
        let mut f = self.a;
        if self.b != 0.0 {
            f *= x.powf(self.b);
        }
        if self.involves_ln() {
            let l = x.ln();
            if self.c != 0.0 {
                f *= l.powf(self.c);
            }
            if self.u != 0.0 {
                f *= (self.u * l.powf(self.v)).exp();
            }
        }
        f
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        self.jet(x).map(|j| j.d1)
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        self.jet(x).map(|j| j.d2)
    }
}

impl Smooth for FunctionSpec {
    fn domain_min(&self) -> f64 {
        self.domain_min
    }

    /// Uses the logarithmic derivative: with `g = ln f` and `L = ln x`,
    /// `x g' = b + c/L + u v L^(v-1)`, so `f' = f g'` and `f'' = f (g'' + g'^2)`.
    fn jet(&self, x: f64) -> Result<Jet> {
        self.check_domain(x)?;
        let f = self.value_unchecked(x);
        if !self.involves_ln() {
            let (a, b) = (self.a, self.b);
            return Ok(Jet {
                v: f,
                d1: if b == 0.0 {
                    0.0
                } else {
                    a * b * x.powf(b - 1.0)
                },
                d2: if b == 0.0 || b == 1.0 {
                    0.0
                } else {
                    a * b * (b - 1.0) * x.powf(b - 2.0)
                },
            });
        }
        let (mut h, mut dh) = (self.b, 0.0);
        if self.involves_ln() {
            let l = x.ln();
            if self.c != 0.0 {
                h += self.c / l;
                dh -= self.c / (l * l);
            }
            if self.u != 0.0 {
                h += self.u * self.v * l.powf(self.v - 1.0);
                dh += self.u * self.v * (self.v - 1.0) * l.powf(self.v - 2.0);
            }
        }
        let g1 = h / x;
        let g2 = (dh - h) / (x * x);
        Ok(Jet {
            v: f,
            d1: f * g1,
            d2: f * (g2 + g1 * g1),
        })
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*x^{}*lnx^{}*exp({}*lnx^{})",
            self.a, self.b, self.c, self.u, self.v
        )
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    /// Accepts `a,b,c,u,v` (optionally `@domain_min` appended) or the display
    /// form `a*x^b*lnx^c*exp(u*lnx^v)`. The names `identity`, `sqrt`, `ln`,
    /// `x/lnx` are shorthands.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, domain) = match s.split_once('@') {
            Some((body, d)) => (body.trim(), Some(d.trim())),
            None => (s, None),
        };
        let spec = match body {
            "identity" | "x" => FunctionSpec::identity(),
            "sqrt" => FunctionSpec::new(1.0, 0.5, 0.0, 0.0, 1.0)?,
            "ln" | "lnx" => FunctionSpec::new(1.0, 0.0, 1.0, 0.0, 1.0)?,
            "x/lnx" => FunctionSpec::new(1.0, 1.0, -1.0, 0.0, 1.0)?,
            _ => {
                let cleaned: String = body
                    .replace("*lnx^", ",")
                    .replace("*x^", ",")
                    .replace("*exp(", ",")
                    .replace(')', "");
                let params = cleaned
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<f64>, _>>()
                    .map_err(|_| Error::Input(format!("cannot parse function tuple {s:?}")))?;
                let [a, b, c, u, v] = params[..] else {
                    return Err(Error::Input(format!(
                        "function tuple {s:?} needs five parameters a,b,c,u,v"
                    )));
                };
                FunctionSpec::new(a, b, c, u, v)?
            }
        };
        match domain {
            Some(d) => {
                let d = d
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("bad domain floor in {s:?}")))?;
                spec.with_domain_min(d)
            }
            None => Ok(spec),
        }
    }
}

/// `w1 * x / psi(x) + w2 * x * ln(phi(x)) / phi(x)`; with unit weights this is
/// the function whose concavity defines the psi family, with `(c1, c2)` it is
/// the exponent of the Omega bound template.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedExponent {
    pub phi: FunctionSpec,
    pub psi: FunctionSpec,
    pub w1: f64,
    pub w2: f64,
}

impl MixedExponent {
    pub fn unit(phi: FunctionSpec, psi: FunctionSpec) -> Self {
        MixedExponent {
            phi,
            psi,
            w1: 1.0,
            w2: 1.0,
        }
    }
}

impl Smooth for MixedExponent {
    fn domain_min(&self) -> f64 {
        self.phi.domain_min.max(self.psi.domain_min)
    }

    fn jet(&self, x: f64) -> Result<Jet> {
        let xj = Jet::variable(x);
        let phi = self.phi.jet(x)?;
        let psi = self.psi.jet(x)?;
        let first = xj * psi.recip();
        let second = xj * phi.ln() * phi.recip();
        Ok(first.scale(self.w1) + second.scale(self.w2))
    }

    fn describe(&self) -> String {
        format!(
            "{}*x/psi(x) + {}*x*ln(phi(x))/phi(x) with phi = {}, psi = {}",
            self.w1, self.w2, self.phi, self.psi
        )
    }
}

/// `grid` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    match grid {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln();
            (0..grid)
                .map(|i| {
                    if i == grid - 1 {
                        hi
                    } else {
                        lo * (ratio * i as f64 / (grid - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

fn check_range(lo: f64, hi: f64, grid: usize, domain_min: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Input(format!("bad sampling range [{lo}, {hi}]")));
    }
    if grid == 0 {
        return Err(Error::Input("grid needs at least one point".into()));
    }
    if lo < domain_min.max(1.0) {
        return Err(Error::Domain(format!(
            "sampling range starts at {lo}, below the domain floor {}",
            domain_min.max(1.0)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: f64,
    pub condition: String,
    pub value: f64,
}

/// Result of sampling `f' > 0` and `f'' < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub function: String,
    pub range: [f64; 2],
    pub grid: usize,
    pub ok: bool,
    pub first_violation: Option<Violation>,
    pub scope: &'static str,
}

const SAMPLED: &str = "verified on sampled range only";

pub fn check_delta(f: &dyn Smooth, x_lo: f64, x_hi: f64, grid_n: usize) -> Result<DeltaReport> {
    check_range(x_lo, x_hi, grid_n, f.domain_min())?;
    let mut first_violation = None;
    for x in log_grid(x_lo, x_hi, grid_n) {
        let j = f.jet(x)?;
        let bad = if !j.is_finite() {
            Some(("non-finite derivative", j.d1))
        } else if j.d1 <= 0.0 {
            Some(("f' <= 0", j.d1))
        } else if j.d2 >= 0.0 {
            Some(("f'' >= 0", j.d2))
        } else {
            None
        };
        if let Some((condition, value)) = bad {
            first_violation = Some(Violation {
                x,
                condition: condition.into(),
                value,
            });
            break;
        }
    }
    Ok(DeltaReport {
        function: f.describe(),
        range: [x_lo, x_hi],
        grid: grid_n,
        ok: first_violation.is_none(),
        first_violation,
        scope: SAMPLED,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiFamilyReport {
    pub phi: String,
    pub psi: String,
    pub range: [f64; 2],
    pub grid: usize,
    pub psi_leq_x: bool,
    pub psi_leq_x_first_violation: Option<f64>,
    pub combined_in_delta: DeltaReport,
    pub ok: bool,
    pub scope: &'static str,
}

/// Samples `psi(x) <= x` and the Delta conditions for
/// `x/psi(x) + x ln(phi(x))/phi(x)`.
pub fn check_psi_family(
    phi: &FunctionSpec,
    psi: &FunctionSpec,
    x_lo: f64,
    x_hi: f64,
    grid_n: usize,
) -> Result<PsiFamilyReport> {
    let combined = MixedExponent::unit(*phi, *psi);
    check_range(x_lo, x_hi, grid_n, combined.domain_min())?;
    let mut psi_violation = None;
    for x in log_grid(x_lo, x_hi, grid_n) {
        if psi.eval(x)? > x {
            psi_violation = Some(x);
            break;
        }
    }
    let delta = check_delta(&combined, x_lo, x_hi, grid_n)?;
    Ok(PsiFamilyReport {
        phi: phi.to_string(),
        psi: psi.to_string(),
        range: [x_lo, x_hi],
        grid: grid_n,
        psi_leq_x: psi_violation.is_none(),
        psi_leq_x_first_violation: psi_violation,
        ok: psi_violation.is_none() && delta.ok,
        combined_in_delta: delta,
        scope: SAMPLED,
    })
}

/// Where a sampled inequality eventually holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    /// First sampled point of the final run of points where it holds.
    pub threshold: Option<f64>,
    /// Last sampled point where it fails.
    pub last_violation: Option<f64>,
    pub first_violation: Option<f64>,
    pub holds_at_end: bool,
}

fn scan_threshold(points: &[f64], holds: &[bool]) -> ThresholdScan {
    let last_bad = holds.iter().rposition(|h| !h);
    let first_bad = holds.iter().position(|h| !h);
    let threshold_idx = match last_bad {
        None => Some(0),
        Some(i) if i + 1 < points.len() => Some(i + 1),
        Some(_) => None,
    };
    ThresholdScan {
        threshold: threshold_idx.map(|i| points[i]),
        last_violation: last_bad.map(|i| points[i]),
        first_violation: first_bad.map(|i| points[i]),
        holds_at_end: holds.last().copied().unwrap_or(false),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DConditionReport {
    pub phi: String,
    pub psi: String,
    pub d: f64,
    pub range: [f64; 2],
    pub grid: usize,
    #[serde(flatten)]
    pub scan: ThresholdScan,
    pub scope: &'static str,
}

/// Scans `2 psi(phi(n)/2) >= d psi(n)` on a log grid.
pub fn check_d_condition(
    phi: &FunctionSpec,
    psi: &FunctionSpec,
    d: f64,
    n_lo: f64,
    n_hi: f64,
    grid_n: usize,
) -> Result<DConditionReport> {
    if !(d > 1.0) {
        return Err(Error::Input(format!("d must exceed 1, got {d}")));
    }
    check_range(n_lo, n_hi, grid_n, phi.domain_min.max(psi.domain_min))?;
    let points = log_grid(n_lo, n_hi, grid_n);
    let holds = points
        .iter()
        .map(|&n| {
            let half = phi.eval(n)? / 2.0;
            let left = psi.eval(half).map_err(|_| {
                Error::Domain(format!(
                    "psi(phi(n)/2) undefined at n = {n}: phi(n)/2 = {half} is below psi's domain"
                ))
            })?;
            Ok(leq_with_slack(d * psi.eval(n)?, 2.0 * left))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(DConditionReport {
        phi: phi.to_string(),
        psi: psi.to_string(),
        d,
        range: [n_lo, n_hi],
        grid: grid_n,
        scan: scan_threshold(&points, &holds),
        scope: SAMPLED,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiCompositionReport {
    pub phi: String,
    pub range: [f64; 2],
    pub grid: usize,
    /// With `tau(x) = x / phi(x)`.
    pub real_tau: ThresholdScan,
    /// With `tau(x) = ceil(x / phi(x))`.
    pub ceil_tau: ThresholdScan,
    pub variants_agree: bool,
    pub scope: &'static str,
}

/// Scans `tau(phi(n)) ln(phi(phi(n))) <= ln(phi(n))` for both readings of tau.
pub fn check_phi_composition(
    phi: &FunctionSpec,
    n_lo: f64,
    n_hi: f64,
    grid_n: usize,
) -> Result<PhiCompositionReport> {
    check_range(n_lo, n_hi, grid_n, phi.domain_min)?;
    let points = log_grid(n_lo, n_hi, grid_n);
    let mut real = Vec::with_capacity(points.len());
    let mut ceil = Vec::with_capacity(points.len());
    for &n in &points {
        let inner = phi.eval(n)?;
        let outer = phi.eval(inner).map_err(|_| {
            Error::Domain(format!(
                "phi(phi(n)) undefined at n = {n}: phi(n) = {inner} is below phi's domain"
            ))
        })?;
        let ratio = inner / outer;
        let rhs = inner.ln();
        real.push(leq_with_slack(ratio * outer.ln(), rhs));
        ceil.push(leq_with_slack(ratio.ceil() * outer.ln(), rhs));
    }
    Ok(PhiCompositionReport {
        phi: phi.to_string(),
        range: [n_lo, n_hi],
        grid: grid_n,
        variants_agree: real == ceil,
        real_tau: scan_threshold(&points, &real),
        ceil_tau: scan_threshold(&points, &ceil),
        scope: SAMPLED,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub x0: f64,
    pub max_value: f64,
    pub grid: usize,
    pub range: [f64; 2],
    pub strictly_decreasing: bool,
}

/// The maximizer `e` of `ln x / x`, with a grid check of strict decrease on
/// `(e, 1e6]`.
pub fn log_over_x_crossover() -> CrossoverReport {
    const GRID: usize = 1000;
    const HI: f64 = 1e6;
    let e = std::f64::consts::E;
    let step = (HI / e).ln() / GRID as f64;
    let values: Vec<f64> = (1..=GRID)
        .map(|i| {
            let x = if i == GRID {
                HI
            } else {
                e * (step * i as f64).exp()
            };
            x.ln() / x
        })
        .collect();
    let strictly_decreasing = values[0] < 1.0 / e && values.windows(2).all(|w| w[1] < w[0]);
    CrossoverReport {
        x0: e,
        max_value: 1.0 / e,
        grid: GRID,
        range: [e, HI],
        strictly_decreasing,
    }
}

/// Constants carried through one application of the bootstrap theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapState {
    pub q: u32,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub phi: FunctionSpec,
    pub psi: FunctionSpec,
}

impl BootstrapState {
    pub fn new(q: u32, d: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let state = BootstrapState {
            q,
            d,
            c1,
            c2,
            c3,
            phi: FunctionSpec::identity(),
            psi: FunctionSpec::identity(),
        };
        state.validate()?;
        Ok(state)
    }

    pub fn with_functions(self, phi: FunctionSpec, psi: FunctionSpec) -> Self {
        BootstrapState { phi, psi, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::Input(format!(
                "q must be at least 2, got {}",
                self.q
            )));
        }
        if !(self.d > 1.0) {
            return Err(Error::Input(format!("d must exceed 1, got {}", self.d)));
        }
        for (name, c) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Input(format!("{name} must be positive, got {c}")));
            }
        }
        Ok(())
    }

    fn ln_q(&self) -> f64 {
        f64::from(self.q).ln()
    }
}

/// `(c1, c2) -> ((c1 + c3)/d, c2 (1 + 1/(c2 ln q) + c3))`.
pub fn bootstrap_step(s: &BootstrapState) -> Result<(f64, f64)> {
    s.validate()?;
    let c1 = (s.c1 + s.c3) / s.d;
    let c2 = s.c2 * (1.0 + 1.0 / (s.c2 * s.ln_q()) + s.c3);
    Ok((c1, c2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `(c1, c2)` before each step, then the final pair; `k + 1` entries.
    pub points: Vec<(f64, f64)>,
    pub c1_fixed_point: f64,
    pub c2_strictly_increasing: bool,
    /// Iterates are not claimed to be valid bounds themselves.
    pub note: &'static str,
}

pub fn bootstrap_iterate(s: &BootstrapState, k: usize) -> Result<Trajectory> {
    if k == 0 {
        return Err(Error::Input(
            "bootstrap needs at least one iteration".into(),
        ));
    }
    let mut state = *s;
    let mut points = vec![(state.c1, state.c2)];
    for _ in 0..k {
        let (c1, c2) = bootstrap_step(&state)?;
        state.c1 = c1;
        state.c2 = c2;
        points.push((c1, c2));
    }
    let c2_strictly_increasing = points.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(Trajectory {
        points,
        c1_fixed_point: s.c3 / (s.d - 1.0),
        c2_strictly_increasing,
        note: "trajectory of the constant map only; hypotheses are not re-verified per iterate",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentComparison {
    pub n: f64,
    pub old_exponent: f64,
    pub new_exponent: f64,
    pub new_is_smaller: bool,
    /// `c1 n/psi(n) > c2 n ln(phi(n))/phi(n)`.
    pub first_term_dominates: bool,
    /// `(c1 + c3)/d < c1`.
    pub c1_contracts: bool,
}

/// Old versus improved exponent (base q) at a single `n`.
pub fn exponent_compare(s: &BootstrapState, n: f64) -> Result<ExponentComparison> {
    s.validate()?;
    let psi_n = s.psi.eval(n)?;
    let phi_n = s.phi.eval(n)?;
    let first = n / psi_n;
    let second = n * phi_n.ln() / phi_n;
    let old_exponent = s.c1 * first + s.c2 * second;
    let new_exponent =
        (s.c1 + s.c3) * first / s.d + s.c2 * second * (1.0 + 1.0 / (s.c2 * s.ln_q()) + s.c3);
    Ok(ExponentComparison {
        n,
        old_exponent,
        new_exponent,
        new_is_smaller: new_exponent < old_exponent,
        first_term_dominates: s.c1 * first > s.c2 * second,
        c1_contracts: (s.c1 + s.c3) / s.d < s.c1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn spec(a: f64, b: f64, c: f64, u: f64, v: f64) -> FunctionSpec {
        FunctionSpec::new(a, b, c, u, v).unwrap()
    }

    #[test]
    fn closed_form_derivatives() {
        let id = FunctionSpec::identity();
        for x in [1.0, 3.5, 1e5] {
            assert_eq!(id.d1(x).unwrap(), 1.0);
            assert_eq!(id.d2(x).unwrap(), 0.0);
        }
        let x_over_ln = spec(1.0, 1.0, -1.0, 0.0, 1.0).with_domain_min(1.5).unwrap();
        let x = E.powi(3);
        assert_relative_eq!(
            x_over_ln.d2(x).unwrap(),
            (2.0 - 3.0) / (x * 27.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(x_over_ln.d1(x).unwrap(), 2.0 / 9.0, max_relative = 1e-12);

        let exp_sqrt_ln = spec(1.0, 0.0, 0.0, 1.0, 0.5).with_domain_min(1.0).unwrap();
        assert_relative_eq!(exp_sqrt_ln.eval(E).unwrap(), E, max_relative = 1e-15);
    }

    #[test]
    fn domain_is_enforced() {
        let ln = spec(1.0, 0.0, 1.0, 0.0, 1.0);
        assert_eq!(ln.domain_min, 8.0);
        assert!(matches!(ln.eval(5.0), Err(Error::Domain(_))));
        assert!(ln.eval(8.0).is_ok());
        assert!(FunctionSpec::identity().eval(0.5).is_err());
        assert!(FunctionSpec::new(0.0, 1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn parse_and_display() {
        let f: FunctionSpec = "1,0.8,0,0,1".parse().unwrap();
        assert_eq!(f, spec(1.0, 0.8, 0.0, 0.0, 1.0));
        let g: FunctionSpec = f.to_string().parse().unwrap();
        assert_eq!(f, g);
        let h: FunctionSpec = "1,0,0,3.14,0.5@2".parse().unwrap();
        assert_eq!(h.domain_min, 2.0);
        assert_eq!(
            "x/lnx".parse::<FunctionSpec>().unwrap(),
            spec(1.0, 1.0, -1.0, 0.0, 1.0)
        );
        assert!("1,2,3".parse::<FunctionSpec>().is_err());
        assert!("nonsense".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn delta_examples() {
        let sqrt = spec(1.0, 0.5, 0.0, 0.0, 1.0);
        assert!(check_delta(&sqrt, 1.0, 1e6, 500).unwrap().ok);

        let square = spec(1.0, 2.0, 0.0, 0.0, 1.0);
        let r = check_delta(&square, 1.0, 10.0, 50).unwrap();
        assert!(!r.ok);
        assert_eq!(r.first_violation.unwrap().condition, "f'' >= 0");

        let x_over_ln = spec(1.0, 1.0, -1.0, 0.0, 1.0);
        let low = x_over_ln.with_domain_min(2.0).unwrap();
        let r = check_delta(&low, 2.0, 10.0, 100).unwrap();
        let v = r.first_violation.unwrap();
        assert_eq!(v.condition, "f' <= 0");
        assert!(v.x < E);
        assert!(check_delta(&x_over_ln, 8.0, 1e6, 1000).unwrap().ok);

        assert!(matches!(
            check_delta(&x_over_ln, 2.0, 10.0, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn psi_family_examples() {
        let phi = spec(1.0, 0.8, 0.0, 0.0, 1.0);
        let psi = spec(1.0, 0.0, 1.0, 0.0, 1.0);
        let r = check_psi_family(&phi, &psi, 8.0, 1e6, 1000).unwrap();
        assert!(r.ok, "{r:?}");

        let square = spec(1.0, 2.0, 0.0, 0.0, 1.0);
        let r = check_psi_family(&FunctionSpec::identity(), &square, 2.0, 100.0, 50).unwrap();
        assert!(!r.psi_leq_x);
        assert_eq!(r.psi_leq_x_first_violation, Some(2.0));

        let id = FunctionSpec::identity();
        let r = check_psi_family(&id, &id, 1.0, 1e6, 1000).unwrap();
        assert!(r.ok);
        let f = MixedExponent::unit(id, id);
        let j = f.jet(3.0).unwrap();
        assert_relative_eq!(j.v, 1.0 + 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(j.d2, -1.0 / 9.0, max_relative = 1e-12);
    }

    #[test]
    fn d_condition_examples() {
        let phi = spec(1.0, 0.8, 0.0, 0.0, 1.0);
        let psi = spec(1.0, 0.0, 1.0, 0.0, 1.0);
        let r = check_d_condition(&phi, &psi, 1.5, 1e2, 1e8, 10_000).unwrap();
        let target = 2f64.powi(20);
        assert!(r.scan.last_violation.unwrap() < target);
        assert!(r.scan.threshold.unwrap() >= target);
        assert!(r.scan.holds_at_end);

        let phi = spec(1.0, 0.0, 0.0, std::f64::consts::PI, 0.5);
        // 2 (pi sqrt(ln n) - ln 2) drops below 1.1 ln n once ln n > 30.05
        let r = check_d_condition(&phi, &psi, 1.1, 1e2, 1e15, 2000).unwrap();
        let last_hold = r.scan.first_violation.unwrap();
        assert!(last_hold > 1e13 && last_hold < 1.2e13, "{last_hold}");
        assert!(!r.scan.holds_at_end);
        assert!(r.scan.threshold.is_none());

        let constant = spec(3.0, 0.0, 0.0, 0.0, 1.0);
        let id = FunctionSpec::identity();
        let ok = check_d_condition(&id, &constant, 2.0, 2.0, 1e6, 100).unwrap();
        assert_eq!(ok.scan.threshold, Some(2.0));
        let bad = check_d_condition(&id, &constant, 2.5, 2.0, 1e6, 100).unwrap();
        assert!(bad.scan.first_violation == Some(2.0) && !bad.scan.holds_at_end);

        assert!(check_d_condition(&id, &constant, 1.0, 2.0, 10.0, 10).is_err());
        // phi(n)/2 falls below ln's domain floor
        let r = check_d_condition(&id, &psi, 1.5, 8.0, 100.0, 10);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn phi_composition_examples() {
        let sqrt = spec(1.0, 0.5, 0.0, 0.0, 1.0);
        let r = check_phi_composition(&sqrt, 2.0, 1e6, 4000).unwrap();
        assert!(!r.real_tau.holds_at_end);
        let first = r.real_tau.first_violation.unwrap();
        assert!(first > 16.0 && first < 16.1, "{first}");

        let id = FunctionSpec::identity();
        let r = check_phi_composition(&id, 2.0, 1e9, 1000).unwrap();
        assert_eq!(r.real_tau.threshold, Some(2.0));
        assert_eq!(r.ceil_tau.threshold, Some(2.0));

        let x_over_ln = spec(1.0, 1.0, -1.0, 0.0, 1.0);
        let r = check_phi_composition(&x_over_ln, 1e3, 1e9, 500).unwrap();
        assert_eq!(r.grid, 500);
    }

    #[test]
    fn crossover_is_e() {
        let r = log_over_x_crossover();
        assert_eq!(r.x0, E);
        assert_eq!(r.max_value, 1.0 / E);
        assert!(r.strictly_decreasing);
        assert!(3f64.ln() / 3.0 > 4f64.ln() / 4.0);
    }

    #[test]
    fn bootstrap_examples() {
        let s = BootstrapState::new(2, 2.0, 1.0, 1.0, 0.1).unwrap();
        let (c1, c2) = bootstrap_step(&s).unwrap();
        assert_eq!(c1, 0.55);
        assert!((c2 - (1.1 + 1.0 / 2f64.ln())).abs() < 1e-12);
        assert!((c2 - 2.542695).abs() < 1e-6);

        assert!(BootstrapState::new(2, 1.0, 1.0, 1.0, 0.1).is_err());
        assert!(BootstrapState::new(2, 2.0, 1.0, 1.0, 0.0).is_err());

        let t = bootstrap_iterate(&s, 60).unwrap();
        assert!((t.points[60].0 - 0.1).abs() < 1e-9);
        assert!((t.c1_fixed_point - 0.1).abs() < 1e-15);
        assert!(t.c2_strictly_increasing);
        assert_eq!(t.points[1].0, 0.55);
        assert_eq!(t.points[2].0, 0.325);
    }

    #[test]
    fn exponent_comparison_examples() {
        let phi = spec(1.0, 0.8, 0.0, 0.0, 1.0);
        let psi = spec(1.0, 0.0, 1.0, 0.0, 1.0);
        let s = BootstrapState::new(2, 2.0, 1.0, 0.01, 0.1)
            .unwrap()
            .with_functions(phi, psi);
        let r = exponent_compare(&s, 1e10).unwrap();
        assert!(r.first_term_dominates);
        assert!(r.c1_contracts);
        assert!(r.new_is_smaller);

        let s = BootstrapState::new(2, 2.0, 1.0, 1.0, 0.1).unwrap();
        let r = exponent_compare(&s, E).unwrap();
        assert_relative_eq!(r.old_exponent, 2.0, max_relative = 1e-15);
        let expected_new = 1.1 / 2.0 + (1.0 + 1.0 / 2f64.ln() + 0.1);
        assert_relative_eq!(r.new_exponent, expected_new, max_relative = 1e-15);

        // c3 < c1 (d - 1) is exactly the contraction condition
        let s = BootstrapState::new(2, 1.5, 1.0, 1.0, 0.6).unwrap();
        assert!(!exponent_compare(&s, 10.0).unwrap().c1_contracts);
    }

    proptest! {
        #[test]
        fn bootstrap_step_properties(
            q in 2u32..10,
            d in 1.01f64..5.0,
            c1 in 0.01f64..10.0,
            c2 in 0.01f64..10.0,
            c3 in 0.001f64..5.0,
        ) {
            let s = BootstrapState::new(q, d, c1, c2, c3).unwrap();
            let (n1, n2) = bootstrap_step(&s).unwrap();
            prop_assert!(n2 > c2);
            prop_assert_eq!(n1 < c1, c3 < c1 * (d - 1.0));
            let t = bootstrap_iterate(&s, 30).unwrap();
            let star = c3 / (d - 1.0);
            for w in t.points.windows(2) {
                let before = (w[0].0 - star).abs();
                let after = (w[1].0 - star).abs();
                prop_assert!(after <= before / d * (1.0 + 1e-9) + 1e-12);
            }
        }
    }
}
