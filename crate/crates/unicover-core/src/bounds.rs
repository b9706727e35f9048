//! Dimension-bound formulas and their scalar optimization over `theta`.
//!
//! For `r_n = c/n` the upper bounds come from the greedy cover recursions:
//! the weak bound `log(1 + 2c (theta^2 - 1)/theta) / log theta` and the
//! matrix bound `log Lambda / log theta`, where `Lambda` is the dominant
//! eigenvalue of the 2x2 recursion with coefficients `Theta` and `Delta`.
//! The lower bound is `1 - s(c, theta)`, valid when `c` exceeds the
//! threshold `c_star(theta)` that makes `s = 1`.
//!
//! All bound values are clamped to `[0, 1]` (dimensions outside that range
//! are meaningless on the circle) with a `clamped` flag recording when
//! clamping fired.

use serde::Serialize;

use crate::opt::minimize_log_grid_golden;
use crate::radius::RadiusFamily;
use crate::{Error, Result};

/// Optimizer domain for `theta`: the bounds degenerate at both ends and
/// every optimum of interest lies well inside.
pub const THETA_MIN: f64 = 1.0 + 1e-6;
pub const THETA_MAX: f64 = 1e4;
const THETA_GRID: usize = 512;
const THETA_REL_TOL: f64 = 1e-8;

/// The geometric level schedule `n_j ~ theta^j`, integerized with a
/// strict-increase repair: `n_j = max(floor(theta^j), n_{j-1} + 1)`.
///
/// Flooring keeps `n_j <= theta^j`, so product bounds built on the schedule
/// stay conservative.
#[derive(Debug, Clone)]
pub struct GeometricSchedule {
    theta: f64,
}

impl GeometricSchedule {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 1.0) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(GeometricSchedule { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `n_j`; `n_0 = 1`.
    pub fn n(&self, j: u32) -> u64 {
        let mut prev = 1u64;
        for jj in 1..=j {
            let raw = self.theta.powi(jj as i32).floor();
            let raw = if raw >= u64::MAX as f64 { u64::MAX - 1 } else { raw as u64 };
            prev = raw.max(prev + 1);
        }
        prev
    }

    /// `n_0..=n_{j_max}` as a vector.
    pub fn indices(&self, j_max: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(j_max as usize + 1);
        let mut prev = 1u64;
        out.push(prev);
        for j in 1..=j_max {
            let raw = self.theta.powi(j as i32).floor();
            let raw = if raw >= u64::MAX as f64 { u64::MAX - 1 } else { raw as u64 };
            prev = raw.max(prev + 1);
            out.push(prev);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperWeak,
    UpperMatrix,
    Lower,
}

/// One evaluated bound at `(c, theta)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundPoint {
    pub c: f64,
    pub theta: f64,
    pub value: f64,
    pub valid: bool,
    pub clamped: bool,
    pub kind: BoundKind,
}

impl BoundPoint {
    fn new(c: f64, theta: f64, raw: f64, valid: bool, kind: BoundKind) -> Self {
        let value = raw.clamp(0.0, 1.0);
        BoundPoint { c, theta, value, valid, clamped: value != raw, kind }
    }
}

/// The recursion coefficients `Theta = 2c(theta-1)(1 + theta^{-2})` and
/// `Delta = 2c(theta-1)(theta^{-1} - theta^{-2})`.
pub fn theta_delta(c: f64, theta: f64) -> Result<(f64, f64)> {
    if !(theta > 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let t = theta;
    let big_theta = 2.0 * c * (t - 1.0) * (1.0 + t.powi(-2));
    let delta = 2.0 * c * (t - 1.0) * (t.powi(-1) - t.powi(-2));
    Ok((big_theta, delta))
}

/// Dominant eigenvalue of `[[1 + Theta, Theta], [Delta, Delta]]`.
///
/// The larger root of `L^2 - (1 + Theta + Delta) L + Delta = 0`. The
/// discriminant `((1+Theta+Delta)/2)^2 - Delta >= ((1-Delta)/2)^2` is
/// nonnegative for `Theta, Delta >= 0`.
pub fn lambda(c: f64, theta: f64) -> Result<f64> {
    let (big_theta, delta) = theta_delta(c, theta)?;
    let mid = (1.0 + big_theta + delta) / 2.0;
    let disc = mid * mid - delta;
    debug_assert!(disc >= -1e-12, "negative discriminant {disc}");
    Ok(mid + disc.max(0.0).sqrt())
}

/// Matrix upper bound `log Lambda / log theta` at a single `(c, theta)`.
pub fn upper_bound_matrix(c: f64, theta: f64) -> Result<BoundPoint> {
    let raw = lambda(c, theta)?.ln() / theta.ln();
    let valid = 0.0 < c && c < 0.5;
    Ok(BoundPoint::new(c, theta, raw, valid, BoundKind::UpperMatrix))
}

/// Infimum of the matrix upper bound over `theta`.
pub fn optimize_upper_matrix(c: f64) -> BoundPoint {
    let f = |t: f64| lambda(c, t).unwrap().ln() / t.ln();
    let (theta, raw) =
        minimize_log_grid_golden(f, THETA_MIN, THETA_MAX, THETA_GRID, THETA_REL_TOL)
            .expect("matrix bound finite on the whole grid");
    BoundPoint::new(c, theta, raw, 0.0 < c && c < 0.5, BoundKind::UpperMatrix)
}

/// Weak upper bound `log(1 + 2c (theta^2 - 1)/theta) / log theta`.
pub fn upper_bound_weak(c: f64, theta: f64) -> Result<BoundPoint> {
    if !(theta > 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let raw = (1.0 + 2.0 * c * (theta * theta - 1.0) / theta).ln() / theta.ln();
    let valid = 0.0 < c && c < 0.5;
    Ok(BoundPoint::new(c, theta, raw, valid, BoundKind::UpperWeak))
}

/// Infimum of the weak upper bound over `theta`.
pub fn optimize_upper_weak(c: f64) -> BoundPoint {
    let f = |t: f64| (1.0 + 2.0 * c * (t * t - 1.0) / t).ln() / t.ln();
    let (theta, raw) =
        minimize_log_grid_golden(f, THETA_MIN, THETA_MAX, THETA_GRID, THETA_REL_TOL)
            .expect("weak bound finite on the whole grid");
    BoundPoint::new(c, theta, raw, 0.0 < c && c < 0.5, BoundKind::UpperWeak)
}

/// The envelope exponent `s(c, theta) =
/// -log(1 - exp(-2c (theta-1)/theta^2)) / log theta`.
pub fn s_exponent(c: f64, theta: f64) -> f64 {
    assert!(c > 0.0 && theta > 1.0);
    let e = (-2.0 * c * (theta - 1.0) / (theta * theta)).exp();
    // -log(1 - e) via ln_1p for accuracy when e is tiny.
    -(-e).ln_1p() / theta.ln()
}

/// Validity threshold: the `c` at which `s(c, theta) = 1`, i.e.
/// `c_star = -(1/2) theta^2/(theta - 1) log(1 - 1/theta)`.
pub fn c_star(theta: f64) -> f64 {
    assert!(theta > 1.0);
    -0.5 * theta * theta / (theta - 1.0) * (-1.0 / theta).ln_1p()
}

/// Lower bound `1 - s(c, theta)`; valid when `theta > 1` and `c > c_star`.
pub fn lower_bound(c: f64, theta: f64) -> BoundPoint {
    assert!(c > 0.0 && theta > 1.0);
    let raw = 1.0 - s_exponent(c, theta);
    let valid = c > c_star(theta);
    BoundPoint::new(c, theta, raw, valid, BoundKind::Lower)
}

/// Supremum of the lower bound over feasible `theta`; invalid with value 0
/// when no `theta` in the search domain is feasible.
pub fn optimize_lower(c: f64) -> BoundPoint {
    assert!(c > 0.0);
    let f = |t: f64| {
        if c > c_star(t) {
            s_exponent(c, t) - 1.0 // minimize -(1 - s)
        } else {
            f64::INFINITY
        }
    };
    match minimize_log_grid_golden(f, THETA_MIN, THETA_MAX, THETA_GRID, THETA_REL_TOL) {
        Some((theta, neg)) => BoundPoint::new(c, theta, -neg, true, BoundKind::Lower),
        None => BoundPoint { c, theta: f64::NAN, value: 0.0, valid: false, clamped: false, kind: BoundKind::Lower },
    }
}

/// Shepp upper bound `min(1, 2(n+1)(1-r)^{n-1})` on the probability that
/// `n` arcs of radius `r` fail to cover the circle. Evaluated in the log
/// domain so large `n` cannot underflow prematurely.
pub fn shepp_upper(n: u64, r: f64) -> f64 {
    assert!(n >= 1 && r > 0.0 && r < 0.5);
    let log_val = (2.0 * (n as f64 + 1.0)).ln() + (n as f64 - 1.0) * (-r).ln_1p();
    log_val.exp().min(1.0)
}

/// Shepp lower bound `q/(q + 2)` with `q = (n+1)(1-r)^{n-1}`.
pub fn shepp_lower(n: u64, r: f64) -> f64 {
    assert!(n >= 1 && r > 0.0 && r < 0.5);
    let q = ((n as f64 + 1.0).ln() + (n as f64 - 1.0) * (-r).ln_1p()).exp();
    (q / (q + 2.0)).clamp(0.0, 1.0)
}

/// The block non-miss probability `1 - (1 - 2 r_{n_{j+1}})^{n_j - n_{j-1}}`.
fn block_term(sched: &GeometricSchedule, f: &RadiusFamily, j: u32) -> Result<f64> {
    let r = f.r(sched.n(j + 1))?;
    if 2.0 * r >= 1.0 {
        return Err(Error::DegenerateProductRadius(sched.n(j + 1)));
    }
    let count = (sched.n(j) - sched.n(j - 1)) as f64;
    let q = (count * (-2.0 * r).ln_1p()).exp();
    Ok(1.0 - q)
}

/// `K_{l,m} = prod_{j=l}^m (1 - (1 - 2 r_{n_{j+1}})^{n_j - n_{j-1}})`.
pub fn k_lm(sched: &GeometricSchedule, f: &RadiusFamily, l: u32, m: u32) -> Result<f64> {
    if l == 0 || l > m {
        return Err(Error::InvalidConfig(format!("need 1 <= l <= m, got l={l}, m={m}")));
    }
    let mut prod = 1.0;
    for j in l..=m {
        prod *= block_term(sched, f, j)?;
    }
    Ok(prod)
}

/// `C_l = c^s (1 - exp(-2c (theta-1)/theta^2))^l`.
pub fn c_l_constant(c: f64, theta: f64, l: u32, s: f64) -> f64 {
    assert!(c > 0.0 && theta > 1.0 && s > 0.0 && s < 1.0);
    let base = 1.0 - (-2.0 * c * (theta - 1.0) / (theta * theta)).exp();
    c.powf(s) * base.powi(l as i32)
}

/// Indicator radius convention in `Psi_{l,m}`: the lemma statement uses
/// `r_{n_{j+1}}`, the derivation behind the propositions uses
/// `2 r_{n_{j+1}}`. Default to the derivation's factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorRadius {
    One,
    Two,
}

impl IndicatorRadius {
    fn factor(self) -> f64 {
        match self {
            IndicatorRadius::One => 1.0,
            IndicatorRadius::Two => 2.0,
        }
    }
}

impl Default for IndicatorRadius {
    fn default() -> Self {
        IndicatorRadius::Two
    }
}

/// Exact finite product
/// `Psi_{l,m}(t) = prod_{j=l}^m (1 + q_j/(1-q_j) * 1{t <= kappa r_{n_{j+1}}})`
/// with `q_j = (1 - 2 r_{n_{j+1}})^{n_j - n_{j-1}}`.
pub fn psi_exact(
    sched: &GeometricSchedule,
    f: &RadiusFamily,
    l: u32,
    m: u32,
    t: f64,
    kappa: IndicatorRadius,
) -> Result<f64> {
    if l == 0 || l > m {
        return Err(Error::InvalidConfig(format!("need 1 <= l <= m, got l={l}, m={m}")));
    }
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::InvalidConfig(format!("t must lie in (0, 1/2], got {t}")));
    }
    let mut prod = 1.0;
    for j in l..=m {
        let r = f.r(sched.n(j + 1))?;
        if 2.0 * r >= 1.0 {
            return Err(Error::DegenerateProductRadius(sched.n(j + 1)));
        }
        if t <= kappa.factor() * r {
            let count = (sched.n(j) - sched.n(j - 1)) as f64;
            let q = (count * (-2.0 * r).ln_1p()).exp();
            prod *= 1.0 + q / (1.0 - q);
        }
    }
    Ok(prod)
}

/// One row of the bound-curve table: all three bounds optimized over
/// `theta` at a fixed `c`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCurveRow {
    pub c: f64,
    pub weak: BoundPoint,
    pub matrix: BoundPoint,
    pub lower: BoundPoint,
}

/// Evaluates the optimized bounds on an increasing grid of `c` values.
pub fn bound_curve(c_grid: &[f64]) -> Vec<BoundCurveRow> {
    c_grid
        .iter()
        .map(|&c| BoundCurveRow {
            c,
            weak: optimize_upper_weak(c),
            matrix: optimize_upper_matrix(c),
            lower: optimize_lower(c),
        })
        .collect()
}

/// CSV header for [`write_bound_curve_csv`].
pub const BOUND_CURVE_HEADER: &str =
    "c,upper_weak,theta_weak,upper_matrix,theta_matrix,lower,theta_lower,valid_flags";

/// Writes the bound curve with fixed 17-significant-digit formatting.
pub fn write_bound_curve_csv<W: std::io::Write>(
    rows: &[BoundCurveRow],
    mut out: W,
) -> std::io::Result<()> {
    use crate::csvfmt::fmt_f64 as ff;
    writeln!(out, "{BOUND_CURVE_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},weak={};matrix={};lower={}",
            ff(row.c),
            ff(row.weak.value),
            ff(row.weak.theta),
            ff(row.matrix.value),
            ff(row.matrix.theta),
            ff(row.lower.value),
            ff(row.lower.theta),
            row.weak.valid as u8,
            row.matrix.valid as u8,
            row.lower.valid as u8,
        )?;
    }
    Ok(())
}
