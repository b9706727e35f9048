//! Dimension-related estimators: the two greedy cover-growth
//! constructions, box-dimension fitting, the block-measure Riesz-energy
//! experiment, and the Frostman-transform inequality check.
//!
//! The cover constructions track the target set
//! `G_{l,i} = intersection_{j=l}^i E_{n_j}` exactly, so the per-level
//! validity claim (the produced balls cover `G_{l,i}`) is checked as a
//! genuine set inclusion rather than a center-distance heuristic.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{c_l_constant, c_star, k_lm, s_exponent, GeometricSchedule};
use crate::radius::RadiusFamily;
use crate::rng::{trial_rng, unit_uniform};
use crate::simulate::{mu_lm_support, SamplePath};
use crate::torus::{dist, ArcSet};
use crate::{Error, Result};

/// Leakage tolerance for the exact cover-validity test. The arc algebra is
/// exact up to merge rounding, so any real failure shows up far above this.
const COVER_EPS: f64 = 1e-12;

/// One level of a cover-growth trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoverLevel {
    /// Absolute level index `i` (the base level is `l`).
    pub i: u32,
    pub n_i: u64,
    /// Kept-ball count `N_i`.
    pub n_count: u64,
    /// Discardable-ball count `Q_i` (zero in the simple variant).
    pub q_count: u64,
    /// Newly admitted count `M_i` (zero at the base level).
    pub m_new: u64,
    /// Whether the produced balls cover `G_{l,i}`.
    pub covered_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverGrowthTrace {
    pub trial_id: u64,
    pub l: u32,
    pub c: f64,
    pub theta: f64,
    pub levels: Vec<CoverLevel>,
}

impl CoverGrowthTrace {
    /// Least-squares slope of `log(N_i + Q_i)` against `i log theta`,
    /// the empirical growth exponent of the cover size.
    pub fn fitted_exponent(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .levels
            .iter()
            .map(|lv| {
                (lv.i as f64 * self.theta.ln(), ((lv.n_count + lv.q_count) as f64).ln())
            })
            .collect();
        least_squares_slope(&pts).0
    }

    pub fn all_levels_covered(&self) -> bool {
        self.levels.iter().all(|lv| lv.covered_ok)
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let syy: f64 = pts.iter().map(|p| p.1 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let denom = (n * sxx - sx * sx) * (n * syy - sy * sy);
    let r2 = if denom > 0.0 { (n * sxy - sx * sy).powi(2) / denom } else { 1.0 };
    (slope, r2)
}

fn r_of(c: f64, n: u64) -> f64 {
    c / n as f64
}

fn balls(path: &SamplePath, idx: impl IntoIterator<Item = u64>, r: f64) -> ArcSet {
    ArcSet::from_raw_arcs(idx.into_iter().map(|k| (path.point(k) - r, 2.0 * r)))
}

/// `E_{n_j}` with radius `r_{n_j} = c/n_j`: one layer of `G_{l,i}`.
fn layer(path: &SamplePath, c: f64, n_j: u64) -> ArcSet {
    balls(path, 1..=n_j, r_of(c, n_j))
}

fn check_cover(target: &ArcSet, cover: &ArcSet) -> bool {
    target.intersect(&cover.complement()).measure() <= COVER_EPS
}

/// The simple greedy construction: one index set `I_i`, all admitted
/// indices kept forever. `M_{i+1}` counts indices `n_i < k <= n_{i+1}`
/// whose center lands in the `r_{n_{i+1}}`-neighbourhood of the current
/// cover `G^_i = union_{k in I_i} B(omega_k, r_{n_i})`.
pub fn cover_growth_simple(
    path: &SamplePath,
    sched: &GeometricSchedule,
    c: f64,
    l: u32,
    i_max: u32,
) -> Result<CoverGrowthTrace> {
    precheck(path, sched, c, l, i_max)?;
    let theta = sched.theta();
    let mut kept: Vec<u64> = (1..=sched.n(l)).collect();
    let mut g_target = layer(path, c, sched.n(l));
    let mut hat_g = balls(path, kept.iter().copied(), r_of(c, sched.n(l)));
    let mut levels = vec![CoverLevel {
        i: l,
        n_i: sched.n(l),
        n_count: kept.len() as u64,
        q_count: 0,
        m_new: 0,
        covered_ok: check_cover(&g_target, &hat_g),
    }];

    for i in l..i_max {
        let (n_lo, n_hi) = (sched.n(i), sched.n(i + 1));
        let r_next = r_of(c, n_hi);
        let reach = hat_g.thicken(r_next);
        let mut m = 0u64;
        for k in n_lo + 1..=n_hi {
            if reach.contains(path.point(k)) {
                kept.push(k);
                m += 1;
            }
        }
        hat_g = balls(path, kept.iter().copied(), r_next);
        g_target = g_target.intersect(&layer(path, c, n_hi));
        levels.push(CoverLevel {
            i: i + 1,
            n_i: n_hi,
            n_count: kept.len() as u64,
            q_count: 0,
            m_new: m,
            covered_ok: check_cover(&g_target, &hat_g),
        });
    }
    Ok(CoverGrowthTrace { trial_id: path.trial_id(), l, c, theta, levels })
}

/// The refined construction with kept (`I_i`) and discardable (`J_i`)
/// indices. Old kept indices carry over; `J_i` is dropped wholesale. A new
/// index whose ball meets `H_i` is discardable when its center is farther
/// than `r_{n_i} + r_{n_{i+2}}` from every current center, so its ball can
/// be dropped two levels later without uncovering anything.
pub fn cover_growth_refined(
    path: &SamplePath,
    sched: &GeometricSchedule,
    c: f64,
    l: u32,
    i_max: u32,
) -> Result<CoverGrowthTrace> {
    precheck(path, sched, c, l, i_max)?;
    let theta = sched.theta();
    let mut i_set: Vec<u64> = (1..=sched.n(l)).collect();
    let mut j_set: Vec<u64> = Vec::new();
    let mut g_target = layer(path, c, sched.n(l));
    let h = |i_set: &[u64], j_set: &[u64], r: f64| {
        balls(path, i_set.iter().chain(j_set.iter()).copied(), r)
    };
    let mut h_i = h(&i_set, &j_set, r_of(c, sched.n(l)));
    let mut levels = vec![CoverLevel {
        i: l,
        n_i: sched.n(l),
        n_count: i_set.len() as u64,
        q_count: 0,
        m_new: 0,
        covered_ok: check_cover(&g_target, &h_i),
    }];

    for i in l..i_max {
        let (n_lo, n_hi) = (sched.n(i), sched.n(i + 1));
        let r_i = r_of(c, n_lo);
        let r_next = r_of(c, n_hi);
        let r_skip = r_of(c, sched.n(i + 2));
        let reach = h_i.thicken(r_next);

        // sorted centers of I_i ∪ J_i for the nearest-center distance test
        let mut centers: Vec<f64> = i_set
            .iter()
            .chain(j_set.iter())
            .map(|&k| path.point(k))
            .collect();
        centers.sort_by(|a, b| a.total_cmp(b));
        let sep = r_i + r_skip;
        let separated = |x: f64| -> bool {
            if centers.is_empty() {
                return true;
            }
            let idx = centers.partition_point(|&cc| cc < x);
            let lo = if idx == 0 { centers.len() - 1 } else { idx - 1 };
            let hi = if idx == centers.len() { 0 } else { idx };
            dist(x, centers[lo]) > sep && dist(x, centers[hi]) > sep
        };

        let mut new_i: Vec<u64> = Vec::new();
        let mut new_j: Vec<u64> = Vec::new();
        for k in n_lo + 1..=n_hi {
            let x = path.point(k);
            if !reach.contains(x) {
                continue;
            }
            if separated(x) {
                new_j.push(k);
            } else {
                new_i.push(k);
            }
        }
        let m = (new_i.len() + new_j.len()) as u64;
        i_set.extend(new_i);
        j_set = new_j; // previous J_i discarded
        h_i = h(&i_set, &j_set, r_next);
        g_target = g_target.intersect(&layer(path, c, n_hi));
        levels.push(CoverLevel {
            i: i + 1,
            n_i: n_hi,
            n_count: i_set.len() as u64,
            q_count: j_set.len() as u64,
            m_new: m,
            covered_ok: check_cover(&g_target, &h_i),
        });
    }
    Ok(CoverGrowthTrace { trial_id: path.trial_id(), l, c, theta, levels })
}

fn precheck(
    path: &SamplePath,
    sched: &GeometricSchedule,
    c: f64,
    l: u32,
    i_max: u32,
) -> Result<()> {
    if !(c > 0.0) || l == 0 || i_max <= l {
        return Err(Error::InvalidConfig(format!(
            "cover growth needs c > 0, l >= 1, i_max > l (got c={c}, l={l}, i_max={i_max})"
        )));
    }
    let need = sched.n(i_max);
    if path.len() < need {
        return Err(Error::InsufficientSamples { have: path.len(), need });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverVariant {
    Simple,
    Refined,
}

impl std::str::FromStr for CoverVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(CoverVariant::Simple),
            "refined" => Ok(CoverVariant::Refined),
            other => Err(Error::InvalidConfig(format!("unknown cover variant {other:?}"))),
        }
    }
}

/// Runs one trace per trial in parallel; trial order is deterministic.
pub fn cover_growth_experiment(
    variant: CoverVariant,
    c: f64,
    theta: f64,
    l: u32,
    i_max: u32,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<CoverGrowthTrace>> {
    let sched = GeometricSchedule::new(theta)?;
    let need = sched.n(i_max);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let path = SamplePath::generate(master_seed, t, need);
            match variant {
                CoverVariant::Simple => cover_growth_simple(&path, &sched, c, l, i_max),
                CoverVariant::Refined => cover_growth_refined(&path, &sched, c, l, i_max),
            }
        })
        .collect()
}

/// CSV header for [`write_traces_csv`].
pub const TRACE_HEADER: &str = "trial,level,i,n_i,N_i,Q_i,M_i,covered_ok";

pub fn write_traces_csv<W: std::io::Write>(
    traces: &[CoverGrowthTrace],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for tr in traces {
        for (level, lv) in tr.levels.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                tr.trial_id, level, lv.i, lv.n_i, lv.n_count, lv.q_count, lv.m_new,
                lv.covered_ok as u8
            )?;
        }
    }
    Ok(())
}

/// Least-squares fit of `log box_count` against `log k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxFit {
    pub slope: f64,
    pub r_squared: f64,
}

/// Fits an empirical box dimension from box counts at several scales.
/// Diagnostic only: the value is a numeric probe, not a proven dimension.
pub fn box_dimension_fit(sets: &[ArcSet], scales: &[usize]) -> Result<BoxFit> {
    if sets.len() != scales.len() || scales.len() < 4 {
        return Err(Error::InvalidConfig("need >= 4 (set, scale) pairs".into()));
    }
    let mut pts = Vec::with_capacity(scales.len());
    for (set, &k) in sets.iter().zip(scales) {
        let count = set.box_count(k);
        if count > 0 {
            pts.push(((k as f64).ln(), (count as f64).ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::DegenerateMeasure);
    }
    let (slope, r_squared) = least_squares_slope(&pts);
    Ok(BoxFit { slope: slope.clamp(0.0, 1.0), r_squared })
}

/// `J_t = 2 ∫_0^{1/2} u^{-t} du = 2^t/(1-t)`.
pub fn j_constant(t: f64) -> f64 {
    assert!((0.0..1.0).contains(&t));
    2f64.powf(t) / (1.0 - t)
}

#[derive(Debug, Clone, Serialize)]
pub struct RieszReport {
    pub s: f64,
    pub trials: u64,
    pub mean_energy: f64,
    pub std_err: f64,
    /// `K_{l,m}^2 C_l J_{s + s(c,theta)}`.
    pub bound: f64,
    pub ratio: f64,
    /// True when the empirical mean exceeds the bound by more than 4
    /// standard errors (constant-level slack makes this informational).
    pub exceeds_4sigma: bool,
}

/// Empirical mean of `I_s(mu_{l,m})` over trials against the closed-form
/// bound. Requires `r_n = c/n`, `c > c_star(theta)`, `s + s(c,theta) < 1`.
pub fn riesz_experiment(
    family: &RadiusFamily,
    theta: f64,
    l: u32,
    m: u32,
    s: f64,
    trials: u64,
    master_seed: u64,
) -> Result<RieszReport> {
    let c = match family {
        RadiusFamily::PowerLaw { c, alpha } if *alpha == 1.0 => *c,
        other => {
            return Err(Error::InvalidConfig(format!(
                "riesz experiment needs r_n = c/n, got {other}"
            )))
        }
    };
    let sched = GeometricSchedule::new(theta)?;
    if c <= c_star(theta) {
        return Err(Error::InvalidConfig(format!(
            "c = {c} must exceed c_star(theta) = {}",
            c_star(theta)
        )));
    }
    let s_env = s_exponent(c, theta);
    if !(s > 0.0) || s + s_env >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "need 0 < s < 1 - s(c,theta) = {}",
            1.0 - s_env
        )));
    }
    let n_need = sched.n(m);
    let vals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let path = SamplePath::generate(master_seed, t, n_need);
            let support = mu_lm_support(&path, &sched, family, l, m)?;
            if support.is_empty() {
                Ok(0.0)
            } else {
                support.riesz_energy(s)
            }
        })
        .collect::<Result<_>>()?;
    let nt = trials as f64;
    let mean = vals.iter().sum::<f64>() / nt;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nt - 1.0);
    let std_err = (var / nt).sqrt();
    let k = k_lm(&sched, family, l, m)?;
    let bound = k * k * c_l_constant(c, theta, l, s) * j_constant(s + s_env);
    Ok(RieszReport {
        s,
        trials,
        mean_energy: mean,
        std_err,
        bound,
        ratio: mean / bound,
        exceeds_4sigma: mean > bound + 4.0 * std_err,
    })
}

/// Adaptive Simpson quadrature with relative tolerance.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let tol = rel_tol * whole.abs().max(1e-300);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

const FROSTMAN_QUAD_TOL: f64 = 1e-6;
const FROSTMAN_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct FrostmanReport {
    pub s: f64,
    pub probes: usize,
    pub violations: usize,
    /// Largest `theta(A) - diam(A)^s` over the probes (<= slack when ok).
    pub max_excess: f64,
    /// `theta(T)`, the total transformed mass.
    pub theta_total: f64,
    /// Jensen bound `1/I_s(nu) = measure^2 / riesz_energy`.
    pub jensen_lower: f64,
    pub ok: bool,
}

/// `theta(A) = ∫_A (R_s nu)^{-1} d nu` for `nu` the normalized Lebesgue
/// measure on `support`; the normalizations cancel into
/// `∫_{A ∩ support} dx / R_s(Leb|_support)(x)`.
fn theta_mass(support: &ArcSet, s: f64, probe: &ArcSet) -> Result<f64> {
    let region = support.intersect(probe);
    let f = |x: f64| 1.0 / support.riesz_potential(s, x).unwrap();
    let mut total = 0.0;
    if region.covers_full() {
        total = adaptive_simpson(&f, 0.0, 1.0, FROSTMAN_QUAD_TOL);
    } else {
        for arc in region.arcs() {
            total += adaptive_simpson(&f, arc.start(), arc.end(), FROSTMAN_QUAD_TOL);
        }
    }
    // riesz_potential is the potential of *normalized* Lebesgue measure on
    // the support, so d nu = dx / measure contributes the remaining factor.
    Ok(total / support.measure())
}

/// Checks the Frostman-transform mass bound `theta(A) <= diam(A)^s` on
/// random probe arcs, and reports the Jensen lower bound on `theta(T)`.
pub fn frostman_check(
    support: &ArcSet,
    s: f64,
    probe_count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<FrostmanReport> {
    if !(0.0 < s && s < 1.0) {
        return Err(Error::InvalidExponent(s));
    }
    let measure = support.measure();
    if measure <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let mut violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..probe_count {
        let start = unit_uniform(rng);
        // probe lengths log-uniform over [1e-3, 1/2]
        let len = (1e-3f64.ln() + unit_uniform(rng) * (0.5f64.ln() - 1e-3f64.ln())).exp();
        let probe = ArcSet::from_raw_arcs([(start, len)]);
        let mass = theta_mass(support, s, &probe)?;
        let diam = len.min(0.5);
        let excess = mass - diam.powf(s);
        max_excess = max_excess.max(excess);
        if excess > FROSTMAN_SLACK {
            violations += 1;
        }
    }
    let theta_total = theta_mass(support, s, &ArcSet::full_circle())?;
    let jensen_lower = measure * measure / support.riesz_energy(s)?;
    Ok(FrostmanReport {
        s,
        probes: probe_count,
        violations,
        max_excess,
        theta_total,
        jensen_lower,
        ok: violations == 0 && theta_total >= jensen_lower - 1e-4,
    })
}

/// Convenience for tests and the CLI: a frostman report per random
/// support, in parallel with per-trial streams.
pub fn frostman_suite(
    s: f64,
    supports: usize,
    probes: usize,
    arcs_per_support: usize,
    master_seed: u64,
) -> Result<Vec<FrostmanReport>> {
    (0..supports as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let support = random_support(&mut rng, arcs_per_support);
            frostman_check(&support, s, probes, &mut rng)
        })
        .collect()
}

fn random_support(rng: &mut ChaCha8Rng, arcs: usize) -> ArcSet {
    ArcSet::from_raw_arcs((0..arcs).map(|_| {
        let start = unit_uniform(rng);
        let len = 0.002 + 0.03 * unit_uniform(rng);
        (start, len)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{lambda, theta_delta, upper_bound_weak};
    use crate::rng::DEFAULT_MASTER_SEED;

    #[test]
    fn simple_trace_invariants() {
        let traces =
            cover_growth_experiment(CoverVariant::Simple, 0.2, 2.0, 1, 8, 30, 123).unwrap();
        for tr in &traces {
            assert_eq!(tr.levels[0].n_count, 2); // n_1 = 2 at theta = 2
            assert_eq!(tr.levels[0].q_count, 0);
            for w in tr.levels.windows(2) {
                assert_eq!(w[1].n_count, w[0].n_count + w[1].m_new);
                assert!(w[1].n_count >= w[0].n_count);
            }
            assert!(tr.all_levels_covered(), "trial {}", tr.trial_id);
        }
    }

    #[test]
    fn simple_level_ratio_bounded() {
        let (c, theta) = (0.2, 2.0);
        let traces =
            cover_growth_experiment(CoverVariant::Simple, c, theta, 1, 9, 200, 31).unwrap();
        let bound = 2.0 * c * (theta * theta - 1.0) / theta;
        for lv in 1..traces[0].levels.len() {
            let ratios: Vec<f64> = traces
                .iter()
                .map(|tr| tr.levels[lv].m_new as f64 / tr.levels[lv - 1].n_count as f64)
                .collect();
            let n = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / n;
            let var =
                ratios.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            assert!(mean <= bound + 4.0 * se, "level {lv}: mean {mean} vs {bound}");
        }
    }

    #[test]
    fn refined_trace_invariants() {
        let traces =
            cover_growth_experiment(CoverVariant::Refined, 0.2, 2.0, 1, 8, 30, 7).unwrap();
        for tr in &traces {
            assert!(tr.all_levels_covered(), "trial {}", tr.trial_id);
            // kept count never decreases (old I carries over)
            for w in tr.levels.windows(2) {
                assert!(w[1].n_count >= w[0].n_count);
            }
        }
    }

    #[test]
    fn refined_matrix_recursion_domination() {
        let (c, theta) = (0.2, 2.0);
        let traces =
            cover_growth_experiment(CoverVariant::Refined, c, theta, 1, 9, 300, 55).unwrap();
        let (big_theta, delta) = theta_delta(c, theta).unwrap();
        let n_levels = traces[0].levels.len();
        for lv in 1..n_levels {
            let nt = traces.len() as f64;
            let mean_n_prev =
                traces.iter().map(|t| t.levels[lv - 1].n_count as f64).sum::<f64>() / nt;
            let mean_q_prev =
                traces.iter().map(|t| t.levels[lv - 1].q_count as f64).sum::<f64>() / nt;
            let ns: Vec<f64> = traces.iter().map(|t| t.levels[lv].n_count as f64).collect();
            let qs: Vec<f64> = traces.iter().map(|t| t.levels[lv].q_count as f64).collect();
            let mean_n = ns.iter().sum::<f64>() / nt;
            let mean_q = qs.iter().sum::<f64>() / nt;
            let se = |v: &[f64], m: f64| {
                (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nt - 1.0) / nt).sqrt()
            };
            // E N' <= (1+Theta) N + Theta Q; E Q' <= Delta (N + Q)
            let n_bound = (1.0 + big_theta) * mean_n_prev + big_theta * mean_q_prev;
            let q_bound = delta * (mean_n_prev + mean_q_prev);
            assert!(mean_n <= n_bound + 4.0 * se(&ns, mean_n), "level {lv}");
            assert!(mean_q <= q_bound + 4.0 * se(&qs, mean_q), "level {lv}");
        }
    }

    #[test]
    fn fitted_exponents_below_bounds() {
        let (c, theta) = (0.2, 2.0);
        let simple =
            cover_growth_experiment(CoverVariant::Simple, c, theta, 1, 9, 120, 11).unwrap();
        let mean_exp =
            simple.iter().map(|t| t.fitted_exponent()).sum::<f64>() / simple.len() as f64;
        let weak = upper_bound_weak(c, theta).unwrap().value;
        assert!(mean_exp <= weak + 0.05, "simple exponent {mean_exp} vs weak {weak}");

        let refined =
            cover_growth_experiment(CoverVariant::Refined, c, theta, 1, 9, 120, 11).unwrap();
        let mean_exp =
            refined.iter().map(|t| t.fitted_exponent()).sum::<f64>() / refined.len() as f64;
        let matrix = lambda(c, theta).unwrap().ln() / theta.ln();
        assert!(mean_exp <= matrix + 0.05, "refined exponent {mean_exp} vs {matrix}");
        // refined should not exceed simple on average
        let mean_simple =
            simple.iter().map(|t| t.fitted_exponent()).sum::<f64>() / simple.len() as f64;
        assert!(mean_exp <= mean_simple + 0.02);
    }

    #[test]
    fn trace_csv_shape() {
        let traces =
            cover_growth_experiment(CoverVariant::Refined, 0.2, 2.0, 1, 4, 3, 1).unwrap();
        let mut buf = Vec::new();
        write_traces_csv(&traces, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TRACE_HEADER);
        assert_eq!(text.lines().count(), 1 + 3 * 4);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn box_fit_extremes() {
        let scales = [8usize, 16, 32, 64, 128];
        let full: Vec<ArcSet> = scales.iter().map(|_| ArcSet::full_circle()).collect();
        let fit = box_dimension_fit(&full, &scales).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.01, "slope {}", fit.slope);

        let tiny: Vec<ArcSet> =
            scales.iter().map(|_| ArcSet::from_raw_arcs([(0.3, 1e-9)])).collect();
        let fit = box_dimension_fit(&tiny, &scales).unwrap();
        assert!(fit.slope < 0.05, "slope {}", fit.slope);

        let empty: Vec<ArcSet> = scales.iter().map(|_| ArcSet::empty()).collect();
        assert!(matches!(box_dimension_fit(&empty, &scales), Err(Error::DegenerateMeasure)));
        assert!(box_dimension_fit(&full[..3], &scales[..3]).is_err());
    }

    #[test]
    fn riesz_experiment_bounded() {
        let f = RadiusFamily::PowerLaw { c: 1.0, alpha: 1.0 };
        let rep = riesz_experiment(&f, 8.6, 2, 3, 0.1, 100, DEFAULT_MASTER_SEED).unwrap();
        assert!(rep.mean_energy.is_finite() && rep.mean_energy > 0.0);
        assert!(rep.mean_energy < rep.bound * 10.0, "mean {} bound {}", rep.mean_energy, rep.bound);

        // s -> 0: energy approaches measure^2
        let sched = GeometricSchedule::new(8.6).unwrap();
        let mut e_ratio = 0.0;
        let trials = 40u64;
        for t in 0..trials {
            let path = SamplePath::generate(DEFAULT_MASTER_SEED, t, sched.n(3));
            let sup = mu_lm_support(&path, &sched, &f, 2, 3).unwrap();
            if sup.is_empty() {
                continue;
            }
            let m2 = sup.measure() * sup.measure();
            e_ratio += sup.riesz_energy(0.01).unwrap() / m2;
        }
        e_ratio /= trials as f64;
        assert!((e_ratio - 1.0).abs() < 0.1, "small-s ratio {e_ratio}");

        // invalid configs
        assert!(riesz_experiment(&f, 8.6, 2, 3, 0.5, 10, 0).is_err()); // s + s_env >= 1
        let small = RadiusFamily::PowerLaw { c: 0.3, alpha: 1.0 };
        assert!(riesz_experiment(&small, 8.6, 2, 3, 0.1, 10, 0).is_err()); // c <= c_star
        let wrong = RadiusFamily::LogOverN { c: 1.0 };
        assert!(riesz_experiment(&wrong, 8.6, 2, 3, 0.1, 10, 0).is_err());
    }

    #[test]
    fn adaptive_simpson_accuracy() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-9);
        assert!((v - 2.0).abs() < 1e-8);
        let v = adaptive_simpson(&|x: f64| 1.0 / x, 1.0, 2.0, 1e-9);
        assert!((v - 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn frostman_full_circle_density() {
        // support = T: theta(A) = |A| / J'_s exactly
        let mut rng = trial_rng(1, 0);
        let s = 0.4;
        let rep = frostman_check(&ArcSet::full_circle(), s, 30, &mut rng).unwrap();
        assert_eq!(rep.violations, 0);
        let j = j_constant(s);
        assert!((rep.theta_total - 1.0 / j).abs() < 1e-5, "{} vs {}", rep.theta_total, 1.0 / j);
        // Jensen is exact here: I_s(nu) = J'_s
        assert!((rep.jensen_lower - 1.0 / j).abs() < 1e-10);
        assert!(rep.ok);
    }

    #[test]
    fn frostman_random_supports() {
        let reports = frostman_suite(0.4, 20, 40, 20, DEFAULT_MASTER_SEED).unwrap();
        for rep in &reports {
            assert_eq!(rep.violations, 0, "max excess {}", rep.max_excess);
            assert!(rep.theta_total >= rep.jensen_lower - 1e-4);
        }
        // degenerate support
        let mut rng = trial_rng(1, 1);
        assert!(matches!(
            frostman_check(&ArcSet::empty(), 0.4, 5, &mut rng),
            Err(Error::DegenerateMeasure)
        ));
    }
}
