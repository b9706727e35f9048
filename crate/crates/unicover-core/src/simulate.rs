//! Monte Carlo machinery: sample paths, the covering sets `E_n` and `F_j`,
//! block-restricted supports, and trial-level experiments.
//!
//! All experiments take a `(master_seed, trial_id)` pair per trial, so
//! results are independent of the parallel schedule: trials are mapped in
//! order and aggregated sequentially.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::GeometricSchedule;
use crate::radius::RadiusFamily;
use crate::rng::{trial_rng, unit_uniform};
use crate::torus::ArcSet;
use crate::{Error, Result};

/// Wilson score z for 95% intervals.
const WILSON_Z: f64 = 1.959963984540054;

/// A lazily extendable i.i.d. uniform sample `omega_1, omega_2, ...` tied
/// to a `(master_seed, trial_id)` stream. Extending a short path yields the
/// same points as generating the longer one up front.
#[derive(Debug, Clone)]
pub struct SamplePath {
    master_seed: u64,
    trial_id: u64,
    points: Vec<f64>,
    rng: ChaCha8Rng,
}

impl SamplePath {
    pub fn generate(master_seed: u64, trial_id: u64, n: u64) -> Self {
        let mut path = SamplePath {
            master_seed,
            trial_id,
            points: Vec::new(),
            rng: trial_rng(master_seed, trial_id),
        };
        path.extend_to(n);
        path
    }

    pub fn extend_to(&mut self, n: u64) {
        while (self.points.len() as u64) < n {
            let x = unit_uniform(&mut self.rng);
            self.points.push(x);
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trial_id(&self) -> u64 {
        self.trial_id
    }

    pub fn len(&self) -> u64 {
        self.points.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All generated points, `omega_1` first.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// One-based access: `omega_k`.
    pub fn point(&self, k: u64) -> f64 {
        self.points[(k - 1) as usize]
    }
}

/// `E_n = union_{k <= n} B(omega_k, r_n)`.
pub fn build_e(path: &SamplePath, family: &RadiusFamily, n: u64) -> Result<ArcSet> {
    if path.len() < n {
        return Err(Error::InsufficientSamples { have: path.len(), need: n });
    }
    let r = family.r(n)?;
    Ok(ArcSet::from_raw_arcs(
        path.points[..n as usize].iter().map(|&c| (c - r, 2.0 * r)),
    ))
}

/// `F_j = union_{n_{j-1} < k <= n_j} B(omega_k, r_{n_{j+1}})` for `j >= 1`.
pub fn build_f(
    path: &SamplePath,
    sched: &GeometricSchedule,
    family: &RadiusFamily,
    j: u32,
) -> Result<ArcSet> {
    if j == 0 {
        return Err(Error::InvalidConfig("F_j needs j >= 1".into()));
    }
    let (lo, hi) = (sched.n(j - 1), sched.n(j));
    if path.len() < hi {
        return Err(Error::InsufficientSamples { have: path.len(), need: hi });
    }
    let r = family.r(sched.n(j + 1))?;
    Ok(ArcSet::from_raw_arcs(
        path.points[lo as usize..hi as usize].iter().map(|&c| (c - r, 2.0 * r)),
    ))
}

/// Support of `mu_{l,m}`: the intersection `F_l ∩ ... ∩ F_m`. The measure
/// `mu_{l,m}(T)` is its Lebesgue measure.
pub fn mu_lm_support(
    path: &SamplePath,
    sched: &GeometricSchedule,
    family: &RadiusFamily,
    l: u32,
    m: u32,
) -> Result<ArcSet> {
    if l == 0 || l > m {
        return Err(Error::InvalidConfig(format!("need 1 <= l <= m, got l={l}, m={m}")));
    }
    let mut set = build_f(path, sched, family, l)?;
    for j in l + 1..=m {
        set = set.intersect(&build_f(path, sched, family, j)?);
        if set.is_empty() {
            break;
        }
    }
    Ok(set)
}

/// Result of a coverage experiment at a single `n`.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageResult {
    pub n: u64,
    pub trials: u64,
    pub covered: u64,
    pub freq: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub mean_measure: f64,
    pub expected_measure: f64,
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    // exact endpoints at 0 and n successes, so freq always lies inside
    let z2 = WILSON_Z * WILSON_Z;
    if successes == 0 {
        let n = trials as f64;
        return (0.0, (z2 / n) / (1.0 + z2 / n));
    }
    if successes == trials {
        let n = trials as f64;
        return (1.0 - (z2 / n) / (1.0 + z2 / n), 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// `E[measure(E_n)] = 1 - (1 - 2 r_n)^n` (exact, by Fubini).
pub fn expected_e_measure(family: &RadiusFamily, n: u64) -> Result<f64> {
    let r = family.r(n)?;
    if 2.0 * r >= 1.0 {
        return Ok(1.0);
    }
    // 1 - (1 - 2r)^n = -expm1(n log(1 - 2r))
    Ok(-((n as f64) * (-2.0 * r).ln_1p()).exp_m1())
}

/// Runs `trials` independent coverage trials at sample size `n`.
///
/// Follows Shepp's parameterization: each trial places `n` arcs of
/// *length* `r_n` (radius `r_n / 2`), so the empirical frequencies are
/// directly comparable with `shepp_lower` / `shepp_upper`, which are
/// stated in terms of `(1 - r_n)^(n-1)`. `E_n` elsewhere uses balls of
/// radius `r_n`; with those the lower bound does not apply.
pub fn coverage_experiment(
    family: &RadiusFamily,
    n: u64,
    trials: u64,
    master_seed: u64,
) -> Result<CoverageResult> {
    let len = family.r(n)?;
    let per: Vec<(bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let path = SamplePath::generate(master_seed, t, n);
            let e = ArcSet::from_raw_arcs(
                path.points().iter().map(|&w| (w - len / 2.0, len)),
            );
            Ok((e.covers_full(), e.measure()))
        })
        .collect::<Result<_>>()?;
    let covered = per.iter().filter(|x| x.0).count() as u64;
    let mean_measure = per.iter().map(|x| x.1).sum::<f64>() / trials as f64;
    let (lo, hi) = wilson_interval(covered, trials);
    Ok(CoverageResult {
        n,
        trials,
        covered,
        freq: covered as f64 / trials as f64,
        wilson_lo: lo,
        wilson_hi: hi,
        mean_measure,
        // 1 - (1 - len)^n for n arcs of length `len`
        expected_measure: if len >= 1.0 {
            1.0
        } else {
            -((n as f64) * (-len).ln_1p()).exp_m1()
        },
    })
}

/// Result of a block-measure experiment: sample mean of `mu_{l,m}(T)`
/// against the product formula `K_{l,m}`.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureResult {
    pub l: u32,
    pub m: u32,
    pub trials: u64,
    pub mean: f64,
    pub std_err: f64,
    pub expected: f64,
}

pub fn measure_experiment(
    family: &RadiusFamily,
    theta: f64,
    l: u32,
    m: u32,
    trials: u64,
    master_seed: u64,
) -> Result<MeasureResult> {
    let sched = GeometricSchedule::new(theta)?;
    let n_need = sched.n(m);
    let vals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let path = SamplePath::generate(master_seed, t, n_need);
            Ok(mu_lm_support(&path, &sched, family, l, m)?.measure())
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(MeasureResult {
        l,
        m,
        trials,
        mean,
        std_err: (var / n).sqrt(),
        expected: crate::bounds::k_lm(&sched, family, l, m)?,
    })
}

/// `A_{p,N} = E_p ∩ E_{p+1} ∩ ... ∩ E_N`, the finite-stage approximation
/// of `intersection_{n >= p} E_n`.
///
/// Computed incrementally: the running intersection shrinks fast, so each
/// step only materializes the balls of `E_n` whose centers fall within
/// `r_n` of a surviving arc. The result is exactly the full intersection.
pub fn uniform_set_approx(
    path: &SamplePath,
    family: &RadiusFamily,
    p: u64,
    n_max: u64,
) -> Result<ArcSet> {
    let snaps = uniform_set_trace(path, family, p, &[n_max])?;
    Ok(snaps.into_iter().next().unwrap().1)
}

/// Like [`uniform_set_approx`] but returns the running intersection at each
/// checkpoint. `checkpoints` must be strictly increasing with first entry
/// `>= p`.
pub fn uniform_set_trace(
    path: &SamplePath,
    family: &RadiusFamily,
    p: u64,
    checkpoints: &[u64],
) -> Result<Vec<(u64, ArcSet)>> {
    if p == 0 || checkpoints.is_empty() {
        return Err(Error::InvalidConfig("need p >= 1 and at least one checkpoint".into()));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints[0] < p {
        return Err(Error::InvalidConfig("checkpoints must be increasing and >= p".into()));
    }
    let n_max = *checkpoints.last().unwrap();
    if path.len() < n_max {
        return Err(Error::InsufficientSamples { have: path.len(), need: n_max });
    }
    if p < family.n_min() {
        return Err(Error::BelowDomain { n: p, n_min: family.n_min() });
    }

    let mut centers: Vec<f64> = path.points[..p as usize].to_vec();
    centers.sort_by(|a, b| a.total_cmp(b));
    let mut running = build_e(path, family, p)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut ci = 0;
    if checkpoints[ci] == p {
        out.push((p, running.clone()));
        ci += 1;
    }
    for n in p + 1..=n_max {
        let x = path.point(n);
        let idx = centers.partition_point(|&c| c < x);
        centers.insert(idx, x);
        let r = family.r(n)?;
        running = intersect_with_union_of_balls(&running, &centers, r);
        if ci < checkpoints.len() && checkpoints[ci] == n {
            out.push((n, running.clone()));
            ci += 1;
        }
        if running.is_empty() {
            // Later E_n cannot resurrect anything; emit empties and stop.
            while ci < checkpoints.len() {
                out.push((checkpoints[ci], ArcSet::empty()));
                ci += 1;
            }
            break;
        }
    }
    Ok(out)
}

/// `running ∩ union_c B(c, r)` where `c` ranges over the sorted `centers`.
/// Only balls that can meet a surviving arc are materialized.
fn intersect_with_union_of_balls(running: &ArcSet, centers: &[f64], r: f64) -> ArcSet {
    if 2.0 * r >= 1.0 {
        return running.clone();
    }
    if running.covers_full() {
        return ArcSet::from_raw_arcs(centers.iter().map(|&c| (c - r, 2.0 * r)));
    }
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut window: Vec<f64> = Vec::new();
    for arc in running.arcs() {
        window.clear();
        centers_in_window(centers, arc.start() - r, arc.length() + 2.0 * r, &mut window);
        if window.is_empty() {
            continue;
        }
        let balls = ArcSet::from_raw_arcs(window.iter().map(|&c| (c - r, 2.0 * r)));
        let piece = ArcSet::from_raw_arcs([(arc.start(), arc.length())]).intersect(&balls);
        pieces.extend(piece.arcs().iter().map(|a| (a.start(), a.length())));
    }
    ArcSet::from_raw_arcs(pieces)
}

/// Appends every center lying in the circular window `[lo, lo + span]`.
fn centers_in_window(centers: &[f64], lo: f64, span: f64, out: &mut Vec<f64>) {
    if span >= 1.0 {
        out.extend_from_slice(centers);
        return;
    }
    let mut lo = lo.rem_euclid(1.0);
    if lo >= 1.0 {
        lo = 0.0;
    }
    let hi = lo + span;
    let i = centers.partition_point(|&c| c < lo);
    if hi <= 1.0 {
        let j = centers.partition_point(|&c| c <= hi);
        out.extend_from_slice(&centers[i..j]);
    } else {
        out.extend_from_slice(&centers[i..]);
        let j = centers.partition_point(|&c| c <= hi - 1.0);
        out.extend_from_slice(&centers[..j]);
    }
}

/// One checkpoint row of a countability experiment, aggregated over trials.
#[derive(Debug, Clone, Serialize)]
pub struct CountabilityRow {
    pub n: u64,
    pub mean_measure: f64,
    pub mean_arcs: f64,
    /// Fraction of trials whose intersection is exactly `p` arcs.
    pub frac_exact_p: f64,
    /// Fraction with `measure / (2 p r_n)` in `[0.4, 1.0]`.
    pub frac_ok: f64,
}

/// Tracks the finite-stage approximation of the uniform set for a family
/// in the countable regime: the intersection should collapse to `p` arcs
/// around `omega_1..omega_p` with measure comparable to `2 p r_n`.
pub fn countability_experiment(
    family: &RadiusFamily,
    p: u64,
    checkpoints: &[u64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<CountabilityRow>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let n_max = *checkpoints.last().ok_or_else(|| {
        Error::InvalidConfig("need at least one checkpoint".into())
    })?;
    let per: Vec<Vec<(f64, usize, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let path = SamplePath::generate(master_seed, t, n_max);
            let snaps = uniform_set_trace(&path, family, p, checkpoints)?;
            snaps
                .iter()
                .map(|(n, set)| {
                    let r = family.r(*n)?;
                    let ratio = set.measure() / (2.0 * p as f64 * r);
                    // Disjoint balls make the ratio exactly 1 up to
                    // rounding; arc endpoints carry absolute error of a
                    // few ulps of O(1) values, i.e. relative error ~eps/r
                    // against widths 2r (~1e-4 when r = 1e-12). A genuine
                    // extra surviving arc shifts the ratio by 1/p >= that.
                    let tol = (8.0 * f64::EPSILON / r).clamp(1e-9, 1e-2);
                    let good = ratio >= 0.4 && ratio <= 1.0 + tol;
                    Ok((set.measure(), set.arc_count(), good))
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let nt = trials as f64;
    Ok(checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut measure = 0.0;
            let mut arcs = 0.0;
            let mut exact = 0u64;
            let mut ok = 0u64;
            for trial in &per {
                let (m, a, good) = trial[i];
                measure += m;
                arcs += a as f64;
                exact += (a as u64 == p) as u64;
                ok += good as u64;
            }
            CountabilityRow {
                n,
                mean_measure: measure / nt,
                mean_arcs: arcs / nt,
                frac_exact_p: exact as f64 / nt,
                frac_ok: ok as f64 / nt,
            }
        })
        .collect())
}

/// Exact joint hit probability `P(omega covers both x and y)` for points at
/// circle distance `d`: the overlap `max(0, 2r - d)` of the two balls.
/// Requires `2r + d <= 1` so the balls cannot also meet around the back.
pub fn joint_hit_probability(r: f64, d: f64) -> f64 {
    assert!(r > 0.0 && (0.0..=0.5).contains(&d) && 2.0 * r + d <= 1.0);
    (2.0 * r - d).max(0.0)
}

/// Exact joint miss probability and its indicator upper bound
/// `1 - 4r + 2r 1{d < 2r}`; returns `(exact, bound)`.
pub fn joint_miss_probability(r: f64, d: f64) -> (f64, f64) {
    let exact = 1.0 - 4.0 * r + joint_hit_probability(r, d);
    let bound = 1.0 - 4.0 * r + if d < 2.0 * r { 2.0 * r } else { 0.0 };
    (exact, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DEFAULT_MASTER_SEED;

    fn logn(c: f64) -> RadiusFamily {
        RadiusFamily::LogOverN { c }
    }

    fn pow(c: f64, alpha: f64) -> RadiusFamily {
        RadiusFamily::PowerLaw { c, alpha }
    }

    #[test]
    fn path_extension_is_prefix_stable() {
        let long = SamplePath::generate(11, 3, 100);
        let mut short = SamplePath::generate(11, 3, 10);
        short.extend_to(100);
        assert_eq!(long.points(), short.points());
        assert_eq!(long.point(1), long.points()[0]);
        assert!(long.points().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn build_e_deterministic_bits() {
        let f = logn(2.0);
        let a = build_e(&SamplePath::generate(5, 0, 200), &f, 200).unwrap();
        let b = build_e(&SamplePath::generate(5, 0, 200), &f, 200).unwrap();
        assert_eq!(a.measure().to_bits(), b.measure().to_bits());
        assert_eq!(a.arc_count(), b.arc_count());
    }

    #[test]
    fn e_measure_matches_closed_form() {
        // small c keeps coverage well below 1 so the variance is healthy
        let f = logn(0.2);
        let n = 500u64;
        let trials = 400u64;
        let vals: Vec<f64> = (0..trials)
            .map(|t| build_e(&SamplePath::generate(DEFAULT_MASTER_SEED, t, n), &f, n).unwrap().measure())
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let expected = expected_e_measure(&f, n).unwrap();
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se, "mean {mean} vs {expected} (se {se})");
        // oracle check of the closed form itself
        let r = f.r(n).unwrap();
        assert!((expected - (1.0 - (1.0 - 2.0 * r).powi(n as i32))).abs() < 1e-12);
    }

    #[test]
    fn f_block_nested_in_e() {
        let f = logn(1.5);
        let sched = GeometricSchedule::new(2.0).unwrap();
        for t in 0..20u64 {
            let path = SamplePath::generate(9, t, 64);
            for j in 1..=5u32 {
                let fj = build_f(&path, &sched, &f, j).unwrap();
                let e = build_e(&path, &f, sched.n(j)).unwrap();
                // F_j uses a smaller radius and a subset of centers.
                let leak = fj.intersect(&e.complement()).measure();
                assert!(leak <= 1e-12, "t={t} j={j}: leak {leak}");
            }
        }
    }

    #[test]
    fn f_block_miss_probability() {
        // P(x not in F_j) = (1 - 2 r_{n_{j+1}})^{n_j - n_{j-1}}
        let f = pow(1.0, 1.0);
        let sched = GeometricSchedule::new(2.0).unwrap();
        let j = 3u32;
        let trials = 4000u64;
        let x = 0.37;
        let mut misses = 0u64;
        for t in 0..trials {
            let path = SamplePath::generate(21, t, sched.n(j));
            if !build_f(&path, &sched, &f, j).unwrap().contains(x) {
                misses += 1;
            }
        }
        let r = f.r(sched.n(j + 1)).unwrap();
        let q = (1.0 - 2.0 * r).powi((sched.n(j) - sched.n(j - 1)) as i32);
        let freq = misses as f64 / trials as f64;
        let se = (q * (1.0 - q) / trials as f64).sqrt();
        assert!((freq - q).abs() < 4.0 * se, "freq {freq} vs {q}");
    }

    #[test]
    fn measure_experiment_matches_k_lm() {
        let f = pow(1.0, 1.0);
        let res = measure_experiment(&f, 2.0, 2, 4, 600, DEFAULT_MASTER_SEED).unwrap();
        assert!(
            (res.mean - res.expected).abs() <= 4.0 * res.std_err,
            "mean {} vs K {} (se {})",
            res.mean,
            res.expected,
            res.std_err
        );
    }

    #[test]
    fn coverage_high_and_low_c() {
        let hi = coverage_experiment(&logn(3.0), 400, 60, DEFAULT_MASTER_SEED).unwrap();
        assert!(hi.freq > 0.9, "freq {}", hi.freq);
        let lo = coverage_experiment(&logn(0.3), 400, 60, DEFAULT_MASTER_SEED).unwrap();
        assert!(lo.freq < 0.5, "freq {}", lo.freq);
        assert!(hi.wilson_lo <= hi.freq && hi.freq <= hi.wilson_hi);
        assert!((hi.mean_measure - hi.expected_measure).abs() < 0.05);
    }

    #[test]
    fn coverage_thread_count_invariance() {
        let f = logn(2.0);
        let base = coverage_experiment(&f, 300, 40, 77).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| coverage_experiment(&f, 300, 40, 77).unwrap());
        assert_eq!(base.covered, single.covered);
        assert_eq!(base.mean_measure.to_bits(), single.mean_measure.to_bits());
    }

    /// Naive oracle: rebuild every `E_n` in full and intersect.
    fn naive_uniform_set(
        path: &SamplePath,
        family: &RadiusFamily,
        p: u64,
        n_max: u64,
    ) -> ArcSet {
        let mut set = build_e(path, family, p).unwrap();
        for n in p + 1..=n_max {
            set = set.intersect(&build_e(path, family, n).unwrap());
        }
        set
    }

    #[test]
    fn windowed_intersection_matches_naive() {
        for (fam, p, n_max) in [
            (pow(1.0, 2.0), 5u64, 300u64),
            (pow(0.5, 3.0), 8, 200),
            (logn(0.7), 10, 250),
            (logn(2.5), 4, 150),
        ] {
            for t in 0..6u64 {
                let path = SamplePath::generate(DEFAULT_MASTER_SEED, 1000 + t, n_max);
                let fast = uniform_set_approx(&path, &fam, p, n_max).unwrap();
                let naive = naive_uniform_set(&path, &fam, p, n_max);
                assert_eq!(fast.arc_count(), naive.arc_count(), "{fam:?} t={t}");
                let sym = fast
                    .intersect(&naive.complement())
                    .measure()
                    .max(naive.intersect(&fast.complement()).measure());
                assert!(sym <= 1e-12, "{fam:?} t={t}: symdiff {sym}");
            }
        }
    }

    #[test]
    fn trace_checkpoints_consistent() {
        let fam = pow(1.0, 3.0);
        let path = SamplePath::generate(3, 0, 400);
        let snaps = uniform_set_trace(&path, &fam, 6, &[6, 50, 400]).unwrap();
        assert_eq!(snaps.len(), 3);
        // monotone shrinking
        assert!(snaps[0].1.measure() >= snaps[1].1.measure());
        assert!(snaps[1].1.measure() >= snaps[2].1.measure());
        // final snapshot equals direct call
        let direct = uniform_set_approx(&path, &fam, 6, 400).unwrap();
        assert_eq!(snaps[2].1.measure().to_bits(), direct.measure().to_bits());
        assert!(uniform_set_trace(&path, &fam, 6, &[50, 10]).is_err());
        assert!(uniform_set_trace(&path, &fam, 6, &[4]).is_err());
    }

    #[test]
    fn countable_regime_collapses_to_p_arcs() {
        let fam = pow(1.0, 3.0);
        let p = 10u64;
        let rows =
            countability_experiment(&fam, p, &[100, 1000], 40, DEFAULT_MASTER_SEED).unwrap();
        let last = rows.last().unwrap();
        assert!(last.mean_arcs <= p as f64 + 0.5, "arcs {}", last.mean_arcs);
        // a trial occasionally keeps an extra chance arc (ratio > 1)
        assert!(last.frac_ok >= 0.8, "frac_ok {}", last.frac_ok);
        // measure shrinks roughly like r_n
        assert!(rows[1].mean_measure < rows[0].mean_measure);
    }

    #[test]
    fn uniform_set_contains_first_p_points() {
        let fam = pow(1.0, 3.0);
        let p = 10u64;
        for t in 0..10u64 {
            let path = SamplePath::generate(DEFAULT_MASTER_SEED, t, 1000);
            let set = uniform_set_approx(&path, &fam, p, 1000).unwrap();
            for k in 1..=p {
                assert!(set.contains(path.point(k)), "t={t} k={k}");
            }
        }
    }

    #[test]
    fn joint_probabilities_match_monte_carlo() {
        let (r, d) = (0.05, 0.03);
        let exact_hit = joint_hit_probability(r, d);
        assert!((exact_hit - 0.07).abs() < 1e-15);
        let (exact_miss, bound) = joint_miss_probability(r, d);
        assert!(exact_miss <= bound + 1e-15);

        let trials = 200_000u64;
        let mut rng = trial_rng(DEFAULT_MASTER_SEED, 99);
        let (x, y) = (0.2, 0.2 + d);
        let mut hit = 0u64;
        let mut miss = 0u64;
        for _ in 0..trials {
            let w = unit_uniform(&mut rng);
            let hx = crate::torus::dist(w, x) <= r;
            let hy = crate::torus::dist(w, y) <= r;
            hit += (hx && hy) as u64;
            miss += (!hx && !hy) as u64;
        }
        let se = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
        let fh = hit as f64 / trials as f64;
        let fm = miss as f64 / trials as f64;
        assert!((fh - exact_hit).abs() < 4.0 * se(exact_hit).max(1e-4));
        assert!((fm - exact_miss).abs() < 4.0 * se(exact_miss).max(1e-4));
    }

    #[test]
    fn wilson_sanity() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((hi - lo) < 0.22);
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo == 0.0 && hi > 0.0 && hi < 0.06);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(hi == 1.0 && lo > 0.94);
    }
}
