//! Finite unions of closed arcs of the circle `T = R/Z`.
//!
//! An [`ArcSet`] is kept in canonical form: arcs sorted by start, pairwise
//! disjoint with strictly positive gaps, wrap-around represented by a single
//! arc whose lifted end exceeds 1. Equal sets have identical representations,
//! so `==` is set equality.
//!
//! Arcs are closed: `contains` includes both endpoints. The stored intervals
//! are plain `(start, length)` pairs and measure is unaffected by the
//! closed/open distinction.

use crate::{Error, Result};

/// Gaps smaller than this are merged during normalization, so that
/// floating-point subtraction cannot leave spurious zero-width gaps.
pub const MERGE_EPS: f64 = 1e-15;

/// Distance on `T` between two points of `[0, 1)`.
///
/// Returns `min(|x - y|, 1 - |x - y|)`, always in `[0, 1/2]`.
pub fn dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// A single closed arc, `start` in `[0, 1)` and `length` in `(0, 1]`.
///
/// A wrap-around arc has `start + length > 1`; `length == 1` encodes the
/// full circle (only ever seen through [`ArcSet::full_circle`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Lifted end point, `start + length`, possibly `> 1`.
    pub fn end(&self) -> f64 {
        self.start + self.length
    }
}

/// A canonical finite union of closed arcs of `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    arcs: Vec<Arc>,
    full: bool,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new(), full: false }
    }

    pub fn full_circle() -> Self {
        ArcSet { arcs: Vec::new(), full: true }
    }

    /// Builds a canonical set from raw `(start, length)` pairs.
    ///
    /// Starts are reduced mod 1; non-positive lengths are dropped; lengths
    /// `>= 1` force the full circle.
    pub fn from_raw_arcs<I: IntoIterator<Item = (f64, f64)>>(raw: I) -> Self {
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for (s, l) in raw {
            if l <= 0.0 {
                continue;
            }
            if l >= 1.0 {
                return ArcSet::full_circle();
            }
            let mut s = s.rem_euclid(1.0);
            if s >= 1.0 {
                // rem_euclid(1.0) can return 1.0 for tiny negative inputs
                s = 0.0;
            }
            intervals.push((s, s + l));
        }
        Self::normalize(intervals)
    }

    /// The closed ball `B(center, r)` as an arc set.
    pub fn ball(center: f64, r: f64) -> Result<Self> {
        if r <= 0.0 {
            return Err(Error::InvalidRadius(r));
        }
        if 2.0 * r >= 1.0 {
            return Ok(ArcSet::full_circle());
        }
        Ok(ArcSet::from_raw_arcs([(center - r, 2.0 * r)]))
    }

    /// Sweep-line normalization of lifted `(start, end)` intervals with
    /// `start` in `[0, 1)` and `end <= start + 1`.
    fn normalize(mut intervals: Vec<(f64, f64)>) -> Self {
        if intervals.is_empty() {
            return ArcSet::empty();
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (s, e) in intervals {
            match merged.last_mut() {
                Some(last) if s <= last.1 + MERGE_EPS => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => merged.push((s, e)),
            }
        }
        // Wrap: the last interval may spill past 1 and swallow leading ones.
        if let Some(&(ls, le)) = merged.last() {
            if le - ls >= 1.0 {
                return ArcSet::full_circle();
            }
            if le >= 1.0 {
                let mut le = le;
                while merged.len() > 1 {
                    let (fs, fe) = merged[0];
                    if le - 1.0 + MERGE_EPS >= fs {
                        le = le.max(fe + 1.0);
                        merged.remove(0);
                        let last = merged.last_mut().unwrap();
                        last.1 = le;
                        if le - last.0 >= 1.0 {
                            return ArcSet::full_circle();
                        }
                    } else {
                        break;
                    }
                }
                // Lone wrapping interval covering everything.
                if merged.len() == 1 && merged[0].1 - merged[0].0 >= 1.0 {
                    return ArcSet::full_circle();
                }
            }
        }
        let arcs = merged
            .into_iter()
            .map(|(s, e)| Arc { start: s, length: e - s })
            .collect();
        ArcSet { arcs, full: false }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        if self.full {
            1
        } else {
            self.arcs.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn covers_full(&self) -> bool {
        self.full
    }

    /// Lebesgue measure, the exact sum of arc lengths.
    pub fn measure(&self) -> f64 {
        if self.full {
            1.0
        } else {
            self.arcs.iter().map(|a| a.length).sum()
        }
    }

    /// Set union.
    pub fn union(&self, other: &ArcSet) -> ArcSet {
        if self.full || other.full {
            return ArcSet::full_circle();
        }
        let raw: Vec<(f64, f64)> = self
            .arcs
            .iter()
            .chain(other.arcs.iter())
            .map(|a| (a.start, a.end()))
            .collect();
        Self::normalize(raw)
    }

    /// Set complement. The gaps of a canonical set, so the result is
    /// canonical by construction.
    pub fn complement(&self) -> ArcSet {
        if self.full {
            return ArcSet::empty();
        }
        if self.arcs.is_empty() {
            return ArcSet::full_circle();
        }
        let mut gaps = Vec::with_capacity(self.arcs.len());
        for (i, a) in self.arcs.iter().enumerate() {
            let next_start = if i + 1 < self.arcs.len() {
                self.arcs[i + 1].start
            } else {
                self.arcs[0].start + 1.0
            };
            let gs = a.end();
            let ge = next_start;
            if ge > gs {
                let s = gs.rem_euclid(1.0);
                gaps.push((s, s + (ge - gs)));
            }
        }
        Self::normalize(gaps)
    }

    /// Set intersection, via De Morgan on the sweep-line machinery.
    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        if self.full {
            return other.clone();
        }
        if other.full {
            return self.clone();
        }
        self.complement().union(&other.complement()).complement()
    }

    /// Exact membership; arcs are closed so both endpoints belong.
    pub fn contains(&self, x: f64) -> bool {
        if self.full {
            return true;
        }
        let x = x.rem_euclid(1.0);
        // Wrapping arc is the last one; test it at x and x + 1.
        for probe in [x, x + 1.0] {
            let idx = self.arcs.partition_point(|a| a.start <= probe);
            if idx > 0 {
                let a = &self.arcs[idx - 1];
                if probe <= a.end() {
                    return true;
                }
            }
        }
        false
    }

    /// Grows every arc by `r` on both sides and renormalizes.
    pub fn thicken(&self, r: f64) -> ArcSet {
        assert!(r >= 0.0, "thicken radius must be nonnegative");
        if self.full || r == 0.0 {
            return self.clone();
        }
        ArcSet::from_raw_arcs(self.arcs.iter().map(|a| (a.start - r, a.length + 2.0 * r)))
    }

    /// Number of grid cells `[i/k, (i+1)/k)` meeting the set.
    pub fn box_count(&self, k: usize) -> usize {
        assert!(k >= 1);
        if self.full {
            return k;
        }
        if self.arcs.is_empty() {
            return 0;
        }
        let mut hit = vec![false; k];
        let kf = k as f64;
        for a in &self.arcs {
            let i0 = (a.start * kf).floor() as usize;
            let i1 = (a.end() * kf).floor() as usize;
            if i1 - i0 + 1 >= k {
                return k;
            }
            for i in i0..=i1 {
                hit[i % k] = true;
            }
        }
        hit.iter().filter(|&&h| h).count()
    }

    /// Arcs split so every piece has length at most 1/2, lifted to
    /// `(start, end)` pairs. Keeps the torus-distance lift analysis local
    /// to a single pair in the Riesz integrals.
    fn split_halves(&self) -> Vec<(f64, f64)> {
        if self.full {
            return vec![(0.0, 0.5), (0.5, 1.0)];
        }
        let mut out = Vec::with_capacity(self.arcs.len() + 2);
        for a in &self.arcs {
            if a.length > 0.5 {
                let mid = a.start + a.length / 2.0;
                out.push((a.start, mid));
                out.push((mid, a.end()));
            } else {
                out.push((a.start, a.end()));
            }
        }
        out
    }

    /// Exact `s`-dimensional Riesz energy of the restriction of Lebesgue
    /// measure to the set: the double integral of `dist(x, y)^{-s}` over
    /// the set against itself, evaluated through the closed-form second
    /// antiderivative of the kernel.
    pub fn riesz_energy(&self, s: f64) -> Result<f64> {
        if !(0.0 < s && s < 1.0) {
            return Err(Error::InvalidExponent(s));
        }
        let pieces = self.split_halves();
        let mut total = 0.0;
        for &(a1, a2) in &pieces {
            for &(b1, b2) in &pieces {
                total += pair_energy(a1, a2, b1, b2, s);
            }
        }
        Ok(total)
    }

    /// Riesz potential at `x` of normalized Lebesgue measure on the set:
    /// `(1/measure) * Integral dist(x, y)^{-s} dy` over the set.
    pub fn riesz_potential(&self, s: f64, x: f64) -> Result<f64> {
        if !(0.0 < s && s < 1.0) {
            return Err(Error::InvalidExponent(s));
        }
        let m = self.measure();
        if m <= 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        let x = x.rem_euclid(1.0);
        let mut total = 0.0;
        for (b1, b2) in self.split_halves() {
            // Shift the arc by an integer so the kernel arguments stay in [-1, 1].
            let shift = (x - (b1 + b2) * 0.5).round();
            let (c1, c2) = (b1 + shift, b2 + shift);
            total += kernel_first_antideriv(x - c1, s) - kernel_first_antideriv(x - c2, s);
        }
        Ok(total / m)
    }
}

/// `Integral_0^t ||u||^{-s} du` for `|t| <= 1`; odd in `t`.
pub(crate) fn kernel_first_antideriv(t: f64, s: f64) -> f64 {
    let a = t.abs().min(1.0);
    let p1 = 1.0 - s;
    let v = if a <= 0.5 {
        a.powf(p1) / p1
    } else {
        (2.0 * 0.5f64.powf(p1) - (1.0 - a).powf(p1)) / p1
    };
    if t < 0.0 {
        -v
    } else {
        v
    }
}

/// Second antiderivative of `||t||^{-s}` for `|t| <= 1`; even in `t`.
pub(crate) fn kernel_second_antideriv(t: f64, s: f64) -> f64 {
    let a = t.abs().min(1.0);
    let p1 = 1.0 - s;
    let p2 = 2.0 - s;
    if a <= 0.5 {
        a.powf(p2) / (p1 * p2)
    } else {
        let h1 = 0.5f64.powf(p1);
        let h2 = 0.5f64.powf(p2);
        h2 / (p1 * p2) + 2.0 * h1 * (a - 0.5) / p1 - (h2 - (1.0 - a).powf(p2)) / (p1 * p2)
    }
}

/// Exact `Integral_{a1}^{a2} Integral_{b1}^{b2} ||x - y||^{-s} dy dx` for
/// lifted arcs of length at most 1/2 each.
fn pair_energy(a1: f64, a2: f64, b1: f64, b2: f64, s: f64) -> f64 {
    let shift = ((a1 + a2 - b1 - b2) * 0.5).round();
    let (c1, c2) = (b1 + shift, b2 + shift);
    let phi = |t: f64| kernel_second_antideriv(t, s);
    phi(a2 - c1) - phi(a1 - c1) - phi(a2 - c2) + phi(a1 - c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(raw: &[(f64, f64)]) -> ArcSet {
        ArcSet::from_raw_arcs(raw.iter().copied())
    }

    #[test]
    fn dist_basics() {
        assert_eq!(dist(0.1, 0.1), 0.0);
        assert!((dist(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ball_plain_wrap_and_full() {
        let b = ArcSet::ball(0.5, 0.1).unwrap();
        assert_eq!(b.arcs().len(), 1);
        assert!((b.arcs()[0].start() - 0.4).abs() < 1e-15);
        assert!((b.measure() - 0.2).abs() < 1e-15);

        let w = ArcSet::ball(0.95, 0.1).unwrap();
        assert!((w.measure() - 0.2).abs() < 1e-15);
        assert!(w.contains(0.9) && w.contains(0.04) && !w.contains(0.5));
        assert_eq!(w.arcs().len(), 1);
        assert!(w.arcs()[0].end() > 1.0);

        let f = ArcSet::ball(0.3, 0.6).unwrap();
        assert!(f.covers_full());
        assert!((f.measure() - 1.0).abs() < 1e-15);

        assert!(ArcSet::ball(0.3, 0.0).is_err());
        assert!(ArcSet::ball(0.3, -0.1).is_err());
    }

    #[test]
    fn union_merges_overlap() {
        let u = set(&[(0.1, 0.2)]).union(&set(&[(0.2, 0.2)]));
        assert_eq!(u.arcs().len(), 1);
        assert!((u.measure() - 0.3).abs() < 1e-15);
        assert!((u.arcs()[0].start() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn union_identity_with_empty() {
        let x = set(&[(0.2, 0.15), (0.6, 0.1)]);
        assert_eq!(x.union(&ArcSet::empty()), x);
    }

    #[test]
    fn three_large_balls_cover() {
        let mut u = ArcSet::empty();
        for c in [0.0, 1.0 / 3.0, 2.0 / 3.0] {
            u = u.union(&ArcSet::ball(c, 0.2).unwrap());
        }
        assert!(u.covers_full());
    }

    #[test]
    fn intersect_basics() {
        let x = set(&[(0.1, 0.2)]);
        assert_eq!(x.intersect(&ArcSet::full_circle()), x);
        let y = set(&[(0.2, 0.2)]);
        let i = x.intersect(&y);
        assert!((i.measure() - 0.1).abs() < 1e-12);
        assert!(i.contains(0.25));
        let z = set(&[(0.6, 0.1)]);
        assert!(x.intersect(&z).is_empty());
    }

    #[test]
    fn complement_measure() {
        let x = set(&[(0.1, 0.2), (0.5, 0.25), (0.9, 0.15)]);
        assert!((x.measure() + x.complement().measure() - 1.0).abs() < 1e-12);
        assert_eq!(ArcSet::full_circle().complement(), ArcSet::empty());
        assert_eq!(ArcSet::empty().complement(), ArcSet::full_circle());
    }

    #[test]
    fn covers_from_two_halves() {
        let u = set(&[(0.0, 0.5)]).union(&set(&[(0.5, 0.5)]));
        assert!(u.covers_full());
    }

    #[test]
    fn contains_closed_endpoints() {
        let x = set(&[(0.4, 0.2)]);
        assert!(x.contains(0.4));
        assert!(x.contains(0.6));
        assert!(!x.contains(0.61));
    }

    #[test]
    fn thicken_examples() {
        let x = set(&[(0.2, 0.15), (0.7, 0.05)]);
        assert_eq!(x.thicken(0.0), x);

        let t = set(&[(0.4, 0.2)]).thicken(0.1);
        assert!((t.measure() - 0.4).abs() < 1e-15);
        assert!(t.contains(0.31) && t.contains(0.69));
        assert!(!t.contains(0.75) && !t.contains(0.25));

        // [0, 0.1] u [0.15, 0.25] thickened by 0.03 merges across the gap
        // and wraps below 0.
        let y = set(&[(0.0, 0.1), (0.15, 0.1)]).thicken(0.03);
        assert_eq!(y.arcs().len(), 1);
        assert!((y.measure() - 0.31).abs() < 1e-12);
        assert!(y.contains(0.98) && y.contains(0.12) && y.contains(0.28));
        assert!(!y.contains(0.5));
    }

    #[test]
    fn box_count_examples() {
        assert_eq!(ArcSet::full_circle().box_count(10), 10);
        assert_eq!(ArcSet::empty().box_count(10), 0);
        assert_eq!(set(&[(0.55, 1e-9)]).box_count(10), 1);
        // Arc [0.05, 0.25] spans cells 0, 1, 2 of a 10-grid.
        assert_eq!(set(&[(0.05, 0.2)]).box_count(10), 3);
    }

    #[test]
    fn canonical_idempotent_and_wrap() {
        let raw = vec![(0.9, 0.3), (0.15, 0.1), (0.5, 0.2)];
        let a = ArcSet::from_raw_arcs(raw.clone());
        let b = ArcSet::from_raw_arcs(a.arcs().iter().map(|x| (x.start(), x.length())));
        assert_eq!(a, b);
        // Wrap arc [0.9, 1.2] merges with [0.15, 0.25].
        assert_eq!(a.arcs().len(), 2);
        assert!((a.measure() - (0.35 + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn riesz_energy_full_circle() {
        for s in [0.2, 0.5, 0.8] {
            let expect = 2f64.powf(s) / (1.0 - s);
            let got = ArcSet::full_circle().riesz_energy(s).unwrap();
            assert!(
                (got - expect).abs() < 1e-10,
                "s={s}: got {got}, expected {expect}"
            );
        }
        // s = 0.5 gives 2 sqrt(2).
        let got = ArcSet::full_circle().riesz_energy(0.5).unwrap();
        assert!((got - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn riesz_energy_empty_and_domain() {
        assert_eq!(ArcSet::empty().riesz_energy(0.5).unwrap(), 0.0);
        assert!(ArcSet::full_circle().riesz_energy(0.0).is_err());
        assert!(ArcSet::full_circle().riesz_energy(1.0).is_err());
    }

    #[test]
    fn riesz_potential_full_circle_constant() {
        let s = 0.37;
        let expect = 2f64.powf(s) / (1.0 - s);
        for x in [0.0, 0.123, 0.5, 0.999] {
            let got = ArcSet::full_circle().riesz_potential(s, x).unwrap();
            assert!((got - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_potential_symmetry_and_errors() {
        let a = set(&[(0.4, 0.2)]);
        let s = 0.5;
        for d in [0.01, 0.05, 0.3] {
            let lo = a.riesz_potential(s, 0.5 - d).unwrap();
            let hi = a.riesz_potential(s, 0.5 + d).unwrap();
            assert!((lo - hi).abs() < 1e-12);
        }
        assert!(ArcSet::empty().riesz_potential(0.5, 0.1).is_err());
    }

    #[test]
    fn riesz_potential_matches_simpson_quadrature() {
        // Independent oracle: composite Simpson on the defining integral.
        let a = set(&[(0.4, 0.2)]);
        let s = 0.5;
        let x = 0.75; // away from the arc, integrand smooth
        let n = 20000;
        let (b1, b2) = (0.4, 0.6);
        let h = (b2 - b1) / n as f64;
        let f = |y: f64| dist(x, y).powf(-s);
        let mut acc = f(b1) + f(b2);
        for i in 1..n {
            acc += f(b1 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = acc * h / 3.0 / 0.2;
        let got = a.riesz_potential(s, x).unwrap();
        assert!((got - oracle).abs() < 1e-8, "got {got}, oracle {oracle}");
    }
}
