//! Scalar minimization over a log-spaced grid with golden-section refinement.
//!
//! The bound formulas are smooth and unimodal-in-practice over `theta`; a
//! coarse 512-point log grid locates the basin and golden-section search
//! refines to a relative width of 1e-8. Infeasible points may return
//! `f64::INFINITY` and are skipped when picking the starting basin.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` over `[lo, hi]` (both `> 0`), returning `(argmin, min)`.
///
/// `None` when `f` is infinite on the whole grid.
pub fn minimize_log_grid_golden<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    rel_tol: f64,
) -> Option<(f64, f64)> {
    assert!(lo > 0.0 && hi > lo && grid >= 3);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..grid)
        .map(|i| (llo + (lhi - llo) * i as f64 / (grid - 1) as f64).exp())
        .collect();
    let mut best = None::<(usize, f64)>;
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v.is_finite() && best.map_or(true, |(_, bv)| v < bv) {
            best = Some((i, v));
        }
    }
    let (bi, _) = best?;
    let mut a = xs[bi.saturating_sub(1)];
    let mut b = xs[(bi + 1).min(grid - 1)];

    let mut x1 = b - (b - a) * INV_PHI;
    let mut x2 = a + (b - a) * INV_PHI;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) / (0.5 * (a + b)) > rel_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * INV_PHI;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * INV_PHI;
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    // The refined point can only be as good as what we saw; keep the best.
    let mut out = (xm, fm);
    for (x, v) in [(x1, f1), (x2, f2), (xs[bi], f(xs[bi]))] {
        if v < out.1 {
            out = (x, v);
        }
    }
    Some(out)
}
