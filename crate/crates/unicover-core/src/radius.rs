//! Closed-form radius families `r_n` and their analytic classification.
//!
//! Each family evaluates exactly, carries a domain minimum `n_min` keeping
//! iterated logarithms positive, and exposes the partial-sum diagnostics
//! behind the covering / full-measure / countability criteria. The verdicts
//! themselves come from the analytic parameter rules; the numeric partial
//! sums are attached as evidence only, since convergence is not decidable
//! from finite sums.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// A closed-form radius sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadiusFamily {
    /// `r_n = c / n^alpha`
    PowerLaw { c: f64, alpha: f64 },
    /// `r_n = c log n / n`
    LogOverN { c: f64 },
    /// `r_n = (2 log n + gamma log log n) / n`
    LogPlusLogLog { gamma: f64 },
    /// `r_n = c log log n / (2n)`
    LogLogHalf { c: f64 },
    /// `r_n = (log log n + gamma log log log n) / (2n)`
    LogLogPlus { gamma: f64 },
}

/// Three-valued verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

/// Numerically checked monotonicity of `r_n` and `n r_n` (from
/// `max(n_min, 16)` up to 10^6).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Monotonicity {
    pub r_decreasing: bool,
    pub nr_decreasing: bool,
}

/// One partial-sum diagnostic attached to a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesDiagnostic {
    pub name: String,
    pub n: u64,
    pub value: f64,
}

/// Classification of a family against the covering, full-measure and
/// countability criteria.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeVerdict {
    pub covers_t: Ternary,
    pub full_measure: Ternary,
    /// Only `Yes` or `Unknown`: countability is a one-sided criterion.
    pub countable: Ternary,
    pub monotonicity_ok: Monotonicity,
    pub notes: String,
    pub diagnostics: Vec<SeriesDiagnostic>,
}

impl RadiusFamily {
    /// Smallest `n` for which the closed form is defined and positive.
    pub fn n_min(&self) -> u64 {
        match self {
            RadiusFamily::PowerLaw { .. } => 1,
            RadiusFamily::LogOverN { .. } => 2,
            RadiusFamily::LogPlusLogLog { .. } | RadiusFamily::LogLogHalf { .. } => 3,
            RadiusFamily::LogLogPlus { .. } => 16,
        }
    }

    /// Exact evaluation of `r_n`.
    pub fn r(&self, n: u64) -> Result<f64> {
        let n_min = self.n_min();
        if n < n_min {
            return Err(Error::BelowDomain { n, n_min });
        }
        let nf = n as f64;
        Ok(match *self {
            RadiusFamily::PowerLaw { c, alpha } => c / nf.powf(alpha),
            RadiusFamily::LogOverN { c } => c * nf.ln() / nf,
            RadiusFamily::LogPlusLogLog { gamma } => {
                (2.0 * nf.ln() + gamma * nf.ln().ln()) / nf
            }
            RadiusFamily::LogLogHalf { c } => c * nf.ln().ln() / (2.0 * nf),
            RadiusFamily::LogLogPlus { gamma } => {
                (nf.ln().ln() + gamma * nf.ln().ln().ln()) / (2.0 * nf)
            }
        })
    }

    /// `sum_{n_min <= n <= N} n (1 - r_n)^n`, the covering-criterion series.
    ///
    /// `(1 - r)^n` is evaluated as `exp(n log1p(-r))` for stability.
    pub fn thm1_sum_partial(&self, n_max: u64) -> f64 {
        let mut acc = 0.0;
        for n in self.n_min()..=n_max {
            acc += thm1_term(n, self.r(n).unwrap());
        }
        acc
    }

    /// `min` of `n (1 - r_n)^n` over the window `[N/2, N]`, a numeric
    /// proxy for the liminf.
    pub fn liminf_indicator(&self, n_max: u64) -> f64 {
        let lo = (n_max / 2).max(self.n_min());
        let mut best = f64::INFINITY;
        for n in lo..=n_max {
            best = best.min(thm1_term(n, self.r(n).unwrap()));
        }
        best
    }

    /// Shepp's criterion: partial sums of `n^{-2} exp(r_1 + ... + r_n)`.
    pub fn shepp_series_partial(&self, n_max: u64) -> f64 {
        let mut prefix = 0.0;
        let mut acc = 0.0;
        for n in self.n_min()..=n_max {
            prefix += self.r(n).unwrap();
            let nf = n as f64;
            acc += (prefix - 2.0 * nf.ln()).exp();
        }
        acc
    }

    /// The two Galambos partial sums: `(sum r_n, sum r_n e^{-2 n r_n})`.
    pub fn galambos_partial(&self, n_max: u64) -> (f64, f64) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for n in self.n_min()..=n_max {
            let r = self.r(n).unwrap();
            s1 += r;
            s2 += r * (-2.0 * n as f64 * r).exp();
        }
        (s1, s2)
    }

    /// Countability-criterion partial sum `sum n r_n`.
    pub fn thm3_sum_partial(&self, n_max: u64) -> f64 {
        let mut acc = 0.0;
        for n in self.n_min()..=n_max {
            acc += n as f64 * self.r(n).unwrap();
        }
        acc
    }

    fn monotonicity(&self) -> Monotonicity {
        let start = self.n_min().max(16);
        let end = 1_000_000u64;
        let mut r_dec = true;
        let mut nr_dec = true;
        let mut prev_r = self.r(start).unwrap();
        let mut prev_nr = start as f64 * prev_r;
        for n in start + 1..=end {
            let r = self.r(n).unwrap();
            let nr = n as f64 * r;
            // relative slack absorbs rounding in r(n) for constant n r_n
            if r > prev_r * (1.0 + 1e-12) {
                r_dec = false;
            }
            if nr > prev_nr * (1.0 + 1e-12) {
                nr_dec = false;
            }
            if !r_dec && !nr_dec {
                break;
            }
            prev_r = r;
            prev_nr = nr;
        }
        Monotonicity { r_decreasing: r_dec, nr_decreasing: nr_dec }
    }

    /// Analytic classification with numeric diagnostics attached.
    ///
    /// The verdicts come from the parameter rules alone; the partial sums
    /// are evidence, never an override.
    pub fn classify(&self) -> RegimeVerdict {
        self.classify_with_diag_n(100_000)
    }

    /// Like [`classify`](Self::classify) with a configurable diagnostic
    /// partial-sum cutoff.
    pub fn classify_with_diag_n(&self, diag_n: u64) -> RegimeVerdict {
        use Ternary::*;
        let (covers_t, full_measure, countable, notes) = match *self {
            RadiusFamily::LogOverN { c } => {
                if c > 2.0 {
                    (Yes, Yes, Unknown, "covering series summable for c > 2".to_string())
                } else if c < 1.0 {
                    (No, Unknown, Unknown, "liminf n(1-r_n)^n = infinity for c < 1; not the whole circle almost surely".to_string())
                } else {
                    (
                        Unknown,
                        Unknown,
                        Unknown,
                        "1 <= c <= 2 is open; at c = 1 the non-covering probability is at least 1/3".to_string(),
                    )
                }
            }
            RadiusFamily::LogPlusLogLog { gamma } => {
                if gamma > 1.0 {
                    (Yes, Yes, Unknown, "covering series summable for gamma > 1".to_string())
                } else {
                    (Unknown, Unknown, Unknown, "gamma <= 1 undecided".to_string())
                }
            }
            RadiusFamily::LogLogHalf { c } => {
                if c > 1.0 {
                    (Unknown, Yes, Unknown, "full Lebesgue measure iff c > 1".to_string())
                } else {
                    (No, No, Unknown, "zero Lebesgue measure for c <= 1, hence not the whole circle".to_string())
                }
            }
            RadiusFamily::LogLogPlus { gamma } => {
                if gamma > 1.0 {
                    (Unknown, Yes, Unknown, "full-measure criterion holds for gamma > 1".to_string())
                } else {
                    (No, No, Unknown, "full-measure criterion fails for gamma <= 1".to_string())
                }
            }
            RadiusFamily::PowerLaw { c, alpha } => {
                if alpha < 1.0 {
                    (Yes, Yes, Unknown, "n(1-r_n)^n decays stretched-exponentially for alpha < 1".to_string())
                } else if alpha == 1.0 {
                    (
                        No,
                        No,
                        Unknown,
                        format!(
                            "liminf n(1-r_n)^n = e^(-{c}) > 0 (non-covering with positive probability); \
                             sum r_n e^(-2 n r_n) diverges, so not of full measure; \
                             this is the dimension-bound regime"
                        ),
                    )
                } else if alpha <= 2.0 {
                    (No, No, Unknown, "sum r_n < infinity: zero measure; dimension 0 almost surely".to_string())
                } else {
                    (No, No, Yes, "sum n r_n < infinity: the set is exactly the sample points".to_string())
                }
            }
        };

        let mut diagnostics = Vec::new();
        let mut push = |name: &str, n: u64, value: f64| {
            diagnostics.push(SeriesDiagnostic { name: name.to_string(), n, value });
        };
        push("thm1_sum_partial", diag_n, self.thm1_sum_partial(diag_n));
        push("liminf_indicator", diag_n, self.liminf_indicator(diag_n));
        push("shepp_series_partial", diag_n, self.shepp_series_partial(diag_n));
        let (g1, g2) = self.galambos_partial(diag_n);
        push("galambos_sum_r", diag_n, g1);
        push("galambos_sum_r_exp", diag_n, g2);
        push("thm3_sum_partial", diag_n, self.thm3_sum_partial(diag_n));

        let verdict = RegimeVerdict {
            covers_t,
            full_measure,
            countable,
            monotonicity_ok: self.monotonicity(),
            notes,
            diagnostics,
        };
        debug_assert!(verdict.consistent());
        verdict
    }
}

impl RegimeVerdict {
    /// Mutual-consistency invariant: covering implies full measure, and a
    /// full-measure set is never countable.
    pub fn consistent(&self) -> bool {
        use Ternary::*;
        if self.covers_t == Yes && self.full_measure != Yes {
            return false;
        }
        if self.full_measure == Yes && self.countable == Yes {
            return false;
        }
        true
    }
}

/// `n (1 - r)^n`, computed in the log domain.
fn thm1_term(n: u64, r: f64) -> f64 {
    let nf = n as f64;
    if r >= 1.0 {
        return 0.0;
    }
    (nf.ln() + nf * (-r).ln_1p()).exp()
}

impl fmt::Display for RadiusFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RadiusFamily::PowerLaw { c, alpha } => write!(f, "pow:c={c},alpha={alpha}"),
            RadiusFamily::LogOverN { c } => write!(f, "logn:c={c}"),
            RadiusFamily::LogPlusLogLog { gamma } => write!(f, "logplus:gamma={gamma}"),
            RadiusFamily::LogLogHalf { c } => write!(f, "loglog:c={c}"),
            RadiusFamily::LogLogPlus { gamma } => write!(f, "loglogplus:gamma={gamma}"),
        }
    }
}

impl FromStr for RadiusFamily {
    type Err = Error;

    /// Parses the compact CLI syntax, e.g. `logn:c=3`, `pow:c=1,alpha=2.5`,
    /// `loglog:c=2`.
    fn from_str(spec: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParseFamily {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = spec.split_once(':').ok_or_else(|| err("expected `kind:params`"))?;
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| err("expected `key=value`"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(&format!("bad number for `{k}`")))?;
            params.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| params.get(k).copied().ok_or_else(|| err(&format!("missing `{k}`")));
        let fam = match kind.trim() {
            "pow" => RadiusFamily::PowerLaw { c: get("c")?, alpha: get("alpha")? },
            "logn" => RadiusFamily::LogOverN { c: get("c")? },
            "logplus" => RadiusFamily::LogPlusLogLog { gamma: get("gamma")? },
            "loglog" => RadiusFamily::LogLogHalf { c: get("c")? },
            "loglogplus" => RadiusFamily::LogLogPlus { gamma: get("gamma")? },
            other => return Err(err(&format!("unknown kind `{other}`"))),
        };
        let positive = match fam {
            RadiusFamily::PowerLaw { c, alpha } => c > 0.0 && alpha > 0.0,
            RadiusFamily::LogOverN { c } | RadiusFamily::LogLogHalf { c } => c > 0.0,
            RadiusFamily::LogPlusLogLog { gamma } | RadiusFamily::LogLogPlus { gamma } => {
                gamma > 0.0
            }
        };
        if !positive {
            return Err(err("parameters must be positive"));
        }
        Ok(fam)
    }
}
