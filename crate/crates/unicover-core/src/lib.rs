//! Uniform random covering of the unit circle.
//!
//! The library has five parts:
//!
//! * [`torus`] — exact arithmetic on finite unions of closed arcs of
//!   `T = R/Z`: union, intersection, complement, measure, thickening,
//!   box counting and closed-form Riesz integrals.
//! * [`radius`] — closed-form radius families `r_n` together with the
//!   series diagnostics and the analytic covering/measure/countability
//!   classifier.
//! * [`bounds`] — the dimension-bound formulas (weak and matrix upper
//!   bounds, the lower bound `1 - s(c, theta)`), their scalar optimizers
//!   over `theta`, the Shepp covering-probability bounds and the
//!   `K_{l,m}`, `C_l`, `Psi_{l,m}` product formulas.
//! * [`simulate`] — a seeded, reproducible Monte Carlo engine: sample
//!   paths, the sets `E_n` and `F_j`, finite approximations of the
//!   uniform covering set, and the coverage / measure / countability
//!   experiments.
//! * [`estimate`] — the greedy cover-growth constructions, box-dimension
//!   fitting, Riesz-energy experiments and the Frostman-transform
//!   inequality check.

pub mod bounds;
pub mod csvfmt;
pub mod estimate;
pub mod opt;
pub mod radius;
pub mod rng;
pub mod simulate;
pub mod torus;

pub use bounds::{BoundKind, BoundPoint, GeometricSchedule};
pub use radius::{RadiusFamily, RegimeVerdict, Ternary};
pub use simulate::SamplePath;
pub use torus::{Arc, ArcSet};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("Riesz exponent must lie in (0, 1), got {0}")]
    InvalidExponent(f64),
    #[error("the support has zero measure")]
    DegenerateMeasure,
    #[error("theta must exceed 1, got {0}")]
    InvalidTheta(f64),
    #[error("n = {n} is below the domain minimum {n_min} of the radius family")]
    BelowDomain { n: u64, n_min: u64 },
    #[error("cannot parse radius family `{spec}`: {reason}")]
    ParseFamily { spec: String, reason: String },
    #[error("sample path holds {have} points but {need} are required")]
    InsufficientSamples { have: u64, need: u64 },
    #[error("degenerate radius: 2 r_n >= 1 at n = {0}")]
    DegenerateProductRadius(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
