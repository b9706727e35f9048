//! `unicover`: deterministic experiments for random coverings of the
//! circle.
//!
//! All artifacts are byte-stable for a fixed resolved configuration:
//! fixed-precision decimal formatting, ordered rows, and per-trial seeded
//! streams whose aggregation is independent of `--threads`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use unicover_core::bounds::{self, optimize_lower, optimize_upper_matrix, optimize_upper_weak};
use unicover_core::csvfmt::fmt_f64 as ff;
use unicover_core::estimate::{
    cover_growth_experiment, frostman_suite, riesz_experiment, write_traces_csv, CoverVariant,
};
use unicover_core::radius::RadiusFamily;
use unicover_core::rng::DEFAULT_MASTER_SEED;
use unicover_core::simulate::{
    countability_experiment, coverage_experiment, measure_experiment, wilson_interval,
};

#[derive(Parser, Debug)]
#[command(name = "unicover", version, about = "Random covering experiments on the circle")]
struct Cli {
    /// Flat key-value JSON config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    /// Master seed for all per-trial random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Bound on simulator parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the artifact here (plus a `<out>.meta.json` sidecar) instead
    /// of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record a wall-clock timestamp in meta.json.
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate or optimize the dimension bounds.
    Bounds(BoundsArgs),
    /// Classify a radius family and report series diagnostics.
    Conditions(ConditionsArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Greedy cover-growth traces.
    CoverGrowth(CoverGrowthArgs),
    /// Riesz-energy experiment for block measures.
    Riesz(RieszArgs),
    /// Frostman-transform inequality check on random supports.
    Frostman(FrostmanArgs),
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Single c value (JSON output).
    #[arg(long)]
    c: Option<f64>,
    /// Grid `start:end:step` of c values (CSV output).
    #[arg(long)]
    c_grid: Option<String>,
    /// lower | upper-weak | upper-matrix | all
    #[arg(long)]
    kind: Option<String>,
    /// Fix theta instead of optimizing over it.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Debug)]
struct ConditionsArgs {
    /// Radius family, e.g. `logn:c=3`, `pow:c=1,alpha=2.5`.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Subcommand, Debug)]
enum SimulateCmd {
    /// Frequency of non-covering vs the Shepp bounds.
    Coverage(CoverageArgs),
    /// Mean block measure mu_{l,m}(T) vs K_{l,m}.
    Measure(MeasureArgs),
    /// Collapse of the uniform-set approximation in the countable regime.
    Countable(CountableArgs),
}

#[derive(Args, Debug)]
struct CoverageArgs {
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct CountableArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    /// Comma-separated checkpoints (default geometric, factor 2, up to N).
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long = "n")]
    n_max: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct CoverGrowthArgs {
    /// simple | refined
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct RieszArgs {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct FrostmanArgs {
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    supports: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    arcs_per_support: Option<usize>,
}

/// Flat key-value config file mirroring the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    c: Option<f64>,
    c_grid: Option<String>,
    kind: Option<String>,
    theta: Option<f64>,
    l: Option<u32>,
    m: Option<u32>,
    p: Option<u64>,
    n: Option<String>,
    n_max: Option<u64>,
    checkpoints: Option<String>,
    variant: Option<String>,
    levels: Option<u32>,
    s: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
    supports: Option<usize>,
    probes: Option<usize>,
    arcs_per_support: Option<usize>,
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }
}

impl From<unicover_core::Error> for CliError {
    fn from(e: unicover_core::Error) -> Self {
        CliError::new("core", e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::new("config", format!("{path:?}: {e}")))?
        }
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(DEFAULT_MASTER_SEED);
    if let Some(t) = cli.threads.or(file.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::new("config", e.to_string()))?;
    }

    let (resolved, artifact) = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, &file)?,
        Command::Conditions(a) => cmd_conditions(a, &file)?,
        Command::Simulate(SimulateCmd::Coverage(a)) => cmd_coverage(a, &file, seed)?,
        Command::Simulate(SimulateCmd::Measure(a)) => cmd_measure(a, &file, seed)?,
        Command::Simulate(SimulateCmd::Countable(a)) => cmd_countable(a, &file, seed)?,
        Command::CoverGrowth(a) => cmd_cover_growth(a, &file, seed)?,
        Command::Riesz(a) => cmd_riesz(a, &file, seed)?,
        Command::Frostman(a) => cmd_frostman(a, &file, seed)?,
    };

    if cli.dump_config {
        let mut cfg = resolved;
        cfg["seed"] = json!(seed);
        println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
        return Ok(());
    }

    match &cli.out {
        Some(path) => {
            std::fs::write(path, artifact.bytes)?;
            write_meta(path, &cli, &resolved, seed)?;
        }
        None => {
            std::io::stdout().write_all(&artifact.bytes)?;
        }
    }
    Ok(())
}

struct Artifact {
    bytes: Vec<u8>,
}

fn write_meta(out: &Path, cli: &Cli, resolved: &Value, seed: u64) -> CliResult<()> {
    let mut meta = json!({
        "command": std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        "config": resolved,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if cli.timestamps {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta["generated_at_unix"] = json!(now);
    }
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.json");
    std::fs::write(meta_path, serde_json::to_string_pretty(&meta).unwrap())?;
    Ok(())
}

fn parse_family(spec: &str) -> CliResult<RadiusFamily> {
    spec.parse::<RadiusFamily>().map_err(CliError::from)
}

fn require<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::new("usage", format!("missing required option --{flag}")))
}

fn parse_u64_list(text: &str, flag: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| CliError::new("usage", format!("--{flag}: {p:?}: {e}")))
        })
        .collect()
}

fn cmd_bounds(a: &BoundsArgs, file: &FileConfig) -> CliResult<(Value, Artifact)> {
    let kind = a.kind.clone().or(file.kind.clone()).unwrap_or_else(|| "all".into());
    let theta = a.theta.or(file.theta);
    let c_grid = a.c_grid.clone().or(file.c_grid.clone());
    let c = a.c.or(file.c);

    if let Some(grid) = c_grid {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::new("usage", "--c-grid expects start:end:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|e| CliError::new("usage", format!("--c-grid: {p:?}: {e}")))
            })
            .collect::<CliResult<_>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if !(start > 0.0 && step > 0.0 && end >= start) {
            return Err(CliError::new("usage", "--c-grid needs 0 < start <= end, step > 0"));
        }
        let mut cs = Vec::new();
        let mut i = 0u64;
        loop {
            let v = start + step * i as f64;
            if v > end + step * 1e-9 {
                break;
            }
            cs.push(v);
            i += 1;
        }
        let rows = bounds::bound_curve(&cs);
        let mut buf = Vec::new();
        bounds::write_bound_curve_csv(&rows, &mut buf)?;
        let resolved = json!({ "subcommand": "bounds", "c_grid": grid, "kind": "all" });
        return Ok((resolved, Artifact { bytes: buf }));
    }

    let c = require(c, "c")?;
    if !(c > 0.0) {
        return Err(CliError::new("usage", format!("--c must be positive, got {c}")));
    }
    let point = |k: &str| -> CliResult<Value> {
        let bp = match (k, theta) {
            ("lower", Some(t)) => bounds::lower_bound(c, t),
            ("lower", None) => optimize_lower(c),
            ("upper-weak", Some(t)) => bounds::upper_bound_weak(c, t)?,
            ("upper-weak", None) => optimize_upper_weak(c),
            ("upper-matrix", Some(t)) => bounds::upper_bound_matrix(c, t)?,
            ("upper-matrix", None) => optimize_upper_matrix(c),
            (other, _) => {
                return Err(CliError::new("usage", format!("unknown bound kind {other:?}")))
            }
        };
        Ok(json!({
            "value": bp.value,
            "theta": if bp.theta.is_nan() { Value::Null } else { json!(bp.theta) },
            "valid": bp.valid,
            "clamped": bp.clamped,
        }))
    };
    let mut record = json!({ "c": c });
    if kind == "all" {
        for k in ["lower", "upper-weak", "upper-matrix"] {
            record[k] = point(k)?;
        }
    } else {
        record[kind.as_str()] = point(&kind)?;
    }
    let mut bytes = serde_json::to_string_pretty(&record).unwrap().into_bytes();
    bytes.push(b'\n');
    let resolved = json!({ "subcommand": "bounds", "c": c, "kind": kind, "theta": theta });
    Ok((resolved, Artifact { bytes }))
}

fn cmd_conditions(a: &ConditionsArgs, file: &FileConfig) -> CliResult<(Value, Artifact)> {
    let spec = require(a.family.clone().or(file.family.clone()), "family")?;
    let fam = parse_family(&spec)?;
    let verdict = fam.classify();
    let mut partials = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let (g1, g2) = fam.galambos_partial(n);
        partials.push(json!({
            "n": n,
            "thm1_sum": fam.thm1_sum_partial(n),
            "shepp_series": fam.shepp_series_partial(n),
            "galambos_sum_r": g1,
            "galambos_sum_r_exp": g2,
            "thm3_sum": fam.thm3_sum_partial(n),
        }));
    }
    let record = json!({
        "family": spec,
        "verdict": verdict,
        "partial_sums": partials,
    });
    let mut bytes = serde_json::to_string_pretty(&record).unwrap().into_bytes();
    bytes.push(b'\n');
    let resolved = json!({ "subcommand": "conditions", "family": spec });
    Ok((resolved, Artifact { bytes }))
}

fn cmd_coverage(a: &CoverageArgs, file: &FileConfig, seed: u64) -> CliResult<(Value, Artifact)> {
    let spec = require(a.family.clone().or(file.family.clone()), "family")?;
    let fam = parse_family(&spec)?;
    let ns = parse_u64_list(&require(a.n.clone().or(file.n.clone()), "n")?, "n")?;
    let trials = a.trials.or(file.trials).unwrap_or(200);
    let mut buf = Vec::new();
    writeln!(
        buf,
        "n,trials,not_covered,freq_not_covered,wilson_lo,wilson_hi,shepp_lower,shepp_upper"
    )?;
    for &n in &ns {
        let res = coverage_experiment(&fam, n, trials, seed)?;
        let not_covered = res.trials - res.covered;
        let (lo, hi) = wilson_interval(not_covered, res.trials);
        let r = fam.r(n)?;
        writeln!(
            buf,
            "{},{},{},{},{},{},{},{}",
            n,
            trials,
            not_covered,
            ff(not_covered as f64 / trials as f64),
            ff(lo),
            ff(hi),
            ff(bounds::shepp_lower(n, r)),
            ff(bounds::shepp_upper(n, r)),
        )?;
    }
    let resolved = json!({
        "subcommand": "simulate coverage", "family": spec, "n": ns, "trials": trials,
    });
    Ok((resolved, Artifact { bytes: buf }))
}

fn cmd_measure(a: &MeasureArgs, file: &FileConfig, seed: u64) -> CliResult<(Value, Artifact)> {
    let spec = require(a.family.clone().or(file.family.clone()), "family")?;
    let fam = parse_family(&spec)?;
    let theta = require(a.theta.or(file.theta), "theta")?;
    let l = a.l.or(file.l).unwrap_or(3);
    let m = a.m.or(file.m).unwrap_or(l + 6);
    let trials = a.trials.or(file.trials).unwrap_or(2000);
    let res = measure_experiment(&fam, theta, l, m, trials, seed)?;
    let mut buf = Vec::new();
    writeln!(buf, "l,m,trials,mean,std_err,expected_k_lm")?;
    writeln!(
        buf,
        "{},{},{},{},{},{}",
        res.l,
        res.m,
        res.trials,
        ff(res.mean),
        ff(res.std_err),
        ff(res.expected),
    )?;
    let resolved = json!({
        "subcommand": "simulate measure", "family": spec, "theta": theta,
        "l": l, "m": m, "trials": trials,
    });
    Ok((resolved, Artifact { bytes: buf }))
}

fn cmd_countable(a: &CountableArgs, file: &FileConfig, seed: u64) -> CliResult<(Value, Artifact)> {
    let spec = require(a.family.clone().or(file.family.clone()), "family")?;
    let fam = parse_family(&spec)?;
    let p = a.p.or(file.p).unwrap_or(20);
    let trials = a.trials.or(file.trials).unwrap_or(200);
    let checkpoints = match a.checkpoints.clone().or(file.checkpoints.clone()) {
        Some(text) => parse_u64_list(&text, "checkpoints")?,
        None => {
            // geometric checkpoints, factor 2, from p up to n_max
            let n_max = a.n_max.or(file.n_max).unwrap_or(10_000);
            let mut cps = Vec::new();
            let mut v = p.max(1);
            while v < n_max {
                cps.push(v);
                v *= 2;
            }
            cps.push(n_max);
            cps
        }
    };
    let rows = countability_experiment(&fam, p, &checkpoints, trials, seed)?;
    let mut buf = Vec::new();
    writeln!(buf, "n,mean_measure,mean_arcs,frac_exact_p,frac_ok")?;
    for row in &rows {
        writeln!(
            buf,
            "{},{},{},{},{}",
            row.n,
            ff(row.mean_measure),
            ff(row.mean_arcs),
            ff(row.frac_exact_p),
            ff(row.frac_ok),
        )?;
    }
    let resolved = json!({
        "subcommand": "simulate countable", "family": spec, "p": p,
        "checkpoints": checkpoints, "trials": trials,
    });
    Ok((resolved, Artifact { bytes: buf }))
}

fn cmd_cover_growth(
    a: &CoverGrowthArgs,
    file: &FileConfig,
    seed: u64,
) -> CliResult<(Value, Artifact)> {
    let variant_name = a.variant.clone().or(file.variant.clone()).unwrap_or_else(|| "refined".into());
    let variant: CoverVariant = variant_name.parse()?;
    let c = require(a.c.or(file.c), "c")?;
    let theta = require(a.theta.or(file.theta), "theta")?;
    let l = a.l.or(file.l).unwrap_or(1);
    let levels = a.levels.or(file.levels).unwrap_or(10);
    let trials = a.trials.or(file.trials).unwrap_or(500);
    let traces = cover_growth_experiment(variant, c, theta, l, l + levels, trials, seed)?;
    let mut buf = Vec::new();
    write_traces_csv(&traces, &mut buf)?;
    let mean_exponent =
        traces.iter().map(|t| t.fitted_exponent()).sum::<f64>() / traces.len().max(1) as f64;
    let all_covered = traces.iter().all(|t| t.all_levels_covered());
    let resolved = json!({
        "subcommand": "cover-growth", "variant": variant_name, "c": c, "theta": theta,
        "l": l, "levels": levels, "trials": trials,
        "summary": { "mean_fitted_exponent": mean_exponent, "all_levels_covered": all_covered },
    });
    Ok((resolved, Artifact { bytes: buf }))
}

fn cmd_riesz(a: &RieszArgs, file: &FileConfig, seed: u64) -> CliResult<(Value, Artifact)> {
    let c = a.c.or(file.c).unwrap_or(1.0);
    let theta = a.theta.or(file.theta).unwrap_or(8.6);
    let l = a.l.or(file.l).unwrap_or(2);
    let m = a.m.or(file.m).unwrap_or(l + 2);
    let s = a.s.or(file.s).unwrap_or(0.1);
    let trials = a.trials.or(file.trials).unwrap_or(200);
    let fam = RadiusFamily::PowerLaw { c, alpha: 1.0 };
    let report = riesz_experiment(&fam, theta, l, m, s, trials, seed)?;
    let mut bytes = serde_json::to_string_pretty(&report).unwrap().into_bytes();
    bytes.push(b'\n');
    let resolved = json!({
        "subcommand": "riesz", "c": c, "theta": theta, "l": l, "m": m, "s": s, "trials": trials,
    });
    Ok((resolved, Artifact { bytes }))
}

fn cmd_frostman(a: &FrostmanArgs, file: &FileConfig, seed: u64) -> CliResult<(Value, Artifact)> {
    let s = a.s.or(file.s).unwrap_or(0.4);
    let supports = a.supports.or(file.supports).unwrap_or(100);
    let probes = a.probes.or(file.probes).unwrap_or(100);
    let arcs = a.arcs_per_support.or(file.arcs_per_support).unwrap_or(20);
    let reports = frostman_suite(s, supports, probes, arcs, seed)?;
    let mut buf = Vec::new();
    writeln!(buf, "support,probes,violations,max_excess,theta_total,jensen_lower,ok")?;
    for (i, rep) in reports.iter().enumerate() {
        writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            i,
            rep.probes,
            rep.violations,
            ff(rep.max_excess),
            ff(rep.theta_total),
            ff(rep.jensen_lower),
            rep.ok as u8,
        )?;
    }
    let resolved = json!({
        "subcommand": "frostman", "s": s, "supports": supports,
        "probes": probes, "arcs_per_support": arcs,
    });
    Ok((resolved, Artifact { bytes: buf }))
}
