//! Command-line front end: theorem verification suites, the explicit
//! weighted-tail construction, and violation replay.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use greedylab::counterexample::{self, QgViolation};
use greedylab::harness::{self, CheckConfig, Status, Suite};
use greedylab::norms::{self, NormOracle};
use greedylab::{report, Error, Result};

#[derive(Parser)]
#[command(name = "greedylab", version, about = "thresholding greedy algorithm laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// Build the recursive weight layout and report the thresholding trend.
    Counterexample(CounterexampleArgs),
    /// Re-derive the stored violations of a report.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated: all|m1|m2|m3|m4|p4|s4|s5|s6
    #[arg(long, default_value = "all")]
    suite: String,
    /// Norm specs (repeatable): lp:P, weighted_tail:file=PATH, max:[..].
    /// Defaults to lp:1, lp:2, lp:inf and an internally built weighted-tail
    /// norm.
    #[arg(long)]
    norm: Vec<String>,
    /// Ambient dimension for exhaustive runs.
    #[arg(long)]
    dim: Option<u32>,
    /// Largest order in the m grid.
    #[arg(long)]
    m_max: Option<u32>,
    /// Comma-separated weakness grid, e.g. 0.25,0.5,1.
    #[arg(long)]
    tau_grid: Option<String>,
    /// Pointwise instances per check.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Number of blocks to construct.
    #[arg(long, default_value_t = 20)]
    blocks: usize,
    /// JSON report destination.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Export the first weights to CSV (one per line).
    #[arg(long)]
    weights_csv: Option<PathBuf>,
    /// Number of weights to export.
    #[arg(long, default_value_t = 200)]
    weights_len: u32,
    /// Random signed sets in the indicator check.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct ReplayArgs {
    /// A JSON report produced by `verify`.
    #[arg(long)]
    report: PathBuf,
    /// Norm specs matching the original run (defaults as in `verify`).
    #[arg(long)]
    norm: Vec<String>,
}

fn default_oracles(min_dim: u32) -> Result<Vec<NormOracle>> {
    let w = counterexample::build_weights(3)?;
    let weights = w.weights_prefix(min_dim.max(16))?;
    Ok(vec![
        norms::make_lp_norm(1.0)?,
        norms::make_lp_norm(2.0)?,
        norms::make_lp_norm(f64::INFINITY)?,
        norms::make_weighted_tail_norm(weights)?,
    ])
}

fn resolve_oracles(specs: &[String], min_dim: u32) -> Result<Vec<NormOracle>> {
    if specs.is_empty() {
        default_oracles(min_dim)
    } else {
        specs.iter().map(|s| norms::parse_norm_spec(s)).collect()
    }
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let suites = Suite::parse_list(&args.suite)?;
    let mut cfg = CheckConfig::default();
    if let Some(d) = args.dim {
        cfg.dim = d;
        cfg.dim_sampled = cfg.dim_sampled.max(d);
    }
    if let Some(mm) = args.m_max {
        cfg.m_grid = (1..=mm.max(1)).collect();
    }
    if let Some(ts) = &args.tau_grid {
        cfg.tau_grid = ts
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad tau `{t}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let oracles = resolve_oracles(&args.norm, cfg.dim_sampled)?;
    let run = harness::run_all(&cfg, &oracles, &suites);
    for r in &run.reports {
        let status = match &r.status {
            Status::Pass => "pass".to_string(),
            Status::Fail => format!("FAIL ({} violations)", r.violations_total),
            Status::Skipped { reason } => format!("skipped: {reason}"),
        };
        let extremal = r
            .cells
            .iter()
            .map(|c| c.extremal)
            .fold(f64::NEG_INFINITY, f64::max);
        eprintln!(
            "check {:<3} oracle {:<14} {:>8} ms  extremal {:<12.6} {status}",
            r.check_id,
            r.oracle,
            r.runtime_ms,
            if extremal.is_finite() { extremal } else { 0.0 },
        );
    }
    if let Some(path) = &args.out {
        std::fs::write(path, report::to_json(&run)?)?;
    } else {
        print!("{}", report::to_json(&run)?);
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report::to_csv(&run))?;
    }
    if let Some(path) = &args.plot {
        let w = counterexample::build_weights(20)?;
        let qg: Vec<QgViolation> = (3..=w.blocks())
            .map(|k| counterexample::qg_violation_ratio(2, &w, k))
            .collect::<Result<_>>()?;
        std::fs::write(path, report::to_svg(&run, Some(&qg)))?;
    }
    Ok(run.any_failed())
}

fn run_counterexample(args: CounterexampleArgs) -> Result<()> {
    let w = counterexample::build_weights(args.blocks)?;
    let blocks = w.blocks();
    let ratios: Vec<QgViolation> = (2..blocks)
        .map(|k| counterexample::qg_violation_ratio(k, &w, blocks))
        .collect::<Result<_>>()?;
    let uniform = counterexample::uniform_a_check(3, &w, args.trials, args.seed);
    let payload = serde_json::json!({
        "blocks": blocks,
        "overflowed": w.overflowed,
        "counts": w.counts,
        "slot_values": w.slot_values,
        "ratios": ratios,
        "uniform_indicator_max_ratio": uniform.max_ratio,
        "uniform_indicator_cases": uniform.exhaustive_cases + uniform.random_cases,
    });
    let text = format!("{}\n", serde_json::to_string_pretty(&payload)?);
    match &args.report {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.weights_csv {
        let weights = w.weights_prefix(args.weights_len)?;
        norms::write_weights_csv(path, &weights)?;
        eprintln!("wrote {} weights to {}", args.weights_len, path.display());
    }
    eprintln!(
        "constructed {blocks} blocks; indicator max ratio {:.6}",
        uniform.max_ratio
    );
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&args.report)?;
    let run: harness::RunReport = serde_json::from_str(&text)?;
    let oracles = resolve_oracles(&args.norm, run.config.dim_sampled)?;
    let mut mismatched = false;
    for r in &run.reports {
        let Some(oracle) = oracles.iter().find(|o| o.spec_string() == r.oracle) else {
            eprintln!("no oracle named `{}`; pass --norm to supply it", r.oracle);
            continue;
        };
        for (i, v) in r.violations.iter().enumerate() {
            match harness::replay_violation(r, v, oracle, &run.config) {
                Ok((lhs, rhs)) => {
                    let ok = lhs == v.lhs && rhs == v.rhs;
                    mismatched |= !ok;
                    println!(
                        "{} [{}] #{i}: lhs {} rhs {} -> {}",
                        r.check_id,
                        v.part,
                        lhs,
                        rhs,
                        if ok { "reproduced" } else { "MISMATCH" }
                    );
                }
                Err(e) => println!("{} [{}] #{i}: {e}", r.check_id, v.part),
            }
        }
    }
    Ok(mismatched)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => verify(args).map(|failed| failed as u8),
        Command::Counterexample(args) => run_counterexample(args).map(|_| 0),
        Command::Replay(args) => replay(args).map(|failed| failed as u8),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
