//! Command-line front end: seeded simulation batches, the exact solver
//! table, bound evaluation, and transcript replay/audit.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pbgame_core::builder::BuilderKind;
use pbgame_core::harness::{
    bounds_report, simulate_batch, ExperimentSpec, Retention,
};
use pbgame_core::painter::PainterKind;
use pbgame_core::solver::{k_min_exact, solve_table, SolverLimits};
use pbgame_core::transcript::{read_file, replay_verify, CheckSet};

#[derive(Parser)]
#[command(
    name = "pbgame",
    about = "Painter-Builder proper colouring game: simulate, solve, audit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded strategy match-ups over a configuration grid.
    Simulate(SimulateArgs),
    /// Exact optimal-play winners and minimal palette sizes for tiny boards.
    Solve(SolveArgs),
    /// Evaluate the closed-form bounds for a board.
    Bounds(BoundsArgs),
    /// Replay one transcript and audit it.
    Replay(ReplayArgs),
    /// Audit every transcript in a directory.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Spec file (JSON, same shape as the flag set); flags override nothing
    /// when present.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Board sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    n: Vec<u32>,
    /// Palette sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    k: Vec<u32>,
    /// Painter bias (vertices per turn).
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Builder bias (edges per turn).
    #[arg(long, default_value_t = 1)]
    b: u32,
    /// Painter agents: random-greedy, biased-weighted, two-for-one, first-fit.
    #[arg(long, value_delimiter = ',', default_value = "random-greedy")]
    painter: Vec<PainterKind>,
    /// Builder agents: random, logarithmic, clique.
    #[arg(long, value_delimiter = ',', default_value = "random")]
    builder: Vec<BuilderKind>,
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for retained transcripts and the summary files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which transcripts to keep: none, failures, all.
    #[arg(long, default_value = "none")]
    retain: String,
    /// Audit every transcript during the run.
    #[arg(long, default_value_t = false)]
    audit: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 5)]
    max_n: u32,
    #[arg(long, default_value_t = 4)]
    max_k: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    b: u32,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    b: u64,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    file: PathBuf,
    /// `all` or a comma list of proper,bipartite,room,escalation,clique,digest.
    #[arg(long, default_value = "all")]
    checks: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long, default_value = "all")]
    checks: String,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Solve(args) => solve(args),
        Command::Bounds(args) => bounds(args),
        Command::Replay(args) => replay(args),
        Command::Verify(args) => verify(args),
    }
}

fn out_dir_override(cli_choice: Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os("PBGAME_OUT_DIR")
        .map(PathBuf::from)
        .or(cli_choice)
}

fn install_worker_pool() -> Result<()> {
    if let Some(workers) = std::env::var_os("PBGAME_WORKERS") {
        let workers: usize = workers
            .to_string_lossy()
            .parse()
            .context("PBGAME_WORKERS must be a number")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("failed to size the worker pool")?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    install_worker_pool()?;
    let mut spec: ExperimentSpec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing spec {}", path.display()))?
        }
        None => ExperimentSpec {
            ns: args.n.clone(),
            ks: args.k.clone(),
            p: args.p,
            b: args.b,
            painters: args.painter.clone(),
            builders: args.builder.clone(),
            trials: args.trials,
            master_seed: args.seed,
            retention: match args.retain.as_str() {
                "none" => Retention::None,
                "failures" => Retention::Failures,
                "all" => Retention::All,
                other => bail!("unknown retention '{other}'"),
            },
            audit: args.audit,
            out_dir: None,
            constants: None,
        },
    };
    spec.out_dir = out_dir_override(args.out.or(spec.out_dir.take()));

    let summary = simulate_batch(&spec)?;
    print!("{}", summary.table());
    if let Some(dir) = &spec.out_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&summary)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("summary written to {}", path.display());
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let limits = SolverLimits::default();
    let rows = solve_table(args.max_n, args.max_k, args.p, args.b, &limits)?;
    println!("n\tk\tp\tb\twinner");
    for row in &rows {
        println!(
            "{}\t{}\t{}\t{}\t{:?}",
            row.n, row.k, row.p, row.b, row.winner
        );
    }
    println!();
    println!("n\tk_min");
    for n in 2..=args.max_n {
        let k_min = k_min_exact(n, args.p, args.b, &limits)?;
        println!("{n}\t{k_min}");
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    if args.n < 2 || args.b < 1 {
        bail!("bounds need n >= 2 and b >= 1");
    }
    for line in bounds_report(args.n, args.b).lines() {
        println!("{line}");
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<()> {
    let checks = CheckSet::parse(&args.checks).map_err(|e| anyhow::anyhow!(e))?;
    let records = read_file(&args.file)?;
    let report = replay_verify(&records, &checks)?;
    for line in report.lines() {
        println!("{line}");
    }
    if report.ok() {
        println!("audit passed: {} records, {} marks", report.records, report.marks);
        Ok(())
    } else {
        bail!("audit failed for {}", args.file.display());
    }
}

fn verify(args: VerifyArgs) -> Result<()> {
    let checks = CheckSet::parse(&args.checks).map_err(|e| anyhow::anyhow!(e))?;
    let mut failures = 0usize;
    let mut total = 0usize;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .with_context(|| format!("reading {}", args.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    entries.sort();
    for path in entries {
        total += 1;
        let records = read_file(&path)?;
        match replay_verify(&records, &checks) {
            Ok(report) if report.ok() => {
                println!("PASS {}", path.display());
            }
            Ok(report) => {
                failures += 1;
                println!("FAIL {}", path.display());
                for line in report.lines() {
                    println!("  {line}");
                }
            }
            Err(e) => {
                failures += 1;
                println!("FAIL {}: {e}", path.display());
            }
        }
    }
    println!("{}/{} transcripts passed", total - failures, total);
    if failures > 0 {
        bail!("{failures} transcript(s) failed the audit");
    }
    Ok(())
}
