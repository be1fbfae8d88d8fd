//! Command-line front end: solve single instances, generate instances and run
//! benchmark grids.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qap::bench::{self, BenchGrid, BenchMode, BenchRow, Cell};
use qap::{
    anneal, anneal_parallel, generate_taixxa, parse_qaplib, write_qaplib, AnnealParams, Error,
    GeneratorSpec, Instance, Mode, ParallelConfig,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qap",
    about = "Simulated annealing for the quadratic assignment problem",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one annealing run and print a JSON report.
    Solve(SolveArgs),
    /// Run a benchmark grid and emit CSV.
    Bench(BenchArgs),
    /// Generate a random symmetric zero-diagonal instance file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file in QAPLIB format.
    #[arg(long, conflicts_with = "gen")]
    instance: Option<PathBuf>,
    /// Generator spec instead of a file, e.g. "n=50,seed=1" or
    /// "n=50,seed=1,max=100".
    #[arg(long)]
    gen: Option<String>,
    /// Number of proposed swaps.
    #[arg(long)]
    iters: u64,
    /// Run seed (shuffle, temperatures and acceptance draws).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Evaluation mode: scratch, delta (alias delta-seq), auto or delta-par.
    #[arg(long, default_value = "delta")]
    mode: String,
    /// Worker count for delta-par; defaults to $QAP_WORKERS or 1.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the sampled initial temperature.
    #[arg(long, requires = "tf")]
    t0: Option<f64>,
    /// Override the sampled final temperature.
    #[arg(long, requires = "t0")]
    tf: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes, e.g. "50,100".
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Comma-separated iteration counts, e.g. "1000,10000,100000".
    #[arg(long, value_delimiter = ',', required = true)]
    iters: Vec<u64>,
    /// Comma-separated run seeds shared across modes.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    /// Comma-separated modes: scratch, delta-seq, delta-par.
    #[arg(long, value_delimiter = ',', default_value = "delta-seq,delta-par")]
    modes: Vec<String>,
    /// Comma-separated worker counts for delta-par cells; defaults to
    /// $QAP_WORKERS or 1.
    #[arg(long, value_delimiter = ',')]
    workers: Option<Vec<usize>>,
    /// Baseline mode for speedup rows: scratch or delta-seq.
    #[arg(long, default_value = "delta-seq")]
    reference: String,
    /// Seed for instance generation (one instance per size).
    #[arg(long, default_value_t = 1)]
    gen_seed: u64,
    /// Upper bound for generated matrix entries.
    #[arg(long, default_value_t = 100)]
    max_value: i64,
    /// Output CSV path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Run up to this many cells concurrently as child processes.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_value: i64,
    /// Output file path.
    #[arg(short, long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version output are not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
        Command::Generate(args) => run_generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedInstance(_) => EXIT_UNSUPPORTED,
        Error::Io(_)
        | Error::Parse { .. }
        | Error::Truncated { .. }
        | Error::NegativeEntry { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn default_workers() -> usize {
    std::env::var("QAP_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

/// Parses "n=50,seed=1[,max=100]".
fn parse_gen_spec(text: &str) -> Result<GeneratorSpec, Error> {
    let mut n = None;
    let mut seed = 1u64;
    let mut max_value = 100i64;
    for part in text.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::Config(format!("generator spec entry {part:?} is not key=value"))
        })?;
        let bad = |_| Error::Config(format!("invalid value in generator spec: {part:?}"));
        match key.trim() {
            "n" => n = Some(value.trim().parse().map_err(bad)?),
            "seed" => seed = value.trim().parse().map_err(bad)?,
            "max" | "max_value" => max_value = value.trim().parse().map_err(bad)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown generator spec key {other:?} (expected n, seed or max)"
                )))
            }
        }
    }
    let n = n.ok_or_else(|| Error::Config("generator spec needs n=<size>".into()))?;
    Ok(GeneratorSpec::new(n, seed).with_max_value(max_value))
}

fn load_instance(args: &SolveArgs) -> Result<Instance, Error> {
    match (&args.instance, &args.gen) {
        (Some(path), None) => parse_qaplib(&fs::read_to_string(path)?),
        (None, Some(spec)) => generate_taixxa(&parse_gen_spec(spec)?),
        _ => Err(Error::Config(
            "exactly one of --instance or --gen is required".into(),
        )),
    }
}

fn run_solve(args: SolveArgs) -> Result<(), Error> {
    let instance = load_instance(&args)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let mut params = AnnealParams::new(args.iters, args.seed);
    if let (Some(t0), Some(tf)) = (args.t0, args.tf) {
        params.temperatures = Some((t0, tf));
    }
    let stats = match args.mode.as_str() {
        "scratch" => anneal(&instance, &params.with_mode(Mode::Scratch))?,
        "delta" | "delta-seq" => anneal(&instance, &params.with_mode(Mode::Delta))?,
        "auto" => anneal(&instance, &params.with_mode(Mode::Auto))?,
        "delta-par" => anneal_parallel(&instance, &params, &ParallelConfig::new(workers))?,
        other => {
            return Err(Error::Config(format!(
                "unknown mode {other:?} (expected scratch, delta, delta-seq, auto or delta-par)"
            )))
        }
    };
    let report = serde_json::json!({
        "n": instance.n(),
        "iters": stats.iterations,
        "mode": args.mode,
        "workers": if args.mode == "delta-par" { workers } else { 1 },
        "best_cost": stats.best_cost,
        "best_perm": stats.best_perm.as_slice(),
        "acceptance_rate": stats.acceptance_rate,
        "wall_time": stats.wall_time.as_secs_f64(),
    });
    println!("{report}");
    Ok(())
}

fn run_generate(args: GenerateArgs) -> Result<(), Error> {
    let spec = GeneratorSpec::new(args.n, args.seed).with_max_value(args.max_value);
    let instance = generate_taixxa(&spec)?;
    fs::write(&args.output, write_qaplib(&instance))?;
    println!("{}", args.output.display());
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Error> {
    let modes: Vec<BenchMode> = args
        .modes
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_, _>>()?;
    let grid = BenchGrid {
        sizes: args.sizes,
        iters: args.iters,
        seeds: args.seeds,
        modes,
        workers: args.workers.unwrap_or_else(|| vec![default_workers()]),
        reference: args.reference.parse()?,
        gen_seed: args.gen_seed,
        max_value: args.max_value,
    };
    if args.jobs < 1 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }

    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };

    if args.jobs == 1 {
        bench::run_grid(&grid, &mut sink)?;
        return Ok(());
    }

    // Multi-process path: each cell runs as an independent `qap solve` child,
    // so concurrent cells never share engine state.
    grid.validate()?;
    writeln!(sink, "{}", bench::CSV_HEADER)?;
    sink.flush()?;
    let cells = bench::cells(&grid);
    let mut rows = Vec::with_capacity(cells.len());
    for wave in cells.chunks(args.jobs) {
        let children: Vec<_> = wave
            .iter()
            .map(|cell| spawn_cell(cell, &grid))
            .collect::<Result<_, _>>()?;
        for (cell, child) in wave.iter().zip(children) {
            let row = collect_cell(cell, child)?;
            writeln!(sink, "{}", row.csv_line())?;
            sink.flush()?;
            rows.push(row);
        }
    }
    for row in bench::speedup_rows(&rows, grid.reference) {
        writeln!(sink, "{}", row.csv_line())?;
        sink.flush()?;
    }
    Ok(())
}

fn spawn_cell(cell: &Cell, grid: &BenchGrid) -> Result<std::process::Child, Error> {
    let mode = match cell.mode {
        BenchMode::Scratch => "scratch",
        BenchMode::DeltaSeq => "delta",
        BenchMode::DeltaPar => "delta-par",
    };
    let exe = std::env::current_exe()?;
    let child = std::process::Command::new(exe)
        .arg("solve")
        .arg("--gen")
        .arg(format!(
            "n={},seed={},max={}",
            cell.n, grid.gen_seed, grid.max_value
        ))
        .arg("--iters")
        .arg(cell.iters.to_string())
        .arg("--seed")
        .arg(cell.seed.to_string())
        .arg("--mode")
        .arg(mode)
        .arg("--workers")
        .arg(cell.workers.to_string())
        .stdout(std::process::Stdio::piped())
        .spawn()?;
    Ok(child)
}

fn collect_cell(cell: &Cell, child: std::process::Child) -> Result<BenchRow, Error> {
    let output = child.wait_with_output()?;
    if !output.status.success() {
        return Err(Error::Consistency(format!(
            "bench cell {cell:?} failed with status {}",
            output.status
        )));
    }
    let report: serde_json::Value = serde_json::from_slice(&output.stdout)
        .map_err(|e| Error::Consistency(format!("bad cell report: {e}")))?;
    let field = |name: &str| {
        report
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Consistency(format!("cell report missing {name}")))
    };
    Ok(BenchRow {
        n: cell.n,
        iters: cell.iters,
        mode: cell.mode.to_string(),
        workers: cell.workers,
        wall_time_s: field("wall_time")?.as_f64().unwrap_or_default(),
        best_cost: field("best_cost")?.as_i64().unwrap_or_default(),
        acceptance_rate: field("acceptance_rate")?.as_f64().unwrap_or_default(),
        seed: cell.seed,
    })
}
