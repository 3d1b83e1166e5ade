use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use kuhn3::continuation::trace_branch;
use kuhn3::equilibrium::{verify_equilibrium, SystemOptions, VerifyTolerances, K_MINUS};
use kuhn3::io::{
    emit_expectation_plot, emit_range_frames, export_branch_csv, load_branch_csv, write_json,
    BranchSummary, BranchTable, FrameSampling, PotAxis, RunConfig,
};
use kuhn3::skp::compare_embedding;
use kuhn3::Error;

/// Equilibrium branches of three-player Kuhn poker with N > 3 cards.
#[derive(Parser)]
#[command(name = "kuhn3", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the equilibrium branch and write branch.csv and summary.json.
    Trace(RunArgs),
    /// Check every point of a branch file against the equilibrium conditions.
    Verify(VerifyArgs),
    /// Compare a simplified Kuhn poker branch with the closed-form solution.
    VerifySkp(VerifySkpArgs),
    /// Plot the expectations of a branch file as SVG.
    Plot(PlotArgs),
    /// Write per-solution range frames of a branch file.
    Frames(FramesArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Number of cards in the deck (must exceed 3).
    #[arg(long)]
    cards: Option<usize>,
    /// Stop once the pot exceeds this value.
    #[arg(long)]
    pot_max: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simplified Kuhn poker: four cards, card 1 never bets or calls.
    #[arg(long)]
    skp: bool,
    #[arg(long)]
    delta_init: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            // A malformed config file is bad input, like a bad flag.
            Some(path) => RunConfig::from_json_file(path).map_err(|e| match e {
                Error::Format { .. } => Error::InvalidSpec(e.to_string()),
                e => e,
            })?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.cards {
            c.n_cards = v;
        }
        if let Some(v) = self.pot_max {
            c.pot_stop = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if self.skp {
            c.skp = true;
        }
        if self.delta_init.is_some() {
            c.delta_init = self.delta_init;
        }
        if self.delta_max.is_some() {
            c.delta_max = self.delta_max;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Branch CSV written by `trace`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Regularization the branch was traced with; sets the gradient tolerance.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-3)]
    max_exploitability: f64,
}

#[derive(Args)]
struct VerifySkpArgs {
    /// Branch CSV of a simplified Kuhn poker trace. Without it a fresh
    /// branch is traced with the remaining flags.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// SVG file to write.
    #[arg(long)]
    out: PathBuf,
    /// Logarithmic pot axis; points with P <= 0 are dropped.
    #[arg(long)]
    log_p: bool,
}

#[derive(Args)]
struct FramesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Directory for the frame files.
    #[arg(long)]
    out: PathBuf,
    /// Use every n-th branch point.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Instead of a stride, resample this many frames at equal arc length.
    #[arg(long, conflicts_with = "stride")]
    equal_arc: Option<usize>,
}

enum Failure {
    Usage(Error),
    Verification,
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) => Failure::Usage(e),
            _ => Failure::Runtime(e),
        }
    }
}

fn trace(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    let spec = cfg.spec()?;
    let branch = trace_branch(&spec, SystemOptions::default(), &cfg.continuation_config())?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| Failure::Runtime(Error::Io { path: cfg.out.clone(), source: e }))?;
    let csv = cfg.out.join("branch.csv");
    export_branch_csv(&branch, &csv)?;
    write_json(&BranchSummary::new(&branch), &cfg.out.join("summary.json"))?;
    info!("wrote {} points to {}", branch.points.len(), csv.display());
    Ok(())
}

fn verify_table(table: &BranchTable, tol: &VerifyTolerances) -> Result<bool, Failure> {
    let system = table.system()?;
    let mut failures = 0;
    println!("step,P,pass,violations,max_exploitability");
    for row in &table.rows {
        let x = system.embed(&row.x_free);
        let report = verify_equilibrium(&system, &x, row.pot, tol);
        if !report.pass {
            failures += 1;
        }
        println!(
            "{},{:.10},{},{},{:.3e}",
            row.step,
            row.pot,
            if report.pass { "pass" } else { "FAIL" },
            report.violations().count(),
            report.max_exploitability()
        );
    }
    eprintln!("{} of {} points pass", table.rows.len() - failures, table.rows.len());
    Ok(failures == 0)
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let table = load_branch_csv(&args.input)?;
    let mut tol = VerifyTolerances::for_epsilon(args.epsilon);
    tol.max_exploitability = args.max_exploitability;
    if verify_table(&table, &tol)? {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn verify_skp(args: &VerifySkpArgs) -> Result<(), Failure> {
    let table = match &args.input {
        Some(path) => load_branch_csv(path)?,
        None => {
            let mut run = args.run.clone();
            run.skp = true;
            let mut cfg = run.resolve()?;
            if run.pot_max.is_none() && run.config.is_none() {
                cfg.pot_stop = 4.0;
            }
            let branch = trace_branch(&cfg.spec()?, SystemOptions::default(), &cfg.continuation_config())?;
            BranchTable::from_branch(&branch)?
        }
    };
    let report = compare_embedding(&table, args.tolerance, K_MINUS)?;
    println!("P,b3_error,d2_error,sum_c2_d3,sum_c3_d1,lower,upper,limit,max_zero,pass");
    for p in &report.points {
        println!(
            "{:.10},{:.3e},{:.3e},{:.10},{:.10},{:.10},{:.10},{},{:.3e},{}",
            p.pot,
            p.b3_error,
            p.d2_error,
            p.sums.0,
            p.sums.1,
            p.bounds.0,
            p.bounds.1,
            p.limit.map_or("".to_string(), |l| format!("{l:.10}")),
            p.max_zero,
            if p.pass { "pass" } else { "FAIL" }
        );
    }
    eprintln!(
        "{} points; max |b3 error| {:.3e}, max |d2 error| {:.3e}, max interior-sum error {:.3e}",
        report.points.len(),
        report.max_b3_error,
        report.max_d2_error,
        report.max_limit_error
    );
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn plot(args: &PlotArgs) -> Result<(), Failure> {
    let table = load_branch_csv(&args.input)?;
    let axis = if args.log_p { PotAxis::Log } else { PotAxis::Linear };
    emit_expectation_plot(&table, &args.out, axis)?;
    Ok(())
}

fn frames(args: &FramesArgs) -> Result<(), Failure> {
    let table = load_branch_csv(&args.input)?;
    let sampling = match args.equal_arc {
        Some(n) => FrameSampling::EqualArc(n),
        None => FrameSampling::Stride(args.stride),
    };
    if matches!(sampling, FrameSampling::Stride(0) | FrameSampling::EqualArc(0)) {
        return Err(Failure::Usage(Error::InvalidSpec("frame stride and count must be positive".into())));
    }
    let written = emit_range_frames(&table, Path::new(&args.out), sampling)?;
    info!("wrote {} frames to {}", written.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Trace(a) => trace(a),
        Command::Verify(a) => verify(a),
        Command::VerifySkp(a) => verify_skp(a),
        Command::Plot(a) => plot(a),
        Command::Frames(a) => frames(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            error!("{e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            error!("{e}");
            ExitCode::from(3)
        }
    }
}
