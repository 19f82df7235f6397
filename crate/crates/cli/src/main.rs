use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use drsplit::analysis::{rate_table, write_rate_csv};
use drsplit::experiment::{build_instance, run_experiment, ExperimentReport, ExperimentSpec, ProblemInstance};
use drsplit::solver::run;
use drsplit::{SolverConfig, Variant};
use log::info;

mod certify;

#[derive(Parser)]
#[command(
    name = "drsplit",
    version,
    about = "Douglas-Rachford splitting with weakly convex penalties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparse deconvolution at σ/s = 15.96 with ρ = s.
    Exp1(ExpArgs),
    /// Sparse deconvolution at σ/s = 5.44 with ρ = s/2.
    Exp2(ExpArgs),
    /// Write one experiment instance as JSON.
    Instance(InstanceArgs),
    /// Solve a saved instance with one variant.
    Solve(SolveArgs),
    /// Print contraction bounds over a step grid as CSV.
    Rates(RatesArgs),
    /// Check the Lipschitz bounds empirically; exits nonzero on a violation.
    Certify(CertifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Exp1,
    Exp2,
}

impl Which {
    fn spec(self) -> ExperimentSpec {
        match self {
            Which::Exp1 => ExperimentSpec::exp1(),
            Which::Exp2 => ExperimentSpec::exp2(),
        }
    }
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Fraction of each variant's step bound.
    #[arg(long, default_value_t = SolverConfig::DEFAULT_ALPHA_FRACTION)]
    alpha_frac: f64,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Directory for report.json, instances and per-variant traces.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, value_enum, default_value = "exp1")]
    exp: Which,
    /// Seed index within the experiment.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = Variant::MainFg)]
    variant: Variant,
    /// Step size; defaults to 0.99 of the variant's bound (1/σ for ista).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Stop once the driver moves less than this in one iteration.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    /// Take ρ, s and σ from this experiment's first instance.
    #[arg(long, value_enum, default_value = "exp2", conflicts_with_all = ["rho", "s", "sigma"])]
    exp: Which,
    #[arg(long, requires_all = ["s", "sigma"])]
    rho: Option<f64>,
    #[arg(long, requires_all = ["rho", "sigma"])]
    s: Option<f64>,
    #[arg(long, requires_all = ["rho", "s"])]
    sigma: Option<f64>,
    /// Largest step in the grid; defaults to 1/s.
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    exp: Option<Which>,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Exp1(args) => experiment(Which::Exp1, args),
        Command::Exp2(args) => experiment(Which::Exp2, args),
        Command::Instance(args) => {
            let spec = args.exp.spec();
            let inst = build_instance(&spec, spec.instance_seed(args.index))?;
            inst.save_json(&args.out)
                .with_context(|| format!("writing {}", args.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => solve(args),
        Command::Rates(args) => rates(args),
        Command::Certify(args) => {
            let exps = match args.exp {
                Some(w) => vec![w.spec()],
                None => vec![ExperimentSpec::exp1(), ExperimentSpec::exp2()],
            };
            let mut ok = true;
            for spec in exps {
                ok &= certify::run(&spec, args.pairs, args.seed)?;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn experiment(which: Which, args: ExpArgs) -> Result<ExitCode> {
    let mut spec = which.spec();
    spec.n_seeds = args.seeds;
    spec.alpha_fraction = args.alpha_frac;
    spec.lambda = args.lambda;
    spec.max_iters = args.iters;
    info!("running {} over {} seeds", spec.name, spec.n_seeds);
    let report = run_experiment(&spec)?;
    print_report(&report, &mut io::stdout().lock())?;
    if let Some(dir) = args.out_dir {
        report
            .write_to_dir(&dir)
            .with_context(|| format!("writing report to {}", dir.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(report: &ExperimentReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(
        out,
        "{}: filter decay {:.6}, sigma/s = {:.4}",
        report.spec.name, report.filter.decay, report.filter.ratio
    )?;
    for seed in &report.seeds {
        if let Some(err) = &seed.error {
            writeln!(out, "seed {:>3}: failed: {err}", seed.index)?;
            continue;
        }
        let cells: Vec<String> = seed
            .runs
            .iter()
            .map(|r| match r.iterations_to_threshold {
                Some(n) => format!("{}={n}", r.variant),
                None => format!("{}=-", r.variant),
            })
            .collect();
        writeln!(out, "seed {:>3}: {}", seed.index, cells.join(" "))?;
    }
    for s in &report.summaries {
        let median = s.median_iterations.map_or("-".to_string(), |m| m.to_string());
        writeln!(
            out,
            "{}: reached threshold on {} seeds, median iterations {median}",
            s.variant, s.seeds_reaching_threshold
        )?;
    }
    for c in &report.comparisons {
        writeln!(
            out,
            "{} vs {}: {} faster on {}, {} faster on {}, {} ties",
            c.first, c.second, c.first, c.first_faster, c.second, c.second_faster, c.ties
        )?;
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let inst =
        ProblemInstance::load_json(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let problem = inst.problem()?;
    let mut cfg = SolverConfig::for_problem(&problem, args.variant, args.iters)?.with_tol(args.tol);
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    cfg.lambda = args.lambda;
    let trace = run(&problem, &cfg)?;
    if let Some(path) = &args.trace {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        trace.write_csv(file)?;
    }
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &trace.summary())?;
    writeln!(out)?;
    Ok(ExitCode::SUCCESS)
}

fn rates(args: RatesArgs) -> Result<ExitCode> {
    let (rho, s, sigma) = match (args.rho, args.s, args.sigma) {
        (Some(rho), Some(s), Some(sigma)) => (rho, s, sigma),
        _ => {
            let spec = args.exp.spec();
            let inst = build_instance(&spec, spec.instance_seed(0))?;
            let (s, sigma) = inst.gram_extremes();
            (inst.penalty.rho(), s, sigma)
        }
    };
    let rows = rate_table(rho, s, sigma, args.alpha_max.unwrap_or(1.0 / s), args.points)?;
    match args.out {
        Some(path) => write_rate_csv(
            &rows,
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        )?,
        None => write_rate_csv(&rows, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}
