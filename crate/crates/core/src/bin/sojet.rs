use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sojet::bench::{self, BenchConfig, Method, DEFAULT_THRESHOLD};
use sojet::testbed::REGISTRY;
use sojet::{get_problem, run_descent, run_gs, GsParams, RunRecord, SolverParams};

#[derive(Parser)]
#[command(name = "sojet", version, about = "Second-order jet descent for nonsmooth minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize one registered problem.
    Solve(SolveArgs),
    /// Run a benchmark configuration.
    Bench(BenchArgs),
    /// Show the problem registry.
    Problems {
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "sojet")]
    method: String,
    #[arg(long)]
    eps_init: Option<f64>,
    #[arg(long)]
    tau_init: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    kappa_eps: Option<f64>,
    #[arg(long)]
    kappa_tau: Option<f64>,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    w_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the iteration trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Record measured wall times instead of zeros (makes output
    /// machine-dependent).
    #[arg(long)]
    wall_time: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench_cmd(args),
        Command::Problems { .. } => list_problems(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn solve(args: SolveArgs) -> sojet::Result<ExitCode> {
    let problem = get_problem(&args.problem, args.n)?;
    let record: RunRecord = match args.method.parse::<Method>()? {
        Method::Sojet => {
            let d = SolverParams::default();
            let params = SolverParams {
                c: args.c.unwrap_or(d.c),
                eps_init: args.eps_init.unwrap_or(d.eps_init),
                tau_init: args.tau_init.unwrap_or(d.tau_init),
                kappa_eps: args.kappa_eps.unwrap_or(d.kappa_eps),
                kappa_tau: args.kappa_tau.unwrap_or(d.kappa_tau),
                eps_min: args.eps_min.unwrap_or(d.eps_min),
                max_outer_iters: args.max_iters.unwrap_or(d.max_outer_iters),
                w_cap: args.w_cap.or(d.w_cap),
                seed: args.seed,
                ..d
            };
            run_descent(&problem, problem.x0(), &params)?
        }
        Method::Gs => {
            if args.tau_init.is_some() || args.c.is_some() || args.kappa_tau.is_some() || args.w_cap.is_some() {
                return Err(sojet::Error::InvalidParameter(
                    "--tau-init, --c, --kappa-tau and --w-cap apply to the sojet method only".into(),
                ));
            }
            let d = GsParams::default();
            let params = GsParams {
                eps_init: args.eps_init.unwrap_or(d.eps_init),
                kappa_eps: args.kappa_eps.unwrap_or(d.kappa_eps),
                eps_min: args.eps_min.unwrap_or(d.eps_min),
                max_iters: args.max_iters.unwrap_or(d.max_iters),
                seed: args.seed,
                ..d
            };
            run_gs(&problem, problem.x0(), &params)?
        }
    };

    if let Some(path) = &args.trace {
        std::fs::write(path, record.trace_json()?)?;
    }
    let mut out = io::stdout().lock();
    writeln!(out, "problem      {} (n = {})", problem.name(), problem.n())?;
    writeln!(out, "method       {}", args.method)?;
    writeln!(out, "final_f      {}", bench::fmt_f64(record.final_f))?;
    writeln!(out, "termination  {}", record.termination)?;
    writeln!(out, "steps        {}", record.accepted_steps)?;
    writeln!(
        out,
        "evaluations  n_f = {}, n_grad = {}, n_hess = {}",
        record.counters.n_f, record.counters.n_grad, record.counters.n_hess
    )?;
    for v in &record.violations {
        writeln!(out, "violation    {v:?}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_cmd(args: BenchArgs) -> sojet::Result<ExitCode> {
    let config = BenchConfig::from_json(&std::fs::read_to_string(&args.config)?)?;
    let mut report = bench::run_benchmark(&config);
    if !args.wall_time {
        report.results.iter_mut().for_each(|r| r.wall_time_s = 0.0);
    }
    bench::write_results_csv(BufWriter::new(File::create(&args.out)?), &report.results)?;
    if let Some(path) = &args.profile {
        let points = bench::performance_profile(&report.results, args.threshold)?;
        bench::write_profile_csv(BufWriter::new(File::create(path)?), &points)?;
    }
    for e in &report.errors {
        eprintln!("cell failed: {e}");
    }
    Ok(if report.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn list_problems() -> sojet::Result<ExitCode> {
    let mut out = io::stdout().lock();
    writeln!(out, "{:<20} {:>5}  {:<9}  f_star", "name", "min_n", "convexity")?;
    for p in REGISTRY {
        let kind = if p.convex { "convex" } else { "nonconvex" };
        writeln!(out, "{:<20} {:>5}  {:<9}  {}", p.name, p.min_n, kind, p.f_star)?;
    }
    Ok(ExitCode::SUCCESS)
}
