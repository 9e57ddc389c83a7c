//! `lejastep` command line: benchmark runs and convergence studies over
//! the three periodic 2D test problems.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure.

use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use lejastep_cli::{
    convergence_study, run, write_convergence_csv, write_csv, write_json, CliError, ProblemKind,
    RunConfig,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    #[value(name = "diff-adv")]
    DiffAdv,
    #[value(name = "diff-adv-source")]
    DiffAdvSource,
    #[value(name = "burgers")]
    Burgers,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::DiffAdv => ProblemKind::DiffAdv,
            ProblemArg::DiffAdvSource => ProblemKind::DiffAdvSource,
            ProblemArg::Burgers => ProblemKind::Burgers,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "lejastep",
    about = "Exponential-integrator benchmark harness (Leja interpolation)",
    version
)]
struct Cli {
    /// Benchmark problem
    #[arg(long, value_enum, default_value = "diff-adv")]
    problem: ProblemArg,

    /// Integrator name (registry name, or leja-exp / leja-phi-nl for the
    /// direct linear drivers)
    #[arg(long, default_value = "rosenbrock-euler")]
    integrator: String,

    /// Grid points per side (n x n grid)
    #[arg(long, default_value_t = 128)]
    n: usize,

    /// Step size as a multiple of dt_CFL
    #[arg(long = "dt-cfl", default_value_t = 1.0)]
    dt_cfl: f64,

    /// Final time
    #[arg(long = "t-final", default_value_t = 1e-4)]
    t_final: f64,

    /// Relative tolerance of the Leja iteration
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,

    /// Absolute tolerance of the Leja iteration
    #[arg(long, default_value_t = 0.0)]
    atol: f64,

    /// Recompute the spectrum every this many steps (nonlinear problems)
    #[arg(long = "refresh-spectrum", default_value_t = 50)]
    refresh_spectrum: usize,

    /// Advection velocity
    #[arg(long, default_value_t = 10.0)]
    nu: f64,

    /// Output path (defaults to lejastep_run.csv / lejastep_run.json)
    #[arg(long)]
    out: Option<String>,

    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Run a convergence study over --dt-cfl-list instead of a single run
    #[arg(long, default_value_t = false)]
    converge: bool,

    /// Step multiples for the convergence study
    #[arg(long = "dt-cfl-list", value_delimiter = ',')]
    dt_cfl_list: Vec<f64>,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig {
        problem: cli.problem.into(),
        integrator: cli.integrator.clone(),
        n: cli.n,
        dt_cfl_multiple: cli.dt_cfl,
        t_final: cli.t_final,
        rtol: cli.rtol,
        atol: cli.atol,
        refresh_spectrum_every: cli.refresh_spectrum,
        nu: cli.nu,
    };

    if cli.converge {
        let rows = convergence_study(&config, &cli.dt_cfl_list)?;
        let path = cli.out.unwrap_or_else(|| "lejastep_convergence.csv".into());
        let mut out = BufWriter::new(File::create(&path)?);
        write_convergence_csv(&mut out, &config, &rows)?;
        for r in &rows {
            match r.observed_order {
                Some(order) => println!(
                    "dt = {:>8.3} x CFL  error = {:.3e}  observed order = {order:.2}",
                    r.dt_cfl_multiple, r.error
                ),
                None => println!(
                    "dt = {:>8.3} x CFL  error = {:.3e}",
                    r.dt_cfl_multiple, r.error
                ),
            }
        }
        println!("wrote {path}");
        return Ok(());
    }

    let result = run(&config)?;
    let path = cli.out.unwrap_or_else(|| match cli.format {
        Format::Csv => "lejastep_run.csv".into(),
        Format::Json => "lejastep_run.json".into(),
    });
    let mut out = BufWriter::new(File::create(&path)?);
    match cli.format {
        Format::Csv => write_csv(&mut out, &result)?,
        Format::Json => write_json(&mut out, &result)?,
    }
    let m = &result.summary;
    println!(
        "{} / {} on {}x{}: {} steps, {} Leja iterations, {:.3} s, {:.2} GB/s, checksum {}",
        result.problem,
        result.integrator,
        result.n,
        result.n,
        m.total_steps,
        m.total_leja_iters,
        m.wall_time_seconds,
        m.effective_bandwidth_gbps,
        m.final_state_checksum
    );
    println!("wrote {path}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ CliError::Config(_)) => {
            eprintln!("{err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(3)
        }
    }
}
