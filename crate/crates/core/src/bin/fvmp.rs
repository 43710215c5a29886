use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fvmp::harness::{self, ConvergenceConfig, RunCache, RunConfig, Settings};
use fvmp::{io, suite, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fvmp",
    version,
    about = "Finite-volume advection with maximum-principle slope limiters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its field, report, stage log and manifest.
    Run(RunArgs),
    /// Run a grid-refinement study and write errors and observed orders.
    Convergence(ConvergenceArgs),
    /// Run the acceptance experiments and compare them with the published values.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct RunArgs {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fv2 or fv4.
    #[arg(long)]
    scheme: Option<String>,
    /// unlimited, bj, kuzmin, nk, n2n or global.
    #[arg(long)]
    limiter: Option<String>,
    /// diag, quad, sin or sbr.
    #[arg(long)]
    case: Option<String>,
    /// cos, cos2 or leveque.
    #[arg(long)]
    ic: Option<String>,
    /// point or gauss.
    #[arg(long)]
    init: Option<String>,
    /// fe, ssp22 or ssp33.
    #[arg(long)]
    time: Option<String>,
    /// Cells per side.
    #[arg(long)]
    res: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    /// Courant target.
    #[arg(long)]
    cn: Option<String>,
    /// End time.
    #[arg(long)]
    end: Option<String>,
    /// Force the number of steps.
    #[arg(long)]
    steps: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "fvmp-out/run")]
    out: PathBuf,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated limiters.
    #[arg(long)]
    limiters: Option<String>,
    /// Comma-separated flow cases.
    #[arg(long)]
    cases: Option<String>,
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    time: Option<String>,
    #[arg(long)]
    cn: Option<String>,
    /// Comma-separated resolutions, each twice the previous.
    #[arg(long)]
    res: Option<String>,
    /// Comma-separated norms: l1, l2, linf.
    #[arg(long)]
    norms: Option<String>,
    #[arg(long, default_value = "fvmp-out/convergence")]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    /// List the criteria without running them.
    #[arg(long)]
    list: bool,
    /// Run only the named criteria.
    #[arg(long)]
    only: Vec<String>,
    #[arg(long, default_value = "fvmp-out/suite")]
    out: PathBuf,
}

/// Failure of a command, with the exit code it maps to.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::GridTooSmall { .. }
            | Error::UnsupportedLimiter { .. }
            | Error::CourantExceeded { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn settings(config: Option<&Path>, flags: &[(&str, &Option<String>)]) -> Result<Settings, Failure> {
    let base = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    let mut overrides = Settings::default();
    for (k, v) in flags {
        if let Some(v) = v {
            overrides.set(k, v.as_str());
        }
    }
    Ok(base.merged(&overrides))
}

fn run(a: &RunArgs) -> Result<bool, Failure> {
    let s = settings(
        a.config.as_deref(),
        &[
            ("scheme", &a.scheme),
            ("limiter", &a.limiter),
            ("case", &a.case),
            ("ic", &a.ic),
            ("init", &a.init),
            ("time", &a.time),
            ("res", &a.res),
            ("nx", &a.nx),
            ("ny", &a.ny),
            ("cn", &a.cn),
            ("end", &a.end),
            ("steps", &a.steps),
        ],
    )?;
    let config = RunConfig::from_settings(&s)?;
    // Plan the run before doing any work so that an infeasible step count
    // is reported as a usage error.
    fvmp::Simulation::new(config.spec.clone())?;
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let (result, artifacts) = harness::run(&config, &a.out)?;
    let r = &result.report;
    println!(
        "{} {} {} {}x{}: {} steps, dt {:e}",
        config.spec.scheme,
        config.spec.limiter,
        config.spec.stream.name(),
        config.spec.nx,
        config.spec.ny,
        result.n_steps,
        result.dt
    );
    println!(
        "rel L1 {:.6e}  rel L2 {:.6e}  rel Linf {:.6e}  min {:.6e}  max {:.6e}",
        r.rel_l1, r.rel_l2, r.rel_linf, r.min, r.max
    );
    if let Some(v) = r.max_mp_violation {
        println!("max mp violation {v:e}");
    }
    println!("wrote {} files to {}", artifacts.files.len(), artifacts.dir.display());
    Ok(true)
}

fn convergence(a: &ConvergenceArgs) -> Result<bool, Failure> {
    let s = settings(
        a.config.as_deref(),
        &[
            ("scheme", &a.scheme),
            ("limiters", &a.limiters),
            ("cases", &a.cases),
            ("ic", &a.ic),
            ("init", &a.init),
            ("time", &a.time),
            ("cn", &a.cn),
            ("res", &a.res),
            ("norms", &a.norms),
        ],
    )?;
    let cfg = ConvergenceConfig::from_settings(&s)?;
    let (table, artifacts) = harness::convergence(&cfg, &a.out)?;
    print!("{}", io::orders_csv(&table.orders)?);
    println!("wrote {} files to {}", artifacts.files.len(), artifacts.dir.display());
    Ok(true)
}

fn run_suite(a: &SuiteArgs) -> Result<bool, Failure> {
    if a.list {
        for c in &suite::CRITERIA {
            println!("{} {:<14} {}", c.number, c.id, c.title);
        }
        return Ok(true);
    }
    let only = a
        .only
        .iter()
        .map(|id| suite::find(id).ok_or_else(|| Failure::Usage(format!("unknown criterion {id:?}; see --list"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cache = RunCache::new();
    let mut reports = Vec::new();
    let selected: Vec<&suite::Criterion> = if only.is_empty() {
        suite::CRITERIA.iter().collect()
    } else {
        only
    };
    for c in selected {
        let r = suite::evaluate(c, &mut cache);
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("criterion {} {}: {status}", r.number, r.id);
        for check in r.checks.iter().filter(|c| !c.pass) {
            println!("  {}: {} (expected {})", check.name, check.value, check.expected);
        }
        if let Some(e) = &r.error {
            println!("  error: {e}");
        }
        reports.push(r);
    }
    let summary = suite::summary_csv(&reports)?;
    io::write_all(&a.out, &[("summary.csv", &summary)])?;
    Ok(reports.iter().all(|r| r.passed()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match &cli.command {
        Command::Run(a) => run(a),
        Command::Convergence(a) => convergence(a),
        Command::Suite(a) => run_suite(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
