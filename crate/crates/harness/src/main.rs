use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracgd_harness::certify::{certify_catalog, DEFAULT_SAMPLES, DEFAULT_TOL};
use fracgd_harness::config::ExperimentConfig;
use fracgd_harness::experiment::{run_experiment, RunSummary};
use fracgd_harness::output::{render_table, write_outcome};
use fracgd_harness::plot::regenerate_plots;
use fracgd_harness::report::{quadratic_report, ReportSpec};
use fracgd_harness::{HarnessError, Result};

/// Fractional gradient descent experiments.
///
/// Exit codes: 0 all checks pass, 1 a bound or certificate fails, 2 config
/// error, 3 infeasible hyperparameters, 4 divergence.
#[derive(Debug, Parser)]
#[command(name = "fracgd", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Write log-scale SVG plots next to the trace CSVs.
    #[arg(long, global = true)]
    emit_plots: bool,
    /// Override the convergence threshold (run, quadratic-report) or the
    /// margin tolerance (certify).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment: a TOML file or one of fig1, fig3, fig4.
    Run { config: String },
    /// Sweep the bound certificates over a function catalog
    /// (quadratics, polynomials, holder, all).
    Certify {
        catalog: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Δ sweep of the fractional operator on a quadratic: a TOML file or one
    /// of diag-20-2, fig4.
    QuadraticReport { spec: String },
    /// Regenerate SVG plots from the trace CSVs in a run directory.
    Plot { dir: PathBuf },
}

fn check_tol(tol: Option<f64>) -> Result<()> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(HarnessError::Config(format!(
            "--tol must be positive, got {t}"
        ))),
        _ => Ok(()),
    }
}

fn create_file(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

fn run(cli: &Cli, spec: &str) -> Result<bool> {
    let cfg = ExperimentConfig::resolve(spec)?;
    let outcome = run_experiment(&cfg, cli.tol)?;
    let run_dir = write_outcome(&cli.out, &outcome)?;
    if cli.emit_plots || cfg.emit_plots {
        regenerate_plots(&run_dir)?;
    }
    let summaries: Vec<&RunSummary> = outcome.runs.iter().map(|r| &r.summary).collect();
    print!("{}", render_table(&summaries));
    println!("wrote {}", run_dir.display());
    Ok(outcome.all_bounds_hold())
}

fn certify(cli: &Cli, catalog: &str, samples: usize, seed: u64) -> Result<bool> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    let report = certify_catalog(catalog, samples, seed, tol)?;
    report.write_csv(create_file(&cli.out, &format!("certify-{catalog}.csv"))?)?;
    for r in &report.rows {
        println!(
            "{:<16} {:<18} checks={:<5} worst_margin={:+.3e} {}",
            r.function,
            r.certificate,
            r.checks,
            r.worst_margin,
            if r.pass() { "pass" } else { "FAIL" }
        );
    }
    println!(
        "{} checks, all pass: {}",
        report.total_checks(),
        report.all_pass()
    );
    Ok(report.all_pass())
}

fn report(cli: &Cli, spec: &str) -> Result<bool> {
    let spec = ReportSpec::resolve(spec)?;
    let report = quadratic_report(&spec, cli.tol)?;
    let name = format!("quadratic-report-{}.csv", report.name);
    report.write_csv(create_file(&cli.out, &name)?)?;
    report.write_csv(std::io::stdout().lock())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = check_tol(cli.tol).and_then(|()| match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Certify {
            catalog,
            samples,
            seed,
        } => certify(&cli, catalog, *samples, *seed),
        Command::QuadraticReport { spec } => report(&cli, spec),
        Command::Plot { dir } => regenerate_plots(dir).map(|files| {
            for f in files {
                println!("wrote {}", f.display());
            }
            true
        }),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fracgd: a bound check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fracgd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
