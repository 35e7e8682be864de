use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vortex_pipeline::config::{Overrides, RunConfig};
use vortex_pipeline::fields::write_atomic;
use vortex_pipeline::run::{self, RunError};

#[derive(Parser)]
#[command(name = "vortex-spike", about = "Vortex spike water waves: ground state, solve, sweep, diagnose, plot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accepted for interface stability; the pipeline draws no random numbers.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Shoot the ground state and write its profile and audit.
    GroundState,
    /// Solve at one δ and write the bundle.
    Solve,
    /// Solve over the δ list and fit the scaling laws.
    Sweep,
    /// Check a bundle and print its threshold table.
    Diagnose { bundle: PathBuf },
    /// Re-render a bundle's figures.
    Plot { bundle: PathBuf },
}

fn report_error(out: &Path, e: &RunError) {
    eprintln!("error: {e}");
    let body = serde_json::json!({ "exit_code": e.exit_code(), "error": e.stage() });
    let mut text = serde_json::to_string_pretty(&body).unwrap_or_default();
    text.push('\n');
    // the input error path may not have a usable output directory
    if let Err(w) = write_atomic(&out.join("error.json"), text.as_bytes()) {
        eprintln!("could not write error.json: {w}");
    }
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<bool, RunError> {
    match &cli.command {
        Command::GroundState => {
            let s = run::cmd_ground_state(cfg)?;
            println!("U(0) = {:.15} lambda = {:.10} max ODE residual {:.2e}", s.center_value, s.lambda, s.max_ode_residual);
            Ok(true)
        }
        Command::Solve => {
            let r = run::cmd_solve(cfg)?;
            println!("delta {} tau* {:.6e} b~ {:.3e} b {:.3e}", r.delta, r.tau_star, r.b_tilde, r.b);
            print_thresholds(&r.thresholds);
            Ok(true)
        }
        Command::Sweep => {
            let s = run::cmd_sweep(cfg)?;
            for row in &s.report.rows {
                let (c2, r2) = row.fit.map_or((f64::NAN, f64::NAN), |f| (f.c2, f.r_squared));
                println!(
                    "{:<24} c2 {:+.4} (predicted {:+.1}, tolerance {:.0}%) R^2 {:.5} {}",
                    row.quantity,
                    c2,
                    row.predicted_c2,
                    100.0 * row.tolerance,
                    r2,
                    if row.pass { "PASS" } else { "FAIL" }
                );
            }
            for (d, m) in &s.report.failures {
                println!("delta {d} failed: {m}");
            }
            Ok(true)
        }
        Command::Diagnose { bundle } => {
            let t = run::cmd_diagnose(bundle)?;
            print_thresholds(&t);
            Ok(t.iter().all(|t| t.pass))
        }
        Command::Plot { bundle } => {
            run::cmd_plot(bundle)?;
            Ok(true)
        }
    }
}

fn print_thresholds(t: &[run::Threshold]) {
    for t in t {
        println!("{:<36} {:>12.4e} {} {:.1e} {}", t.name, t.value, t.comparison, t.limit, if t.pass { "ok" } else { "FAIL" });
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let over = Overrides { delta: cli.delta, out: cli.out.clone(), threads: cli.threads };
    let cfg = match RunConfig::load(cli.config.as_deref(), &over) {
        Ok((cfg, warnings)) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            cfg
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match execute(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            report_error(&cfg.out, &e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
