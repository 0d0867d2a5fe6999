use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fda_dm::complexity::default_ladder;
use fda_dm::experiments::{
    load_scenario, parse_scenario, run_bench, run_ber_sweep, run_memratio_sweep, run_secrecy_sweep,
    run_validate, write_records, write_records_to, BerMode, BerOptions, Experiment, MemVary,
    MethodSelection, SecrecyOptions, SweepRecord,
};
use fda_dm::Error;

const BUNDLED: &str = include_str!("../scenarios/paper_sec4.json");

/// FDA directional-modulation simulator with ZF and SVD artificial noise.
#[derive(Parser)]
#[command(name = "fda-dm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file; the bundled reference scenario when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// zf, svd or both; overrides the scenario method
    #[arg(long)]
    method: Option<MethodSelection>,
    /// Residual tolerance for validate
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check orthogonality criteria and precoder invariants.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Mean secrecy rate versus SNR over random eavesdropper placements.
    Secrecy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr_min: f64,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        snr_max: f64,
        #[arg(long, default_value_t = 1.0)]
        snr_step: f64,
        /// Eavesdroppers per placement.
        #[arg(long)]
        eves: Option<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Monte Carlo bit error rate over angle, range or both.
    Ber {
        #[command(flatten)]
        common: Common,
        /// angle, range or grid
        #[arg(long, default_value = "angle")]
        mode: BerMode,
        #[arg(long, default_value_t = 10_000)]
        symbols: usize,
        /// Angle resolution in degrees.
        #[arg(long)]
        angle_step: Option<f64>,
        /// Range resolution in km.
        #[arg(long)]
        range_step: Option<f64>,
    },
    /// Storage of both methods and their ratio versus N, L or K.
    Memratio {
        #[command(flatten)]
        common: Common,
        /// n, l or k
        #[arg(long, default_value = "n")]
        vary: MemVary,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long, default_value_t = 100)]
        to: usize,
    },
    /// Time P2 construction over a size ladder and fit scaling exponents.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 21)]
        reps: usize,
    },
}

fn load(common: &Common) -> Result<Experiment, Error> {
    let mut exp = match &common.scenario {
        Some(path) => load_scenario(path)?,
        None => parse_scenario(BUNDLED)?,
    };
    if let Some(seed) = common.seed {
        exp.reseed(seed)?;
    }
    if let Some(m) = common.method {
        exp.methods = m;
    }
    Ok(exp)
}

fn emit(common: &Common, records: &[SweepRecord]) -> Result<(), Error> {
    match &common.out {
        Some(path) => write_records(path, records),
        None => write_records_to(std::io::stdout().lock(), records),
    }
}

fn check_tol(tol: f64) -> Result<(), Error> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("--tol must be positive, got {tol}")))
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { common } => {
            check_tol(common.tol)?;
            let exp = load(&common)?;
            let report = run_validate(&exp, common.tol)?;
            for r in &report.results {
                eprintln!(
                    "{:<4} {:<20} {:>12.3e}  {}",
                    r.method.as_str(),
                    r.name,
                    r.residual,
                    if r.pass { "ok" } else { "FAIL" }
                );
            }
            emit(&common, &report.records)?;
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Secrecy {
            common,
            snr_min,
            snr_max,
            snr_step,
            eves,
            trials,
        } => {
            let exp = load(&common)?;
            let opts = SecrecyOptions {
                snr_min,
                snr_max,
                snr_step,
                eves,
                trials,
            };
            emit(&common, &run_secrecy_sweep(&exp, &opts)?)?;
            Ok(0)
        }
        Command::Ber {
            common,
            mode,
            symbols,
            angle_step,
            range_step,
        } => {
            let exp = load(&common)?;
            let base = match mode {
                BerMode::Grid => BerOptions::grid_default(),
                _ => BerOptions::default(),
            };
            let opts = BerOptions {
                symbols,
                angle_step_deg: angle_step.unwrap_or(base.angle_step_deg),
                range_step_km: range_step.unwrap_or(base.range_step_km),
                ..base
            };
            emit(&common, &run_ber_sweep(&exp, mode, &opts)?)?;
            Ok(0)
        }
        Command::Memratio {
            common,
            vary,
            from,
            to,
        } => {
            let exp = load(&common)?;
            emit(&common, &run_memratio_sweep(&exp, vary, from, to)?)?;
            Ok(0)
        }
        Command::Bench { common, reps } => {
            let exp = load(&common)?;
            let records = run_bench(
                &default_ladder(),
                reps,
                exp.scenario.seed,
                &exp.methods.methods(),
            )?;
            emit(&common, &records)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
