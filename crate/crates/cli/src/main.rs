use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamsm_core::harness::{
    experiment::FAILURE_THRESHOLD, plot_script, run_experiment, write_csv, ExperimentConfig,
    ExperimentResults, LONG_CSV,
};
use beamsm_core::Error;
use clap::{Parser, Subcommand};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUN_FAILURES: u8 = 3;

/// Monte-Carlo runner for set-membership adaptive beamformers.
#[derive(Debug, Parser)]
#[command(name = "beamsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write CSV results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured number of runs.
        #[arg(long)]
        runs: Option<usize>,
        /// Overrides the configured base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the configured one, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full 1000-run reproduction; ignored when `--runs` is given.
        #[arg(long)]
        full: bool,
    },
    /// Parse and check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun a config once per value of one parameter.
    Sweep {
        /// Config to sweep; defaults to the built-in user comparison.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `alpha`, `beta`, `r`, `delta`, or a dotted config key.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Print a gnuplot script plotting the mean SINR curves of a results directory.
    PlotScript {
        /// Directory holding `sinr_long.csv`.
        #[arg(long)]
        dir: PathBuf,
        /// Curves to plot; defaults to every label in the summary.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        #[arg(long, default_value = "sinr.png")]
        png: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            runs,
            seed,
            out,
            full,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if full {
                cfg.runs = 1000;
            }
            apply_overrides(&mut cfg, runs, seed)?;
            let out = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let results = execute(&cfg, &out)?;
            check_failures(&results)
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            println!(
                "ok: {} algorithms, {} runs, {} snapshots",
                cfg.algorithms.len(),
                cfg.runs,
                cfg.scenario.num_snapshots
            );
            Ok(())
        }
        Command::Sweep {
            config,
            param,
            values,
            runs,
            seed,
            out,
        } => {
            let mut base = match config {
                Some(path) => ExperimentConfig::from_path(&path)?,
                None => ExperimentConfig::user_comparison(),
            };
            apply_overrides(&mut base, runs, seed)?;
            let mut table = String::from("param,value,algorithm,mean_update_rate,final_sinr_db\n");
            let mut any_failed = false;
            for value in values {
                let cfg = base.with_param(&param, value)?;
                let dir = out.join(format!("{param}_{value}"));
                let results = execute(&cfg, &dir)?;
                any_failed |= results.exceeds_failure_threshold();
                for alg in &results.algorithms {
                    let _ = writeln!(
                        table,
                        "{param},{value},{},{},{}",
                        alg.label,
                        alg.mean_update_rate,
                        alg.final_sinr_db()
                    );
                }
            }
            let path = out.join("sweep_summary.csv");
            fs::write(&path, table).map_err(|e| io_failure(&path, e))?;
            println!("wrote {}", path.display());
            if any_failed {
                return Err(Failure {
                    code: EXIT_RUN_FAILURES,
                    message: format!("run failures above {}%", FAILURE_THRESHOLD * 100.0),
                });
            }
            Ok(())
        }
        Command::PlotScript { dir, labels, png } => {
            let labels = if labels.is_empty() {
                summary_labels(&dir)?
            } else {
                labels
            };
            print!("{}", plot_script(&dir.join(LONG_CSV), &labels, &png));
            Ok(())
        }
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, runs: Option<usize>, seed: Option<u64>) -> Result<(), Failure> {
    if let Some(k) = runs {
        cfg.runs = k;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    cfg.validate()?;
    Ok(())
}

fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentResults, Failure> {
    let results = run_experiment(cfg)?;
    let (long, summary) = write_csv(&results, out)?;
    for alg in &results.algorithms {
        println!(
            "{:<24} update rate {:>7.4}  final SINR {:>8.3} dB  failed runs {}",
            alg.label,
            alg.mean_update_rate,
            alg.final_sinr_db(),
            alg.failures.len()
        );
        for f in &alg.failures {
            eprintln!("  {} run {}: {}", alg.label, f.run, f.message);
        }
    }
    println!("wrote {} and {}", long.display(), summary.display());
    Ok(results)
}

fn check_failures(results: &ExperimentResults) -> Result<(), Failure> {
    if results.exceeds_failure_threshold() {
        Err(Failure {
            code: EXIT_RUN_FAILURES,
            message: format!("run failures above {}%", FAILURE_THRESHOLD * 100.0),
        })
    } else {
        Ok(())
    }
}

fn summary_labels(dir: &Path) -> Result<Vec<String>, Failure> {
    let path = dir.join(beamsm_core::harness::SUMMARY_CSV);
    let text = fs::read_to_string(&path).map_err(|e| io_failure(&path, e))?;
    Ok(text
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').next())
        .map(str::to_string)
        .collect())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}
