//! CSV and plot-script writers.
//!
//! Floats use Rust's shortest round-trip formatting, so output is
//! byte-identical for identical results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::ExperimentResults;
use crate::error::{Error, Result};

pub const LONG_CSV: &str = "sinr_long.csv";
pub const SUMMARY_CSV: &str = "summary.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Per-run, per-snapshot rows.
pub fn long_csv(results: &ExperimentResults) -> String {
    let mut out = String::from("algorithm,run,snapshot,sinr_db,updated,lambda1,delta\n");
    for alg in &results.algorithms {
        for (run, r) in &alg.runs {
            for (i, ev) in r.events.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    alg.label,
                    run,
                    i + 1,
                    r.sinr_db[i],
                    u8::from(ev.updated),
                    ev.lambda1,
                    r.deltas[i]
                );
            }
        }
    }
    out
}

pub fn summary_csv(results: &ExperimentResults) -> String {
    let mut out = String::from("algorithm,mean_update_rate,final_sinr_db\n");
    for alg in &results.algorithms {
        let _ = writeln!(out, "{},{},{}", alg.label, alg.mean_update_rate, alg.final_sinr_db());
    }
    out
}

/// Write both CSV files into `dir`, creating it if needed.
pub fn write_csv(results: &ExperimentResults, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let long = dir.join(LONG_CSV);
    fs::write(&long, long_csv(results)).map_err(io_err(&long))?;
    let summary = dir.join(SUMMARY_CSV);
    fs::write(&summary, summary_csv(results)).map_err(io_err(&summary))?;
    Ok((long, summary))
}

/// Gnuplot script plotting the run-averaged SINR of each label in `csv`.
pub fn plot_script(csv: &Path, labels: &[String], output_png: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{}'", output_png.display());
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'snapshot'");
    let _ = writeln!(s, "set ylabel 'SINR (dB)'");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key bottom right");
    let plots: Vec<String> = labels
        .iter()
        .map(|l| {
            format!(
                "\"< awk -F, '$1==\\\"{l}\\\" {{s[$3]+=$4; c[$3]++}} END {{for (i in s) print i\\\",\\\"s[i]/c[i]}}' {} | sort -t, -k1,1n\" using 1:2 with lines title '{l}'",
                csv.display()
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
