//! CSV traces and summary tables.
//!
//! Floats are written in Rust's shortest round-trip exponent form (`{:e}`),
//! so identical runs give byte-identical files. Missing values are empty.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fracgd::descent::IterateTrace;

use crate::error::Result;
use crate::experiment::{ExperimentOutcome, RunSummary};

/// Column order of every trace file.
pub const TRACE_COLUMNS: [&str; 7] = [
    "t",
    "f",
    "grad_norm_2",
    "dist_sq_to_opt",
    "eta_t",
    "lambda_t",
    "rho_t",
];

pub const SUMMARY_COLUMNS: [&str; 9] = [
    "label",
    "method",
    "iterations",
    "final_error",
    "mean_contraction",
    "bound_checks",
    "bound_margin",
    "sandwich_margin",
    "bound_ok",
];

pub const SUMMARY_FILE: &str = "summary.csv";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_trace_csv<W: Write>(out: W, trace: &IterateTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in &trace.records {
        w.write_record([
            r.t.to_string(),
            fmt_f64(r.f),
            fmt_f64(r.grad_norm),
            fmt_opt(r.dist_sq),
            fmt_opt(r.eta),
            fmt_opt(r.lambda),
            fmt_opt(r.rho),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, summaries: &[&RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summaries {
        w.write_record([
            s.label.clone(),
            s.method.clone(),
            s.iterations.map(|i| i.to_string()).unwrap_or_default(),
            fmt_f64(s.final_error),
            fmt_opt(s.mean_contraction),
            s.bound_checks.to_string(),
            fmt_opt(s.bound_margin),
            fmt_opt(s.sandwich_margin),
            s.bound_ok.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<dir>/<name>/<label>.csv` for every method plus `summary.csv`,
/// returning the run directory.
pub fn write_outcome(dir: &Path, outcome: &ExperimentOutcome) -> Result<PathBuf> {
    let run_dir = dir.join(&outcome.name);
    fs::create_dir_all(&run_dir)?;
    for run in &outcome.runs {
        let file = fs::File::create(run_dir.join(format!("{}.csv", run.label)))?;
        write_trace_csv(std::io::BufWriter::new(file), &run.trace)?;
    }
    let summaries: Vec<&RunSummary> = outcome.runs.iter().map(|r| &r.summary).collect();
    let file = fs::File::create(run_dir.join(SUMMARY_FILE))?;
    write_summary_csv(std::io::BufWriter::new(file), &summaries)?;
    Ok(run_dir)
}

/// Plain-text table of the summaries for the terminal.
pub fn render_table(summaries: &[&RunSummary]) -> String {
    let header = [
        "label",
        "method",
        "iters",
        "final_error",
        "contraction",
        "bound",
    ];
    let rows: Vec<[String; 6]> = summaries
        .iter()
        .map(|s| {
            [
                s.label.clone(),
                s.method.clone(),
                s.iterations.map_or("-".into(), |i| i.to_string()),
                format!("{:.3e}", s.final_error),
                s.mean_contraction.map_or("-".into(), |c| format!("{c:.4}")),
                match (s.bound_checks, s.bound_ok) {
                    (0, true) => "n/a".into(),
                    (_, true) => "pass".into(),
                    (_, false) => "FAIL".into(),
                },
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
