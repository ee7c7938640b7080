//! Fixed-format writers for the results table and the summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nonlocal_signaling::signaling::ScaledValue;

use crate::run::{Outcome, Row};
use crate::CliError;

pub const CSV_HEADER: &str = "ell,s2_local,s2_ell,s2_total,correction,oracle_value,oracle_error";
pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// 17 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Like [`format_number`], but values below the `f64` range keep their
/// decimal exponent instead of printing as zero.
pub fn format_scaled(v: ScaledValue) -> String {
    let plain = v.value();
    if v.log_scale == 0.0 || v.mantissa == 0.0 || (plain != 0.0 && plain.is_normal()) {
        return format_number(plain);
    }
    // ln|v| = k·ln 10 + rest, with ln 10 carried in two parts.
    const LN_10_LO: f64 = -2.170_756_223_382_249_4e-16;
    let ln_abs = v.ln_abs();
    let mut exponent = (ln_abs / std::f64::consts::LN_10).floor();
    let rest = (-exponent).mul_add(std::f64::consts::LN_10, ln_abs) - exponent * LN_10_LO;
    let mut digits = rest.exp();
    if digits >= 10.0 {
        digits /= 10.0;
        exponent += 1.0;
    } else if digits < 1.0 {
        digits *= 10.0;
        exponent -= 1.0;
    }
    format!("{:.16}e{}", v.mantissa.signum() * digits, exponent as i64)
}

fn csv_row(row: &Row) -> String {
    let (ov, oe) = match row.oracle {
        Some(o) => (format_number(o.value), format_number(o.error_estimate)),
        None => (String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{ov},{oe}",
        format_number(row.ell),
        format_number(row.s2_local),
        format_scaled(row.s2_ell),
        format_scaled(row.s2_total),
        format_scaled(row.correction),
    )
}

pub fn results_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", csv_row(row));
    }
    out
}

pub fn summary_json(outcome: &Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes both files into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(RESULTS_FILE);
    let json = dir.join(SUMMARY_FILE);
    fs::write(&csv, results_csv(&outcome.rows))?;
    fs::write(&json, summary_json(outcome))?;
    Ok((csv, json))
}
