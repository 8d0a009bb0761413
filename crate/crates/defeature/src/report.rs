//! CSV and JSON emission of sweep reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::run::SweepReport;

pub const CSV_HEADER: &str = "eps,err_h1s,est,est_tilde,osc,eff,flux_residual,runtime_s";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// 17 significant digits; `nan` for missing values.
pub fn fmt_f64(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => String::from("nan"),
        Some(v) if v > 0.0 => String::from("inf"),
        Some(_) => String::from("-inf"),
        None => String::from("nan"),
    }
}

/// One row per ε; cases with several features get one row per feature
/// (error and effectivity `nan`) followed by the totals row.
pub fn to_csv(report: &SweepReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &report.cases {
        if c.features.len() > 1 {
            for f in &c.features {
                let row = [
                    fmt_f64(Some(c.eps)),
                    fmt_f64(None),
                    fmt_f64(Some(f.estimator)),
                    fmt_f64(Some(f.estimator_tilde)),
                    fmt_f64(Some(f.osc)),
                    fmt_f64(None),
                    fmt_f64(Some(f.flux_residual)),
                    fmt_f64(Some(c.runtime_s)),
                ];
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        let row = [
            fmt_f64(Some(c.eps)),
            fmt_f64(c.error),
            fmt_f64(Some(c.estimator)),
            fmt_f64(Some(c.estimator_tilde)),
            fmt_f64(Some(c.osc)),
            fmt_f64(c.effectivity),
            fmt_f64(Some(c.flux_residual)),
            fmt_f64(Some(c.runtime_s)),
        ];
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn to_json(report: &SweepReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<SweepReport> {
    Ok(serde_json::from_str(text)?)
}

/// Write `report` to `dir/<case id>.<ext>`; returns the path.
pub fn emit_report(report: &SweepReport, format: Format, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let path = dir.join(format!("{}.{}", report.case, format.extension()));
    let text = match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report)?,
    };
    std::fs::write(&path, text).map_err(HarnessError::io(&path))?;
    Ok(path)
}

/// Zero every runtime so that repeated runs write identical bytes.
pub fn strip_timing(report: &mut SweepReport) {
    report.cases.iter_mut().for_each(|c| c.runtime_s = 0.0);
}
