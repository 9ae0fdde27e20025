//! Result serialization.
//!
//! CSV tables carry a header row and print floating-point values with nine
//! significant digits. Every result file gets a `<out>.meta.json` sidecar with
//! the resolved configuration; gain-region CSVs additionally get a
//! `<out>.boundary.csv` with the analytic region boundaries. All files are
//! written to a temporary name and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ConfigFile, OutputFormat, RunConfig};
use crate::experiments::{AggregateResult, ResultTable};
use crate::{Error, Result};

/// Formats `x` with nine significant digits, like C's `%.9g`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_header(table: &ResultTable) -> &'static str {
    match table {
        ResultTable::BeamPattern { .. } => "theta_deg,n_active,response_db",
        ResultTable::GainRegion { .. } => "abs_psi12,alpha12_db,gain_bps_hz,condition",
        ResultTable::NomaProbability { .. } => "n_bs,policy,probability,std_err,trials",
        ResultTable::AvgSumRate { .. } => "n_bs,scheme,mean_rate_bps_hz,std_err,trials",
    }
}

/// Main CSV table of a result.
pub fn render_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    out.push_str(csv_header(table));
    out.push('\n');
    // writeln! into a String cannot fail
    match table {
        ResultTable::BeamPattern { rows } => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_sig9(r.theta_deg),
                    r.n_active,
                    fmt_sig9(r.response_db)
                );
            }
        }
        ResultTable::GainRegion { cells, .. } => {
            for c in cells {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_sig9(c.abs_psi12),
                    fmt_sig9(c.alpha12_db),
                    fmt_sig9(c.gain_bps_hz),
                    u8::from(c.condition)
                );
            }
        }
        ResultTable::NomaProbability { rows } => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n_bs,
                    r.policy,
                    fmt_sig9(r.probability),
                    fmt_sig9(r.std_err),
                    r.trials
                );
            }
        }
        ResultTable::AvgSumRate { rows } => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n_bs,
                    r.scheme.as_str(),
                    fmt_sig9(r.mean_rate_bps_hz),
                    fmt_sig9(r.std_err),
                    r.trials
                );
            }
        }
    }
    out
}

/// Boundary curves of a gain-region result, if any.
pub fn render_boundary_csv(table: &ResultTable) -> Option<String> {
    let ResultTable::GainRegion { boundary, .. } = table else {
        return None;
    };
    let mut out = String::from("curve,abs_psi12,alpha12_db\n");
    for b in boundary {
        let _ = writeln!(
            out,
            "{},{},{}",
            b.curve.as_str(),
            fmt_sig9(b.abs_psi12),
            fmt_sig9(b.alpha12_db)
        );
    }
    Some(out)
}

#[derive(Serialize)]
struct Meta<'a> {
    experiment: &'a str,
    master_seed: u64,
    format: OutputFormat,
    config: ConfigFile,
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn meta_path(output: &Path) -> PathBuf {
    sidecar(output, ".meta.json")
}

pub fn boundary_path(output: &Path) -> PathBuf {
    sidecar(output, ".boundary.csv")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = sidecar(path, ".tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn render_meta(result: &AggregateResult, format: OutputFormat) -> Result<String> {
    let meta = Meta {
        experiment: result.spec.kind.as_str(),
        master_seed: result.spec.master_seed,
        format,
        config: ConfigFile::from_spec(&result.spec),
    };
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    Ok(text)
}

/// Writes the result table, its sidecars and the resolved config.
pub fn write_results(result: &AggregateResult, config: &RunConfig) -> Result<()> {
    let path = &config.output_path;
    match config.format {
        OutputFormat::Csv => {
            write_atomic(path, &render_csv(&result.table))?;
            if let Some(boundary) = render_boundary_csv(&result.table) {
                write_atomic(&boundary_path(path), &boundary)?;
            }
        }
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(result)?;
            text.push('\n');
            write_atomic(path, &text)?;
        }
    }
    write_atomic(&meta_path(path), &render_meta(result, config.format)?)
}
