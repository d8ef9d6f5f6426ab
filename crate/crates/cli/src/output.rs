//! Row schema and serializers shared by every subcommand.
//!
//! One schema covers all ensemble-style runs; CSV uses RFC 4180 quoting via
//! the `csv` crate, JSON is a single top-level array. Output is byte-stable
//! for a fixed configuration once the timestamp header and per-trial wall
//! times are suppressed with `--no-timestamp`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use spb_core::lab::AnalysisRecord;

/// Flattened analysis record plus trial bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub trial: u64,
    pub seed: u64,
    pub dim: usize,
    pub d: f64,
    pub vnorm: f64,
    pub x: f64,
    pub theta: f64,
    pub m_star: f64,
    pub m_ms: f64,
    pub m_kmm: Option<f64>,
    pub sin2_lhs: f64,
    pub sin2_rhs: f64,
    pub pass_mstar: bool,
    pub pass_ms: bool,
    pub pass_kmm: Option<bool>,
    pub pass_sin2_apriori: bool,
    pub pass_sin2_posteriori: bool,
    /// Projection-path certification; set only by the `path` subcommand.
    pub pass_path: Option<bool>,
    pub pass_all: bool,
    pub wall_ms: f64,
}

impl ResultRow {
    pub fn from_record(
        trial: u64,
        seed: u64,
        record: &AnalysisRecord<f64>,
        pass_path: Option<bool>,
        wall_ms: f64,
    ) -> Self {
        ResultRow {
            trial,
            seed,
            dim: record.dim,
            d: record.d,
            vnorm: record.vnorm,
            x: record.x,
            theta: record.theta,
            m_star: record.bound_mstar,
            m_ms: record.bound_ms,
            m_kmm: record.bound_kmm,
            sin2_lhs: record.sin2_lhs,
            sin2_rhs: record.sin2_rhs,
            pass_mstar: record.pass_mstar,
            pass_ms: record.pass_ms,
            pass_kmm: record.pass_kmm,
            pass_sin2_apriori: record.pass_sin2_apriori,
            pass_sin2_posteriori: record.pass_sin2_posteriori,
            pass_path,
            pass_all: record.pass_all() && pass_path.unwrap_or(true),
            wall_ms,
        }
    }
}

/// One point of the bound-function table (plot-ready grid).
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub m_star: f64,
    pub m_ms: f64,
    /// Empty beyond its domain end.
    pub m_kmm: Option<f64>,
    /// The same three values scaled by `2/pi`.
    pub scaled_m_star: f64,
    pub scaled_m_ms: f64,
    pub scaled_m_kmm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn serialize_rows<S: Serialize>(
    rows: &[S],
    format: Format,
    header_comment: Option<&str>,
) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            if let Some(comment) = header_comment {
                writeln!(out, "# {comment}")?;
            }
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer.serialize(row)?;
            }
            Ok(writer.into_inner()?)
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Resolves an output path against the `SPB_OUT_DIR` override: relative
/// paths land inside the override directory when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os("SPB_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to the resolved path, or to stdout when no path is given.
pub fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => {
            let resolved = resolve_output(path);
            if let Some(parent) = resolved.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            fs::write(&resolved, bytes).with_context(|| format!("writing {}", resolved.display()))
        }
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// Directory for violation fixtures: the override if set, else the output
/// file's directory, else the working directory.
pub fn fixture_dir(output: &Option<PathBuf>) -> PathBuf {
    if let Some(dir) = std::env::var_os("SPB_OUT_DIR") {
        return PathBuf::from(dir);
    }
    output
        .as_ref()
        .and_then(|p| p.parent().map(Path::to_path_buf))
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."))
}
