//! Optional on-disk chart cache, enabled by pointing `RNADS_CHART_CACHE` at a directory.

use std::fs;
use std::path::{Path, PathBuf};

use rnads_core::chart::CHART_FORMAT_VERSION;
use rnads_core::{ChartTolerances, MuChart, SpacetimeParams};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "RNADS_CHART_CACHE";

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Hex SHA-256 of everything that determines the chart's contents.
pub fn cache_key(params: &SpacetimeParams, samples: usize, tolerances: &ChartTolerances) -> String {
    let identity = serde_json::json!({
        "version": CHART_FORMAT_VERSION,
        "params": params,
        "samples": samples,
        "tolerances": tolerances,
    });
    hex::encode(Sha256::digest(identity.to_string().as_bytes()))
}

/// Build a chart, reusing a cached copy when one exists for the same inputs.
/// Cache trouble never fails the command: unreadable entries are rebuilt and
/// write failures only produce a warning.
pub fn load_or_build(params: &SpacetimeParams, samples: usize) -> rnads_core::Result<MuChart> {
    let tolerances = ChartTolerances::default();
    let Some(dir) = cache_dir() else {
        return MuChart::build(params, samples, tolerances);
    };
    let path = dir.join(format!("{}.json", cache_key(params, samples, &tolerances)));
    if let Some(chart) = read_entry(&path, params, samples) {
        return Ok(chart);
    }
    let chart = MuChart::build(params, samples, tolerances)?;
    if let Err(e) = write_entry(&dir, &path, &chart.to_json()) {
        eprintln!("warning: could not write chart cache {}: {e}", path.display());
    }
    Ok(chart)
}

fn read_entry(path: &Path, params: &SpacetimeParams, samples: usize) -> Option<MuChart> {
    let text = fs::read_to_string(path).ok()?;
    let chart = MuChart::from_json(&text).ok()?;
    (chart.params() == params && chart.samples() == samples).then_some(chart)
}

fn write_entry(dir: &Path, path: &Path, text: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    // Rename into place so concurrent readers never see a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
