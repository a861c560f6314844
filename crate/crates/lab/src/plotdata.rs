//! Plot-ready series extracted from results CSVs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{LabError, LabResult};
use crate::runner::read_csv;

/// One point of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub series: String,
    pub degree: usize,
    pub value: f64,
}

/// Series label of a results file: its stem when that ends in the config hash.
fn label(path: &Path, hash: &str) -> String {
    match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) if stem.ends_with(hash) => stem.to_owned(),
        _ => hash.to_owned(),
    }
}

/// Points of every functional (or only `kind`) in the inputs, keyed by functional.
pub fn collect(inputs: &[PathBuf], kind: Option<&str>) -> LabResult<BTreeMap<String, Vec<Point>>> {
    let mut out: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    for path in inputs {
        for row in read_csv(path)? {
            if kind.is_some_and(|k| k != row.functional) {
                continue;
            }
            out.entry(row.functional.clone()).or_default().push(Point {
                series: label(path, &row.config_hash),
                degree: row.degree,
                value: row.value,
            });
        }
    }
    if let Some(k) = kind {
        if !out.contains_key(k) {
            return Err(LabError::Schema(format!("no rows for functional `{k}`")));
        }
    }
    for points in out.values_mut() {
        points.sort_by(|a, b| (&a.series, a.degree).cmp(&(&b.series, b.degree)));
    }
    Ok(out)
}

/// Writes `<functional>.csv` (columns `series,L,value`) per functional into `dir`.
pub fn write(inputs: &[PathBuf], kind: Option<&str>, dir: &Path) -> LabResult<Vec<PathBuf>> {
    let data = collect(inputs, kind)?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (functional, points) in data {
        let path = dir.join(format!("{functional}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["series", "L", "value"])?;
        for p in points {
            w.write_record([p.series, p.degree.to_string(), p.value.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
