use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shorefit::metrics::is_iso_date;

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 5] = ["date", "vv_path", "vh_path", "dem_path", "aoi_path"];

/// One scene of a batch run. Relative paths are resolved against the
/// manifest's directory when loading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub date: String,
    pub vv_path: PathBuf,
    pub vh_path: PathBuf,
    pub dem_path: PathBuf,
    pub aoi_path: PathBuf,
}

impl ManifestRow {
    fn resolve(mut self, dir: &Path) -> Self {
        for p in [
            &mut self.vv_path,
            &mut self.vh_path,
            &mut self.dem_path,
            &mut self.aoi_path,
        ] {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        self
    }
}

pub fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRow>> {
    let fail = |msg: String| CliError::runtime("manifest", format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let header = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(fail(format!(
            "expected header {}, found {}",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut rows = Vec::new();
    for record in reader.deserialize::<ManifestRow>() {
        let row = record.map_err(|e| fail(e.to_string()))?;
        if !is_iso_date(&row.date) {
            return Err(fail(format!("'{}' is not an ISO-8601 date", row.date)));
        }
        rows.push(row.resolve(dir));
    }
    let mut dates: Vec<&str> = rows.iter().map(|r| r.date.as_str()).collect();
    dates.sort_unstable();
    if let Some(w) = dates.windows(2).find(|w| w[0] == w[1]) {
        return Err(fail(format!("duplicate date {}", w[0])));
    }
    Ok(rows)
}

/// Appends `row` to the manifest at `path`, writing the header first if the
/// file is new. Paths are written as given.
pub fn append_row(path: &Path, row: &ManifestRow) -> CliResult<()> {
    let fail = |msg: String| CliError::runtime("manifest", format!("{}: {msg}", path.display()));
    let exists = path.exists();
    if exists && read_manifest(path)?.iter().any(|r| r.date == row.date) {
        return Err(fail(format!("date {} is already listed", row.date)));
    }
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| fail(e.to_string()))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(!exists)
        .from_writer(file);
    writer.serialize(row).map_err(|e| fail(e.to_string()))?;
    writer.flush().map_err(|e| fail(e.to_string()))
}
