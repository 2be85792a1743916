//! CSV tables and their JSON metadata sidecars.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serializes rows as CSV (header from the row type) to `out`, or stdout when
/// `out` is `None`.
pub fn write_csv<T: Serialize>(rows: &[T], out: Option<&Path>) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `out.csv` -> `out.csv.meta.json`
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes run metadata next to `out`. The content is a pure function of the
/// inputs (no timestamps) so repeated runs are byte-identical.
pub fn write_sidecar<M: Serialize>(out: &Path, meta: &M) -> Result<PathBuf, CliError> {
    let path = sidecar_path(out);
    let mut f = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut f, meta)?;
    writeln!(f)?;
    f.flush()?;
    Ok(path)
}
