//! Simulated tomography of a family member: ideal measures next to the Monte
//! Carlo mean and spread of their reconstructed values.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use infocomp::measures::{info_budget_vn, tangle};
use infocomp::states::make_state;
use infocomp::tomo::{error_bars, simulate_counts, write_counts_csv, Stat, TomoError};
use infocomp::Family;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{write_csv, write_sidecar, TOOL_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomoRow {
    pub measure: String,
    pub ideal: f64,
    pub mean: f64,
    pub std: f64,
    pub resamples: usize,
    pub shots: u64,
}

pub const TOMO_COLUMNS: [&str; 6] = ["measure", "ideal", "mean", "std", "resamples", "shots"];

#[derive(Debug, Clone, Copy)]
pub struct TomoOptions {
    pub family: Family,
    pub shots: u64,
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct TomoMeta<'a> {
    family: Family,
    shots: u64,
    resamples: usize,
    seed: u64,
    columns: &'a [&'a str],
    tool_version: &'a str,
}

/// One row per measure: tangle, i_a, i_b, i_corr, i_total.
pub fn tomo_rows(opts: &TomoOptions) -> Result<Vec<TomoRow>, CliError> {
    if opts.shots == 0 {
        return Err(TomoError::BadShots(0).into());
    }
    let rho = make_state(&opts.family)?;
    let budget = info_budget_vn(&rho)?;
    let bars = error_bars(&rho, opts.shots, opts.resamples, opts.seed)?;
    let entries: [(&str, f64, Stat); 5] = [
        ("tangle", tangle(&rho)?, bars.tangle),
        ("i_a", budget.i_a, bars.i_a),
        ("i_b", budget.i_b, bars.i_b),
        ("i_corr", budget.i_corr, bars.i_corr),
        ("i_total", budget.i_total, bars.i_total),
    ];
    Ok(entries
        .into_iter()
        .map(|(name, ideal, s)| TomoRow {
            measure: name.into(),
            ideal,
            mean: s.mean,
            std: s.std,
            resamples: bars.resamples,
            shots: opts.shots,
        })
        .collect())
}

/// Writes the measure table (stdout when `out` is `None`) and, if asked,
/// the count tables of the experiment simulated with `seed` itself.
pub fn write_tomo(
    opts: &TomoOptions,
    out: Option<&Path>,
    counts: Option<&Path>,
) -> Result<(), CliError> {
    let rows = tomo_rows(opts)?;
    write_csv(&rows, out)?;
    if let Some(path) = out {
        write_sidecar(
            path,
            &TomoMeta {
                family: opts.family,
                shots: opts.shots,
                resamples: opts.resamples,
                seed: opts.seed,
                columns: &TOMO_COLUMNS,
                tool_version: TOOL_VERSION,
            },
        )?;
    }
    if let Some(path) = counts {
        let records = simulate_counts(&make_state(&opts.family)?, opts.shots, opts.seed)?;
        write_counts_csv(&records, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}
