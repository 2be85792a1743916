//! Data tables behind each figure: family sweeps, plus the maximal-tangle
//! frontier for the tangle/entropy plane.

use std::path::Path;

use infocomp::frontier::{trace_frontier, uniform_grid};
use infocomp::measures::info_budget_vn;
use infocomp::Measure;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{write_csv, write_sidecar, TOOL_VERSION};
use crate::sweep::{sweep, SweepFamily, SweepRecord, SweepSpec, SWEEP_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    /// Tangle vs entropy for every family, with the numerical frontier.
    Plane,
    /// Information budget of the pure Schmidt family.
    Pure,
    /// Werner and rank-2 MEMS budgets.
    #[value(name = "werner_mems")]
    WernerMems,
    /// Separable families: composite AS and S.
    Product,
    /// Linear-entropy budgets of the pure and AS1 families.
    Linear,
    /// Dephased-singlet family for several exponents, with Werner and MEMS.
    Dephased,
}

/// Exponents drawn for the dephased figure.
pub const DEPHASED_EXPONENTS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    pub grid: usize,
    pub seed: u64,
    pub restarts: usize,
    pub frontier_grid: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            grid: 101,
            seed: 0,
            restarts: infocomp::frontier::DEFAULT_RESTARTS,
            frontier_grid: 21,
        }
    }
}

/// Row of the `plane` table. `series` is a family tag or `frontier`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct PlaneRow {
    pub series: String,
    pub param: f64,
    pub entropy: f64,
    pub tangle: f64,
}

pub const PLANE_COLUMNS: [&str; 4] = ["series", "param", "entropy", "tangle"];

#[derive(Debug, Serialize)]
struct FigureMeta<'a> {
    figure: FigureId,
    grid: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frontier_grid: Option<usize>,
    columns: &'a [&'a str],
    tool_version: &'a str,
}

fn sweeps(
    parts: &[(SweepFamily, f64)],
    grid: usize,
    measure: Measure,
) -> Result<Vec<SweepRecord>, CliError> {
    let mut rows = Vec::new();
    for &(family, exponent) in parts {
        let mut spec = SweepSpec::new(family, grid, measure);
        spec.exponent = exponent;
        rows.extend(sweep(&spec)?);
    }
    Ok(rows)
}

/// Rows of a sweep-type figure (everything except `plane`).
pub fn figure_records(id: FigureId, grid: usize) -> Result<Vec<SweepRecord>, CliError> {
    use SweepFamily::*;
    let vn = Measure::VonNeumann;
    match id {
        FigureId::Pure => sweeps(&[(Pure, 1.0)], grid, vn),
        FigureId::WernerMems => sweeps(&[(Werner, 1.0), (Mems, 1.0)], grid, vn),
        FigureId::Product => sweeps(&[(As, 1.0), (S, 1.0)], grid, vn),
        FigureId::Linear => sweeps(&[(Pure, 1.0), (As1, 1.0)], grid, Measure::Linear),
        FigureId::Dephased => {
            let mut parts: Vec<(SweepFamily, f64)> =
                DEPHASED_EXPONENTS.iter().map(|&e| (D, e)).collect();
            parts.extend([(Werner, 1.0), (Mems, 1.0)]);
            sweeps(&parts, grid, vn)
        }
        FigureId::Plane => Err(CliError::Usage(
            "the plane figure has its own row type".into(),
        )),
    }
}

/// Rows of the tangle/entropy plane: each family, then the frontier.
pub fn plane_rows(opts: &FigureOptions) -> Result<Vec<PlaneRow>, CliError> {
    use SweepFamily::*;
    let mut rows: Vec<PlaneRow> = sweeps(
        &[(Pure, 1.0), (Werner, 1.0), (Mems, 1.0), (As, 1.0), (S, 1.0)],
        opts.grid,
        Measure::VonNeumann,
    )?
    .into_iter()
    .map(|r| PlaneRow {
        series: r.family,
        param: r.param,
        entropy: r.entropy_total,
        tangle: r.tangle,
    })
    .collect();
    let frontier = trace_frontier(&uniform_grid(opts.frontier_grid), opts.restarts, opts.seed)?;
    rows.extend(frontier.into_iter().map(|p| PlaneRow {
        series: "frontier".into(),
        param: p.entropy,
        entropy: p.entropy,
        tangle: p.max_tangle,
    }));
    Ok(rows)
}

/// Writes the figure table and its metadata sidecar.
pub fn write_figure(id: FigureId, opts: &FigureOptions, out: &Path) -> Result<(), CliError> {
    let meta = |columns: &'static [&'static str], frontier: bool| FigureMeta {
        figure: id,
        grid: opts.grid,
        seed: opts.seed,
        restarts: frontier.then_some(opts.restarts),
        frontier_grid: frontier.then_some(opts.frontier_grid),
        columns,
        tool_version: TOOL_VERSION,
    };
    match id {
        FigureId::Plane => {
            write_csv(&plane_rows(opts)?, Some(out))?;
            write_sidecar(out, &meta(&PLANE_COLUMNS, true))?;
        }
        _ => {
            write_csv(&figure_records(id, opts.grid)?, Some(out))?;
            write_sidecar(out, &meta(&SWEEP_COLUMNS, false))?;
        }
    }
    Ok(())
}

/// Row of the `frontier` table.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FrontierRow {
    pub entropy: f64,
    pub max_tangle: f64,
    pub i_corr: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub const FRONTIER_COLUMNS: [&str; 5] =
    ["entropy", "max_tangle", "i_corr", "converged", "iterations"];

/// Frontier on a uniform entropy grid over `[0, 2]`, with the correlation
/// information of each maximizing state.
pub fn frontier_rows(
    grid: usize,
    restarts: usize,
    seed: u64,
) -> Result<Vec<FrontierRow>, CliError> {
    if grid < 2 {
        return Err(CliError::Usage(format!(
            "grid must have at least 2 points, got {grid}"
        )));
    }
    trace_frontier(&uniform_grid(grid), restarts, seed)?
        .into_iter()
        .map(|p| {
            Ok(FrontierRow {
                entropy: p.entropy,
                max_tangle: p.max_tangle,
                i_corr: info_budget_vn(&p.argmax_state)?.i_corr,
                converged: p.converged,
                iterations: p.iterations,
            })
        })
        .collect()
}
