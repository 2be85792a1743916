//! Parameter sweeps over the state families, one record per grid point.

use std::str::FromStr;

use infocomp::linalg::Subsystem;
use infocomp::measures::{info_budget, tangle, triality_ledger, von_neumann_entropy};
use infocomp::states::{make_state, DensityMatrix};
use infocomp::{Family, Measure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Family selector for sweeps. `As` chains the two asymmetric stages so the
/// total entropy runs from 0 to 2 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepFamily {
    Pure,
    Werner,
    Mems,
    As1,
    As2,
    As,
    S,
    D,
}

impl FromStr for SweepFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

impl SweepFamily {
    fn template(self, exponent: f64) -> Option<Family> {
        Some(match self {
            SweepFamily::Pure => Family::Pure { alpha: 0.0 },
            SweepFamily::Werner => Family::Werner { p: 0.0 },
            SweepFamily::Mems => Family::Mems { p: 1.0 },
            SweepFamily::As1 => Family::As1 { p: 0.0 },
            SweepFamily::As2 => Family::As2 { q: 0.0 },
            SweepFamily::S => Family::Separable { p: 0.0 },
            SweepFamily::D => Family::Dephased {
                gamma: 0.0,
                exponent,
            },
            SweepFamily::As => return None,
        })
    }
}

/// What to sweep and how finely.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub family: SweepFamily,
    /// Parameter range; defaults to the family's full declared range
    /// (`[0, 2]` stage parameter for the composite AS sweep).
    pub from: Option<f64>,
    pub to: Option<f64>,
    /// Exponent of the dephased family.
    pub exponent: f64,
    pub grid: usize,
    pub measure: Measure,
}

impl SweepSpec {
    pub fn new(family: SweepFamily, grid: usize, measure: Measure) -> Self {
        Self {
            family,
            from: None,
            to: None,
            exponent: 1.0,
            grid,
            measure,
        }
    }
}

/// One row of a sweep. All measures come from a single evaluation of one
/// state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    pub param: f64,
    pub exponent: Option<f64>,
    pub entropy_total: f64,
    pub tangle: f64,
    pub i_a: f64,
    pub i_b: f64,
    pub i_local: f64,
    pub i_corr: f64,
    pub i_total: f64,
    pub measure: String,
    pub lhs_duality_a: f64,
    pub lhs_triality_a: f64,
}

pub const SWEEP_COLUMNS: [&str; 13] = [
    "family",
    "param",
    "exponent",
    "entropy_total",
    "tangle",
    "i_a",
    "i_b",
    "i_local",
    "i_corr",
    "i_total",
    "measure",
    "lhs_duality_a",
    "lhs_triality_a",
];

/// Evaluates every measure of one family member.
pub fn record_for(family: &Family, measure: Measure) -> Result<SweepRecord, CliError> {
    let rho = make_state(family)?;
    record_for_state(family, &rho, measure)
}

pub fn record_for_state(
    family: &Family,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<SweepRecord, CliError> {
    let budget = info_budget(rho, measure)?;
    let ledger = triality_ledger(rho, Subsystem::A)?;
    Ok(SweepRecord {
        family: family.tag().to_string(),
        param: family.param(),
        exponent: family.secondary(),
        entropy_total: von_neumann_entropy(rho)?,
        tangle: tangle(rho)?,
        i_a: budget.i_a,
        i_b: budget.i_b,
        i_local: budget.i_local,
        i_corr: budget.i_corr,
        i_total: budget.i_total,
        measure: measure.label().to_string(),
        lhs_duality_a: ledger.lhs_duality,
        lhs_triality_a: ledger.lhs_triality,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Family members along the sweep, in parameter order.
pub fn sweep_members(spec: &SweepSpec) -> Result<Vec<Family>, CliError> {
    if spec.grid < 2 {
        return Err(CliError::Usage(format!(
            "grid must have at least 2 points, got {}",
            spec.grid
        )));
    }
    match spec.family.template(spec.exponent) {
        Some(template) => {
            let (lo, hi) = template.param_range();
            let from = spec.from.unwrap_or(lo);
            let to = spec.to.unwrap_or(hi);
            Ok(linspace(from, to, spec.grid)
                .into_iter()
                .map(|x| template.with_param(x))
                .collect())
        }
        None => {
            // stage parameter t: AS1 with p = 1 - t, then AS2 with q = 2 - t
            let from = spec.from.unwrap_or(0.0);
            let to = spec.to.unwrap_or(2.0);
            linspace(from, to, spec.grid)
                .into_iter()
                .map(|t| {
                    if !(0.0..=2.0).contains(&t) {
                        Err(CliError::Usage(format!(
                            "composite AS stage parameter {t} outside [0, 2]"
                        )))
                    } else if t <= 1.0 {
                        Ok(Family::As1 { p: 1.0 - t })
                    } else {
                        Ok(Family::As2 { q: 2.0 - t })
                    }
                })
                .collect()
        }
    }
}

/// Evaluates the sweep. Grid points run in parallel; output order follows the
/// parameter grid.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, CliError> {
    let members = sweep_members(spec)?;
    // range errors surface before any work is spent
    for m in &members {
        make_state(m)?;
    }
    members
        .par_iter()
        .map(|m| record_for(m, spec.measure))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let spec = SweepSpec::new(SweepFamily::Pure, 5, Measure::VonNeumann);
        let m = sweep_members(&spec).unwrap();
        assert_eq!(m.first().unwrap().param(), 0.0);
        assert_eq!(m.last().unwrap().param(), std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn composite_as_stages() {
        let spec = SweepSpec::new(SweepFamily::As, 5, Measure::VonNeumann);
        let tags: Vec<_> = sweep_members(&spec)
            .unwrap()
            .iter()
            .map(|f| f.tag())
            .collect();
        assert_eq!(tags, ["as1", "as1", "as1", "as2", "as2"]);
    }

    #[test]
    fn short_grid_rejected() {
        let spec = SweepSpec::new(SweepFamily::Werner, 1, Measure::VonNeumann);
        assert!(matches!(sweep(&spec), Err(CliError::Usage(_))));
    }

    #[test]
    fn out_of_range_rejected() {
        let mut spec = SweepSpec::new(SweepFamily::Mems, 3, Measure::VonNeumann);
        spec.from = Some(0.5);
        assert!(matches!(sweep(&spec), Err(CliError::State(_))));
    }
}
