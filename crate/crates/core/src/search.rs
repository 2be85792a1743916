//! One-dimensional root finding on family parameters: locate the member of a
//! family with a prescribed total entropy, and the zero-tangle point of the
//! dephased-singlet family.

use serde::Serialize;
use thiserror::Error;

use crate::measures::{info_budget_vn, tangle, von_neumann_entropy, MeasureError};
use crate::states::{make_state, Family, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("target {target} not bracketed: f({lo}) and f({hi}) have the same sign")]
    NotBracketed { target: f64, lo: f64, hi: f64 },
    #[error("no dephased state with tangle <= {0} found at the requested entropy")]
    NotFound(f64),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Bisection for `f(x) = 0` on `[lo, hi]`; the endpoint values must differ in
/// sign. Stops when the bracket is narrower than `xtol`.
pub fn bisect<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Result<Option<f64>, E> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// The member of `family` (varying its primary parameter over the full
/// declared range) whose von Neumann entropy equals `target`.
pub fn param_at_entropy(family: Family, target: f64) -> Result<Family, SearchError> {
    let (lo, hi) = family.param_range();
    let entropy_gap = |x: f64| -> Result<f64, SearchError> {
        let rho = make_state(&family.with_param(x))?;
        Ok(von_neumann_entropy(&rho)? - target)
    };
    bisect(entropy_gap, lo, hi, 1e-15)?
        .map(|x| family.with_param(x))
        .ok_or(SearchError::NotBracketed { target, lo, hi })
}

/// A point of the dephased-singlet family together with its measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DephasedPoint {
    pub gamma: f64,
    pub exponent: f64,
    pub entropy: f64,
    pub tangle: f64,
    pub i_corr: f64,
}

fn dephased(gamma: f64, exponent: f64) -> Result<crate::states::DensityMatrix, StateError> {
    make_state(&Family::Dephased { gamma, exponent })
}

/// Exponent (searched in log space) that puts the dephased state at `gamma`
/// on the requested entropy. Entropy decreases monotonically in the exponent.
pub fn dephased_exponent_at_entropy(gamma: f64, target: f64) -> Result<Option<f64>, SearchError> {
    let gap = |log_e: f64| -> Result<f64, SearchError> {
        let rho = dephased(gamma, 10f64.powf(log_e))?;
        Ok(von_neumann_entropy(&rho)? - target)
    };
    Ok(bisect(gap, -12.0, 6.0, 1e-13)?.map(|u| 10f64.powf(u)))
}

/// Walks `gamma` down a logarithmic ladder, solving for the exponent that
/// fixes the entropy, and returns the first point whose tangle is at most
/// `max_tangle`.
pub fn dephased_low_tangle_point(
    target: f64,
    max_tangle: f64,
) -> Result<DephasedPoint, SearchError> {
    for k in 2..=48 {
        let gamma = 10f64.powf(-(k as f64) / 4.0);
        let Some(exponent) = dephased_exponent_at_entropy(gamma, target)? else {
            continue;
        };
        let rho = dephased(gamma, exponent)?;
        let t = tangle(&rho)?;
        if t <= max_tangle {
            return Ok(DephasedPoint {
                gamma,
                exponent,
                entropy: von_neumann_entropy(&rho)?,
                tangle: t,
                i_corr: info_budget_vn(&rho)?.i_corr,
            });
        }
    }
    Err(SearchError::NotFound(max_tangle))
}
