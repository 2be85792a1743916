//! Scalar functionals of states: entropies, the information budget under the
//! von Neumann and linear-entropy measures, concurrence and tangle, Bloch
//! vectors and the visibility/predictability ledgers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hermitian_eigen, kron, pauli_y, Axis, ComplexMatrix, LinalgError, Subsystem};
use crate::states::{DensityMatrix, PSD_FLOOR};

/// Eigenvalues smaller than this carry no entropy (`0 log 0 = 0`).
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// State eigenvalues below this are treated as exact zeros when forming the
/// Wootters matrix. Jacobi leaves ~1e-17 residue on null directions, and a
/// square root would blow that up to ~1e-9.
const CONCURRENCE_CUTOFF: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    VonNeumann,
    Linear,
}

impl Measure {
    pub fn label(self) -> &'static str {
        match self {
            Measure::VonNeumann => "vn",
            Measure::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vn" | "von_neumann" => Ok(Measure::VonNeumann),
            "linear" | "lin" => Ok(Measure::Linear),
            other => Err(format!("unknown measure `{other}` (expected vn or linear)")),
        }
    }
}

/// Split of the information of a two-qubit state into local and correlation
/// parts, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoBudget {
    pub i_a: f64,
    pub i_b: f64,
    pub i_local: f64,
    pub i_corr: f64,
    pub i_total: f64,
    pub measure: Measure,
}

impl InfoBudget {
    fn from_parts(i_a: f64, i_b: f64, i_total: f64, measure: Measure) -> Self {
        let i_local = i_a + i_b;
        Self {
            i_a,
            i_b,
            i_local,
            i_corr: i_total - i_local,
            i_total,
            measure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn component(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    /// `(𝟙 + x σx + y σy + z σz) / 2`
    pub fn to_matrix(&self) -> ComplexMatrix {
        let half = 0.5;
        ComplexMatrix::from_rows(vec![
            Complex64::new(half * (1.0 + self.z), 0.0),
            Complex64::new(half * self.x, -half * self.y),
            Complex64::new(half * self.x, half * self.y),
            Complex64::new(half * (1.0 - self.z), 0.0),
        ])
    }
}

/// Visibility, predictability and concurrence with the left-hand sides of the
/// duality and triality relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityLedger {
    pub visibility: f64,
    pub predictability: f64,
    pub concurrence: f64,
    pub lhs_duality: f64,
    pub lhs_triality: f64,
}

fn require_dim(rho: &DensityMatrix, dim: usize) -> Result<(), MeasureError> {
    if rho.dim() != dim {
        return Err(MeasureError::InvalidState(format!(
            "expected a {dim}-dimensional state, got dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Spectrum with eigenvalues in `[PSD_FLOOR, 0)` clamped to zero.
pub fn spectrum(rho: &DensityMatrix) -> Result<Vec<f64>, MeasureError> {
    let mut ev = hermitian_eigen(rho.matrix())?.eigenvalues;
    for x in ev.iter_mut() {
        if *x < PSD_FLOOR {
            return Err(MeasureError::InvalidState(format!(
                "eigenvalue {x:e} below the positivity floor"
            )));
        }
        *x = x.max(0.0);
    }
    Ok(ev)
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `S(ρ) = -Tr ρ log₂ ρ`
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(shannon_entropy(&spectrum(rho)?))
}

/// Von Neumann information budget: `I = log₂ d - S` for each part, with the
/// quantum mutual information as the correlation term.
pub fn info_budget_vn(rho: &DensityMatrix) -> Result<InfoBudget, MeasureError> {
    require_dim(rho, 4)?;
    let s_a = von_neumann_entropy(&rho.marginal(Subsystem::A)?)?;
    let s_b = von_neumann_entropy(&rho.marginal(Subsystem::B)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    Ok(InfoBudget::from_parts(
        1.0 - s_a,
        1.0 - s_b,
        2.0 - s_ab,
        Measure::VonNeumann,
    ))
}

/// `Tr ρ²`
pub fn purity(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    spectrum(rho)?;
    Ok(rho.matrix().trace_product(rho.matrix()).re)
}

/// Linear-entropy information: squared Bloch length for a qubit,
/// `(2/3)(4 Tr ρ² - 1)` for two qubits.
pub fn linear_information(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    match rho.dim() {
        2 => Ok(bloch(rho)?.norm_sqr()),
        4 => Ok(2.0 / 3.0 * (4.0 * purity(rho)? - 1.0)),
        d => Err(MeasureError::InvalidState(format!(
            "unsupported dimension {d}"
        ))),
    }
}

/// Information budget under the linear-entropy measure. The correlation term
/// can be negative.
pub fn info_budget_linear(rho: &DensityMatrix) -> Result<InfoBudget, MeasureError> {
    require_dim(rho, 4)?;
    let i_a = linear_information(&rho.marginal(Subsystem::A)?)?;
    let i_b = linear_information(&rho.marginal(Subsystem::B)?)?;
    let i_total = linear_information(rho)?;
    Ok(InfoBudget::from_parts(i_a, i_b, i_total, Measure::Linear))
}

pub fn info_budget(rho: &DensityMatrix, measure: Measure) -> Result<InfoBudget, MeasureError> {
    match measure {
        Measure::VonNeumann => info_budget_vn(rho),
        Measure::Linear => info_budget_linear(rho),
    }
}

fn spin_flip() -> ComplexMatrix {
    kron(&pauli_y(), &pauli_y()).expect("4x4 kron")
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
///
/// The λ are the singular values of `τ_ij = v_iᵀ (σy⊗σy) v_j` built from the
/// subnormalized eigenvectors `v_i = √p_i e_i` of ρ; their squares are the
/// eigenvalues of `ρ ρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    require_dim(rho, 4)?;
    let eig = hermitian_eigen(rho.matrix())?;
    if eig.eigenvalues[0] < PSD_FLOOR {
        return Err(MeasureError::InvalidState(format!(
            "eigenvalue {:e} below the positivity floor",
            eig.eigenvalues[0]
        )));
    }
    let vecs: Vec<Vec<Complex64>> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > CONCURRENCE_CUTOFF)
        .map(|k| {
            let w = eig.eigenvalues[k].sqrt();
            eig.eigenvectors
                .column(k)
                .into_iter()
                .map(|z| z * w)
                .collect()
        })
        .collect();
    concurrence_of_ensemble(&vecs)
}

/// Concurrence of `ρ = Σ v_i v_i†` given orthogonal subnormalized
/// eigenvectors `v_i` (at most four).
pub(crate) fn concurrence_of_ensemble(vecs: &[Vec<Complex64>]) -> Result<f64, MeasureError> {
    let yy = spin_flip();
    let n = vecs.len();
    let flipped: Vec<Vec<Complex64>> = vecs.iter().map(|v| yy.apply(v)).collect();
    let mut tau = ComplexMatrix::zeros(4);
    for i in 0..n {
        for j in 0..n {
            // v_i^T ỹ v_j: bilinear, no conjugation
            tau[(i, j)] = vecs[i].iter().zip(&flipped[j]).map(|(a, b)| a * b).sum();
        }
    }
    let gram = &tau * &tau.adjoint();
    let mut lambdas: Vec<f64> = hermitian_eigen(&gram.hermitian_part())?
        .eigenvalues
        .into_iter()
        .map(|m| m.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Tangle `C²`.
pub fn tangle(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    concurrence(rho).map(|c| c * c)
}

/// Pauli expectation values of a qubit state.
pub fn bloch(rho: &DensityMatrix) -> Result<BlochVector, MeasureError> {
    require_dim(rho, 2)?;
    let m = rho.matrix();
    let r = BlochVector {
        x: 2.0 * m[(0, 1)].re,
        y: -2.0 * m[(0, 1)].im,
        z: (m[(0, 0)] - m[(1, 1)]).re,
    };
    if r.norm_sqr() > 1.0 + 1e-9 {
        return Err(MeasureError::InvalidState(format!(
            "Bloch vector longer than one ({})",
            r.norm_sqr().sqrt()
        )));
    }
    Ok(r)
}

/// `(V, P)` relative to the mode basis `axis`: P is the Bloch component along
/// the axis, V the transverse length.
pub fn visibility_predictability(
    rho: &DensityMatrix,
    axis: Axis,
) -> Result<(f64, f64), MeasureError> {
    let r = bloch(rho)?;
    let along = r.component(axis);
    let transverse = (r.norm_sqr() - along * along).max(0.0).sqrt();
    Ok((transverse, along.abs()))
}

/// Duality and triality left-hand sides for one qubit of a two-qubit state,
/// with V and P measured in the z basis.
pub fn triality_ledger(
    rho: &DensityMatrix,
    which: Subsystem,
) -> Result<DualityLedger, MeasureError> {
    triality_ledger_in(rho, which, Axis::Z)
}

pub fn triality_ledger_in(
    rho: &DensityMatrix,
    which: Subsystem,
    axis: Axis,
) -> Result<DualityLedger, MeasureError> {
    require_dim(rho, 4)?;
    let (v, p) = visibility_predictability(&rho.marginal(which)?, axis)?;
    let c = concurrence(rho)?;
    let lhs_duality = v * v + p * p;
    Ok(DualityLedger {
        visibility: v,
        predictability: p,
        concurrence: c,
        lhs_duality,
        lhs_triality: lhs_duality + c * c,
    })
}
