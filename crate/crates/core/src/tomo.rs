//! Simulated two-qubit tomography: Poissonian counts on the nine joint Pauli
//! settings, linear inversion, projection onto the closest density matrix,
//! and Monte Carlo error bars for the derived measures.

use std::collections::BTreeMap;
use std::io;

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hermitian_eigen, kron, Axis, ComplexMatrix, LinalgError, Subsystem};
use crate::measures::{info_budget_vn, tangle, MeasureError};
use crate::states::{prng, DensityMatrix, Prng, StateError};

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("shots must be at least 1, got {0}")]
    BadShots(u64),
    #[error("need at least 2 resamples, got {0}")]
    BadResamples(usize),
    #[error("missing measurement settings: {0}")]
    MissingSettings(String),
    #[error("setting {0} recorded no counts")]
    EmptySetting(String),
    #[error("count table: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Counts for one joint setting. Outcome order is `00, 01, 10, 11`, where 0 is
/// the +1 eigenvalue of the measured Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub setting: (Axis, Axis),
    pub counts: [u64; 4],
    pub shots: u64,
}

impl MeasurementRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn label(&self) -> String {
        format!("{}{}", self.setting.0.label(), self.setting.1.label())
    }
}

/// The nine settings in row-major `(a, b)` order.
pub fn settings() -> impl Iterator<Item = (Axis, Axis)> {
    Axis::ALL
        .into_iter()
        .flat_map(|a| Axis::ALL.into_iter().map(move |b| (a, b)))
}

fn projector(axis: Axis, outcome: usize) -> ComplexMatrix {
    let sign = if outcome == 0 { 0.5 } else { -0.5 };
    &ComplexMatrix::identity(2).scale(0.5) + &axis.pauli().scale(sign)
}

/// Born-rule probabilities of the four outcomes of setting `(a, b)`.
pub fn outcome_probabilities(rho: &DensityMatrix, a: Axis, b: Axis) -> [f64; 4] {
    std::array::from_fn(|k| {
        let p = kron(&projector(a, k >> 1), &projector(b, k & 1)).expect("4x4 kron");
        rho.matrix().trace_product(&p).re.max(0.0)
    })
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<(), TomoError> {
    if rho.dim() != 4 {
        return Err(LinalgError::BadDimension {
            expected: 4,
            got: rho.dim(),
        }
        .into());
    }
    Ok(())
}

/// Poisson-distributed counts with mean `shots × probability` for each outcome
/// of each of the nine settings.
pub fn simulate_counts(
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>, TomoError> {
    simulate_counts_with(rho, shots, &mut prng(seed))
}

pub fn simulate_counts_with(
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut Prng,
) -> Result<Vec<MeasurementRecord>, TomoError> {
    if shots == 0 {
        return Err(TomoError::BadShots(shots));
    }
    check_two_qubit(rho)?;
    Ok(settings()
        .map(|(a, b)| {
            let probs = outcome_probabilities(rho, a, b);
            let counts = probs.map(|p| {
                let mean = shots as f64 * p;
                if mean > 0.0 {
                    Poisson::new(mean).expect("positive mean").sample(rng) as u64
                } else {
                    0
                }
            });
            MeasurementRecord {
                setting: (a, b),
                counts,
                shots,
            }
        })
        .collect())
}

/// Noise-free records: each count is `shots × probability` rounded to the
/// nearest integer.
pub fn expected_counts(
    rho: &DensityMatrix,
    shots: u64,
) -> Result<Vec<MeasurementRecord>, TomoError> {
    if shots == 0 {
        return Err(TomoError::BadShots(shots));
    }
    check_two_qubit(rho)?;
    Ok(settings()
        .map(|(a, b)| MeasurementRecord {
            setting: (a, b),
            counts: outcome_probabilities(rho, a, b).map(|p| (shots as f64 * p).round() as u64),
            shots,
        })
        .collect())
}

/// Counts pooled per setting, with every one of the nine settings present.
fn pool(records: &[MeasurementRecord]) -> Result<BTreeMap<(usize, usize), [u64; 4]>, TomoError> {
    let mut table: BTreeMap<(usize, usize), [u64; 4]> = BTreeMap::new();
    for r in records {
        let entry = table
            .entry((r.setting.0.index(), r.setting.1.index()))
            .or_insert([0; 4]);
        for (total, n) in entry.iter_mut().zip(r.counts) {
            *total += n;
        }
    }
    let missing: Vec<String> = settings()
        .filter(|(a, b)| !table.contains_key(&(a.index(), b.index())))
        .map(|(a, b)| format!("{}{}", a.label(), b.label()))
        .collect();
    if !missing.is_empty() {
        return Err(TomoError::MissingSettings(missing.join(",")));
    }
    if let Some(r) = records.iter().find(|r| {
        table[&(r.setting.0.index(), r.setting.1.index())]
            .iter()
            .sum::<u64>()
            == 0
    }) {
        return Err(TomoError::EmptySetting(r.label()));
    }
    Ok(table)
}

const SIGN: [f64; 2] = [1.0, -1.0];

/// Local Bloch vector of one qubit, pooling all settings that measure it along
/// each axis.
fn local_bloch(table: &BTreeMap<(usize, usize), [u64; 4]>, which: Subsystem) -> [f64; 3] {
    std::array::from_fn(|axis| {
        let mut signed = 0.0;
        let mut total = 0.0;
        for (&(a, b), n) in table {
            let mine = match which {
                Subsystem::A => a,
                Subsystem::B => b,
            };
            if mine != axis {
                continue;
            }
            for (k, &count) in n.iter().enumerate() {
                let bit = match which {
                    Subsystem::A => k >> 1,
                    Subsystem::B => k & 1,
                };
                signed += SIGN[bit] * count as f64;
                total += count as f64;
            }
        }
        signed / total
    })
}

/// Unconstrained estimate `¼ Σ t_μν σ_μ⊗σ_ν` from empirical correlators. May
/// have negative eigenvalues.
pub fn linear_inversion(records: &[MeasurementRecord]) -> Result<ComplexMatrix, TomoError> {
    let table = pool(records)?;
    let ra = local_bloch(&table, Subsystem::A);
    let rb = local_bloch(&table, Subsystem::B);
    let id = ComplexMatrix::identity(2);
    let mut m = ComplexMatrix::identity(4);
    for axis in Axis::ALL {
        let i = axis.index();
        m = &m + &kron(&axis.pauli(), &id)?.scale(ra[i]);
        m = &m + &kron(&id, &axis.pauli())?.scale(rb[i]);
    }
    for (&(a, b), n) in &table {
        let total: u64 = n.iter().sum();
        let corr: f64 = n
            .iter()
            .enumerate()
            .map(|(k, &c)| SIGN[k >> 1] * SIGN[k & 1] * c as f64)
            .sum::<f64>()
            / total as f64;
        m = &m + &kron(&Axis::ALL[a].pauli(), &Axis::ALL[b].pauli())?.scale(corr);
    }
    Ok(m.scale(0.25))
}

/// Euclidean projection of a vector onto the probability simplex.
fn project_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}

/// Closest unit-trace positive semidefinite matrix in Frobenius norm: the
/// eigenvalues are projected onto the simplex, eigenvectors kept.
pub fn project_to_state(m: &ComplexMatrix) -> Result<DensityMatrix, TomoError> {
    let eig = hermitian_eigen(&m.hermitian_part())?;
    let clipped = project_simplex(&eig.eigenvalues);
    let n = clipped.len();
    let v = &eig.eigenvectors;
    let out = ComplexMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * v[(j, k)].conj() * clipped[k])
            .sum::<Complex64>()
    });
    Ok(DensityMatrix::new(out)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    pub fidelity_to_truth: Option<f64>,
    pub iterations: usize,
}

/// Linear inversion followed by projection onto the state space.
pub fn reconstruct(records: &[MeasurementRecord]) -> Result<ReconstructionResult, TomoError> {
    let raw = linear_inversion(records)?;
    Ok(ReconstructionResult {
        rho_hat: project_to_state(&raw)?,
        fidelity_to_truth: None,
        iterations: 1,
    })
}

/// [`reconstruct`] with the fidelity to a known true state filled in.
pub fn reconstruct_against(
    records: &[MeasurementRecord],
    truth: &DensityMatrix,
) -> Result<ReconstructionResult, TomoError> {
    let mut r = reconstruct(records)?;
    r.fidelity_to_truth = Some(fidelity(truth, &r.rho_hat)?);
    Ok(r)
}

/// Single-qubit state of `which` estimated from the same count tables.
pub fn reconstruct_marginal(
    records: &[MeasurementRecord],
    which: Subsystem,
) -> Result<DensityMatrix, TomoError> {
    let table = pool(records)?;
    let r = local_bloch(&table, which);
    let mut m = ComplexMatrix::identity(2);
    for axis in Axis::ALL {
        m = &m + &axis.pauli().scale(r[axis.index()]);
    }
    project_to_state(&m.scale(0.5))
}

/// Eigenvalues below this are null directions; their square roots would
/// otherwise turn round-off into ~1e-9 errors.
const NULL_EIGENVALUE: f64 = 1e-14;

fn root(x: f64) -> f64 {
    if x > NULL_EIGENVALUE {
        x.sqrt()
    } else {
        0.0
    }
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, TomoError> {
    let sqrt_rho = hermitian_eigen(rho.matrix())?.map(root);
    let inner = &(&sqrt_rho * sigma.matrix()) * &sqrt_rho;
    let root_trace: f64 = hermitian_eigen(&inner.hermitian_part())?
        .eigenvalues
        .iter()
        .map(|&x| root(x))
        .sum();
    Ok((root_trace * root_trace).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Mean and sample standard deviation.
    pub fn of(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Stat {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBars {
    pub tangle: Stat,
    pub i_a: Stat,
    pub i_b: Stat,
    pub i_corr: Stat,
    pub i_total: Stat,
    pub resamples: usize,
}

/// Measures of one simulated experiment: `[tangle, i_a, i_b, i_corr, i_total]`.
fn one_resample(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<[f64; 5], TomoError> {
    let records = simulate_counts(rho, shots, seed)?;
    let rho_hat = reconstruct(&records)?.rho_hat;
    let b = info_budget_vn(&rho_hat)?;
    Ok([tangle(&rho_hat)?, b.i_a, b.i_b, b.i_corr, b.i_total])
}

/// Per-resample seeds, fixed by `seed` and the resample index.
pub fn resample_seeds(seed: u64, resamples: usize) -> Vec<u64> {
    let mut rng = prng(seed);
    (0..resamples).map(|_| rng.next_u64()).collect()
}

/// Monte Carlo spread of the reconstructed measures over repeated simulated
/// experiments.
pub fn error_bars(
    rho: &DensityMatrix,
    shots: u64,
    resamples: usize,
    seed: u64,
) -> Result<ErrorBars, TomoError> {
    if resamples < 2 {
        return Err(TomoError::BadResamples(resamples));
    }
    if shots == 0 {
        return Err(TomoError::BadShots(shots));
    }
    check_two_qubit(rho)?;
    let rows = resample_seeds(seed, resamples)
        .into_par_iter()
        .map(|s| one_resample(rho, shots, s))
        .collect::<Result<Vec<_>, _>>()?;
    let column = |k: usize| Stat::of(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    Ok(ErrorBars {
        tangle: column(0),
        i_a: column(1),
        i_b: column(2),
        i_corr: column(3),
        i_total: column(4),
        resamples,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRow {
    setting_a: Axis,
    setting_b: Axis,
    n00: u64,
    n01: u64,
    n10: u64,
    n11: u64,
}

/// Writes count tables as CSV with header
/// `setting_a,setting_b,n00,n01,n10,n11`.
pub fn write_counts_csv<W: io::Write>(
    records: &[MeasurementRecord],
    out: W,
) -> Result<(), TomoError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CountRow {
            setting_a: r.setting.0,
            setting_b: r.setting.1,
            n00: r.counts[0],
            n01: r.counts[1],
            n10: r.counts[2],
            n11: r.counts[3],
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a count table. The shot number is not stored, so each record's
/// `shots` is set to its row total.
pub fn read_counts_csv<R: io::Read>(input: R) -> Result<Vec<MeasurementRecord>, TomoError> {
    let mut rdr = csv::Reader::from_reader(input);
    rdr.deserialize::<CountRow>()
        .map(|row| {
            let row = row?;
            let counts = [row.n00, row.n01, row.n10, row.n11];
            Ok(MeasurementRecord {
                setting: (row.setting_a, row.setting_b),
                counts,
                shots: counts.iter().sum(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, phi_plus, Family};
    use approx::assert_abs_diff_eq;

    #[test]
    fn probabilities_sum_to_one() {
        let rho = crate::states::sample_random_state(4, 2).unwrap();
        for (a, b) in settings() {
            let p = outcome_probabilities(&rho, a, b);
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bell_zz_frequencies() {
        let rho = DensityMatrix::pure(&phi_plus()).unwrap();
        let recs = simulate_counts(&rho, 1_000_000, 3).unwrap();
        let zz = recs
            .iter()
            .find(|r| r.setting == (Axis::Z, Axis::Z))
            .unwrap();
        let total = zz.total() as f64;
        let f: Vec<f64> = zz.counts.iter().map(|&c| c as f64 / total).collect();
        assert!((f[0] - 0.5).abs() < 0.003);
        assert!((f[3] - 0.5).abs() < 0.003);
        assert!(f[1] < 0.003 && f[2] < 0.003);
    }

    #[test]
    fn isotropic_counts() {
        let shots = 40_000u64;
        let recs = simulate_counts(&DensityMatrix::maximally_mixed(4), shots, 8).unwrap();
        // 5σ band for a Poisson count with mean shots/4
        let mean = shots as f64 / 4.0;
        for r in &recs {
            for &c in &r.counts {
                assert!((c as f64 - mean).abs() < 5.0 * mean.sqrt(), "{r:?}");
            }
        }
    }

    #[test]
    fn counts_deterministic_in_seed() {
        let rho = make_state(&Family::Werner { p: 0.4 }).unwrap();
        assert_eq!(
            simulate_counts(&rho, 500, 77).unwrap(),
            simulate_counts(&rho, 500, 77).unwrap()
        );
        assert_ne!(
            simulate_counts(&rho, 500, 77).unwrap(),
            simulate_counts(&rho, 500, 78).unwrap()
        );
    }

    #[test]
    fn zero_shots_rejected() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            simulate_counts(&rho, 0, 0),
            Err(TomoError::BadShots(0))
        ));
    }

    #[test]
    fn noiseless_inversion_exact() {
        let truth = make_state(&Family::Werner { p: 0.7 }).unwrap();
        let recs = expected_counts(&truth, 1000).unwrap();
        let r = reconstruct(&recs).unwrap();
        assert!(r.rho_hat.matrix().max_abs_diff(truth.matrix()) < 1e-9);
    }

    #[test]
    fn missing_settings_reported() {
        let truth = make_state(&Family::Werner { p: 0.7 }).unwrap();
        let mut recs = expected_counts(&truth, 1000).unwrap();
        recs.retain(|r| r.setting != (Axis::X, Axis::Y));
        match reconstruct(&recs) {
            Err(TomoError::MissingSettings(s)) => assert_eq!(s, "xy"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unphysical_counts_still_give_a_state() {
        // perfect correlation in every basis is not a quantum state
        let recs: Vec<_> = settings()
            .map(|s| MeasurementRecord {
                setting: s,
                counts: [500, 0, 0, 500],
                shots: 1000,
            })
            .collect();
        let raw = linear_inversion(&recs).unwrap();
        assert!(!crate::states::validate(&raw).passed());
        let r = reconstruct(&recs).unwrap();
        assert!(r.rho_hat.validate().passed());
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[1.5, -0.5, 0.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        let p = project_simplex(&[0.4, 0.3, 0.2, 0.1]);
        for (x, y) in p.iter().zip([0.4, 0.3, 0.2, 0.1]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn fidelity_values() {
        let bell = DensityMatrix::pure(&phi_plus()).unwrap();
        assert_abs_diff_eq!(fidelity(&bell, &bell).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(fidelity(&bell, &mixed).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn minimal_error_bars() {
        let rho = make_state(&Family::Werner { p: 0.9 }).unwrap();
        let eb = error_bars(&rho, 1000, 2, 0).unwrap();
        assert_eq!(eb.resamples, 2);
        assert!(eb.tangle.std >= 0.0);
        assert!(matches!(
            error_bars(&rho, 1000, 1, 0),
            Err(TomoError::BadResamples(1))
        ));
    }

    #[test]
    fn csv_layout() {
        let rho = make_state(&Family::Werner { p: 0.3 }).unwrap();
        let recs = simulate_counts(&rho, 100, 1).unwrap();
        let mut buf = Vec::new();
        write_counts_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("setting_a,setting_b,n00,n01,n10,n11\n"));
        assert!(text.lines().nth(1).unwrap().starts_with("x,x,"));
        let back = read_counts_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 9);
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.setting, b.setting);
            assert_eq!(a.counts, b.counts);
        }
    }
}
