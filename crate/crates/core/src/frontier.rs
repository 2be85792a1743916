//! Upper boundary of the physical region in the tangle / von Neumann entropy
//! plane, found by maximizing tangle at fixed entropy.
//!
//! A candidate state is `ρ = Σ_k w_k u_k u_k†` where the `u_k` are the columns
//! of a unitary built from six complex Givens rotations and three phases, and
//! `w` lives on the probability simplex. The entropy of ρ is the Shannon
//! entropy of `w`, so every candidate is first moved along a
//! majorization-monotone path onto the entropy level set. A quadratic penalty
//! covers any residual. The search itself is a derivative-free coordinate
//! search with per-coordinate adaptive steps, restarted from random points.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::ComplexMatrix;
use crate::measures::{concurrence_of_ensemble, tangle, von_neumann_entropy, MeasureError};
use crate::search::bisect;
use crate::states::{prng, DensityMatrix, Prng, StateError};

pub const DEFAULT_RESTARTS: usize = 16;
const PENALTY_WEIGHT: f64 = 1e3;
const MIN_STEP: f64 = 1e-7;
const INITIAL_STEP: f64 = 0.5;
const MAX_STEP: f64 = 1.0;
const MAX_PASSES: usize = 20_000;
const ENTROPY_TOL: f64 = 1e-6;

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
// 12 Givens angles, 3 phases, 4 raw weights
const N_ANGLES: usize = 15;
const N_PARAMS: usize = N_ANGLES + 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontierError {
    #[error("target entropy {0} outside [0, 2]")]
    BadEntropy(f64),
    #[error("entropy grid needs at least two points")]
    ShortGrid,
    #[error("need at least one restart")]
    NoRestarts,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub entropy: f64,
    pub max_tangle: f64,
    pub argmax_state: DensityMatrix,
    pub converged: bool,
    pub iterations: usize,
}

fn unitary(x: &[f64]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    for (k, &(p, q)) in PAIRS.iter().enumerate() {
        let (s, c) = x[2 * k].sin_cos();
        let phase = Complex64::from_polar(1.0, x[2 * k + 1]);
        let mut g = ComplexMatrix::identity(4);
        g[(p, p)] = Complex64::new(c, 0.0);
        g[(q, q)] = Complex64::new(c, 0.0);
        g[(p, q)] = -phase * s;
        g[(q, p)] = phase.conj() * s;
        u = &u * &g;
    }
    let d = ComplexMatrix::from_fn(4, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, x[12 + i - 1])
        }
    });
    &d * &u
}

fn entropy_bits(w: &[f64; 4]) -> f64 {
    crate::measures::shannon_entropy(w)
}

fn lerp(w: &[f64; 4], toward: &[f64; 4], t: f64) -> [f64; 4] {
    std::array::from_fn(|i| (1.0 - t) * w[i] + t * toward[i])
}

/// Moves `w` onto `{H(w) = target}`: toward uniform to raise the entropy,
/// toward its largest vertex to lower it. Both paths change the entropy
/// monotonically.
fn project_weights(w: &[f64; 4], target: f64) -> [f64; 4] {
    let h = entropy_bits(w);
    if (h - target).abs() <= 1e-14 {
        return *w;
    }
    let toward = if h < target {
        [0.25; 4]
    } else {
        let k = (0..4).max_by(|&i, &j| w[i].total_cmp(&w[j])).unwrap();
        std::array::from_fn(|i| if i == k { 1.0 } else { 0.0 })
    };
    if target <= 0.0 || target >= 2.0 {
        return toward;
    }
    let gap = |t: f64| Ok::<_, ()>(entropy_bits(&lerp(w, &toward, t)) - target);
    match bisect(gap, 0.0, 1.0, 1e-15) {
        Ok(Some(t)) => lerp(w, &toward, t),
        _ => toward,
    }
}

fn raw_weights(x: &[f64]) -> [f64; 4] {
    let raw: [f64; 4] = std::array::from_fn(|i| x[N_ANGLES + i].abs());
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        [0.25; 4]
    } else {
        raw.map(|r| r / total)
    }
}

struct Candidate {
    objective: f64,
    weights: [f64; 4],
    unitary: ComplexMatrix,
}

fn evaluate(x: &[f64], target: f64) -> Result<Candidate, MeasureError> {
    let weights = project_weights(&raw_weights(x), target);
    let u = unitary(x);
    let vecs: Vec<Vec<Complex64>> = (0..4)
        .filter(|&k| weights[k] > 0.0)
        .map(|k| {
            let s = weights[k].sqrt();
            u.column(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    let c = concurrence_of_ensemble(&vecs)?;
    let residual = entropy_bits(&weights) - target;
    Ok(Candidate {
        objective: c * c - PENALTY_WEIGHT * residual * residual,
        weights,
        unitary: u,
    })
}

fn state_of(c: &Candidate) -> Result<DensityMatrix, StateError> {
    let mut m = ComplexMatrix::zeros(4);
    for k in 0..4 {
        if c.weights[k] > 0.0 {
            m = &m + &ComplexMatrix::outer(&c.unitary.column(k)).scale(c.weights[k]);
        }
    }
    DensityMatrix::new(m.scale(1.0 / m.trace().re))
}

struct LocalResult {
    best: Candidate,
    passes: usize,
}

/// Coordinate search from one starting point. Each coordinate keeps its own
/// step, doubled after an accepted move and halved after a failed probe in
/// both directions; the search stops once every step is below `MIN_STEP`.
fn local_search(mut x: Vec<f64>, target: f64) -> Result<LocalResult, MeasureError> {
    let mut best = evaluate(&x, target)?;
    let mut steps = [INITIAL_STEP; N_PARAMS];
    let mut passes = 0;
    while steps.iter().any(|&s| s >= MIN_STEP) && passes < MAX_PASSES {
        passes += 1;
        for i in 0..N_PARAMS {
            if steps[i] < MIN_STEP {
                continue;
            }
            let origin = x[i];
            let mut accepted = false;
            for delta in [steps[i], -steps[i]] {
                x[i] = origin + delta;
                let cand = evaluate(&x, target)?;
                if cand.objective > best.objective {
                    best = cand;
                    accepted = true;
                    break;
                }
            }
            if accepted {
                steps[i] = (2.0 * steps[i]).min(MAX_STEP);
            } else {
                x[i] = origin;
                steps[i] *= 0.5;
            }
        }
    }
    Ok(LocalResult { best, passes })
}

fn random_start(rng: &mut Prng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..N_ANGLES).map(|_| rng.gen_range(0.0..TAU)).collect();
    x.extend((0..4).map(|_| rng.gen_range(0.05..1.0)));
    x
}

/// Largest tangle among two-qubit states with von Neumann entropy `target`,
/// as the best of `restarts` independent local searches. Deterministic in
/// `seed`; ties go to the lowest restart index.
pub fn max_tangle_at_entropy(
    target: f64,
    restarts: usize,
    seed: u64,
) -> Result<FrontierPoint, FrontierError> {
    if !(0.0..=2.0).contains(&target) || target.is_nan() {
        return Err(FrontierError::BadEntropy(target));
    }
    if restarts == 0 {
        return Err(FrontierError::NoRestarts);
    }
    let mut rng = prng(seed);
    let starts: Vec<Vec<f64>> = (0..restarts).map(|_| random_start(&mut rng)).collect();
    let results = starts
        .into_par_iter()
        .map(|x| local_search(x, target))
        .collect::<Result<Vec<_>, _>>()?;

    let mut passes = 0;
    let mut winner: Option<Candidate> = None;
    for r in results {
        passes += r.passes;
        if winner
            .as_ref()
            .is_none_or(|w| r.best.objective > w.objective)
        {
            winner = Some(r.best);
        }
    }
    let winner = winner.expect("at least one restart");
    let argmax_state = state_of(&winner)?;
    let entropy = von_neumann_entropy(&argmax_state)?;
    Ok(FrontierPoint {
        entropy: target,
        max_tangle: tangle(&argmax_state)?,
        converged: (entropy - target).abs() <= ENTROPY_TOL,
        argmax_state,
        iterations: passes,
    })
}

/// Frontier points on an entropy grid; each point uses its own seed derived
/// from `seed` and the grid index.
pub fn trace_frontier(
    grid: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<Vec<FrontierPoint>, FrontierError> {
    if grid.len() < 2 {
        return Err(FrontierError::ShortGrid);
    }
    if let Some(&bad) = grid.iter().find(|s| !(0.0..=2.0).contains(*s)) {
        return Err(FrontierError::BadEntropy(bad));
    }
    let mut rng = prng(seed);
    let seeds: Vec<u64> = grid.iter().map(|_| rng.gen()).collect();
    grid.iter()
        .zip(seeds)
        .map(|(&s, seed)| max_tangle_at_entropy(s, restarts, seed))
        .collect()
}

/// `n` evenly spaced entropies from 0 to 2 bits.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| 2.0 * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Linear interpolation of the frontier tangle at entropy `s`. Points must be
/// sorted by entropy.
pub fn interpolate(points: &[FrontierPoint], s: f64) -> Option<f64> {
    let first = points.first()?;
    if s <= first.entropy {
        return (s == first.entropy).then_some(first.max_tangle);
    }
    points.windows(2).find_map(|w| {
        let (lo, hi) = (&w[0], &w[1]);
        (s >= lo.entropy && s <= hi.entropy).then(|| {
            let t = (s - lo.entropy) / (hi.entropy - lo.entropy);
            lo.max_tangle + t * (hi.max_tangle - lo.max_tangle)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = prng(1);
        let x = random_start(&mut rng);
        let u = unitary(&x);
        assert!((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn projection_hits_level_set() {
        for target in [0.05, 0.5, 1.0, 1.585, 1.99] {
            for w in [
                [0.7, 0.1, 0.1, 0.1],
                [0.25, 0.25, 0.3, 0.2],
                [1.0, 0.0, 0.0, 0.0],
            ] {
                let p = project_weights(&w, target);
                assert_abs_diff_eq!(entropy_bits(&p), target, epsilon = 1e-12);
                assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn endpoints() {
        let p0 = max_tangle_at_entropy(0.0, 4, 0).unwrap();
        assert_abs_diff_eq!(p0.max_tangle, 1.0, epsilon = 1e-6);
        assert!(p0.converged);
        let p2 = max_tangle_at_entropy(2.0, 2, 0).unwrap();
        assert_abs_diff_eq!(p2.max_tangle, 0.0, epsilon = 1e-6);
        assert!(p2.converged);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            max_tangle_at_entropy(2.5, 1, 0),
            Err(FrontierError::BadEntropy(2.5))
        );
        assert_eq!(
            max_tangle_at_entropy(-0.1, 1, 0),
            Err(FrontierError::BadEntropy(-0.1))
        );
        assert_eq!(
            max_tangle_at_entropy(1.0, 0, 0),
            Err(FrontierError::NoRestarts)
        );
        assert_eq!(trace_frontier(&[1.0], 1, 0), Err(FrontierError::ShortGrid));
    }

    #[test]
    fn grid_endpoints_and_determinism() {
        let a = trace_frontier(&[0.0, 2.0], 2, 9).unwrap();
        assert_abs_diff_eq!(a[0].max_tangle, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(a[1].max_tangle, 0.0, epsilon = 1e-6);
        let b = trace_frontier(&[0.0, 2.0], 2, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interpolation() {
        let pts = trace_frontier(&[0.0, 2.0], 1, 0).unwrap();
        let mid = interpolate(&pts, 1.0).unwrap();
        assert_abs_diff_eq!(
            mid,
            0.5 * (pts[0].max_tangle + pts[1].max_tangle),
            epsilon = 1e-15
        );
        assert_eq!(interpolate(&pts, 2.5), None);
    }
}
