//! Density matrices, the named state families, noise channels and a seeded
//! random-state sampler.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{
    hermitian_eigenvalues, kron, partial_trace, pauli_x, pauli_y, pauli_z, Axis, ComplexMatrix,
    LinalgError, Subsystem,
};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-9;
pub const HERMITIAN_TOL: f64 = crate::linalg::HERMITIAN_TOL;

/// Seedable generator used for every random draw in the crate.
/// `seed_from_u64` expands the seed through SplitMix64.
pub type Prng = Xoshiro256PlusPlus;

pub fn prng(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("rank must be in 1..=4, got {0}")]
    BadRank(usize),
    #[error("invalid density matrix: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome of checking the density-matrix invariants on a raw matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_deviation: f64,
    pub trace_ok: bool,
    pub psd_ok: bool,
    pub hermitian_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.trace_ok && self.psd_ok && self.hermitian_ok
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut failures = Vec::new();
        if !self.trace_ok {
            failures.push(format!("trace off by {:e}", self.trace_deviation));
        }
        if !self.psd_ok {
            failures.push(format!("negative eigenvalue {:e}", self.min_eigenvalue));
        }
        if !self.hermitian_ok {
            failures.push(format!("not Hermitian ({:e})", self.hermiticity_deviation));
        }
        if failures.is_empty() {
            write!(f, "pass")
        } else {
            write!(f, "fail: {}", failures.join("; "))
        }
    }
}

/// Checks unit trace, Hermiticity and positivity of a raw matrix.
pub fn validate(m: &ComplexMatrix) -> ValidationReport {
    let hermiticity_deviation = m.hermiticity_deviation();
    let trace = m.trace();
    let trace_deviation = (trace - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(&m.hermitian_part())
        .map(|e| e[0])
        .unwrap_or(f64::NAN);
    ValidationReport {
        dim: m.dim(),
        trace_deviation,
        min_eigenvalue,
        hermiticity_deviation,
        trace_ok: trace_deviation <= TRACE_TOL,
        psd_ok: min_eigenvalue >= PSD_FLOOR,
        hermitian_ok: hermiticity_deviation <= HERMITIAN_TOL,
    }
}

/// A validated qubit or two-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `m` and stores its Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self, StateError> {
        if !matches!(m.dim(), 2 | 4) {
            return Err(LinalgError::BadDimension {
                expected: 4,
                got: m.dim(),
            }
            .into());
        }
        let report = validate(&m);
        if !report.passed() {
            return Err(StateError::Invalid(report));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Wraps a matrix without checking it. Measures will still reject
    /// eigenvalues below the PSD floor.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|ψ><ψ|` after normalizing `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, StateError> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::ParamOutOfRange("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Reduced state of one qubit of a two-qubit state.
    pub fn marginal(&self, keep: Subsystem) -> Result<DensityMatrix, LinalgError> {
        partial_trace(&self.0, keep).map(DensityMatrix)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DensityMatrixJson {
            dim: self.dim(),
            re: self.0.as_slice().iter().map(|z| z.re).collect(),
            im: self.0.as_slice().iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = DensityMatrixJson::deserialize(deserializer)?;
        let n = raw.dim * raw.dim;
        if raw.re.len() != n || raw.im.len() != n {
            return Err(D::Error::custom(format!(
                "expected {n} entries in `re` and `im` for dim {}",
                raw.dim
            )));
        }
        let entries = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        DensityMatrix::new(ComplexMatrix::from_rows(entries)).map_err(D::Error::custom)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(|00> + |11>)/√2`
pub fn phi_plus() -> Vec<Complex64> {
    vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]
}

/// `(|01> - |10>)/√2`
pub fn psi_minus() -> Vec<Complex64> {
    vec![c(0.0), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0)]
}

/// Computational basis vector `|index>` of a `dim`-level system.
pub fn basis_vector(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); dim];
    v[index] = c(1.0);
    v
}

/// The named state families, each with its own parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `cos α|00> + sin α|11>`, α ∈ [0, π/4].
    Pure { alpha: f64 },
    /// Singlet mixed with white noise, p ∈ [0, 1].
    Werner { p: f64 },
    /// Rank-2 MEMS `p|φ+><φ+| + (1-p)|10><10|`, p ∈ [2/3, 1].
    Mems { p: f64 },
    /// `(p|0><0| + (1-p)/2 𝟙) ⊗ |0><0|`, p ∈ [0, 1].
    As1 { p: f64 },
    /// `𝟙/2 ⊗ (q|0><0| + (1-q)/2 𝟙)`, q ∈ [0, 1].
    As2 { q: f64 },
    /// `p|00><00| + (1-p)/4 𝟙`, p ∈ [0, 1].
    Separable { p: f64 },
    /// Singlet dephased with strength γ in z and γ^exponent in x.
    Dephased { gamma: f64, exponent: f64 },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Pure { .. } => "pure",
            Family::Werner { .. } => "werner",
            Family::Mems { .. } => "mems",
            Family::As1 { .. } => "as1",
            Family::As2 { .. } => "as2",
            Family::Separable { .. } => "s",
            Family::Dephased { .. } => "d",
        }
    }

    /// The primary parameter (α, p, q or γ).
    pub fn param(&self) -> f64 {
        match *self {
            Family::Pure { alpha } => alpha,
            Family::Werner { p }
            | Family::Mems { p }
            | Family::As1 { p }
            | Family::Separable { p } => p,
            Family::As2 { q } => q,
            Family::Dephased { gamma, .. } => gamma,
        }
    }

    /// The exponent of the dephased family, `None` elsewhere.
    pub fn secondary(&self) -> Option<f64> {
        match *self {
            Family::Dephased { exponent, .. } => Some(exponent),
            _ => None,
        }
    }

    /// Closed interval the primary parameter may take.
    pub fn param_range(&self) -> (f64, f64) {
        match self {
            Family::Pure { .. } => (0.0, FRAC_PI_4),
            Family::Mems { .. } => (2.0 / 3.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Same family with the primary parameter replaced.
    pub fn with_param(&self, x: f64) -> Family {
        match *self {
            Family::Pure { .. } => Family::Pure { alpha: x },
            Family::Werner { .. } => Family::Werner { p: x },
            Family::Mems { .. } => Family::Mems { p: x },
            Family::As1 { .. } => Family::As1 { p: x },
            Family::As2 { .. } => Family::As2 { q: x },
            Family::Separable { .. } => Family::Separable { p: x },
            Family::Dephased { exponent, .. } => Family::Dephased { gamma: x, exponent },
        }
    }

    /// Builds a family member from its tag and parameters.
    pub fn from_tag(tag: &str, param: f64, secondary: Option<f64>) -> Result<Family, StateError> {
        let fam = match tag {
            "pure" => Family::Pure { alpha: param },
            "werner" => Family::Werner { p: param },
            "mems" => Family::Mems { p: param },
            "as1" => Family::As1 { p: param },
            "as2" => Family::As2 { q: param },
            "s" => Family::Separable { p: param },
            "d" => Family::Dephased {
                gamma: param,
                exponent: secondary.ok_or_else(|| {
                    StateError::ParamOutOfRange("dephased family needs an exponent".into())
                })?,
            },
            other => {
                return Err(StateError::ParamOutOfRange(format!(
                    "unknown family `{other}`"
                )))
            }
        };
        Ok(fam)
    }

    fn check_range(&self) -> Result<(), StateError> {
        const SLACK: f64 = 1e-12;
        let (lo, hi) = self.param_range();
        let x = self.param();
        if !(x.is_finite() && x >= lo - SLACK && x <= hi + SLACK) {
            return Err(StateError::ParamOutOfRange(format!(
                "{} parameter {x} outside [{lo}, {hi}]",
                self.tag()
            )));
        }
        if let Family::Dephased { exponent, .. } = *self {
            if !(exponent.is_finite() && exponent > 0.0) {
                return Err(StateError::ParamOutOfRange(format!(
                    "dephasing exponent must be positive, got {exponent}"
                )));
            }
        }
        Ok(())
    }
}

fn qubit_noisy_zero(p: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[p + (1.0 - p) / 2.0, (1.0 - p) / 2.0])
}

/// Constructs the density matrix of a family member.
pub fn make_state(family: &Family) -> Result<DensityMatrix, StateError> {
    family.check_range()?;
    let id4 = ComplexMatrix::identity(4);
    let m = match *family {
        Family::Pure { alpha } => {
            let mut v = vec![c(0.0); 4];
            v[0] = c(alpha.cos());
            v[3] = c(alpha.sin());
            ComplexMatrix::outer(&v)
        }
        Family::Werner { p } => {
            &ComplexMatrix::outer(&psi_minus()).scale(p) + &id4.scale((1.0 - p) / 4.0)
        }
        Family::Mems { p } => {
            &ComplexMatrix::outer(&phi_plus()).scale(p)
                + &ComplexMatrix::outer(&basis_vector(4, 2)).scale(1.0 - p)
        }
        Family::As1 { p } => kron(
            &qubit_noisy_zero(p),
            &ComplexMatrix::outer(&basis_vector(2, 0)),
        )?,
        Family::As2 { q } => kron(&ComplexMatrix::identity(2).scale(0.5), &qubit_noisy_zero(q))?,
        Family::Separable { p } => {
            &ComplexMatrix::outer(&basis_vector(4, 0)).scale(p) + &id4.scale((1.0 - p) / 4.0)
        }
        Family::Dephased { gamma, exponent } => {
            let gx = 1.0 - gamma;
            let gz = 1.0 - gamma.powf(exponent);
            let xx = kron(&pauli_x(), &pauli_x())?;
            let yy = kron(&pauli_y(), &pauli_y())?;
            let zz = kron(&pauli_z(), &pauli_z())?;
            let mut m = id4;
            m = &m - &xx.scale(gx);
            m = &m - &yy.scale(gx * gz);
            m = &m - &zz.scale(gz);
            m.scale(0.25)
        }
    };
    DensityMatrix::new(m)
}

/// Which qubit(s) a local channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    GlobalWhiteNoise,
    LocalDephase,
    LocalDepolarize,
    MemsRecombine,
}

/// A parametrized CPTP map on a two-qubit state. Strength 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub strength: f64,
    pub target: Target,
    pub basis: Axis,
}

impl ChannelSpec {
    pub fn white_noise(strength: f64) -> Self {
        Self {
            kind: ChannelKind::GlobalWhiteNoise,
            strength,
            target: Target::Both,
            basis: Axis::Z,
        }
    }

    pub fn dephase(strength: f64, basis: Axis, target: Target) -> Self {
        Self {
            kind: ChannelKind::LocalDephase,
            strength,
            target,
            basis,
        }
    }

    pub fn depolarize(strength: f64, target: Target) -> Self {
        Self {
            kind: ChannelKind::LocalDepolarize,
            strength,
            target,
            basis: Axis::Z,
        }
    }

    /// Incoherent recombination with the `|10>` branch; `strength` is the
    /// weight of the branch, so `1 - p` turns `|φ+>` into MEMS(p).
    pub fn mems_recombine(strength: f64) -> Self {
        Self {
            kind: ChannelKind::MemsRecombine,
            strength,
            target: Target::Both,
            basis: Axis::Z,
        }
    }
}

fn local_op(op: &ComplexMatrix, on: Subsystem) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    match on {
        Subsystem::A => kron(op, &id),
        Subsystem::B => kron(&id, op),
    }
    .expect("4x4 kron")
}

fn targets(t: Target) -> &'static [Subsystem] {
    match t {
        Target::A => &[Subsystem::A],
        Target::B => &[Subsystem::B],
        Target::Both => &[Subsystem::A, Subsystem::B],
    }
}

fn mix(rho: &ComplexMatrix, other: &ComplexMatrix, s: f64) -> ComplexMatrix {
    &rho.scale(1.0 - s) + &other.scale(s)
}

fn replace_marginal(rho: &ComplexMatrix, on: Subsystem) -> ComplexMatrix {
    let half = ComplexMatrix::identity(2).scale(0.5);
    match on {
        Subsystem::A => kron(&half, &partial_trace(rho, Subsystem::B).expect("dim 4")),
        Subsystem::B => kron(&partial_trace(rho, Subsystem::A).expect("dim 4"), &half),
    }
    .expect("4x4 kron")
}

/// Kraus pair that sends `|φ+>` to `|10>`: flip qubit a up, and flip b when a was 1.
fn recombine_branch(rho: &ComplexMatrix) -> ComplexMatrix {
    let raise = ComplexMatrix::from_real_rows(&[0.0, 0.0, 1.0, 0.0]);
    let proj1 = ComplexMatrix::from_real_rows(&[0.0, 0.0, 0.0, 1.0]);
    let k0 = kron(&raise, &ComplexMatrix::identity(2)).expect("4x4 kron");
    let k1 = kron(&proj1, &pauli_x()).expect("4x4 kron");
    &rho.conjugate_by(&k0) + &rho.conjugate_by(&k1)
}

/// Applies a noise channel to a two-qubit state.
pub fn apply_channel(rho: &DensityMatrix, spec: &ChannelSpec) -> Result<DensityMatrix, StateError> {
    let s = spec.strength;
    if !(0.0..=1.0).contains(&s) {
        return Err(StateError::ParamOutOfRange(format!(
            "channel strength {s} outside [0, 1]"
        )));
    }
    if rho.dim() != 4 {
        return Err(LinalgError::BadDimension {
            expected: 4,
            got: rho.dim(),
        }
        .into());
    }
    let mut m = rho.matrix().clone();
    match spec.kind {
        ChannelKind::GlobalWhiteNoise => {
            m = mix(&m, &ComplexMatrix::identity(4).scale(0.25), s);
        }
        ChannelKind::LocalDephase => {
            for &on in targets(spec.target) {
                let u = local_op(&spec.basis.pauli(), on);
                m = mix(&m, &m.conjugate_by(&u), s);
            }
        }
        ChannelKind::LocalDepolarize => {
            for &on in targets(spec.target) {
                m = mix(&m, &replace_marginal(&m, on), s);
            }
        }
        ChannelKind::MemsRecombine => {
            m = mix(&m, &recombine_branch(&m), s);
        }
    }
    DensityMatrix::new(m)
}

/// Haar-random normalized two-qubit state vector.
pub fn random_pure_vector(rng: &mut Prng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..4)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Draws a two-qubit state by mixing `rank` Haar-random pure states with
/// flat Dirichlet weights. Deterministic in `seed`.
pub fn sample_random_state(rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    let mut rng = prng(seed);
    random_state_with(rank, &mut rng)
}

/// Same construction as [`sample_random_state`], drawing from a caller-owned
/// generator.
pub fn random_state_with(rank: usize, rng: &mut Prng) -> Result<DensityMatrix, StateError> {
    if !(1..=4).contains(&rank) {
        return Err(StateError::BadRank(rank));
    }
    let weights: Vec<f64> = if rank == 1 {
        vec![1.0]
    } else {
        Dirichlet::new(&vec![1.0; rank])
            .expect("flat Dirichlet")
            .sample(&mut *rng)
    };
    let mut m = ComplexMatrix::zeros(4);
    for w in weights {
        m = &m + &ComplexMatrix::outer(&random_pure_vector(rng)).scale(w);
    }
    // Renormalize to wash out rounding in the weights.
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr))
}

/// Hermitian matrix with independent standard-normal real and imaginary
/// parts above the diagonal (a GUE draw, unnormalized).
pub fn random_hermitian(dim: usize, rng: &mut Prng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut *rng),
            StandardNormal.sample(&mut *rng),
        )
    });
    g.hermitian_part()
}

/// Haar-random element of SU(2).
pub fn random_su2(rng: &mut Prng) -> ComplexMatrix {
    let v: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(v[0] / n, v[1] / n);
    let b = Complex64::new(v[2] / n, v[3] / n);
    ComplexMatrix::from_rows(vec![a, -b.conj(), b, a.conj()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn bell_point_of_pure_family() {
        let rho = make_state(&Family::Pure { alpha: FRAC_PI_4 }).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let corner = (i == 0 || i == 3) && (j == 0 || j == 3);
                let expect = if corner { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(rho.matrix()[(i, j)].re, expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn werner_zero_is_maximally_mixed() {
        let rho = make_state(&Family::Werner { p: 0.0 }).unwrap();
        assert!(close(
            rho.matrix(),
            DensityMatrix::maximally_mixed(4).matrix(),
            1e-15
        ));
    }

    #[test]
    fn undephased_singlet() {
        let rho = make_state(&Family::Dephased {
            gamma: 0.0,
            exponent: 1.0,
        })
        .unwrap();
        assert!(close(
            rho.matrix(),
            &ComplexMatrix::outer(&psi_minus()),
            1e-15
        ));
    }

    #[test]
    fn noiseless_separable_is_ground_state() {
        let rho = make_state(&Family::Separable { p: 1.0 }).unwrap();
        assert!(close(
            rho.matrix(),
            &ComplexMatrix::outer(&basis_vector(4, 0)),
            1e-15
        ));
    }

    #[test]
    fn mems_below_two_thirds_rejected() {
        assert!(matches!(
            make_state(&Family::Mems { p: 0.6 }),
            Err(StateError::ParamOutOfRange(_))
        ));
        assert!(make_state(&Family::Mems { p: 2.0 / 3.0 }).is_ok());
    }

    #[test]
    fn out_of_range_parameters() {
        for f in [
            Family::Pure { alpha: 1.0 },
            Family::Werner { p: -0.1 },
            Family::As2 { q: 1.5 },
            Family::Separable { p: f64::NAN },
            Family::Dephased {
                gamma: 0.5,
                exponent: 0.0,
            },
        ] {
            assert!(make_state(&f).is_err(), "{f:?}");
        }
    }

    #[test]
    fn as2_is_unit_trace() {
        let rho = make_state(&Family::As2 { q: 0.3 }).unwrap();
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mems_marginal_at_two_thirds() {
        let rho = make_state(&Family::Mems { p: 2.0 / 3.0 }).unwrap();
        let a = rho.marginal(Subsystem::A).unwrap();
        assert!(close(
            a.matrix(),
            &ComplexMatrix::diag(&[1.0 / 3.0, 2.0 / 3.0]),
            1e-15
        ));
    }

    #[test]
    fn white_noise_full_strength() {
        let rho = sample_random_state(3, 7).unwrap();
        let out = apply_channel(&rho, &ChannelSpec::white_noise(1.0)).unwrap();
        assert!(close(
            out.matrix(),
            DensityMatrix::maximally_mixed(4).matrix(),
            1e-15
        ));
    }

    #[test]
    fn half_dephasing_kills_coherence() {
        let rho = DensityMatrix::pure(&phi_plus()).unwrap();
        let out = apply_channel(&rho, &ChannelSpec::dephase(0.5, Axis::Z, Target::A)).unwrap();
        assert!(close(
            out.matrix(),
            &ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5]),
            1e-15
        ));
    }

    #[test]
    fn white_noise_on_singlet_gives_werner() {
        let singlet = DensityMatrix::pure(&psi_minus()).unwrap();
        for p in [0.0, 0.2, 1.0 / 3.0, 0.75, 1.0] {
            let out = apply_channel(&singlet, &ChannelSpec::white_noise(1.0 - p)).unwrap();
            let w = make_state(&Family::Werner { p }).unwrap();
            assert!(close(out.matrix(), w.matrix(), 1e-15), "p = {p}");
        }
    }

    #[test]
    fn recombine_reproduces_mems() {
        let bell = make_state(&Family::Pure { alpha: FRAC_PI_4 }).unwrap();
        for p in [2.0 / 3.0, 0.8, 0.95, 1.0] {
            let out = apply_channel(&bell, &ChannelSpec::mems_recombine(1.0 - p)).unwrap();
            let m = make_state(&Family::Mems { p }).unwrap();
            assert!(close(out.matrix(), m.matrix(), 1e-15), "p = {p}");
        }
    }

    #[test]
    fn depolarize_matches_pauli_twirl() {
        // (1 - 3s/4) ρ + (s/4) Σ σ ρ σ on qubit b
        let rho = sample_random_state(4, 11).unwrap();
        let s = 0.37;
        let out = apply_channel(&rho, &ChannelSpec::depolarize(s, Target::B)).unwrap();
        let mut expect = rho.matrix().scale(1.0 - 0.75 * s);
        for axis in Axis::ALL {
            let u = local_op(&axis.pauli(), Subsystem::B);
            expect = &expect + &rho.matrix().conjugate_by(&u).scale(s / 4.0);
        }
        assert!(close(out.matrix(), &expect, 1e-14));
    }

    #[test]
    fn channel_strength_checked() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            apply_channel(&rho, &ChannelSpec::white_noise(1.2)),
            Err(StateError::ParamOutOfRange(_))
        ));
    }

    #[test]
    fn validate_reports() {
        let good = validate(DensityMatrix::maximally_mixed(4).matrix());
        assert!(good.passed());
        assert_abs_diff_eq!(good.min_eigenvalue, 0.25, epsilon = 1e-15);

        let bad = validate(&ComplexMatrix::diag(&[1.5, -0.5, 0.0, 0.0]));
        assert!(!bad.passed());
        assert!(!bad.psd_ok);
        assert!(bad.trace_ok);
        assert_abs_diff_eq!(bad.min_eigenvalue, -0.5, epsilon = 1e-15);

        let mems = make_state(&Family::Mems { p: 0.8 }).unwrap();
        assert!(mems.validate().passed());
        let mut ev = hermitian_eigenvalues(mems.matrix()).unwrap();
        ev.sort_by(f64::total_cmp);
        for (x, e) in ev.iter().zip([0.0, 0.0, 0.2, 0.8]) {
            assert_abs_diff_eq!(*x, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn random_state_properties() {
        let pure = sample_random_state(1, 3).unwrap();
        let purity = pure.matrix().trace_product(pure.matrix()).re;
        assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-10);

        let full = sample_random_state(4, 3).unwrap();
        let ev = hermitian_eigenvalues(full.matrix()).unwrap();
        assert!(ev[0] > 0.0);

        assert_eq!(
            sample_random_state(2, 42).unwrap(),
            sample_random_state(2, 42).unwrap()
        );
        assert_eq!(sample_random_state(0, 1), Err(StateError::BadRank(0)));
        assert_eq!(sample_random_state(5, 1), Err(StateError::BadRank(5)));
    }

    #[test]
    fn json_layout() {
        let rho = make_state(&Family::Werner { p: 0.5 }).unwrap();
        let v = serde_json::to_value(&rho).unwrap();
        assert_eq!(v["dim"], 4);
        assert_eq!(v["re"].as_array().unwrap().len(), 16);
        assert_eq!(v["im"].as_array().unwrap().len(), 16);
        let back: DensityMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, rho);

        let bad =
            serde_json::json!({"dim": 2, "re": [1.5, 0.0, 0.0, -0.5], "im": [0.0, 0.0, 0.0, 0.0]});
        assert!(serde_json::from_value::<DensityMatrix>(bad).is_err());
    }
}
