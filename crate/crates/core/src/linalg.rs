//! Dense complex linear algebra and quantum-state primitives.
//!
//! A single primitive — the Hermitian eigendecomposition — backs the trace
//! norm, matrix square roots, and matrix logarithms, so there is one
//! tolerance surface: eigenvalues below 1e-12 are treated as zero.

use crate::prob::{Prob, ProbTable};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Eigenvalues with magnitude below this are treated as exactly zero.
pub const EIG_ZERO_TOL: f64 = 1e-12;

/// Validation tolerance for Hermiticity, trace, PSD, and POVM checks.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NonSquare(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("state norm is {0}, expected 1")]
    BadNorm(f64),
    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NonTracePreserving(f64),
    #[error("effects do not form a POVM: {0}")]
    NotAPovm(String),
    #[error("unknown operator label `{0}`")]
    BadOperatorLabel(String),
    #[error("{0}")]
    Invalid(String),
}

/// Dense complex matrix, row-major in its serialized form.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(pub DMatrix<Complex64>);

#[derive(Serialize, Deserialize)]
struct CMatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (rows, cols) = self.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                re.push(self.0[(r, c)].re);
                im.push(self.0[(r, c)].im);
            }
        }
        CMatrixJson { rows, cols, re, im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CMatrixJson::deserialize(d)?;
        if j.re.len() != j.rows * j.cols || j.im.len() != j.rows * j.cols {
            return Err(serde::de::Error::custom("entry count mismatch"));
        }
        Ok(CMatrix(DMatrix::from_fn(j.rows, j.cols, |r, c| {
            Complex64::new(j.re[r * j.cols + c], j.im[r * j.cols + c])
        })))
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        CMatrix(DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c]))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        CMatrix(DMatrix::from_fn(rows, cols, |r, c| {
            Complex64::new(entries[r * cols + c], 0.0)
        }))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.0.nrows(), self.0.ncols())
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix(self.0.transpose())
    }

    pub fn conjugate(&self) -> CMatrix {
        CMatrix(self.0.map(|z| z.conj()))
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &other.0)
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        CMatrix(self.0.kronecker(&other.0))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.0.adjoint();
        (&self.0 - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvector columns.
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// The one eigendecomposition primitive. Symmetrizes the input first so
/// callers may pass matrices that are Hermitian only up to rounding.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig, LinalgError> {
    if !m.is_square() {
        let (r, c) = m.shape();
        return Err(LinalgError::NonSquare(r, c));
    }
    let sym = (&m.0 + m.0.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let n = eig.eigenvalues.len();
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

/// Apply `f` to the eigenvalues of a Hermitian matrix.
fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix, LinalgError> {
    let eig = hermitian_eig(m)?;
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for c in 0..n {
        let fv = f(eig.values[c]);
        for r in 0..n {
            scaled[(r, c)] *= Complex64::new(fv, 0.0);
        }
    }
    Ok(CMatrix(scaled * eig.vectors.adjoint()))
}

/// Principal square root of a PSD Hermitian matrix; negative rounding
/// noise is clipped to zero.
pub fn matrix_sqrt(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    hermitian_fn(m, |v| if v > 0.0 { v.sqrt() } else { 0.0 })
}

/// Trace norm: sum of singular values, computed as Tr sqrt(X†X).
pub fn trace_norm(x: &CMatrix) -> Result<f64, LinalgError> {
    if !x.is_square() {
        let (r, c) = x.shape();
        return Err(LinalgError::NonSquare(r, c));
    }
    let gram = CMatrix(x.0.adjoint() * &x.0);
    let eig = hermitian_eig(&gram)?;
    Ok(eig
        .values
        .iter()
        .map(|&v| if v > EIG_ZERO_TOL { v.sqrt() } else { 0.0 })
        .sum())
}

/// Frobenius norm: sqrt of the sum of squared entry magnitudes.
pub fn frobenius_norm(x: &CMatrix) -> f64 {
    x.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            let (r, c) = matrix.shape();
            return Err(LinalgError::NonSquare(r, c));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > STATE_TOL {
            return Err(LinalgError::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(LinalgError::BadTrace(tr.re));
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&min) = eig.values.first() {
            if min < -STATE_TOL {
                return Err(LinalgError::NotPsd(min));
            }
        }
        Ok(DensityMatrix {
            dim: matrix.0.nrows(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = CMatrix(
            DMatrix::<Complex64>::identity(dim, dim).map(|z: Complex64| z / dim as f64),
        );
        DensityMatrix { dim, matrix: m }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = &state.amplitudes;
        let m = DMatrix::from_fn(state.dim, state.dim, |r, c| v[r] * v[c].conj());
        DensityMatrix {
            dim: state.dim,
            matrix: CMatrix(m),
        }
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim * other.dim,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// Unit vector in C^dim.
#[derive(Clone, Debug)]
pub struct PureState {
    pub dim: usize,
    pub amplitudes: DVector<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PureStateJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PureStateJson {
            dim: self.dim,
            re: self.amplitudes.iter().map(|z| z.re).collect(),
            im: self.amplitudes.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PureStateJson::deserialize(d)?;
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(serde::de::Error::custom("amplitude count mismatch"));
        }
        let amps: Vec<Complex64> = j
            .re
            .iter()
            .zip(&j.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        PureState::new(amps).map_err(serde::de::Error::custom)
    }
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, LinalgError> {
        let dim = amps.len();
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LinalgError::BadNorm(norm));
        }
        Ok(PureState {
            dim,
            amplitudes: v,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        PureState {
            dim,
            amplitudes: v,
        }
    }

    /// Uniform-amplitude maximally entangled state on d*d.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = DVector::zeros(d * d);
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for k in 0..d {
            v[k * d + k] = a;
        }
        PureState {
            dim: d * d,
            amplitudes: v,
        }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut v = DVector::zeros(self.dim * other.dim);
        for i in 0..self.dim {
            for j in 0..other.dim {
                v[i * other.dim + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        PureState {
            dim: self.dim * other.dim,
            amplitudes: v,
        }
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn distance(&self, other: &PureState) -> f64 {
        (&self.amplitudes - &other.amplitudes).norm()
    }
}

/// Quantum channel in Kraus form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Channel {
    pub kraus: Vec<CMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self, LinalgError> {
        if kraus.is_empty() {
            return Err(LinalgError::Invalid("channel needs Kraus operators".into()));
        }
        let (rows, cols) = kraus[0].shape();
        for k in &kraus {
            if k.shape() != (rows, cols) {
                return Err(LinalgError::DimMismatch(k.shape().0, rows));
            }
        }
        let mut sum = DMatrix::<Complex64>::zeros(cols, cols);
        for k in &kraus {
            sum += k.0.adjoint() * &k.0;
        }
        let dev = (&sum - DMatrix::<Complex64>::identity(cols, cols))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > STATE_TOL {
            return Err(LinalgError::NonTracePreserving(dev));
        }
        Ok(Channel { kraus })
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].shape().1
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].shape().0
    }
}

/// Apply a channel: Σ K ρ K†.
pub fn apply_channel(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix, LinalgError> {
    if ch.input_dim() != rho.dim() {
        return Err(LinalgError::DimMismatch(ch.input_dim(), rho.dim()));
    }
    let d = ch.output_dim();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for k in &ch.kraus {
        out += &k.0 * &rho.matrix().0 * k.0.adjoint();
    }
    DensityMatrix::new(CMatrix(out))
}

/// Fidelity F(ρ,σ) = ‖√ρ √σ‖₁.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimMismatch(rho.dim(), sigma.dim()));
    }
    let a = matrix_sqrt(rho.matrix())?;
    let b = matrix_sqrt(sigma.matrix())?;
    let f = trace_norm(&a.mul(&b))?;
    Ok(f.min(1.0))
}

/// Partial trace of a bipartite state with subsystem dims (da, db).
pub fn partial_trace(
    rho: &DensityMatrix,
    da: usize,
    db: usize,
    keep_first: bool,
) -> Result<DensityMatrix, LinalgError> {
    if da * db != rho.dim() {
        return Err(LinalgError::DimMismatch(da * db, rho.dim()));
    }
    let m = &rho.matrix().0;
    let out = if keep_first {
        DMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        })
    } else {
        DMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        })
    };
    DensityMatrix::new(CMatrix(out))
}

// ---------------------------------------------------------------------------
// Pauli operators and Bell actions
// ---------------------------------------------------------------------------

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Parse a label like "I", "X", "Z", "XZ" into the product of the named
/// single-qubit operators (applied left to right as written).
pub fn pauli_product(label: &str) -> Result<CMatrix, LinalgError> {
    if label.is_empty() {
        return Err(LinalgError::BadOperatorLabel(label.into()));
    }
    let mut m = pauli_i();
    for ch in label.chars() {
        let next = match ch.to_ascii_uppercase() {
            'I' => pauli_i(),
            'X' => pauli_x(),
            'Y' => pauli_y(),
            'Z' => pauli_z(),
            _ => return Err(LinalgError::BadOperatorLabel(label.into())),
        };
        m = m.mul(&next);
    }
    Ok(m)
}

/// Apply the labeled tensor of Pauli products to a 2-qubit state.
pub fn bell_action(first: &str, second: &str, state: &PureState) -> Result<PureState, LinalgError> {
    if state.dim != 4 {
        return Err(LinalgError::DimMismatch(state.dim, 4));
    }
    let op = pauli_product(first)?.kron(&pauli_product(second)?);
    let v = &op.0 * &state.amplitudes;
    Ok(PureState {
        dim: 4,
        amplitudes: v,
    })
}

// ---------------------------------------------------------------------------
// Measurements, purification, matricization
// ---------------------------------------------------------------------------

/// Born-rule outcome table for a POVM: p_k = Tr[E_k ρ], clipped at zero and
/// renormalized when the drift is within tolerance.
pub fn born_probability(
    state: &DensityMatrix,
    effects: &[CMatrix],
) -> Result<ProbTable, LinalgError> {
    if effects.is_empty() {
        return Err(LinalgError::NotAPovm("no effects".into()));
    }
    let d = state.dim();
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    for e in effects {
        if e.shape() != (d, d) {
            return Err(LinalgError::NotAPovm(format!(
                "effect shape {:?} does not match state dim {d}",
                e.shape()
            )));
        }
        if e.hermiticity_deviation() > STATE_TOL {
            return Err(LinalgError::NotAPovm("effect is not Hermitian".into()));
        }
        let eig = hermitian_eig(e)?;
        if let Some(&min) = eig.values.first() {
            if min < -STATE_TOL {
                return Err(LinalgError::NotAPovm(format!(
                    "effect has negative eigenvalue {min:.3e}"
                )));
            }
        }
        sum += &e.0;
    }
    let dev = (&sum - DMatrix::<Complex64>::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > STATE_TOL {
        return Err(LinalgError::NotAPovm(format!(
            "effects sum deviates from identity by {dev:.3e}"
        )));
    }
    let mut probs: Vec<f64> = effects
        .iter()
        .map(|e| {
            (&e.0 * &state.matrix().0)
                .diagonal()
                .iter()
                .sum::<Complex64>()
                .re
        })
        .map(|p| p.max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() <= STATE_TOL && total > 0.0 {
        for p in &mut probs {
            *p /= total;
        }
    }
    let labels = (0..probs.len()).map(|k| k.to_string()).collect();
    ProbTable::new(labels, probs.into_iter().map(Prob::Approx).collect())
        .map_err(|e| LinalgError::NotAPovm(e.to_string()))
}

/// Purification on dim²: eigendecompose ρ and entangle each eigenvector
/// with a reference basis vector. The global phase is fixed by making the
/// largest-magnitude amplitude real positive.
pub fn purify(rho: &DensityMatrix) -> Result<PureState, LinalgError> {
    let eig = hermitian_eig(rho.matrix())?;
    let d = rho.dim();
    let mut v = DVector::<Complex64>::zeros(d * d);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= EIG_ZERO_TOL {
            continue;
        }
        let coeff = Complex64::new(lam.sqrt(), 0.0);
        for i in 0..d {
            v[i * d + k] += coeff * eig.vectors[(i, k)];
        }
    }
    let (mut best, mut mag) = (0usize, 0.0f64);
    for i in 0..d * d {
        if v[i].norm() > mag {
            mag = v[i].norm();
            best = i;
        }
    }
    if mag > 0.0 {
        let correction = (v[best] / Complex64::new(mag, 0.0)).conj();
        for i in 0..d * d {
            v[i] *= correction;
        }
    }
    let norm = v.norm();
    for i in 0..d * d {
        v[i] /= Complex64::new(norm, 0.0);
    }
    Ok(PureState {
        dim: d * d,
        amplitudes: v,
    })
}

/// The matricization bijection: a state on d_a*d_b becomes the d_a x d_b
/// matrix M[a,b] = v[a*d_b + b].
pub fn matricize(state: &PureState, da: usize, db: usize) -> Result<CMatrix, LinalgError> {
    if da * db != state.dim {
        return Err(LinalgError::DimMismatch(da * db, state.dim));
    }
    Ok(CMatrix(DMatrix::from_fn(da, db, |a, b| {
        state.amplitudes[a * db + b]
    })))
}

/// Inverse of [`matricize`].
pub fn unmatricize(m: &CMatrix) -> PureState {
    let (da, db) = m.shape();
    let mut v = DVector::zeros(da * db);
    for a in 0..da {
        for b in 0..db {
            v[a * db + b] = m.0[(a, b)];
        }
    }
    PureState {
        dim: da * db,
        amplitudes: v,
    }
}

// ---------------------------------------------------------------------------
// Seeded random sampling (fuzz-suite inputs)
// ---------------------------------------------------------------------------

pub mod sample {
    use super::*;
    use rand::Rng;

    fn gaussian(rng: &mut impl Rng) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
        Complex64::new(gaussian(rng), gaussian(rng))
    }

    /// Full-rank random density matrix (Ginibre construction).
    pub fn density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
        let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        let h = &g * g.adjoint();
        let tr: Complex64 = h.diagonal().iter().sum();
        DensityMatrix::new(CMatrix(h.map(|z| z / tr.re))).expect("Ginibre state is valid")
    }

    pub fn pure_state(rng: &mut impl Rng, dim: usize) -> PureState {
        let mut v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let n = v.norm();
        v /= Complex64::new(n, 0.0);
        PureState {
            dim,
            amplitudes: v,
        }
    }

    /// Haar-ish random unitary: QR of a Ginibre matrix with phase fixing.
    pub fn unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
        let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for c in 0..dim {
            let d = r[(c, c)];
            if d.norm() > 0.0 {
                let phase = d / Complex64::new(d.norm(), 0.0);
                for rr in 0..dim {
                    q[(rr, c)] *= phase;
                }
            }
        }
        CMatrix(q)
    }

    /// Random channel with `n_kraus` operators via a Stinespring isometry.
    pub fn channel(rng: &mut impl Rng, dim: usize, n_kraus: usize) -> Channel {
        let big = DMatrix::from_fn(dim * n_kraus, dim, |_, _| complex_gaussian(rng));
        let qr = big.qr();
        let q = qr.q();
        let kraus = (0..n_kraus)
            .map(|e| CMatrix(DMatrix::from_fn(dim, dim, |r, c| q[(e * dim + r, c)])))
            .collect();
        Channel::new(kraus).expect("Stinespring slices are trace preserving")
    }
}
