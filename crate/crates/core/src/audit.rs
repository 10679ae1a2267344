//! Audits of explicit quantum strategies for CHSH(n)-type XOR games:
//! the condition-(0) bias window, the equivalence residual sums, the
//! anticommutator residual, index-permutation residuals, approximality
//! residuals, and the odd-n signed block identity.
//!
//! The canonical observable family is the Jordan–Wigner chain construction
//! on 2^⌈n/2⌉ dimensions: single-qubit σx/σy heads with σz tails, plus the
//! full σz chain when n is odd. These pairwise anticommute exactly and are
//! the standard family behind the CHSH(n) optimality literature.

use crate::linalg::{
    hermitian_eig, pauli_x, pauli_y, pauli_z, CMatrix, LinalgError, PureState,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("no question pairs: n = {0} gives an empty pair set")]
    EmptyPairSet(usize),
    #[error("n = {0} is even; the signed block identity needs odd n")]
    EvenN(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

const INVOLUTION_TOL: f64 = 1e-10;

/// Guard for bound checks when the audited strategy is (numerically)
/// exactly optimal and epsilon underflows to zero or below.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// Explicit XOR-game strategy: n observables per side plus a shared state.
/// `b_obs[i][j]` holds B_ij for i ≠ j; diagonal entries are unused.
#[derive(Clone, Debug)]
pub struct XorStrategy {
    pub n: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub a_obs: Vec<CMatrix>,
    pub b_obs: Vec<Vec<Option<CMatrix>>>,
    pub psi: PureState,
}

impl XorStrategy {
    pub fn new(
        a_obs: Vec<CMatrix>,
        b_obs: Vec<Vec<Option<CMatrix>>>,
        psi: PureState,
    ) -> Result<Self, AuditError> {
        let n = a_obs.len();
        if n == 0 {
            return Err(AuditError::InvalidStrategy("no observables".into()));
        }
        let dim_a = a_obs[0].shape().0;
        for (i, a) in a_obs.iter().enumerate() {
            check_involution(a, dim_a, &format!("A_{i}"))?;
        }
        if b_obs.len() != n || b_obs.iter().any(|row| row.len() != n) {
            return Err(AuditError::InvalidStrategy(
                "B table must be n x n with unused diagonal".into(),
            ));
        }
        let mut dim_b = 0;
        for (i, row) in b_obs.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                let b = entry.as_ref().ok_or_else(|| {
                    AuditError::InvalidStrategy(format!("missing B_{i}{j}"))
                })?;
                if dim_b == 0 {
                    dim_b = b.shape().0;
                }
                check_involution(b, dim_b, &format!("B_{i}{j}"))?;
            }
        }
        if n == 1 {
            dim_b = psi.dim / dim_a;
        }
        if dim_a * dim_b != psi.dim {
            return Err(AuditError::InvalidStrategy(format!(
                "state dim {} is not {dim_a} x {dim_b}",
                psi.dim
            )));
        }
        let norm = psi.amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(AuditError::InvalidStrategy(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(XorStrategy {
            n,
            dim_a,
            dim_b,
            a_obs,
            b_obs,
            psi,
        })
    }

    fn b(&self, i: usize, j: usize) -> &CMatrix {
        self.b_obs[i][j].as_ref().expect("validated off-diagonal")
    }
}

fn check_involution(m: &CMatrix, dim: usize, name: &str) -> Result<(), AuditError> {
    if m.shape() != (dim, dim) {
        return Err(AuditError::InvalidStrategy(format!(
            "{name} has shape {:?}, expected {dim}x{dim}",
            m.shape()
        )));
    }
    if m.hermiticity_deviation() > INVOLUTION_TOL {
        return Err(AuditError::InvalidStrategy(format!(
            "{name} is not Hermitian"
        )));
    }
    let sq = m.mul(m);
    let dev = sq.sub(&CMatrix::identity(dim)).max_abs();
    if dev > INVOLUTION_TOL {
        return Err(AuditError::InvalidStrategy(format!(
            "{name} squared deviates from identity by {dev:.3e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical construction
// ---------------------------------------------------------------------------

fn kron_chain(factors: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for f in factors {
        out = out.kron(f);
    }
    out
}

/// Pairwise-anticommuting ±1 observables on dimension 2^⌈n/2⌉: for each
/// k, an σx head and an σy head over a σz tail of length k−1 (rightmost
/// qubits), and for odd n the full σz chain as the last element.
pub fn canonical_anticommuting_family(n: usize) -> Vec<CMatrix> {
    assert!(n >= 1);
    let qubits = n.div_ceil(2);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n / 2 {
        for head in [pauli_x(), pauli_y()] {
            let mut factors = vec![CMatrix::identity(2); qubits - k];
            factors.push(head);
            for _ in 0..k - 1 {
                factors.push(pauli_z());
            }
            out.push(kron_chain(&factors));
        }
    }
    if n % 2 == 1 {
        out.push(kron_chain(&vec![pauli_z(); qubits]));
    }
    out
}

/// The canonical optimal CHSH(n) strategy: anticommuting A_i, Bob's
/// observables B_ij = ((A_i+A_j)/√2)ᵀ and B_ji = ((A_i−A_j)/√2)ᵀ for
/// i < j, and the maximally entangled shared state.
pub fn canonical_chsh_strategy(n: usize) -> Result<XorStrategy, AuditError> {
    if n < 2 {
        return Err(AuditError::EmptyPairSet(n));
    }
    let a_obs = canonical_anticommuting_family(n);
    let d = a_obs[0].shape().0;
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut b_obs: Vec<Vec<Option<CMatrix>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            b_obs[i][j] = Some(a_obs[i].add(&a_obs[j]).scale(inv_sqrt2).transpose());
            b_obs[j][i] = Some(a_obs[i].sub(&a_obs[j]).scale(inv_sqrt2).transpose());
        }
    }
    XorStrategy::new(a_obs, b_obs, PureState::maximally_entangled(d))
}

// ---------------------------------------------------------------------------
// Residual computations
// ---------------------------------------------------------------------------

fn apply_ab(s: &XorStrategy, a: Option<&CMatrix>, b: Option<&CMatrix>) -> DVector<Complex64> {
    // (A ⊗ B)|psi> without forming the Kronecker product.
    let (da, db) = (s.dim_a, s.dim_b);
    let mut m = DMatrix::<Complex64>::zeros(da, db);
    for i in 0..da {
        for j in 0..db {
            m[(i, j)] = s.psi.amplitudes[i * db + j];
        }
    }
    let m = match a {
        Some(a) => &a.0 * m,
        None => m,
    };
    let m = match b {
        Some(b) => m * b.0.transpose(),
        None => m,
    };
    let mut v = DVector::zeros(da * db);
    for i in 0..da {
        for j in 0..db {
            v[i * db + j] = m[(i, j)];
        }
    }
    v
}

fn expectation(s: &XorStrategy, a: &CMatrix, b: &CMatrix) -> f64 {
    let v = apply_ab(s, Some(a), Some(b));
    s.psi
        .amplitudes
        .dotc(&v)
        .re
}

/// Condition-(0) report: the achieved middle expression m and ε = 1 − √2·m.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionZeroReport {
    pub achieved: f64,
    pub epsilon: f64,
}

/// Evaluate (1/(4·C(n,2))) Σ_{i<j} <ψ|(A_iB_ij + A_jB_ij + A_iB_ji −
/// A_jB_ji)|ψ> and the implied ε.
pub fn condition_zero_epsilon(s: &XorStrategy) -> Result<ConditionZeroReport, AuditError> {
    if s.n < 2 {
        return Err(AuditError::EmptyPairSet(s.n));
    }
    let pairs = (s.n * (s.n - 1) / 2) as f64;
    let mut total = 0.0;
    for i in 0..s.n {
        for j in i + 1..s.n {
            total += expectation(s, &s.a_obs[i], s.b(i, j));
            total += expectation(s, &s.a_obs[j], s.b(i, j));
            total += expectation(s, &s.a_obs[i], s.b(j, i));
            total -= expectation(s, &s.a_obs[j], s.b(j, i));
        }
    }
    let achieved = total / (4.0 * pairs);
    Ok(ConditionZeroReport {
        achieved,
        epsilon: 1.0 - std::f64::consts::SQRT_2 * achieved,
    })
}

/// The four equivalence residual sums and their bound checks.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    /// Σ ‖[(A_i+A_j)/√2 ⊗ I]ψ − [I⊗B_ij]ψ‖².
    pub sum_plus: f64,
    /// Σ ‖[(A_i−A_j)/√2 ⊗ I]ψ − [I⊗B_ji]ψ‖².
    pub sum_minus: f64,
    /// Σ ‖[A_i ⊗ I]ψ − [I⊗(B_ij+B_ji)/√2]ψ‖².
    pub sum_rev_plus: f64,
    /// Σ ‖[A_j ⊗ I]ψ − [I⊗(B_ij−B_ji)/√2]ψ‖².
    pub sum_rev_minus: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub forward_holds: bool,
    pub reversed_holds: bool,
}

pub fn equivalence_residuals(s: &XorStrategy) -> Result<EquivalenceReport, AuditError> {
    let eps = condition_zero_epsilon(s)?.epsilon;
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..s.n {
        for j in i + 1..s.n {
            let plus = s.a_obs[i].add(&s.a_obs[j]).scale(inv_sqrt2);
            let minus = s.a_obs[i].sub(&s.a_obs[j]).scale(inv_sqrt2);
            let r1 = apply_ab(s, Some(&plus), None) - apply_ab(s, None, Some(s.b(i, j)));
            s1 += r1.norm_squared();
            let r2 = apply_ab(s, Some(&minus), None) - apply_ab(s, None, Some(s.b(j, i)));
            s2 += r2.norm_squared();
            let bp = s.b(i, j).add(s.b(j, i)).scale(inv_sqrt2);
            let bm = s.b(i, j).sub(s.b(j, i)).scale(inv_sqrt2);
            let r3 = apply_ab(s, Some(&s.a_obs[i]), None) - apply_ab(s, None, Some(&bp));
            s3 += r3.norm_squared();
            let r4 = apply_ab(s, Some(&s.a_obs[j]), None) - apply_ab(s, None, Some(&bm));
            s4 += r4.norm_squared();
        }
    }
    let bound = 2.0 * (s.n * (s.n - 1)) as f64 * eps.max(EPSILON_FLOOR);
    Ok(EquivalenceReport {
        sum_plus: s1,
        sum_minus: s2,
        sum_rev_plus: s3,
        sum_rev_minus: s4,
        epsilon: eps,
        bound,
        forward_holds: s1 + s2 <= bound + 1e-9,
        reversed_holds: s3 + s4 <= bound + 1e-9,
    })
}

/// Anticommutator residual report against 2(7/3)²n(n−1)ε.
#[derive(Clone, Debug, Serialize)]
pub struct AnticommutatorReport {
    pub residual_sum: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn anticommutator_residual(s: &XorStrategy) -> Result<AnticommutatorReport, AuditError> {
    let eps = condition_zero_epsilon(s)?.epsilon;
    let half = Complex64::new(0.5, 0.0);
    let mut total = 0.0;
    for i in 0..s.n {
        for j in i + 1..s.n {
            let anti = s.a_obs[i]
                .mul(&s.a_obs[j])
                .add(&s.a_obs[j].mul(&s.a_obs[i]))
                .scale(half);
            total += apply_ab(s, Some(&anti), None).norm_squared();
        }
    }
    let bound = 2.0 * (7.0f64 / 3.0).powi(2) * (s.n * (s.n - 1)) as f64 * eps.max(EPSILON_FLOOR);
    Ok(AnticommutatorReport {
        residual_sum: total,
        epsilon: eps,
        bound,
        holds: total <= bound + 1e-9,
    })
}

/// Residual from reordering the factors of a monomial in the A observables:
/// ‖((Π A_i^{j_i} − Π_{σ} A_{σ(i)}^{j_{σ(i)}}) ⊗ I)ψ‖, reported against
/// (100/9)n²√ε.
#[derive(Clone, Debug, Serialize)]
pub struct PermutationReport {
    pub residual: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn permutation_error_residual(
    s: &XorStrategy,
    exponents: &[u8],
    perm: &[usize],
) -> Result<PermutationReport, AuditError> {
    if exponents.len() != s.n || perm.len() != s.n {
        return Err(AuditError::InvalidStrategy(
            "exponent tuple and permutation must have length n".into(),
        ));
    }
    let mut seen = vec![false; s.n];
    for &p in perm {
        if p >= s.n || seen[p] {
            return Err(AuditError::InvalidStrategy("not a permutation".into()));
        }
        seen[p] = true;
    }
    let product = |order: &dyn Fn(usize) -> usize| -> CMatrix {
        let mut m = CMatrix::identity(s.dim_a);
        for i in 0..s.n {
            let idx = order(i);
            if exponents[idx] % 2 == 1 {
                m = m.mul(&s.a_obs[idx]);
            }
        }
        m
    };
    let straight = product(&|i| i);
    let permuted = product(&|i| perm[i]);
    let residual = apply_ab(s, Some(&straight.sub(&permuted)), None).norm();
    let eps = condition_zero_epsilon(s)?.epsilon;
    let bound = 100.0 / 9.0 * (s.n * s.n) as f64 * eps.max(EPSILON_FLOOR).sqrt();
    Ok(PermutationReport {
        residual,
        epsilon: eps,
        bound,
        holds: residual <= bound + 1e-9,
    })
}

/// Unitary sign M/|M| of a Hermitian matrix (zero on the kernel).
fn operator_sign(m: &CMatrix) -> Result<CMatrix, AuditError> {
    let eig = hermitian_eig(m)?;
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for c in 0..n {
        let sv = if eig.values[c] > INVOLUTION_TOL {
            1.0
        } else if eig.values[c] < -INVOLUTION_TOL {
            -1.0
        } else {
            0.0
        };
        for r in 0..n {
            scaled[(r, c)] *= Complex64::new(sv, 0.0);
        }
    }
    Ok(CMatrix(scaled * eig.vectors.adjoint()))
}

/// Approximality residual (the 17√(nε) family):
/// min over signs of ‖(A_k⊗I)ψ − (I⊗(±B_kl+B_lk)/|±B_kl+B_lk|)ψ‖.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximalityReport {
    pub residual_plus: f64,
    pub residual_minus: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn approximality_residual(
    s: &XorStrategy,
    k: usize,
    l: usize,
) -> Result<ApproximalityReport, AuditError> {
    if k == l || k >= s.n || l >= s.n {
        return Err(AuditError::InvalidStrategy(format!(
            "need distinct indices below n, got ({k},{l})"
        )));
    }
    let eps = condition_zero_epsilon(s)?.epsilon;
    let lhs = apply_ab(s, Some(&s.a_obs[k]), None);
    let mut residuals = [0.0; 2];
    for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
        let combo = s
            .b(k, l)
            .scale(Complex64::new(sign, 0.0))
            .add(s.b(l, k));
        let signed = operator_sign(&combo)?;
        let rhs = apply_ab(s, None, Some(&signed));
        residuals[slot] = (&lhs - rhs).norm();
    }
    let bound = 17.0 * ((s.n as f64) * eps.max(EPSILON_FLOOR)).sqrt();
    let best = residuals[0].min(residuals[1]);
    Ok(ApproximalityReport {
        residual_plus: residuals[0],
        residual_minus: residuals[1],
        epsilon: eps,
        bound,
        holds: best <= bound + 1e-9,
    })
}

/// Tensor-square approximality residual (the 20√(Nε) display, with the
/// strong-repetition composition evaluated as a tensor product):
/// ‖((A_k⊗A_k')⊗I)Ψ − (I⊗sign(±B_kl⊗B_k'l' + B_lk⊗B_l'k'))Ψ‖ on Ψ = ψ⊗ψ.
/// Recorded, not asserted: the displayed constant is not reproducible even
/// at the exact optimum for this composition.
#[derive(Clone, Debug, Serialize)]
pub struct RepeatedApproximalityReport {
    pub residual_plus: f64,
    pub residual_minus: f64,
    pub epsilon: f64,
    pub stated_bound: f64,
}

pub fn repeated_approximality_residual(
    s: &XorStrategy,
    k: usize,
    l: usize,
) -> Result<RepeatedApproximalityReport, AuditError> {
    if k == l || k >= s.n || l >= s.n {
        return Err(AuditError::InvalidStrategy(format!(
            "need distinct indices below n, got ({k},{l})"
        )));
    }
    let eps = condition_zero_epsilon(s)?.epsilon;
    // Reorder psi ⊗ psi into (A registers) ⊗ (B registers).
    let (da, db) = (s.dim_a, s.dim_b);
    let big = da * da * db * db;
    let mut amps = DVector::<Complex64>::zeros(big);
    for a1 in 0..da {
        for b1 in 0..db {
            for a2 in 0..da {
                for b2 in 0..db {
                    amps[((a1 * da + a2) * db + b1) * db + b2] =
                        s.psi.amplitudes[a1 * db + b1] * s.psi.amplitudes[a2 * db + b2];
                }
            }
        }
    }
    let paired = XorStrategy {
        n: 1,
        dim_a: da * da,
        dim_b: db * db,
        a_obs: vec![s.a_obs[k].kron(&s.a_obs[k])],
        b_obs: vec![vec![None]],
        psi: PureState {
            dim: big,
            amplitudes: amps,
        },
    };
    let lhs = apply_ab(&paired, Some(&paired.a_obs[0]), None);
    let mut residuals = [0.0; 2];
    for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
        let combo = s
            .b(k, l)
            .kron(s.b(k, l))
            .scale(Complex64::new(sign, 0.0))
            .add(&s.b(l, k).kron(s.b(l, k)));
        let signed = operator_sign(&combo)?;
        let rhs = apply_ab(&paired, None, Some(&signed));
        residuals[slot] = (&lhs - rhs).norm();
    }
    let stated_bound = 20.0 * (2.0 * eps.max(EPSILON_FLOOR)).sqrt();
    Ok(RepeatedApproximalityReport {
        residual_plus: residuals[0],
        residual_minus: residuals[1],
        epsilon: eps,
        stated_bound,
    })
}

/// Monomial-contraction residual of the Frobenius-bound family:
/// ‖[(P − ω·sign·P) ⊗ I]ψ‖_F for P = Π A_i^{j_i}, reported against both the
/// per-term bound (n₁ + (n₁+2)/ω)·n^N·√ε and the aggregate 5(N·n^N)²√ε.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub residual: f64,
    pub per_term_bound: f64,
    pub aggregate_bound: f64,
    pub epsilon: f64,
}

pub fn product_contraction_residual(
    s: &XorStrategy,
    exponents: &[u8],
    sign: f64,
    omega: f64,
    n1: f64,
) -> Result<ContractionReport, AuditError> {
    if exponents.len() != s.n {
        return Err(AuditError::InvalidStrategy(
            "exponent tuple must have length n".into(),
        ));
    }
    if !(omega > 0.0) {
        return Err(AuditError::InvalidStrategy("omega must be positive".into()));
    }
    let mut p = CMatrix::identity(s.dim_a);
    for (i, &e) in exponents.iter().enumerate() {
        if e % 2 == 1 {
            p = p.mul(&s.a_obs[i]);
        }
    }
    let contracted = p.sub(&p.scale(Complex64::new(sign * omega, 0.0)));
    let residual = apply_ab(s, Some(&contracted), None).norm();
    let eps = condition_zero_epsilon(s)?.epsilon.max(EPSILON_FLOOR);
    let nf = s.n as f64;
    let n_pow = nf.powi(2); // two players
    let per_term_bound = (n1 + (n1 + 2.0) / omega) * n_pow * eps.sqrt();
    let aggregate_bound = 5.0 * (2.0 * n_pow).powi(2) * eps.sqrt();
    Ok(ContractionReport {
        residual,
        per_term_bound,
        aggregate_bound,
        epsilon: eps,
    })
}

/// Signed block identity for the canonical family at odd n: the product
/// of the observables equals φ·diag(I, −I) exactly, with φ the
/// construction's global phase i^⌊n/2⌋. The alternating-sign convention
/// (−1)ⁿ is reported as a flag rather than enforced: a product of
/// pairwise-anticommuting involutions squares to (−1)^(n(n−1)/2)·I, so no
/// family can realize a real ±1 scalar at n ≡ 3 (mod 4).
#[derive(Clone, Debug, Serialize)]
pub struct BlockIdentityReport {
    pub n: usize,
    pub dim: usize,
    pub phase_re: f64,
    pub phase_im: f64,
    pub deviation: f64,
    pub alternating_scalar: f64,
    pub phase_matches_alternating: bool,
}

pub fn block_identity_check(n: usize) -> Result<BlockIdentityReport, AuditError> {
    if n % 2 == 0 {
        return Err(AuditError::EvenN(n));
    }
    if n > 9 {
        return Err(AuditError::InvalidStrategy(format!(
            "n = {n} beyond the desk-scale limit 9"
        )));
    }
    let family = canonical_anticommuting_family(n);
    let d = family[0].shape().0;
    let mut p = CMatrix::identity(d);
    for a in &family {
        p = p.mul(a);
    }
    // Fit the unimodular phase from the leading diagonal entry.
    let lead = p.0[(0, 0)];
    let phase = if lead.norm() > 0.0 {
        lead / Complex64::new(lead.norm(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut target = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        target[(i, i)] = if i < d / 2 {
            phase
        } else {
            -phase
        };
    }
    let deviation = (&p.0 - &target).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let alternating_scalar = if n % 2 == 1 { -1.0 } else { 1.0 };
    Ok(BlockIdentityReport {
        n,
        dim: d,
        phase_re: phase.re,
        phase_im: phase.im,
        deviation,
        alternating_scalar,
        phase_matches_alternating: (phase - Complex64::new(alternating_scalar, 0.0)).norm()
            < 1e-9,
    })
}

// ---------------------------------------------------------------------------
// Perturbations (fuzz-family inputs)
// ---------------------------------------------------------------------------

/// Round a Hermitian matrix to the nearest ±1 involution by snapping its
/// eigenvalues to their signs.
pub fn involution_round(m: &CMatrix) -> Result<CMatrix, AuditError> {
    let eig = hermitian_eig(m)?;
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for c in 0..n {
        let sv = if eig.values[c] >= 0.0 { 1.0 } else { -1.0 };
        for r in 0..n {
            scaled[(r, c)] *= Complex64::new(sv, 0.0);
        }
    }
    Ok(CMatrix(scaled * eig.vectors.adjoint()))
}

/// Random small perturbation of a strategy: every observable is nudged by
/// a random Hermitian of scale `magnitude` and snapped back onto the
/// involution manifold; the state gets a matching nudge and renormalize.
pub fn perturbed_strategy(
    base: &XorStrategy,
    magnitude: f64,
    rng: &mut impl rand::Rng,
) -> Result<XorStrategy, AuditError> {
    fn nudge(
        m: &CMatrix,
        magnitude: f64,
        rng: &mut impl rand::Rng,
    ) -> Result<CMatrix, AuditError> {
        let d = m.shape().0;
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for r in 0..d {
            for c in r..d {
                let re = rng.gen_range(-1.0..1.0) * magnitude;
                let im = if r == c {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0) * magnitude
                };
                h[(r, c)] = Complex64::new(re, im);
                h[(c, r)] = Complex64::new(re, -im);
            }
        }
        involution_round(&CMatrix(&m.0 + h))
    }
    let a_obs = base
        .a_obs
        .iter()
        .map(|a| nudge(a, magnitude, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let mut b_obs: Vec<Vec<Option<CMatrix>>> = vec![vec![None; base.n]; base.n];
    for i in 0..base.n {
        for j in 0..base.n {
            if i != j {
                b_obs[i][j] = Some(nudge(base.b(i, j), magnitude, rng)?);
            }
        }
    }
    let mut amps = base.psi.amplitudes.clone();
    for i in 0..amps.len() {
        amps[i] += Complex64::new(
            rng.gen_range(-1.0..1.0) * magnitude * 0.1,
            rng.gen_range(-1.0..1.0) * magnitude * 0.1,
        );
    }
    let norm = amps.norm();
    for i in 0..amps.len() {
        amps[i] /= Complex64::new(norm, 0.0);
    }
    XorStrategy::new(
        a_obs,
        b_obs,
        PureState {
            dim: base.psi.dim,
            amplitudes: amps,
        },
    )
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct StrategyJson {
    pub n: usize,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub a: Vec<CMatrix>,
    pub b: Vec<Vec<Option<CMatrix>>>,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
}

impl StrategyJson {
    pub fn resolve(&self) -> Result<XorStrategy, AuditError> {
        if self.psi_re.len() != self.d_a * self.d_b || self.psi_im.len() != self.psi_re.len() {
            return Err(AuditError::InvalidStrategy(
                "state amplitude count does not match dA*dB".into(),
            ));
        }
        let amps: Vec<Complex64> = self
            .psi_re
            .iter()
            .zip(&self.psi_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let psi = PureState::new(amps).map_err(AuditError::Linalg)?;
        XorStrategy::new(self.a.clone(), self.b.clone(), psi)
    }

    pub fn from_strategy(s: &XorStrategy) -> Self {
        StrategyJson {
            n: s.n,
            d_a: s.dim_a,
            d_b: s.dim_b,
            a: s.a_obs.clone(),
            b: s.b_obs.clone(),
            psi_re: s.psi.amplitudes.iter().map(|z| z.re).collect(),
            psi_im: s.psi.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}
