//! Entropy functionals and the inequality verification toolkit: relative
//! entropy, relative-min entropy, mutual information on classical-quantum
//! states, Pinsker and Raz checks, and the CSV fuzz harness.
//!
//! All entropies use base-2 logarithms. Support comparisons share the
//! 1e-10 eigenvalue threshold with the state validators.

use crate::linalg::{hermitian_eig, CMatrix, DensityMatrix, LinalgError, EIG_ZERO_TOL, STATE_TOL};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("register index {0} out of range (have {1})")]
    BadRegisterIndex(usize, usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("{0}")]
    Invalid(String),
}

const LN2: f64 = std::f64::consts::LN_2;

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, EntropyError> {
    let eig = hermitian_eig(rho.matrix())?;
    Ok(eig
        .values
        .iter()
        .map(|&l| if l > EIG_ZERO_TOL { -l * l.log2() } else { 0.0 })
        .sum())
}

/// Shannon entropy in bits of a probability vector.
fn shannon(p: &[f64]) -> f64 {
    p.iter()
        .map(|&x| if x > 1e-15 { -x * x.log2() } else { 0.0 })
        .sum()
}

/// Relative entropy D(ρ‖σ) = Tr ρ (log₂ρ − log₂σ); +∞ when the support of
/// ρ leaks outside the support of σ (eigenvalue threshold 1e-10).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, EntropyError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimMismatch(rho.dim(), sigma.dim()).into());
    }
    let es = hermitian_eig(sigma.matrix())?;
    let mut off_support = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        if s <= STATE_TOL {
            let v = es.vectors.column(k);
            let rv = &rho.matrix().0 * v;
            off_support += v.dotc(&rv).re;
        }
    }
    if off_support > STATE_TOL {
        return Ok(f64::INFINITY);
    }
    let er = hermitian_eig(rho.matrix())?;
    let tr_rho_log_rho: f64 = er
        .values
        .iter()
        .map(|&l| if l > EIG_ZERO_TOL { l * l.log2() } else { 0.0 })
        .sum();
    let mut tr_rho_log_sigma = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        if s > STATE_TOL {
            let v = es.vectors.column(k);
            let rv = &rho.matrix().0 * v;
            tr_rho_log_sigma += v.dotc(&rv).re * s.log2();
        }
    }
    Ok((tr_rho_log_rho - tr_rho_log_sigma).max(0.0))
}

/// Relative-min entropy S∞(ρ‖σ) = min { λ : ρ ≤ 2^λ σ }, computed as the
/// base-2 log of the largest eigenvalue of σ^{-1/2} ρ σ^{-1/2} on the
/// support of σ; +∞ when ρ has weight off that support.
pub fn relative_min_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64, EntropyError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimMismatch(rho.dim(), sigma.dim()).into());
    }
    let es = hermitian_eig(sigma.matrix())?;
    let d = sigma.dim();
    let support: Vec<usize> = (0..d).filter(|&k| es.values[k] > STATE_TOL).collect();
    let mut off_support = 0.0;
    for k in 0..d {
        if es.values[k] <= STATE_TOL {
            let v = es.vectors.column(k);
            let rv = &rho.matrix().0 * v;
            off_support += v.dotc(&rv).re;
        }
    }
    if off_support > STATE_TOL {
        return Ok(f64::INFINITY);
    }
    let m = DMatrix::from_fn(support.len(), support.len(), |i, j| {
        let vi = es.vectors.column(support[i]);
        let vj = es.vectors.column(support[j]);
        let rv = &rho.matrix().0 * vj;
        vi.dotc(&rv) / (es.values[support[i]] * es.values[support[j]]).sqrt()
    });
    let me = hermitian_eig(&CMatrix(m))?;
    let lam_max = me.values.last().copied().unwrap_or(0.0).max(0.0);
    if lam_max <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lam_max.log2())
}

/// Two-sided report for an inequality check.
#[derive(Clone, Debug, Serialize)]
pub struct IneqReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Squared Pinsker: (1/(2 ln 2)) ‖ρ−σ‖₁² ≤ D(ρ‖σ).
pub fn pinsker_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<IneqReport, EntropyError> {
    let t = crate::linalg::trace_norm(&rho.matrix().sub(sigma.matrix()))?;
    let lhs = t * t / (2.0 * LN2);
    let rhs = relative_entropy(rho, sigma)?;
    Ok(IneqReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

// ---------------------------------------------------------------------------
// Classical-quantum states
// ---------------------------------------------------------------------------

/// Classical registers X₁…X_m with a joint distribution over their tuples
/// and one conditional state on register A per classical tuple.
#[derive(Clone, Debug)]
pub struct CQState {
    /// Alphabet size per classical register.
    pub register_dims: Vec<usize>,
    /// Joint classical distribution, flat-indexed (register 0 most
    /// significant), one entry per tuple.
    pub classical: Vec<f64>,
    /// Conditional state of A for each classical tuple (same indexing).
    pub conditional: Vec<DensityMatrix>,
}

impl CQState {
    pub fn new(
        register_dims: Vec<usize>,
        classical: Vec<f64>,
        conditional: Vec<DensityMatrix>,
    ) -> Result<Self, EntropyError> {
        let total: usize = register_dims.iter().product();
        if classical.len() != total || conditional.len() != total {
            return Err(EntropyError::Invalid(format!(
                "expected {total} tuples, got {} masses and {} states",
                classical.len(),
                conditional.len()
            )));
        }
        let sum: f64 = classical.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || classical.iter().any(|&p| p < -1e-15) {
            return Err(EntropyError::Invalid(format!(
                "classical table sums to {sum}"
            )));
        }
        let dim_a = conditional[0].dim();
        if conditional.iter().any(|c| c.dim() != dim_a) {
            return Err(EntropyError::Invalid(
                "conditional states have mixed dimensions".into(),
            ));
        }
        Ok(CQState {
            register_dims,
            classical,
            conditional,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.conditional[0].dim()
    }

    fn tuple_of(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.register_dims.len()];
        for i in (0..self.register_dims.len()).rev() {
            out[i] = flat % self.register_dims[i];
            flat /= self.register_dims[i];
        }
        out
    }

    /// Marginal distribution of one register.
    pub fn register_marginal(&self, which: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.register_dims[which]];
        for (flat, &p) in self.classical.iter().enumerate() {
            out[self.tuple_of(flat)[which]] += p;
        }
        out
    }

    /// Average state of A.
    pub fn a_marginal(&self) -> Result<DensityMatrix, EntropyError> {
        let d = self.dim_a();
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        for (p, c) in self.classical.iter().zip(&self.conditional) {
            acc += c.matrix().0.map(|z| z * *p);
        }
        Ok(DensityMatrix::new(CMatrix(acc))?)
    }

    /// Conditional average state of A given register `which` = value.
    fn a_given(&self, which: usize, value: usize) -> Option<DensityMatrix> {
        let d = self.dim_a();
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        let mut mass = 0.0;
        for (flat, &p) in self.classical.iter().enumerate() {
            if self.tuple_of(flat)[which] == value {
                acc += self.conditional[flat].matrix().0.map(|z| z * p);
                mass += p;
            }
        }
        if mass <= 1e-15 {
            return None;
        }
        DensityMatrix::new(CMatrix(acc.map(|z| z / mass))).ok()
    }

    /// Is the classical table a product of its register marginals?
    pub fn classical_is_product(&self, tol: f64) -> bool {
        let marginals: Vec<Vec<f64>> = (0..self.register_dims.len())
            .map(|i| self.register_marginal(i))
            .collect();
        for (flat, &p) in self.classical.iter().enumerate() {
            let t = self.tuple_of(flat);
            let prod: f64 = t.iter().zip(&marginals).map(|(&v, m)| m[v]).product();
            if (p - prod).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Is A independent of the classical part (all conditional states equal
    /// on tuples with positive mass)?
    pub fn a_is_independent(&self, tol: f64) -> bool {
        let mut reference: Option<&DensityMatrix> = None;
        for (flat, &p) in self.classical.iter().enumerate() {
            if p > 1e-15 {
                match reference {
                    None => reference = Some(&self.conditional[flat]),
                    Some(r) => {
                        if self.conditional[flat].matrix().sub(r.matrix()).max_abs() > tol {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// I(X_i : A) = S(X_i) + S(A) − S(X_i A), through the block-diagonal
/// structure of the classical-quantum joint state.
pub fn mutual_information(state: &CQState, which: usize) -> Result<f64, EntropyError> {
    if which >= state.register_dims.len() {
        return Err(EntropyError::BadRegisterIndex(
            which,
            state.register_dims.len(),
        ));
    }
    let px = state.register_marginal(which);
    let s_x = shannon(&px);
    let s_a = von_neumann_entropy(&state.a_marginal()?)?;
    // S(X_i A) = H(X_i) + Σ_x p(x) S(A | X_i = x).
    let mut s_xa = s_x;
    for (x, &p) in px.iter().enumerate() {
        if p > 1e-15 {
            if let Some(cond) = state.a_given(which, x) {
                s_xa += p * von_neumann_entropy(&cond)?;
            }
        }
    }
    Ok((s_x + s_a - s_xa).max(0.0))
}

/// Relative entropy between two classical-quantum states with the same
/// register layout, using the block-diagonal decomposition.
pub fn cq_relative_entropy(rho: &CQState, sigma: &CQState) -> Result<f64, EntropyError> {
    if rho.register_dims != sigma.register_dims || rho.dim_a() != sigma.dim_a() {
        return Err(EntropyError::Invalid(
            "classical-quantum states have mismatched shapes".into(),
        ));
    }
    let mut total = 0.0;
    for (flat, &p) in rho.classical.iter().enumerate() {
        if p <= 1e-15 {
            continue;
        }
        let q = sigma.classical[flat];
        if q <= 1e-15 {
            return Ok(f64::INFINITY);
        }
        total += p * (p / q).log2();
        let d = relative_entropy(&rho.conditional[flat], &sigma.conditional[flat])?;
        if d.is_infinite() {
            return Ok(f64::INFINITY);
        }
        total += p * d;
    }
    Ok(total.max(0.0))
}

/// Raz-lemma report: Σ_i I(X_i:A)_ρ vs D(ρ^{XA}‖σ^{XA}).
#[derive(Clone, Debug, Serialize)]
pub struct RazReport {
    pub mutual_information_sum: f64,
    pub relative_entropy: f64,
    pub holds: bool,
}

/// Check Σ_i I(X_i:A)_ρ ≤ D(ρ‖σ). Preconditions enforced as stated:
/// ρ's classical part must be a product across registers; σ must be fully
/// product (classical product of marginals, A independent of X).
pub fn raz_check(rho: &CQState, sigma: &CQState) -> Result<RazReport, EntropyError> {
    if rho.register_dims != sigma.register_dims || rho.dim_a() != sigma.dim_a() {
        return Err(EntropyError::Invalid(
            "classical-quantum states have mismatched shapes".into(),
        ));
    }
    if !rho.classical_is_product(1e-9) {
        return Err(EntropyError::HypothesisViolated(
            "rho's classical registers are not independent".into(),
        ));
    }
    if !sigma.classical_is_product(1e-9) {
        return Err(EntropyError::HypothesisViolated(
            "sigma's classical part is not a product of marginals".into(),
        ));
    }
    if !sigma.a_is_independent(1e-9) {
        return Err(EntropyError::HypothesisViolated(
            "sigma's quantum register depends on the classical part".into(),
        ));
    }
    let mut mi_sum = 0.0;
    for i in 0..rho.register_dims.len() {
        mi_sum += mutual_information(rho, i)?;
    }
    let d = cq_relative_entropy(rho, sigma)?;
    Ok(RazReport {
        mutual_information_sum: mi_sum,
        relative_entropy: d,
        holds: mi_sum <= d + 1e-9,
    })
}

// ---------------------------------------------------------------------------
// Fuzz harness
// ---------------------------------------------------------------------------

/// One CSV row of the inequality fuzz suite.
#[derive(Clone, Debug, Serialize)]
pub struct FuzzRow {
    pub instance_seed: u64,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn fuzz_rows_to_csv(rows: &[FuzzRow]) -> String {
    let mut out = String::from("instance_seed,lhs,rhs,slack,holds,check\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.instance_seed, r.lhs, r.rhs, r.slack, r.holds, r.check
        ));
    }
    out
}

/// Run the quantum-inequality fuzz: squared Pinsker, D ≤ S∞, data
/// processing for trace norm / fidelity / D, and Fuchs–van de Graaf, on
/// seeded random state pairs with dims ≤ 4 and random channels.
pub fn inequality_fuzz(
    pairs: usize,
    channels: usize,
    master_seed: u64,
) -> Result<Vec<FuzzRow>, EntropyError> {
    use crate::linalg::{apply_channel, fidelity, sample, trace_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rows = Vec::new();
    for i in 0..pairs {
        let seed = master_seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(2..=4);
        let rho = sample::density(&mut rng, dim);
        let sigma = sample::density(&mut rng, dim);
        let t = trace_norm(&rho.matrix().sub(sigma.matrix()))?;
        let f = fidelity(&rho, &sigma)?;
        let d = relative_entropy(&rho, &sigma)?;
        let s_inf = relative_min_entropy(&rho, &sigma)?;

        let p = pinsker_check(&rho, &sigma)?;
        rows.push(FuzzRow {
            instance_seed: seed,
            check: "pinsker_squared".into(),
            lhs: p.lhs,
            rhs: p.rhs,
            slack: p.rhs - p.lhs,
            holds: p.holds,
        });
        rows.push(FuzzRow {
            instance_seed: seed,
            check: "relative_entropy_le_min_entropy".into(),
            lhs: d,
            rhs: s_inf,
            slack: s_inf - d,
            holds: d <= s_inf + 1e-9,
        });
        rows.push(FuzzRow {
            instance_seed: seed,
            check: "fuchs_van_de_graaf_lower".into(),
            lhs: 2.0 * (1.0 - f),
            rhs: t,
            slack: t - 2.0 * (1.0 - f),
            holds: 2.0 * (1.0 - f) <= t + 1e-9,
        });
        let fvdg_hi = 2.0 * (1.0 - f * f).max(0.0).sqrt();
        rows.push(FuzzRow {
            instance_seed: seed,
            check: "fuchs_van_de_graaf_upper".into(),
            lhs: t,
            rhs: fvdg_hi,
            slack: fvdg_hi - t,
            holds: t <= fvdg_hi + 1e-9,
        });

        if i < channels {
            let n_kraus = rng.gen_range(2..=3);
            let ch = sample::channel(&mut rng, dim, n_kraus);
            let er = apply_channel(&ch, &rho)?;
            let es = apply_channel(&ch, &sigma)?;
            let t_out = trace_norm(&er.matrix().sub(es.matrix()))?;
            rows.push(FuzzRow {
                instance_seed: seed,
                check: "data_processing_trace_norm".into(),
                lhs: t_out,
                rhs: t,
                slack: t - t_out,
                holds: t_out <= t + 1e-9,
            });
            let f_out = fidelity(&er, &es)?;
            rows.push(FuzzRow {
                instance_seed: seed,
                check: "data_processing_fidelity".into(),
                lhs: f,
                rhs: f_out,
                slack: f_out - f,
                holds: f_out >= f - 1e-9,
            });
            let d_out = relative_entropy(&er, &es)?;
            rows.push(FuzzRow {
                instance_seed: seed,
                check: "data_processing_relative_entropy".into(),
                lhs: d_out,
                rhs: d,
                slack: d - d_out,
                holds: d_out <= d + 1e-9,
            });
        }
    }
    Ok(rows)
}

/// Random classical-quantum Raz instances: ρ with product classical part
/// and correlated A; σ fully product.
pub fn raz_fuzz(instances: usize, master_seed: u64) -> Result<Vec<FuzzRow>, EntropyError> {
    use crate::linalg::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rows = Vec::new();
    for i in 0..instances {
        let seed = master_seed.wrapping_add(0x5A5A).wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let dims = vec![2usize; m];
        let total: usize = dims.iter().product();
        let biases: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..0.9)).collect();
        let mut classical = vec![0.0; total];
        for (flat, slot) in classical.iter_mut().enumerate() {
            let mut p = 1.0;
            let mut rest = flat;
            for b in biases.iter().rev() {
                let bit = rest % 2;
                rest /= 2;
                p *= if bit == 0 { *b } else { 1.0 - *b };
            }
            *slot = p;
        }
        let dim_a = 2;
        let conditional: Vec<DensityMatrix> = (0..total)
            .map(|_| sample::density(&mut rng, dim_a))
            .collect();
        let rho = CQState::new(dims.clone(), classical.clone(), conditional)?;

        let sigma_a = sample::density(&mut rng, dim_a);
        let sigma = CQState::new(dims, classical, vec![sigma_a; total])?;

        let rep = raz_check(&rho, &sigma)?;
        rows.push(FuzzRow {
            instance_seed: seed,
            check: "quantum_raz".into(),
            lhs: rep.mutual_information_sum,
            rhs: rep.relative_entropy,
            slack: rep.relative_entropy - rep.mutual_information_sum,
            holds: rep.holds,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sample, DensityMatrix, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket0() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(2, 0))
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = sample::density(&mut rng, 3);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);

        // D(|0><0| || I/2) = 1 bit: Tr rho log rho = 0 and
        // Tr rho log sigma = log(1/2) = -1 by direct eigen-computation.
        let d = relative_entropy(&ket0(), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((d - 1.0).abs() < 1e-10);

        let d = relative_entropy(&ket0(), &DensityMatrix::from_pure(&PureState::basis(2, 1)))
            .unwrap();
        assert!(d.is_infinite());
    }

    #[test]
    fn relative_min_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = sample::density(&mut rng, 3);
        assert!(relative_min_entropy(&rho, &rho).unwrap().abs() < 1e-9);

        let s = relative_min_entropy(&ket0(), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-10);

        for _ in 0..20 {
            let a = sample::density(&mut rng, 3);
            let b = sample::density(&mut rng, 3);
            let d = relative_entropy(&a, &b).unwrap();
            let s = relative_min_entropy(&a, &b).unwrap();
            assert!(d <= s + 1e-9);
        }
    }

    #[test]
    fn min_entropy_commuting_diagonal_oracle() {
        // For commuting diagonal states the answer is max_i log2(p_i/q_i),
        // checked against a direct scan.
        let p = [0.5, 0.3, 0.2];
        let q = [0.2, 0.3, 0.5];
        let mk = |v: &[f64]| {
            let m = CMatrix(DMatrix::from_fn(3, 3, |r, c| {
                if r == c {
                    Complex64::new(v[r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }));
            DensityMatrix::new(m).unwrap()
        };
        let s = relative_min_entropy(&mk(&p), &mk(&q)).unwrap();
        let oracle = p
            .iter()
            .zip(&q)
            .map(|(a, b)| (a / b).log2())
            .fold(f64::MIN, f64::max);
        assert!((s - oracle).abs() < 1e-10);
    }

    #[test]
    fn pinsker_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = sample::density(&mut rng, 2);
        let rep = pinsker_check(&rho, &rho).unwrap();
        assert!(rep.lhs.abs() < 1e-9 && rep.rhs.abs() < 1e-9 && rep.holds);

        let rep =
            pinsker_check(&ket0(), &DensityMatrix::from_pure(&PureState::basis(2, 1))).unwrap();
        assert!((rep.lhs - 4.0 / (2.0 * std::f64::consts::LN_2)).abs() < 1e-9);
        assert!(rep.rhs.is_infinite() && rep.holds);
    }

    #[test]
    fn mutual_information_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = sample::density(&mut rng, 2);
        let s = CQState::new(vec![2], vec![0.5, 0.5], vec![a.clone(), a]).unwrap();
        assert!(mutual_information(&s, 0).unwrap() < 1e-10);

        // Perfectly correlated bit: S(X) = 1, S(A) = 1, S(XA) = 1 -> I = 1.
        let s = CQState::new(
            vec![2],
            vec![0.5, 0.5],
            vec![
                DensityMatrix::from_pure(&PureState::basis(2, 0)),
                DensityMatrix::from_pure(&PureState::basis(2, 1)),
            ],
        )
        .unwrap();
        let mi = mutual_information(&s, 0).unwrap();
        assert!((mi - 1.0).abs() < 1e-10);

        assert!(matches!(
            mutual_information(&s, 3),
            Err(EntropyError::BadRegisterIndex(3, 1))
        ));
    }

    #[test]
    fn raz_product_state_zero_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sample::density(&mut rng, 2);
        let rho = CQState::new(vec![2, 2], vec![0.25; 4], vec![a.clone(); 4]).unwrap();
        let rep = raz_check(&rho, &rho.clone()).unwrap();
        assert!(rep.mutual_information_sum < 1e-10);
        assert!(rep.relative_entropy < 1e-10);
        assert!(rep.holds);
    }

    #[test]
    fn raz_single_register_reduces_to_mi_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = CQState::new(
            vec![2],
            vec![0.5, 0.5],
            vec![sample::density(&mut rng, 2), sample::density(&mut rng, 2)],
        )
        .unwrap();
        let sigma_a = sample::density(&mut rng, 2);
        let sigma = CQState::new(vec![2], vec![0.5, 0.5], vec![sigma_a; 2]).unwrap();
        let rep = raz_check(&rho, &sigma).unwrap();
        let mi = mutual_information(&rho, 0).unwrap();
        assert!((rep.mutual_information_sum - mi).abs() < 1e-12);
        assert!(rep.holds);
    }

    #[test]
    fn raz_hypothesis_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Correlated classical part: not a product.
        let rho = CQState::new(
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
            vec![sample::density(&mut rng, 2); 4],
        )
        .unwrap();
        assert!(matches!(
            raz_check(&rho, &rho.clone()),
            Err(EntropyError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn raz_fuzz_holds() {
        let rows = raz_fuzz(100, 99).unwrap();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.holds));
    }

    #[test]
    fn inequality_fuzz_small_run() {
        let rows = inequality_fuzz(50, 20, 1234).unwrap();
        assert!(rows.iter().all(|r| r.holds), "violations in fuzz");
        let csv = fuzz_rows_to_csv(&rows);
        assert!(csv.starts_with("instance_seed,lhs,rhs,slack,holds,check\n"));
    }

    #[test]
    fn relative_entropy_nonnegative_zero_iff_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let a = sample::density(&mut rng, 3);
            let b = sample::density(&mut rng, 3);
            let d = relative_entropy(&a, &b).unwrap();
            assert!(d >= 0.0);
            if d < 1e-9 {
                assert!(a.matrix().sub(b.matrix()).max_abs() < 1e-3);
            }
        }
    }
}
