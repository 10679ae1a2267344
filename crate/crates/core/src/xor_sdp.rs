//! Quantum values of two-player XOR games: the signed game matrix, its
//! symmetrization, and the Tsirelson semidefinite program.
//!
//! The primal is max ⟨G_Sym, Z⟩ over PSD Z with unit diagonal; the dual is
//! min Σy over diag(y) ⪰ G_Sym. Both are solved together by a log-barrier
//! interior point method on the dual: at each barrier center the scaled
//! inverse slack matrix is a feasible primal iterate with unit diagonal,
//! and the duality gap at parameter μ is exactly μ·side. A projected
//! gradient ascent on the Gram factorization serves as a fallback when the
//! Newton iteration stalls.

use crate::games::{unflatten, Game};
use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("not an XOR game: {0}")]
    NotXorGame(String),
    #[error("solver diverged: gap {gap:.3e} above tolerance {tol:.3e} after {iterations} iterations")]
    SolverDiverged {
        gap: f64,
        tol: f64,
        iterations: usize,
    },
    #[error("invalid tolerance {0}")]
    BadTolerance(f64),
}

/// Signed, distribution-weighted cost matrix of a two-player XOR game:
/// G[s][t] = π(s,t)·c(s,t) with c ∈ {±1}.
#[derive(Clone, Debug)]
pub struct XorGameMatrix {
    pub entries: DMatrix<f64>,
    /// Sign table c, one entry per question pair.
    pub signs: DMatrix<f64>,
    /// Builtin name of the source game, if known.
    pub source: Option<String>,
}

impl XorGameMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Total absolute mass; 1 for a genuine game matrix.
    pub fn abs_sum(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    /// Tensor product, the strong-repetition composition of game matrices.
    pub fn tensor(&self, other: &XorGameMatrix) -> XorGameMatrix {
        XorGameMatrix {
            entries: self.entries.kronecker(&other.entries),
            signs: self.signs.kronecker(&other.signs),
            source: None,
        }
    }

    pub fn from_raw(entries: DMatrix<f64>) -> XorGameMatrix {
        let signs = entries.map(|v| if v < 0.0 { -1.0 } else { 1.0 });
        XorGameMatrix {
            entries,
            signs,
            source: None,
        }
    }
}

/// The symmetrized block matrix [[0, Gᵀ], [G, 0]].
#[derive(Clone, Debug)]
pub struct SymGameMatrix(pub DMatrix<f64>);

impl SymGameMatrix {
    pub fn side(&self) -> usize {
        self.0.nrows()
    }
}

/// Extract the signed game matrix from a two-player game whose predicate
/// depends on answers only through their (bitwise) parity. Answer alphabets
/// must have power-of-two sizes; answers are identified with bit strings by
/// alphabet index, and multi-bit alphabets arise from repeated games. The
/// XOR form is checked exhaustively on every question pair.
pub fn xor_matrix(game: &Game) -> Result<XorGameMatrix, SdpError> {
    if game.players() != 2 {
        return Err(SdpError::NotXorGame(format!(
            "{} players, need 2",
            game.players()
        )));
    }
    let ad = game.answer_dims();
    let (na, nb) = (ad[0], ad[1]);
    if na != nb || !na.is_power_of_two() || na < 2 {
        return Err(SdpError::NotXorGame(format!(
            "answer alphabets sized {na} and {nb}; need equal powers of two"
        )));
    }
    let qd = game.question_dims();
    let (m, n) = (qd[0], qd[1]);
    let mut signs = DMatrix::zeros(m, n);
    for s in 0..m {
        for t in 0..n {
            let q_flat = s * n + t;
            // Find the parity vector v with win(a,b) iff a XOR b == v.
            let mut v: Option<usize> = None;
            for a in 0..na {
                for b in 0..nb {
                    if game.wins(q_flat, a * nb + b) {
                        let x = a ^ b;
                        match v {
                            None => v = Some(x),
                            Some(prev) if prev != x => {
                                return Err(SdpError::NotXorGame(format!(
                                    "question pair ({s},{t}) wins on two parities"
                                )));
                            }
                            _ => {}
                        }
                    }
                }
            }
            let v = v.ok_or_else(|| {
                SdpError::NotXorGame(format!("question pair ({s},{t}) never wins"))
            })?;
            // Completeness: every (a,b) with the winning parity must win.
            for a in 0..na {
                let b = a ^ v;
                if b < nb && !game.wins(q_flat, a * nb + b) {
                    return Err(SdpError::NotXorGame(format!(
                        "question pair ({s},{t}) is not determined by the answer parity"
                    )));
                }
            }
            signs[(s, t)] = if (v as u32).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
        }
    }
    let mut entries = DMatrix::zeros(m, n);
    for (flat, mass) in game.distribution() {
        let tuple = unflatten(*flat, &qd);
        entries[(tuple[0], tuple[1])] = mass.to_f64() * signs[(tuple[0], tuple[1])];
    }
    Ok(XorGameMatrix {
        entries,
        signs,
        source: game.builtin_name().map(String::from),
    })
}

/// Assemble [[0, Gᵀ], [G, 0]].
pub fn symmetrize(g: &XorGameMatrix) -> SymGameMatrix {
    let (m, n) = (g.rows(), g.cols());
    let side = m + n;
    let mut s = DMatrix::zeros(side, side);
    for r in 0..m {
        for c in 0..n {
            s[(n + r, c)] = g.entries[(r, c)];
            s[(c, n + r)] = g.entries[(r, c)];
        }
    }
    SymGameMatrix(s)
}

/// Solved semidefinite program for an XOR game bias.
#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    /// Primal matrix Z: PSD with unit diagonal, flattened row-major.
    #[serde(skip)]
    pub z: DMatrix<f64>,
    pub y: Vec<f64>,
    /// ½⟨G_Sym, Z⟩ — a certified achievable bias.
    pub primal_bias: f64,
    /// ½Σy — a certified upper bound on the bias.
    pub dual_bias: f64,
    pub gap: f64,
    pub iterations: usize,
    pub fallback_used: bool,
}

impl SdpSolution {
    pub fn bias(&self) -> f64 {
        self.primal_bias
    }

    /// Game value from the bias: (1 + β)/2.
    pub fn value(&self) -> f64 {
        (1.0 + self.primal_bias) / 2.0
    }
}

fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Dual log-barrier interior point solve of the unit-diagonal SDP.
fn barrier_solve(c: &DMatrix<f64>, tol: f64, max_newton: usize) -> Option<SdpSolution> {
    let d = c.nrows();
    let df = d as f64;
    // Strictly feasible start by diagonal dominance.
    let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
    let mut y: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|j| c[(i, j)].abs()).sum::<f64>() + 0.1 * scale + 1e-9)
        .collect();
    let slack = |y: &[f64]| -> DMatrix<f64> {
        let mut s = -c.clone();
        for i in 0..d {
            s[(i, i)] += y[i];
        }
        s
    };
    let mut mu = scale.max(0.1);
    let mu_target = (tol / (2.0 * df)).min(1e-9);
    let mut iterations = 0usize;
    let mut s_inv = nalgebra::linalg::Cholesky::new(slack(&y))?.inverse();

    while iterations < max_newton {
        // Center at the current mu.
        let mut centered = false;
        for _ in 0..60 {
            iterations += 1;
            if iterations >= max_newton {
                break;
            }
            let grad: Vec<f64> = (0..d).map(|i| 1.0 - mu * s_inv[(i, i)]).collect();
            let mut hess = DMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    hess[(i, j)] = mu * s_inv[(i, j)] * s_inv[(i, j)];
                }
            }
            for i in 0..d {
                hess[(i, i)] += 1e-14;
            }
            let chol = nalgebra::linalg::Cholesky::new(hess)?;
            let g = nalgebra::DVector::from_vec(grad.clone());
            let step = chol.solve(&g);
            let decrement2: f64 = g.dot(&step);
            // Damped line search: keep the slack PD and the objective sane.
            let mut t = 1.0;
            let f0: f64 = y.iter().sum::<f64>()
                - mu * nalgebra::linalg::Cholesky::new(slack(&y))
                    .map(|ch| 2.0 * (0..d).map(|i| ch.l()[(i, i)].ln()).sum::<f64>())
                    .unwrap_or(f64::NEG_INFINITY);
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> = y.iter().zip(step.iter()).map(|(v, s)| v - t * s).collect();
                if let Some(ch) = nalgebra::linalg::Cholesky::new(slack(&cand)) {
                    let logdet = 2.0 * (0..d).map(|i| ch.l()[(i, i)].ln()).sum::<f64>();
                    let f1: f64 = cand.iter().sum::<f64>() - mu * logdet;
                    if f1 <= f0 - 1e-12 * t * decrement2.max(0.0) + 1e-12 {
                        y = cand;
                        s_inv = ch.inverse();
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return None;
            }
            if decrement2.abs() < 1e-18 {
                centered = true;
                break;
            }
        }
        if mu <= mu_target && centered {
            break;
        }
        if iterations >= max_newton {
            break;
        }
        mu = (mu * 0.2).max(mu_target);
    }

    // Primal recovery: Z = mu * S^{-1}, rescaled to exact unit diagonal.
    let mut z = s_inv.map(|v| v * mu);
    let scale_vec: Vec<f64> = (0..d).map(|i| 1.0 / z[(i, i)].max(1e-300).sqrt()).collect();
    for i in 0..d {
        for j in 0..d {
            z[(i, j)] *= scale_vec[i] * scale_vec[j];
        }
    }
    let primal_bias = 0.5 * frob_inner(c, &z);
    let dual_bias = 0.5 * y.iter().sum::<f64>();
    Some(SdpSolution {
        z,
        y,
        primal_bias,
        dual_bias,
        gap: dual_bias - primal_bias,
        iterations,
        fallback_used: false,
    })
}

/// Projected gradient ascent on the Gram factorization Z = VVᵀ with unit
/// rows; paired with the Gershgorin-feasible uniform dual. Used only when
/// the Newton path stalls.
fn gram_fallback(c: &DMatrix<f64>, iterations: usize) -> SdpSolution {
    let d = c.nrows();
    let r = d.min(8).max(2);
    let mut v = DMatrix::<f64>::zeros(d, r);
    // Deterministic spread-out start.
    for i in 0..d {
        v[(i, i % r)] = 1.0;
        v[(i, (i + 1) % r)] = 0.5;
    }
    for i in 0..d {
        let norm = v.row(i).norm();
        for k in 0..r {
            v[(i, k)] /= norm;
        }
    }
    let mut step = 1.0 / (c.iter().map(|x| x.abs()).sum::<f64>() + 1e-12);
    let mut best = f64::MIN;
    for _ in 0..iterations {
        let grad = c * &v; // ∇⟨C, VVᵀ⟩ = 2 C V, constant 2 folded into step
        let mut cand = &v + grad.map(|g| 2.0 * step * g);
        for i in 0..d {
            let norm = cand.row(i).norm().max(1e-300);
            for k in 0..r {
                cand[(i, k)] /= norm;
            }
        }
        let obj = frob_inner(c, &(&cand * cand.transpose()));
        if obj >= best {
            best = obj;
            v = cand;
            step *= 1.05;
        } else {
            step *= 0.5;
        }
    }
    let z = &v * v.transpose();
    let primal_bias = 0.5 * frob_inner(c, &z);
    // diag(λmax I) - C is PSD, so the uniform dual is feasible.
    let eig = nalgebra::linalg::SymmetricEigen::new(c.clone());
    let lam_max = eig.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    let y = vec![lam_max; d];
    let dual_bias = 0.5 * lam_max * d as f64;
    SdpSolution {
        z,
        y,
        primal_bias,
        dual_bias,
        gap: dual_bias - primal_bias,
        iterations,
        fallback_used: true,
    }
}

/// Quantum bias of an XOR game matrix: solve the symmetrized SDP to the
/// requested duality gap.
pub fn quantum_bias(g: &XorGameMatrix, tol: f64) -> Result<SdpSolution, SdpError> {
    if !(tol > 0.0) {
        return Err(SdpError::BadTolerance(tol));
    }
    let sym = symmetrize(g);
    quantum_bias_sym(&sym, tol)
}

/// Same solve on an already-symmetrized matrix.
pub fn quantum_bias_sym(sym: &SymGameMatrix, tol: f64) -> Result<SdpSolution, SdpError> {
    if !(tol > 0.0) {
        return Err(SdpError::BadTolerance(tol));
    }
    let max_newton = 4000;
    let sol = match barrier_solve(&sym.0, tol, max_newton) {
        Some(s) if s.gap <= tol => s,
        _ => {
            let fb = gram_fallback(&sym.0, 20_000);
            if fb.gap > tol {
                return Err(SdpError::SolverDiverged {
                    gap: fb.gap,
                    tol,
                    iterations: fb.iterations,
                });
            }
            fb
        }
    };
    Ok(sol)
}

/// Quantum value (1 + β)/2 of an XOR game matrix.
pub fn quantum_value(g: &XorGameMatrix, tol: f64) -> Result<f64, SdpError> {
    Ok(quantum_bias(g, tol)?.value())
}

/// Classical bias of an XOR game matrix by direct ±1 assignment scan.
pub fn classical_bias(g: &XorGameMatrix) -> f64 {
    let (m, n) = (g.rows(), g.cols());
    assert!(m <= 25, "classical bias scan limited to 2^25 assignments");
    let mut best = f64::MIN;
    for mask in 0..(1u64 << m) {
        // With Alice's signs fixed, Bob's best response is columnwise.
        let mut total = 0.0;
        for t in 0..n {
            let mut col = 0.0;
            for s in 0..m {
                let a = if mask >> s & 1 == 1 { 1.0 } else { -1.0 };
                col += a * g.entries[(s, t)];
            }
            total += col.abs();
        }
        best = best.max(total);
    }
    best
}

/// Residual diagnostics for a solved SDP, used by feasibility tests.
#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub min_eig_z: f64,
    pub max_diag_dev: f64,
    pub min_eig_dual_slack: f64,
    pub gap: f64,
}

pub fn feasibility(sym: &SymGameMatrix, sol: &SdpSolution) -> FeasibilityReport {
    feasibility_of(sym, &sol.z, &sol.y)
}

/// Feasibility residuals for user-supplied primal/dual candidates. This is
/// the whole check offered for externally produced solutions (including
/// candidates for repeated or multiplayer tensors): no optimality claim,
/// just residuals against the cone constraints and the gap.
pub fn feasibility_of(sym: &SymGameMatrix, z: &DMatrix<f64>, y: &[f64]) -> FeasibilityReport {
    let d = sym.side();
    assert_eq!(z.nrows(), d, "candidate Z side mismatch");
    assert_eq!(y.len(), d, "candidate y length mismatch");
    let eig_z = nalgebra::linalg::SymmetricEigen::new(z.clone());
    let min_eig_z = eig_z.eigenvalues.iter().copied().fold(f64::MAX, f64::min);
    let max_diag_dev = (0..d).map(|i| (z[(i, i)] - 1.0).abs()).fold(0.0, f64::max);
    let mut slack = -sym.0.clone();
    for i in 0..d {
        slack[(i, i)] += y[i];
    }
    let eig_s = nalgebra::linalg::SymmetricEigen::new(slack);
    let min_eig_dual_slack = eig_s.eigenvalues.iter().copied().fold(f64::MAX, f64::min);
    let primal = 0.5 * frob_inner(&sym.0, z);
    let dual = 0.5 * y.iter().sum::<f64>();
    FeasibilityReport {
        min_eig_z,
        max_diag_dev,
        min_eig_dual_slack,
        gap: dual - primal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, ffl, nxor, repeat};

    const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn chsh_matrix_shape() {
        let g = xor_matrix(&chsh()).unwrap();
        for s in 0..2 {
            for t in 0..2 {
                let expect = if s == 1 && t == 1 { -0.25 } else { 0.25 };
                assert!((g.entries[(s, t)] - expect).abs() < 1e-15);
            }
        }
        assert!((g.abs_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ffl_is_not_xor() {
        assert!(matches!(xor_matrix(&ffl()), Err(SdpError::NotXorGame(_))));
    }

    #[test]
    fn constant_parity_game_matrix_is_distribution() {
        let g = nxor(&[vec![1, 1], vec![1, 1]]).unwrap();
        let m = xor_matrix(&g).unwrap();
        for v in m.entries.iter() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn repeated_chsh_matrix_is_tensor_square() {
        let base = xor_matrix(&chsh()).unwrap();
        let oracle = base.tensor(&base);
        let rep = xor_matrix(&repeat(&chsh(), 2).unwrap()).unwrap();
        assert_eq!(rep.entries.nrows(), 4);
        let dev = (&rep.entries - &oracle.entries)
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "tensor-square deviation {dev}");
    }

    #[test]
    fn symmetrize_blocks() {
        let g = xor_matrix(&chsh()).unwrap();
        let s = symmetrize(&g);
        assert_eq!(s.side(), 4);
        // Zero diagonal blocks and symmetry.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(s.0[(i, j)], 0.0);
                assert_eq!(s.0[(2 + i, 2 + j)], 0.0);
            }
        }
        assert_eq!(s.0, s.0.transpose());
        let zero = XorGameMatrix::from_raw(DMatrix::zeros(2, 3));
        assert!(symmetrize(&zero).0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn chsh_bias_is_inverse_sqrt2() {
        let g = xor_matrix(&chsh()).unwrap();
        let sol = quantum_bias(&g, 1e-7).unwrap();
        assert!(
            (sol.bias() - SQRT2_INV).abs() < 1e-5,
            "bias {} gap {}",
            sol.bias(),
            sol.gap
        );
        assert!(sol.gap <= 1e-7);
        assert!((sol.value() - (2.0 + std::f64::consts::SQRT_2) / 4.0).abs() < 1e-5);
    }

    #[test]
    fn repeated_chsh_bias_is_half() {
        let g = xor_matrix(&repeat(&chsh(), 2).unwrap()).unwrap();
        let sol = quantum_bias(&g, 1e-6).unwrap();
        assert!((sol.bias() - 0.5).abs() < 1e-4, "bias {}", sol.bias());
    }

    #[test]
    fn zero_matrix_zero_bias() {
        let zero = XorGameMatrix::from_raw(DMatrix::zeros(2, 2));
        let sol = quantum_bias(&zero, 1e-6).unwrap();
        assert!(sol.bias().abs() < 1e-6);
    }

    #[test]
    fn all_plus_game_bias_one() {
        let g = xor_matrix(&nxor(&[vec![1, 1], vec![1, 1]]).unwrap()).unwrap();
        let sol = quantum_bias(&g, 1e-6).unwrap();
        assert!((sol.bias() - 1.0).abs() < 1e-5);
        assert!((sol.value() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn weak_duality_and_feasibility() {
        for signs in [
            vec![vec![1, -1], vec![-1, 1]],
            vec![vec![1, 1, -1], vec![1, -1, 1], vec![-1, 1, 1]],
        ] {
            let g = xor_matrix(&nxor(&signs).unwrap()).unwrap();
            let sym = symmetrize(&g);
            let sol = quantum_bias(&g, 1e-6).unwrap();
            assert!(sol.primal_bias <= sol.dual_bias + 1e-9);
            let rep = feasibility(&sym, &sol);
            assert!(rep.min_eig_z >= -1e-8, "Z eig {}", rep.min_eig_z);
            assert!(rep.max_diag_dev <= 1e-8);
            assert!(rep.min_eig_dual_slack >= -1e-8);
            assert!(rep.gap >= -1e-8);
        }
    }

    #[test]
    fn bias_multiplicative_under_tensoring() {
        let seeds: [Vec<Vec<i8>>; 3] = [
            vec![vec![1, -1], vec![-1, -1]],
            vec![vec![1, 1], vec![1, -1]],
            vec![vec![-1, 1, 1], vec![1, -1, 1]],
        ];
        for signs in seeds {
            let g = xor_matrix(&nxor(&signs).unwrap()).unwrap();
            let b1 = quantum_bias(&g, 1e-7).unwrap().bias();
            let b2 = quantum_bias(&g.tensor(&g), 1e-7).unwrap().bias();
            assert!(
                (b2 - b1 * b1).abs() < 1e-4,
                "tensor bias {b2} vs square {}",
                b1 * b1
            );
        }
    }

    #[test]
    fn classical_bias_below_quantum() {
        for signs in [
            vec![vec![1, -1], vec![-1, -1]],
            vec![vec![1, 1, -1], vec![1, -1, 1], vec![-1, 1, 1]],
        ] {
            let game = nxor(&signs).unwrap();
            let g = xor_matrix(&game).unwrap();
            let cb = classical_bias(&g);
            // Dual route: the exhaustive game-value scan gives the same
            // classical bias through 2ω − 1.
            let cb_oracle =
                2.0 * crate::games::classical_value(&game).unwrap().value.to_f64() - 1.0;
            assert!((cb - cb_oracle).abs() < 1e-12, "bias routes disagree");
            let qb = quantum_bias(&g, 1e-6).unwrap();
            assert!(cb <= qb.dual_bias + 1e-6);
            assert!(qb.primal_bias <= 1.0 + 1e-9);
        }
        // CHSH classically reaches bias 1/2.
        let g = xor_matrix(&chsh()).unwrap();
        assert!((classical_bias(&g) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn candidate_feasibility_check() {
        // A user-supplied identity candidate with a Gershgorin dual is
        // feasible but far from optimal; the report says exactly that.
        let g = xor_matrix(&chsh()).unwrap();
        let sym = symmetrize(&g);
        let d = sym.side();
        let z = DMatrix::<f64>::identity(d, d);
        let y: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| sym.0[(i, j)].abs()).sum())
            .collect();
        let rep = feasibility_of(&sym, &z, &y);
        assert!(rep.min_eig_z >= -1e-12);
        assert!(rep.max_diag_dev <= 1e-12);
        assert!(rep.min_eig_dual_slack >= -1e-12);
        assert!(rep.gap > 0.1, "identity candidate is not near-optimal");
    }
}
