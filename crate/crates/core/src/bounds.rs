//! Closed-form bound, threshold, and parameter formulas, each reported raw
//! and clamped to [0,1], plus the bound-vs-truth comparison harness.
//!
//! Conventions: every logarithm is base 2, including the `log e` factor in
//! the epsilon threshold (log₂ e = 1/ln 2). Asymptotic big-Ω exponents take
//! an explicit caller-supplied constant, default 1. At desk scale the decay
//! bounds are expected to clamp to 1; the vacuous flag says so explicitly.

use crate::games::{classical_value_capped, repeat, Game, GameError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("parameter {name} = {value} outside {expect}")]
    RangeError {
        name: &'static str,
        value: f64,
        expect: &'static str,
    },
    #[error("constant c = {c} outside the window (0, {limit}) for N = {players}")]
    COutOfWindow { c: f64, limit: f64, players: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    expect: &'static str,
) -> Result<(), BoundError> {
    if ok {
        Ok(())
    } else {
        Err(BoundError::RangeError {
            name,
            value,
            expect,
        })
    }
}

/// An evaluated bound: the formula id, its inputs, the raw value, the
/// [0,1]-clamped value, and whether the bound is vacuous (raw ≥ 1).
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub formula: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub raw: f64,
    pub clamped: f64,
    pub vacuous: bool,
}

impl BoundReport {
    fn new(formula: &'static str, inputs: Vec<(&'static str, f64)>, raw: f64) -> Self {
        BoundReport {
            formula,
            inputs,
            raw,
            clamped: raw.clamp(0.0, 1.0),
            vacuous: raw >= 1.0,
        }
    }
}

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Anchored-game value identity: ω*(G_⊥) = 1 − (1−α)²(1 − ω*).
pub fn anchored_value(omega: f64, alpha: f64) -> Result<f64, BoundError> {
    require((0.0..=1.0).contains(&omega), "omega", omega, "[0,1]")?;
    require(alpha > 0.0 && alpha < 1.0, "alpha", alpha, "(0,1)")?;
    Ok(1.0 - (1.0 - alpha).powi(2) * (1.0 - omega))
}

/// Two-player anchored repetition decay: (4/ε)·exp(−c α⁴⁸ ε¹⁷ n / s).
pub fn two_player_decay(
    eps: f64,
    alpha: f64,
    n: u64,
    s: f64,
    c: f64,
) -> Result<BoundReport, BoundError> {
    require(eps > 0.0 && eps < 1.0, "eps", eps, "(0,1)")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    require(n >= 1, "n", n as f64, ">= 1")?;
    require(s >= 1.0, "s", s, ">= 1")?;
    require(c > 0.0, "c", c, "> 0")?;
    let raw = (4.0 / eps) * (-c * alpha.powi(48) * eps.powi(17) * n as f64 / s).exp();
    Ok(BoundReport::new(
        "two-player-decay",
        vec![
            ("eps", eps),
            ("alpha", alpha),
            ("n", n as f64),
            ("s", s),
            ("c", c),
        ],
        raw,
    ))
}

/// Multiplayer anchored repetition decay:
/// (10/ε)·exp(−c α^(20N+1) ε^(6N) k / s), with c inside (0, 1/(N^{2N} log₂e)).
pub fn multiplayer_decay(
    eps: f64,
    alpha: f64,
    players: usize,
    k: u64,
    s: f64,
    c: f64,
) -> Result<BoundReport, BoundError> {
    require(eps > 0.0 && eps <= 1.0, "eps", eps, "(0,1]")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    require(players >= 2, "players", players as f64, ">= 2")?;
    require(k >= 1, "k", k as f64, ">= 1")?;
    require(s >= 1.0, "s", s, ">= 1")?;
    let limit = 1.0 / ((players as f64).powi(2 * players as i32) * LOG2_E);
    if !(c > 0.0 && c < limit) {
        return Err(BoundError::COutOfWindow { c, limit, players });
    }
    let expo = 20 * players as i32 + 1;
    let raw =
        (10.0 / eps) * (-c * alpha.powi(expo) * eps.powi(6 * players as i32) * k as f64 / s).exp();
    Ok(BoundReport::new(
        "multiplayer-decay",
        vec![
            ("eps", eps),
            ("alpha", alpha),
            ("players", players as f64),
            ("k", k as f64),
            ("s", s),
            ("c", c),
        ],
        raw,
    ))
}

/// Expanded-game repetition decay: exp(−c ε⁵ n / (k² log₂|A|)).
pub fn expanded_decay(
    c: f64,
    eps: f64,
    n: u64,
    k: f64,
    alphabet_size: u64,
) -> Result<BoundReport, BoundError> {
    require(c > 0.0, "c", c, "> 0")?;
    require(eps > 0.0 && eps <= 1.0, "eps", eps, "(0,1]")?;
    require(k > 0.0, "k", k, "> 0")?;
    require(
        alphabet_size >= 2,
        "alphabet_size",
        alphabet_size as f64,
        ">= 2",
    )?;
    let raw = (-c * eps.powi(5) * n as f64 / (k * k * (alphabet_size as f64).log2())).exp();
    Ok(BoundReport::new(
        "expanded-decay",
        vec![
            ("c", c),
            ("eps", eps),
            ("n", n as f64),
            ("k", k),
            ("alphabet_size", alphabet_size as f64),
        ],
        raw,
    ))
}

/// Generalized anchoring: [1 − (1−ω)⁵]^(const·k/log₂(|A||B|)).
pub fn generalized_anchor_exponent(
    omega: f64,
    k: u64,
    size_a: u64,
    size_b: u64,
    capital_omega_const: f64,
) -> Result<f64, BoundError> {
    require((0.0..=1.0).contains(&omega), "omega", omega, "[0,1]")?;
    require(size_a >= 2, "size_a", size_a as f64, ">= 2")?;
    require(size_b >= 2, "size_b", size_b as f64, ">= 2")?;
    require(
        capital_omega_const > 0.0,
        "capital_omega_const",
        capital_omega_const,
        "> 0",
    )?;
    let base = 1.0 - (1.0 - omega).powi(5);
    let exponent = capital_omega_const * k as f64 / ((size_a * size_b) as f64).log2();
    Ok(base.powf(exponent))
}

/// Entangled-value repetition bound: [1 − (1−val)³]^(c·n).
pub fn yuen_entangled_bound(val: f64, n: u64, c: f64) -> Result<BoundReport, BoundError> {
    require((0.0..=1.0).contains(&val), "val", val, "[0,1]")?;
    require(c > 0.0, "c", c, "> 0")?;
    let raw = (1.0 - (1.0 - val).powi(3)).powf(c * n as f64);
    Ok(BoundReport::new(
        "yuen-entangled",
        vec![("val", val), ("n", n as f64), ("c", c)],
        raw,
    ))
}

/// Entangled-value tail bound: c_G·|A|·|log₂ n| / (ε¹⁷ n^(1/4)).
pub fn yuen_value_tail(c_g: f64, len_a: f64, eps: f64, n: u64) -> Result<BoundReport, BoundError> {
    require(c_g > 0.0, "c_g", c_g, "> 0")?;
    require(len_a >= 1.0, "len_a", len_a, ">= 1")?;
    require(eps > 0.0 && eps < 1.0, "eps", eps, "(0,1)")?;
    require(n >= 1, "n", n as f64, ">= 1")?;
    let raw = c_g * len_a * (n as f64).log2().abs() / (eps.powi(17) * (n as f64).powf(0.25));
    Ok(BoundReport::new(
        "yuen-tail",
        vec![
            ("c_g", c_g),
            ("len_a", len_a),
            ("eps", eps),
            ("n", n as f64),
        ],
        raw,
    ))
}

/// Decay-exponent quantity: δ = (1/n)[|C|·log₂(Π|Q_i|) + log₂(1/P[W_C])].
pub fn delta_multiplayer(
    n: u64,
    coord_count: u64,
    question_product: f64,
    p_win: f64,
) -> Result<f64, BoundError> {
    require(n >= 1, "n", n as f64, ">= 1")?;
    require(
        question_product >= 1.0,
        "question_product",
        question_product,
        ">= 1",
    )?;
    require(p_win > 0.0 && p_win <= 1.0, "p_win", p_win, "(0,1]")?;
    Ok((coord_count as f64 * question_product.log2() + (1.0 / p_win).log2()) / n as f64)
}

/// Epsilon threshold: [δ/c · 1/(40N) · 1/log₂e · 1/α^(20N+1)]^(1/(6N)).
pub fn epsilon_threshold(
    delta: f64,
    c: f64,
    players: usize,
    alpha: f64,
) -> Result<f64, BoundError> {
    require(delta >= 0.0, "delta", delta, ">= 0")?;
    require(c > 0.0, "c", c, "> 0")?;
    require(players >= 1, "players", players as f64, ">= 1")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    let inner =
        delta / c / (40.0 * players as f64) / LOG2_E / alpha.powi(20 * players as i32 + 1);
    Ok(inner.powf(1.0 / (6.0 * players as f64)))
}

/// Conditioning-set cardinality bound t and the minimum repetition count
/// from the winning-coordinate proposition.
#[derive(Clone, Debug, Serialize)]
pub struct CoordinateBudget {
    pub t: f64,
    pub n_min: f64,
}

pub fn coordinate_budget(
    players: usize,
    eps: f64,
    p_win: f64,
) -> Result<CoordinateBudget, BoundError> {
    require(players >= 1, "players", players as f64, ">= 1")?;
    require(eps > 0.0 && eps <= 1.0, "eps", eps, "(0,1]")?;
    require(p_win > 0.0 && p_win <= 1.0, "p_win", p_win, "(0,1]")?;
    let nf = players as f64;
    let t = (3.0 * nf / eps) * (1.5 * nf / (eps * p_win)).log2();
    let n_min = (6.0 * nf / eps) * ((6.0 * nf).sqrt() / (eps * p_win)).log2();
    Ok(CoordinateBudget { t, n_min })
}

/// Order of the dependency-breaking expectation system: δ^(N/300)/α^(N+1).
pub fn dependency_break_order(
    delta: f64,
    alpha: f64,
    players: usize,
) -> Result<f64, BoundError> {
    require(delta >= 0.0, "delta", delta, ">= 0")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    require(players >= 1, "players", players as f64, ">= 1")?;
    Ok(delta.powf(players as f64 / 300.0) / alpha.powi(players as i32 + 1))
}

/// Order of the POVM expectation system: (δ^(N/300))^(1/4)/α^(N+5).
pub fn povm_order(delta: f64, alpha: f64, players: usize) -> Result<f64, BoundError> {
    require(delta >= 0.0, "delta", delta, ">= 0")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    require(players >= 1, "players", players as f64, ">= 1")?;
    Ok(delta.powf(players as f64 / 300.0).sqrt().sqrt() / alpha.powi(players as i32 + 5))
}

/// Order of the Pinsker-bounded expectation system:
/// sqrt(δ^(N/300))/α^(2(N+1)).
pub fn pinsker_order(delta: f64, alpha: f64, players: usize) -> Result<f64, BoundError> {
    require(delta >= 0.0, "delta", delta, ">= 0")?;
    require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "(0,1]")?;
    require(players >= 1, "players", players as f64, ">= 1")?;
    Ok(delta.powf(players as f64 / 300.0).sqrt() / alpha.powi(2 * (players as i32 + 1)))
}

/// Two-player one-sided-anchoring threshold fraction: ξ²ε⁴/14440000,
/// optionally normalized by log₂(|A||B|).
pub fn threshold_fraction_two_player(
    xi: f64,
    eps: f64,
    log_norm: Option<f64>,
) -> Result<f64, BoundError> {
    require((0.0..=1.0).contains(&xi), "xi", xi, "[0,1]")?;
    require(eps > 0.0 && eps <= 1.0, "eps", eps, "(0,1]")?;
    let base = xi * xi * eps.powi(4) / 14_440_000.0;
    match log_norm {
        None => Ok(base),
        Some(l) => {
            require(l > 0.0, "log_norm", l, "> 0")?;
            Ok(base / l)
        }
    }
}

/// Multiplayer threshold fraction: ξᴺε²ᴺ/20000000, optionally normalized.
pub fn threshold_fraction_multiplayer(
    xi: f64,
    eps: f64,
    players: usize,
    log_norm: Option<f64>,
) -> Result<f64, BoundError> {
    require((0.0..=1.0).contains(&xi), "xi", xi, "[0,1]")?;
    require(eps > 0.0 && eps <= 1.0, "eps", eps, "(0,1]")?;
    require(players >= 2, "players", players as f64, ">= 2")?;
    let base = xi.powi(players as i32) * eps.powi(2 * players as i32) / 20_000_000.0;
    match log_norm {
        None => Ok(base),
        Some(l) => {
            require(l > 0.0, "log_norm", l, "> 0")?;
            Ok(base / l)
        }
    }
}

// ---------------------------------------------------------------------------
// Bound vs truth
// ---------------------------------------------------------------------------

/// Which decay formula to compare against brute-forced values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundChoice {
    TwoPlayerDecay,
    MultiplayerDecay,
    ExpandedDecay,
    YuenEntangled,
}

/// Shared parameter bag for [`bound_vs_truth`].
#[derive(Clone, Debug)]
pub struct BoundParams {
    pub eps: f64,
    pub alpha: f64,
    pub c: f64,
    pub k: f64,
    pub capital_omega_const: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            eps: 0.1,
            alpha: 0.5,
            c: 0.001,
            k: 2.0,
            capital_omega_const: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundVsTruthRow {
    pub n: u64,
    pub true_value: f64,
    pub raw_bound: f64,
    pub clamped_bound: f64,
    pub consistent: bool,
}

/// Brute-force the value of repeat(G, n) for n = 1..n_max and compare with
/// the chosen clamped bound. The normalizers s are taken from the game's
/// own alphabets.
pub fn bound_vs_truth(
    game: &Game,
    n_max: usize,
    choice: BoundChoice,
    params: &BoundParams,
    strategy_cap: u128,
) -> Result<Vec<BoundVsTruthRow>, BoundError> {
    let mut rows = Vec::new();
    let a_product: f64 = game.answer_dims().iter().map(|&d| d as f64).product();
    let s_two = a_product.log2().max(1.0);
    let s_multi = game
        .question_dims()
        .iter()
        .map(|&d| (d as f64).log2())
        .product::<f64>()
        .max(1.0);
    for n in 1..=n_max as u64 {
        let repeated = repeat(game, n as usize)?;
        let true_value = classical_value_capped(&repeated, strategy_cap)?
            .value
            .to_f64();
        let report = match choice {
            BoundChoice::TwoPlayerDecay => {
                two_player_decay(params.eps, params.alpha, n, s_two, params.c)?
            }
            BoundChoice::MultiplayerDecay => multiplayer_decay(
                params.eps,
                params.alpha,
                game.players(),
                n,
                s_multi,
                params.c,
            )?,
            BoundChoice::ExpandedDecay => {
                expanded_decay(params.c, params.eps, n, params.k, a_product as u64)?
            }
            BoundChoice::YuenEntangled => {
                let v1 = classical_value_capped(game, strategy_cap)?.value.to_f64();
                yuen_entangled_bound(v1, n, params.c)?
            }
        };
        rows.push(BoundVsTruthRow {
            n,
            true_value,
            raw_bound: report.raw,
            clamped_bound: report.clamped,
            consistent: true_value <= report.clamped + 1e-12,
        });
    }
    Ok(rows)
}

pub fn bound_vs_truth_csv(rows: &[BoundVsTruthRow]) -> String {
    let mut out = String::from("n,true_value,raw_bound,clamped_bound,consistent\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.true_value, r.raw_bound, r.clamped_bound, r.consistent
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, ffl};

    #[test]
    fn anchored_value_examples() {
        assert_eq!(anchored_value(1.0, 0.3).unwrap(), 1.0);
        assert!((anchored_value(0.75, 0.5).unwrap() - 0.9375).abs() < 1e-15);
        assert!((anchored_value(0.6, 1e-12).unwrap() - 0.6).abs() < 1e-9);
        // Affine in omega with slope (1-alpha)^2.
        let alpha = 0.3;
        let slope = (anchored_value(0.8, alpha).unwrap() - anchored_value(0.2, alpha).unwrap())
            / (0.8 - 0.2);
        assert!((slope - (1.0 - alpha) * (1.0 - alpha)).abs() < 1e-12);
    }

    #[test]
    fn two_player_decay_examples() {
        let r = two_player_decay(0.1, 0.5, 1000, 1.0, 1.0).unwrap();
        let expect = 40.0 * (-(0.5f64.powi(48)) * 1e-17 * 1000.0).exp();
        assert!((r.raw - expect).abs() < 1e-9);
        assert_eq!(r.clamped, 1.0);
        assert!(r.vacuous);
        let big = two_player_decay(0.9, 1.0, 10_000_000, 1.0, 10.0).unwrap();
        assert!(big.raw < 1e-6);
        let lo = two_player_decay(0.5, 0.2, 100000, 1.0, 1e6).unwrap();
        let hi = two_player_decay(0.5, 0.8, 100000, 1.0, 1e6).unwrap();
        assert!(lo.raw >= hi.raw);
    }

    #[test]
    fn multiplayer_decay_examples() {
        let r = multiplayer_decay(1.0, 1.0, 2, 100, 1.0, 0.01).unwrap();
        assert!((r.raw - 10.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(r.clamped, 1.0);
        let far = multiplayer_decay(1.0, 1.0, 2, 10_000, 1.0, 0.01).unwrap();
        assert!(far.raw < 1e-8);
        // c window enforced: the limit for N = 2 is 1/(16 log2 e) ≈ 0.0433.
        assert!(matches!(
            multiplayer_decay(0.5, 0.5, 2, 10, 1.0, 0.05),
            Err(BoundError::COutOfWindow { .. })
        ));
    }

    #[test]
    fn expanded_decay_examples() {
        let r = expanded_decay(1.0, 0.5, 0, 2.0, 4).unwrap();
        assert_eq!(r.raw, 1.0);
        let r = expanded_decay(1.0, 0.5, 64, 2.0, 4).unwrap();
        assert!((r.raw - (-0.25f64).exp()).abs() < 1e-12);
        assert!((r.raw - 0.7788).abs() < 1e-4);
        let r2 = expanded_decay(1.0, 0.5, 128, 2.0, 4).unwrap();
        assert!((r2.raw - r.raw * r.raw).abs() < 1e-12);
    }

    #[test]
    fn generalized_anchor_examples() {
        assert_eq!(generalized_anchor_exponent(1.0, 5, 2, 2, 1.0).unwrap(), 1.0);
        assert_eq!(generalized_anchor_exponent(0.4, 0, 2, 2, 1.0).unwrap(), 1.0);
        let v = generalized_anchor_exponent(0.9, 100, 2, 2, 1.0).unwrap();
        let expect = (1.0 - 0.1f64.powi(5)).powf(50.0);
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 0.9995).abs() < 1e-4);
    }

    #[test]
    fn yuen_examples() {
        assert_eq!(yuen_entangled_bound(1.0, 7, 1.0).unwrap().raw, 1.0);
        let r = yuen_entangled_bound(0.5, 3, 1.0).unwrap();
        assert!((r.raw - 0.875f64.powi(3)).abs() < 1e-12);
        assert!((r.raw - 0.6699).abs() < 1e-4);
        let a = yuen_value_tail(1.0, 2.0, 0.5, 16).unwrap();
        let b = yuen_value_tail(1.0, 2.0, 0.5, 65536).unwrap();
        assert!(b.raw < a.raw);
    }

    #[test]
    fn delta_multiplayer_examples() {
        assert_eq!(delta_multiplayer(10, 0, 4.0, 1.0).unwrap(), 0.0);
        let d = delta_multiplayer(10, 2, 4.0, 0.5).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let d2 = delta_multiplayer(20, 2, 4.0, 0.5).unwrap();
        assert!((d2 - d / 2.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_threshold_bracket_one() {
        // delta = c * 40N * log2(e) at alpha = 1 makes the bracket 1.
        let n = 3usize;
        let c = 0.37;
        let delta = c * 40.0 * n as f64 * LOG2_E;
        let e = epsilon_threshold(delta, c, n, 1.0).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coordinate_budget_golden_and_monotone() {
        let b = coordinate_budget(2, 0.5, 0.5).unwrap();
        assert!((b.t - 12.0 * 12.0f64.log2()).abs() < 1e-12);
        assert!((b.n_min - 24.0 * (12.0f64.sqrt() / 0.25).log2()).abs() < 1e-12);
        let worse = coordinate_budget(2, 0.5, 0.1).unwrap();
        assert!(worse.t > b.t);
    }

    #[test]
    fn threshold_fractions() {
        let v = threshold_fraction_two_player(0.5, 0.5, None).unwrap();
        assert!((v - 0.25 * 0.0625 / 14_440_000.0).abs() < 1e-18);
        let w = threshold_fraction_multiplayer(0.5, 0.5, 3, Some(2.0)).unwrap();
        assert!((w - 0.125 * 0.5f64.powi(6) / 20_000_000.0 / 2.0).abs() < 1e-18);
    }

    #[test]
    fn expectation_order_formulas() {
        // N = 2, δ = 0.5, α = 0.5: direct arithmetic.
        let d: f64 = 0.5;
        let base = d.powf(2.0 / 300.0);
        let de = dependency_break_order(0.5, 0.5, 2).unwrap();
        assert!((de - base / 0.125).abs() < 1e-12);
        let po = povm_order(0.5, 0.5, 2).unwrap();
        assert!((po - base.sqrt().sqrt() / 0.5f64.powi(7)).abs() < 1e-12);
        let pi = pinsker_order(0.5, 0.5, 2).unwrap();
        assert!((pi - base.sqrt() / 0.5f64.powi(6)).abs() < 1e-12);
        // All grow as alpha falls.
        assert!(dependency_break_order(0.5, 0.25, 2).unwrap() > de);
        assert!(povm_order(0.5, 0.25, 2).unwrap() > po);
        assert!(pinsker_order(0.5, 0.25, 2).unwrap() > pi);
    }

    #[test]
    fn range_errors_reported() {
        assert!(anchored_value(0.5, 1.5).is_err());
        assert!(two_player_decay(1.5, 0.5, 1, 1.0, 1.0).is_err());
        assert!(expanded_decay(1.0, 0.5, 1, 2.0, 1).is_err());
        assert!(yuen_value_tail(1.0, 2.0, 0.5, 0).is_err());
    }

    #[test]
    fn monotonicity_scan() {
        let mut prev = f64::INFINITY;
        for n in [1u64, 10, 100, 1000, 10000] {
            let r = two_player_decay(0.5, 0.9, n, 1.0, 1e6).unwrap();
            assert!(r.raw <= prev + 1e-15);
            prev = r.raw;
        }
        let mut prev = 0.0;
        for a in [0.9, 0.7, 0.5, 0.3, 0.1] {
            let r = multiplayer_decay(0.9, a, 2, 1000, 1.0, 0.04).unwrap();
            assert!(r.raw >= prev - 1e-15, "alpha {a}");
            prev = r.raw;
        }
        let mut prev = 0.0;
        for e in [0.9, 0.7, 0.5, 0.3, 0.1] {
            let r = two_player_decay(e, 1.0, 1_000_000, 1.0, 1e10).unwrap();
            assert!(r.raw >= prev - 1e-15, "eps {e}");
            prev = r.raw;
        }
    }

    #[test]
    fn bound_vs_truth_ffl_and_chsh() {
        let rows = bound_vs_truth(
            &ffl(),
            2,
            BoundChoice::TwoPlayerDecay,
            &BoundParams::default(),
            100_000_000,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].true_value - 2.0 / 3.0).abs() < 1e-12);
        assert!((rows[1].true_value - 2.0 / 3.0).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.consistent));

        let rows = bound_vs_truth(
            &chsh(),
            2,
            BoundChoice::MultiplayerDecay,
            &BoundParams {
                c: 0.01,
                ..Default::default()
            },
            100_000_000,
        )
        .unwrap();
        assert!((rows[0].true_value - 0.75).abs() < 1e-12);
        assert!((rows[1].true_value - 0.625).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.consistent));
        let csv = bound_vs_truth_csv(&rows);
        assert!(csv.starts_with("n,true_value,raw_bound,clamped_bound,consistent\n"));
    }
}
