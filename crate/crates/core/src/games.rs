//! Finite multiplayer games: exact classical values by exhaustive strategy
//! enumeration, worst-case values, anchoring, and parallel repetition.
//!
//! Probabilities stay exact rationals whenever the referee distribution is
//! rational (denominators up to 2^16), so values like 3/4 and 2/3 come out
//! as equalities, not approximations.

use crate::prob::{MassEntry, Prob, ProbError, ProbTable};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Fresh question symbol introduced by anchoring.
pub const ANCHOR_LABEL: &str = "⊥";

/// Default cap on the joint deterministic-strategy space.
pub const DEFAULT_STRATEGY_CAP: u128 = 100_000_000;

/// Cap on materialized win-table entries (question tuples x answer tuples).
pub const DEFAULT_TABLE_CAP: u128 = 1 << 26;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("search space too large: {size} exceeds cap {cap}")]
    SearchSpaceTooLarge { size: f64, cap: f64 },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("malformed game JSON: {0}")]
    Json(String),
}

/// One player's deterministic strategy: an answer index per question index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub answer_for: Vec<usize>,
}

/// A finite multiplayer game. Alphabets are label lists; the referee
/// distribution is a table over flat question-tuple indices; the predicate
/// is a fully materialized win table.
#[derive(Clone, Debug)]
pub struct Game {
    players: usize,
    questions: Vec<Vec<String>>,
    answers: Vec<Vec<String>>,
    /// (flat question index, mass) for tuples with positive mass.
    dist: Vec<(usize, Prob)>,
    /// Indexed by `q_flat * answer_tuple_count + a_flat`.
    win: Vec<bool>,
    /// Builtin name this game was constructed from, if any.
    builtin: Option<String>,
}

/// Result of a value computation: the optimum, one optimizer (the
/// lexicographically first), and how many joint strategies were scanned.
#[derive(Clone, Debug)]
pub struct ValueResult {
    pub value: Prob,
    pub strategy: Vec<DeterministicStrategy>,
    pub strategies_scanned: u128,
}

impl Game {
    pub fn new(
        questions: Vec<Vec<String>>,
        answers: Vec<Vec<String>>,
        distribution: Vec<(Vec<usize>, Prob)>,
        win: Vec<bool>,
    ) -> Result<Self, GameError> {
        let players = questions.len();
        if players == 0 || answers.len() != players {
            return Err(GameError::InvalidGame(
                "player count mismatch between question and answer alphabets".into(),
            ));
        }
        for p in 0..players {
            if questions[p].is_empty() || answers[p].is_empty() {
                return Err(GameError::InvalidGame(format!(
                    "player {p} has an empty alphabet"
                )));
            }
        }
        let q_total = checked_product(questions.iter().map(Vec::len))?;
        let a_total = checked_product(answers.iter().map(Vec::len))?;
        if win.len() as u128 != q_total as u128 * a_total as u128 {
            return Err(GameError::InvalidGame(format!(
                "predicate table has {} entries, expected {}",
                win.len(),
                q_total as u128 * a_total as u128
            )));
        }
        let mut dist = Vec::with_capacity(distribution.len());
        let mut labels = Vec::with_capacity(distribution.len());
        let mut masses = Vec::with_capacity(distribution.len());
        for (tuple, mass) in distribution {
            if tuple.len() != players {
                return Err(GameError::InvalidGame(
                    "distribution tuple arity does not match player count".into(),
                ));
            }
            for (p, &qi) in tuple.iter().enumerate() {
                if qi >= questions[p].len() {
                    return Err(GameError::InvalidGame(format!(
                        "distribution assigns mass outside player {p}'s alphabet"
                    )));
                }
            }
            let flat = flatten(&tuple, &dims(&questions));
            labels.push(format!("{flat}"));
            masses.push(mass.clone());
            dist.push((flat, mass));
        }
        // Table invariants (total 1, nonnegative) ride on ProbTable; it may
        // also downgrade every mass to float when exactness cannot hold.
        let table = ProbTable::new(labels, masses)?;
        for ((_, m), checked) in dist.iter_mut().zip(table.masses()) {
            *m = checked.clone();
        }
        dist.retain(|(_, m)| !m.is_zero());
        Ok(Game {
            players,
            questions,
            answers,
            dist,
            win,
            builtin: None,
        })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn questions(&self) -> &[Vec<String>] {
        &self.questions
    }

    pub fn answers(&self) -> &[Vec<String>] {
        &self.answers
    }

    pub fn question_dims(&self) -> Vec<usize> {
        dims(&self.questions)
    }

    pub fn answer_dims(&self) -> Vec<usize> {
        dims(&self.answers)
    }

    pub fn distribution(&self) -> &[(usize, Prob)] {
        &self.dist
    }

    pub fn builtin_name(&self) -> Option<&str> {
        self.builtin.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.dist.iter().all(|(_, m)| m.is_exact())
    }

    pub fn answer_tuple_count(&self) -> usize {
        self.answer_dims().iter().product()
    }

    pub fn question_tuple_count(&self) -> usize {
        self.question_dims().iter().product()
    }

    pub fn wins(&self, q_flat: usize, a_flat: usize) -> bool {
        self.win[q_flat * self.answer_tuple_count() + a_flat]
    }

    /// Marginal distribution of one player's question, as a labeled table.
    pub fn question_marginal(&self, player: usize) -> ProbTable {
        let qd = self.question_dims();
        let mut acc: Vec<Prob> = vec![Prob::zero(); qd[player]];
        for (flat, mass) in &self.dist {
            let tuple = unflatten(*flat, &qd);
            acc[tuple[player]] = acc[tuple[player]].add(mass);
        }
        ProbTable::new(self.questions[player].clone(), acc)
            .expect("marginal of a valid distribution is valid")
    }

    /// Joint strategy-space size, or an error when it exceeds `cap`.
    fn strategy_space(&self, cap: u128) -> Result<u128, GameError> {
        let mut total: u128 = 1;
        for p in 0..self.players {
            let per = (self.answers[p].len() as u128)
                .checked_pow(self.questions[p].len() as u32)
                .ok_or(GameError::SearchSpaceTooLarge {
                    size: f64::INFINITY,
                    cap: cap as f64,
                })?;
            total = total
                .checked_mul(per)
                .ok_or(GameError::SearchSpaceTooLarge {
                    size: f64::INFINITY,
                    cap: cap as f64,
                })?;
        }
        if total > cap {
            return Err(GameError::SearchSpaceTooLarge {
                size: total as f64,
                cap: cap as f64,
            });
        }
        Ok(total)
    }
}

fn dims(alphabets: &[Vec<String>]) -> Vec<usize> {
    alphabets.iter().map(Vec::len).collect()
}

fn checked_product(it: impl Iterator<Item = usize>) -> Result<usize, GameError> {
    let mut acc: u128 = 1;
    for d in it {
        acc = acc
            .checked_mul(d as u128)
            .filter(|&v| v <= DEFAULT_TABLE_CAP)
            .ok_or(GameError::SearchSpaceTooLarge {
                size: f64::INFINITY,
                cap: DEFAULT_TABLE_CAP as f64,
            })?;
    }
    Ok(acc as usize)
}

/// Mixed-radix flatten, first coordinate most significant.
pub fn flatten(tuple: &[usize], dims: &[usize]) -> usize {
    tuple
        .iter()
        .zip(dims)
        .fold(0usize, |acc, (&t, &d)| acc * d + t)
}

/// Inverse of [`flatten`].
pub fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
    out
}

// ---------------------------------------------------------------------------
// Value computation
// ---------------------------------------------------------------------------

/// Precomputed layout for strategy enumeration.
struct ScanLayout {
    /// Per player: question count and answer count.
    shape: Vec<(usize, usize)>,
    /// Per-player strategy-space sizes.
    per_player: Vec<u128>,
    /// Positive-mass tuples as per-player question indices.
    q_tuples: Vec<Vec<usize>>,
    /// Per positive-mass tuple: `q_flat * a_total`, the base of its win row.
    win_index: Vec<usize>,
    a_dims: Vec<usize>,
}

impl ScanLayout {
    fn new(game: &Game) -> Self {
        let qd = game.question_dims();
        let a_total = game.answer_tuple_count();
        let shape: Vec<(usize, usize)> = (0..game.players)
            .map(|p| (game.questions[p].len(), game.answers[p].len()))
            .collect();
        let per_player = shape
            .iter()
            .map(|&(nq, na)| (na as u128).pow(nq as u32))
            .collect();
        let q_tuples: Vec<Vec<usize>> = game
            .dist
            .iter()
            .map(|(flat, _)| unflatten(*flat, &qd))
            .collect();
        let win_index = game.dist.iter().map(|(flat, _)| flat * a_total).collect();
        ScanLayout {
            shape,
            per_player,
            q_tuples,
            win_index,
            a_dims: game.answer_dims(),
        }
    }

    /// Decode joint strategy index `s` (player 1 most significant, question
    /// 0 most significant within a player) into per-player answer maps.
    fn decode(&self, s: u128, out: &mut [Vec<usize>]) {
        let mut rem = s;
        for p in (0..self.shape.len()).rev() {
            let mut sp = (rem % self.per_player[p]) as u64;
            rem /= self.per_player[p];
            let (nq, na) = self.shape[p];
            for q in (0..nq).rev() {
                out[p][q] = (sp % na as u64) as usize;
                sp /= na as u64;
            }
        }
    }

    fn strategies_from_index(&self, s: u128) -> Vec<DeterministicStrategy> {
        let mut maps: Vec<Vec<usize>> = self.shape.iter().map(|&(nq, _)| vec![0; nq]).collect();
        self.decode(s, &mut maps);
        maps.into_iter()
            .map(|answer_for| DeterministicStrategy { answer_for })
            .collect()
    }
}

/// Weights of the positive-mass tuples in a form that accumulates exactly.
enum WeightVec {
    Int { w: Vec<u128>, denom: BigUint },
    Big { w: Vec<BigUint>, denom: BigUint },
    Float(Vec<f64>),
}

fn weight_vec(game: &Game) -> WeightVec {
    if game.is_exact() {
        let denom = game
            .dist
            .iter()
            .fold(BigUint::from(1u32), |acc, (_, m)| {
                acc.lcm(&m.as_exact().unwrap().denom().magnitude().clone())
            });
        let nums: Vec<BigUint> = game
            .dist
            .iter()
            .map(|(_, m)| {
                let r = m.as_exact().unwrap();
                r.numer().magnitude() * (&denom / r.denom().magnitude())
            })
            .collect();
        let fits = nums.iter().all(|n| n.to_u128().is_some_and(|v| v < u128::MAX / 2));
        if fits && nums.len() < (1 << 20) {
            WeightVec::Int {
                w: nums.iter().map(|n| n.to_u128().unwrap()).collect(),
                denom,
            }
        } else {
            WeightVec::Big { w: nums, denom }
        }
    } else {
        WeightVec::Float(game.dist.iter().map(|(_, m)| m.to_f64()).collect())
    }
}

/// Scan all joint strategies, returning the best (score, index) pair.
/// Ties go to the lowest index, so the winner is the lexicographically
/// first maximizer regardless of how rayon partitions the range.
fn scan_best<T>(
    layout: &ScanLayout,
    win: &[bool],
    weights: &[T],
    total: u128,
    maximize: bool,
) -> (T, u128)
where
    T: Clone + Default + Send + Sync + PartialOrd + for<'a> std::ops::AddAssign<&'a T>,
{
    let players = layout.shape.len();
    let eval = |s: u128, maps: &mut [Vec<usize>]| -> T {
        layout.decode(s, maps);
        let mut score = T::default();
        for (ti, tuple) in layout.q_tuples.iter().enumerate() {
            let mut a_flat = 0usize;
            for p in 0..players {
                a_flat = a_flat * layout.a_dims[p] + maps[p][tuple[p]];
            }
            if win[layout.win_index[ti] + a_flat] {
                score += &weights[ti];
            }
        }
        score
    };
    let better = |a: &T, ia: u128, b: &T, ib: u128| -> bool {
        // Is (a, ia) strictly better than (b, ib)?
        match a.partial_cmp(b) {
            Some(std::cmp::Ordering::Greater) => maximize,
            Some(std::cmp::Ordering::Less) => !maximize,
            _ => ia < ib,
        }
    };
    let chunk: u128 = 4096;
    let n_chunks = total.div_ceil(chunk);
    (0..n_chunks as u64)
        .into_par_iter()
        .map(|c| {
            let mut maps: Vec<Vec<usize>> =
                layout.shape.iter().map(|&(nq, _)| vec![0; nq]).collect();
            let lo = c as u128 * chunk;
            let hi = total.min(lo + chunk);
            let mut best_s = eval(lo, &mut maps);
            let mut best_i = lo;
            for s in lo + 1..hi {
                let v = eval(s, &mut maps);
                if better(&v, s, &best_s, best_i) {
                    best_s = v;
                    best_i = s;
                }
            }
            (best_s, best_i)
        })
        .reduce_with(|(va, ia), (vb, ib)| {
            if better(&va, ia, &vb, ib) {
                (va, ia)
            } else {
                (vb, ib)
            }
        })
        .expect("at least one strategy exists")
}

fn optimize(game: &Game, cap: u128, maximize: bool) -> Result<ValueResult, GameError> {
    let total = game.strategy_space(cap)?;
    let layout = ScanLayout::new(game);
    let (value, index) = match weight_vec(game) {
        WeightVec::Int { w, denom } => {
            let (sum, idx) = scan_best(&layout, &game.win, &w, total, maximize);
            let value = Prob::Exact(BigRational::new(
                num_bigint::BigInt::from(sum),
                num_bigint::BigInt::from_biguint(num_bigint::Sign::Plus, denom),
            ));
            (value, idx)
        }
        WeightVec::Big { w, denom } => {
            let (sum, idx) = scan_best(&layout, &game.win, &w, total, maximize);
            let value = Prob::Exact(BigRational::new(
                num_bigint::BigInt::from_biguint(num_bigint::Sign::Plus, sum),
                num_bigint::BigInt::from_biguint(num_bigint::Sign::Plus, denom),
            ));
            (value, idx)
        }
        WeightVec::Float(w) => {
            let (sum, idx) = scan_best(&layout, &game.win, &w, total, maximize);
            (Prob::Approx(sum), idx)
        }
    };
    Ok(ValueResult {
        value,
        strategy: layout.strategies_from_index(index),
        strategies_scanned: total,
    })
}

/// Maximum winning probability over deterministic strategies, with one
/// lexicographically-first maximizer.
pub fn classical_value(game: &Game) -> Result<ValueResult, GameError> {
    classical_value_capped(game, DEFAULT_STRATEGY_CAP)
}

pub fn classical_value_capped(game: &Game, cap: u128) -> Result<ValueResult, GameError> {
    optimize(game, cap, true)
}

/// Minimum winning probability over deterministic strategies.
pub fn worst_case_value(game: &Game) -> Result<ValueResult, GameError> {
    worst_case_value_capped(game, DEFAULT_STRATEGY_CAP)
}

pub fn worst_case_value_capped(game: &Game, cap: u128) -> Result<ValueResult, GameError> {
    optimize(game, cap, false)
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// n-fold parallel repetition: alphabets become n-tuples (labels joined
/// with commas), the distribution is the n-fold product, and the predicate
/// wins iff every coordinate wins.
pub fn repeat(game: &Game, n: usize) -> Result<Game, GameError> {
    if n == 0 {
        return Err(GameError::InvalidGame("repetition count must be >= 1".into()));
    }
    let players = game.players;
    let product_labels = |alpha: &Vec<String>| -> Vec<String> {
        let mut labels = vec![String::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(labels.len() * alpha.len());
            for prefix in &labels {
                for l in alpha {
                    next.push(if prefix.is_empty() {
                        l.clone()
                    } else {
                        format!("{prefix},{l}")
                    });
                }
            }
            labels = next;
        }
        labels
    };
    let questions: Vec<Vec<String>> = game.questions.iter().map(product_labels).collect();
    let answers: Vec<Vec<String>> = game.answers.iter().map(product_labels).collect();
    let rep_q_dims = dims(&questions);
    let rep_a_dims = dims(&answers);
    let q_total: usize = checked_product(rep_q_dims.iter().copied())?;
    let a_total: usize = checked_product(rep_a_dims.iter().copied())?;
    let _ = checked_product([q_total, a_total].into_iter())?;

    let base_q_dims = game.question_dims();
    let base_a_dims = game.answer_dims();

    // Distribution: n-fold product of the positive-mass base tuples,
    // extended coordinate by coordinate.
    let mut acc: Vec<(Vec<Vec<usize>>, Prob)> = vec![(Vec::new(), Prob::one())];
    for _ in 0..n {
        let mut next = Vec::with_capacity(acc.len() * game.dist.len());
        for (coords, mass) in &acc {
            for (flat, m) in &game.dist {
                let tuple = unflatten(*flat, &base_q_dims);
                let mut coords2 = coords.clone();
                coords2.push(tuple);
                next.push((coords2, mass.mul(m)));
            }
        }
        acc = next;
    }
    let distribution: Vec<(Vec<usize>, Prob)> = acc
        .into_iter()
        .map(|(coords, mass)| {
            // Per player, the repeated question index is the mixed-radix
            // combination of that player's coordinate questions.
            let tuple: Vec<usize> = (0..players)
                .map(|p| {
                    coords
                        .iter()
                        .fold(0usize, |a, c| a * base_q_dims[p] + c[p])
                })
                .collect();
            (tuple, mass)
        })
        .collect();

    // Predicate: conjunction over coordinates.
    let mut win = vec![false; q_total * a_total];
    for q_flat in 0..q_total {
        let q_tuple = unflatten(q_flat, &rep_q_dims);
        let q_coords: Vec<Vec<usize>> = (0..players)
            .map(|p| unflatten(q_tuple[p], &vec![base_q_dims[p]; n]))
            .collect();
        for a_flat in 0..a_total {
            let a_tuple = unflatten(a_flat, &rep_a_dims);
            let a_coords: Vec<Vec<usize>> = (0..players)
                .map(|p| unflatten(a_tuple[p], &vec![base_a_dims[p]; n]))
                .collect();
            let mut all = true;
            for c in 0..n {
                let bq: Vec<usize> = (0..players).map(|p| q_coords[p][c]).collect();
                let ba: Vec<usize> = (0..players).map(|p| a_coords[p][c]).collect();
                let bq_flat = flatten(&bq, &base_q_dims);
                let ba_flat = flatten(&ba, &base_a_dims);
                if !game.wins(bq_flat, ba_flat) {
                    all = false;
                    break;
                }
            }
            win[q_flat * a_total + a_flat] = all;
        }
    }
    Game::new(questions, answers, distribution, win)
}

/// The anchoring transform: every player's question alphabet gains the
/// fresh symbol `⊥`; each question is independently replaced by `⊥` with
/// probability `alpha`; the predicate auto-wins whenever any delivered
/// question is `⊥`.
pub fn anchor(game: &Game, alpha: &Prob) -> Result<Game, GameError> {
    let a = alpha.to_f64();
    if !(a > 0.0 && a < 1.0) {
        return Err(GameError::InvalidAlpha(a));
    }
    let players = game.players;
    for p in 0..players {
        if game.questions[p].iter().any(|l| l == ANCHOR_LABEL) {
            return Err(GameError::InvalidGame(format!(
                "player {p} already uses the question label `{ANCHOR_LABEL}`"
            )));
        }
    }
    let questions: Vec<Vec<String>> = game
        .questions
        .iter()
        .map(|qs| {
            let mut qs = qs.clone();
            qs.push(ANCHOR_LABEL.to_string());
            qs
        })
        .collect();
    let answers = game.answers.clone();
    let new_q_dims = dims(&questions);
    let base_q_dims = game.question_dims();
    let a_total = game.answer_tuple_count();
    let q_total: usize = checked_product(new_q_dims.iter().copied())?;
    let _ = checked_product([q_total, a_total].into_iter())?;

    let one_minus = Prob::one().sub(alpha);
    let mut acc: BTreeMap<Vec<usize>, Prob> = BTreeMap::new();
    for (flat, mass) in &game.dist {
        let base = unflatten(*flat, &base_q_dims);
        for subset in 0..(1usize << players) {
            let mut tuple = Vec::with_capacity(players);
            let mut factor = mass.clone();
            for (p, &b) in base.iter().enumerate() {
                if subset & (1 << p) != 0 {
                    tuple.push(new_q_dims[p] - 1); // the ⊥ slot
                    factor = factor.mul(alpha);
                } else {
                    tuple.push(b);
                    factor = factor.mul(&one_minus);
                }
            }
            let slot = acc.entry(tuple).or_insert_with(Prob::zero);
            *slot = slot.add(&factor);
        }
    }
    let distribution: Vec<(Vec<usize>, Prob)> = acc.into_iter().collect();

    let mut win = vec![false; q_total * a_total];
    for q_flat in 0..q_total {
        let q_tuple = unflatten(q_flat, &new_q_dims);
        let anchored = (0..players).any(|p| q_tuple[p] == new_q_dims[p] - 1);
        for a_flat in 0..a_total {
            let w = if anchored {
                true
            } else {
                game.wins(flatten(&q_tuple, &base_q_dims), a_flat)
            };
            win[q_flat * a_total + a_flat] = w;
        }
    }
    Game::new(questions, answers, distribution, win)
}

pub use crate::prob::{l1, tvd};

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

fn two_player_binary_game<F>(dist: Vec<(Vec<usize>, Prob)>, wins: F, name: &str) -> Game
where
    F: Fn(usize, usize, usize, usize) -> bool,
{
    let q = vec![vec!["0".to_string(), "1".to_string()]; 2];
    let a = q.clone();
    let mut win = vec![false; 16];
    for (qf, (s, t)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
        for (af, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
            win[qf * 4 + af] = wins(*s, *t, *x, *y);
        }
    }
    let mut g = Game::new(q, a, dist, win).expect("builtin game is valid");
    g.builtin = Some(name.to_string());
    g
}

/// CHSH: uniform questions, win iff a ⊕ b = x ∧ y.
pub fn chsh() -> Game {
    let dist = (0..2)
        .flat_map(|s| (0..2).map(move |t| (vec![s, t], Prob::ratio(1, 4))))
        .collect();
    two_player_binary_game(dist, |s, t, a, b| (a ^ b) == (s & t), "chsh")
}

/// FFL: questions uniform over {(0,0),(0,1),(1,0)}, win iff (a ∨ x) ≠ (b ∨ y).
pub fn ffl() -> Game {
    let dist = vec![
        (vec![0, 0], Prob::ratio(1, 3)),
        (vec![0, 1], Prob::ratio(1, 3)),
        (vec![1, 0], Prob::ratio(1, 3)),
    ];
    two_player_binary_game(dist, |s, t, a, b| (a | s) != (b | t), "ffl")
}

/// n-question XOR game from a ±1 sign table: uniform questions, win iff
/// (-1)^(a ⊕ b) equals the table sign.
pub fn nxor(signs: &[Vec<i8>]) -> Result<Game, GameError> {
    let m = signs.len();
    if m == 0 {
        return Err(GameError::InvalidGame("empty sign table".into()));
    }
    let n = signs[0].len();
    if n == 0 || signs.iter().any(|row| row.len() != n) {
        return Err(GameError::InvalidGame("ragged sign table".into()));
    }
    if signs.iter().flatten().any(|&c| c != 1 && c != -1) {
        return Err(GameError::InvalidGame("sign table entries must be ±1".into()));
    }
    let questions = vec![
        (0..m).map(|i| i.to_string()).collect::<Vec<_>>(),
        (0..n).map(|j| j.to_string()).collect::<Vec<_>>(),
    ];
    let answers = vec![vec!["0".to_string(), "1".to_string()]; 2];
    let dist = (0..m)
        .flat_map(|s| (0..n).map(move |t| (vec![s, t], Prob::ratio(1, (m * n) as i64))))
        .collect();
    let mut win = vec![false; m * n * 4];
    for s in 0..m {
        for t in 0..n {
            let target = if signs[s][t] == 1 { 0 } else { 1 };
            for a in 0..2 {
                for b in 0..2 {
                    win[(s * n + t) * 4 + (a * 2 + b)] = (a ^ b) == target;
                }
            }
        }
    }
    let mut g = Game::new(questions, answers, dist, win)?;
    g.builtin = Some("nxor".to_string());
    Ok(g)
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WinEntry {
    q: Vec<String>,
    a: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PredicateJson {
    Chsh,
    Ffl,
    Nxor { signs: Vec<Vec<i8>> },
    Table { win: Vec<WinEntry> },
}

#[derive(Serialize, Deserialize)]
struct GameJson {
    players: usize,
    questions: Vec<Vec<String>>,
    answers: Vec<Vec<String>>,
    distribution: Vec<MassEntry>,
    predicate: PredicateJson,
}

impl Game {
    /// Serialize. Builtins are exported through the explicit table form so
    /// that every game file round-trips without special cases.
    pub fn to_json(&self) -> serde_json::Value {
        let qd = self.question_dims();
        let ad = self.answer_dims();
        let a_total = self.answer_tuple_count();
        let mut entries = Vec::new();
        for q_flat in 0..self.question_tuple_count() {
            let q_tuple = unflatten(q_flat, &qd);
            for a_flat in 0..a_total {
                if self.win[q_flat * a_total + a_flat] {
                    let a_tuple = unflatten(a_flat, &ad);
                    entries.push(WinEntry {
                        q: q_tuple
                            .iter()
                            .enumerate()
                            .map(|(p, &i)| self.questions[p][i].clone())
                            .collect(),
                        a: a_tuple
                            .iter()
                            .enumerate()
                            .map(|(p, &i)| self.answers[p][i].clone())
                            .collect(),
                    });
                }
            }
        }
        let dist = self
            .dist
            .iter()
            .map(|(flat, m)| MassEntry {
                q: unflatten(*flat, &qd)
                    .iter()
                    .enumerate()
                    .map(|(p, &i)| self.questions[p][i].clone())
                    .collect(),
                p: m.to_f64(),
            })
            .collect();
        serde_json::to_value(GameJson {
            players: self.players,
            questions: self.questions.clone(),
            answers: self.answers.clone(),
            distribution: dist,
            predicate: PredicateJson::Table { win: entries },
        })
        .expect("game serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Game, GameError> {
        let gj: GameJson =
            serde_json::from_value(v.clone()).map_err(|e| GameError::Json(e.to_string()))?;
        if gj.players != gj.questions.len() || gj.players != gj.answers.len() {
            return Err(GameError::Json(
                "players field disagrees with alphabet list lengths".into(),
            ));
        }
        let find = |alpha: &Vec<String>, label: &str| -> Result<usize, GameError> {
            alpha
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| GameError::Json(format!("unknown label `{label}`")))
        };
        let mut distribution = Vec::new();
        for e in &gj.distribution {
            if e.q.len() != gj.players {
                return Err(GameError::Json("distribution tuple arity mismatch".into()));
            }
            let tuple: Vec<usize> = e
                .q
                .iter()
                .enumerate()
                .map(|(p, l)| find(&gj.questions[p], l))
                .collect::<Result<_, _>>()?;
            distribution.push((tuple, Prob::from_f64(e.p)));
        }
        match gj.predicate {
            PredicateJson::Chsh => {
                let base = chsh();
                Game::new(gj.questions, gj.answers, distribution, base.win.clone())
            }
            PredicateJson::Ffl => {
                let base = ffl();
                Game::new(gj.questions, gj.answers, distribution, base.win.clone())
            }
            PredicateJson::Nxor { signs } => {
                let base = nxor(&signs)?;
                Game::new(gj.questions, gj.answers, distribution, base.win.clone())
            }
            PredicateJson::Table { win } => {
                let qd = dims(&gj.questions);
                let ad = dims(&gj.answers);
                let q_total: usize = checked_product(qd.iter().copied())?;
                let a_total: usize = checked_product(ad.iter().copied())?;
                let _ = checked_product([q_total, a_total].into_iter())?;
                let mut table = vec![false; q_total * a_total];
                for e in &win {
                    if e.q.len() != gj.players || e.a.len() != gj.players {
                        return Err(GameError::Json("win tuple arity mismatch".into()));
                    }
                    let qt: Vec<usize> = e
                        .q
                        .iter()
                        .enumerate()
                        .map(|(p, l)| find(&gj.questions[p], l))
                        .collect::<Result<_, _>>()?;
                    let at: Vec<usize> = e
                        .a
                        .iter()
                        .enumerate()
                        .map(|(p, l)| find(&gj.answers[p], l))
                        .collect::<Result<_, _>>()?;
                    table[flatten(&qt, &qd) * a_total + flatten(&at, &ad)] = true;
                }
                Game::new(gj.questions, gj.answers, distribution, table)
            }
        }
    }
}

/// Strategy file form: one map per player from question label to answer label.
#[derive(Serialize, Deserialize)]
pub struct StrategyJson {
    pub maps: Vec<BTreeMap<String, String>>,
}

impl StrategyJson {
    pub fn resolve(&self, game: &Game) -> Result<Vec<DeterministicStrategy>, GameError> {
        if self.maps.len() != game.players() {
            return Err(GameError::Json("strategy player count mismatch".into()));
        }
        let mut out = Vec::new();
        for (p, map) in self.maps.iter().enumerate() {
            let mut answer_for = Vec::with_capacity(game.questions[p].len());
            for q in &game.questions[p] {
                let a = map
                    .get(q)
                    .ok_or_else(|| GameError::Json(format!("strategy missing question `{q}`")))?;
                let ai = game.answers[p]
                    .iter()
                    .position(|l| l == a)
                    .ok_or_else(|| GameError::Json(format!("unknown answer label `{a}`")))?;
                answer_for.push(ai);
            }
            out.push(DeterministicStrategy { answer_for });
        }
        Ok(out)
    }

    pub fn from_strategies(game: &Game, strategies: &[DeterministicStrategy]) -> Self {
        let maps = strategies
            .iter()
            .enumerate()
            .map(|(p, s)| {
                game.questions[p]
                    .iter()
                    .cloned()
                    .zip(s.answer_for.iter().map(|&a| game.answers[p][a].clone()))
                    .collect()
            })
            .collect();
        StrategyJson { maps }
    }
}

/// Winning probability of a fixed strategy tuple.
pub fn strategy_value(game: &Game, strategies: &[DeterministicStrategy]) -> Prob {
    let qd = game.question_dims();
    let ad = game.answer_dims();
    let mut total = Prob::zero();
    for (flat, mass) in &game.dist {
        let tuple = unflatten(*flat, &qd);
        let a_tuple: Vec<usize> = (0..game.players)
            .map(|p| strategies[p].answer_for[tuple[p]])
            .collect();
        if game.wins(*flat, flatten(&a_tuple, &ad)) {
            total = total.add(mass);
        }
    }
    total
}
