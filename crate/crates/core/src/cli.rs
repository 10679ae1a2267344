//! Command-line wiring: game I/O on standard streams, value pipelines,
//! bound evaluation, simulation, fuzz suites, audits, and run manifests.
//!
//! Every run writes a RunManifest (to --out when given, otherwise to the
//! system temp directory, with the path echoed on stderr), and `replay`
//! re-executes a manifest to byte-identical primary output. The env var
//! ANCHORLAB_SEED overrides any seed, manifest ones included.

use crate::audit::{self, StrategyJson as AuditStrategyJson};
use crate::bounds::{self, BoundChoice, BoundParams};
use crate::entropy;
use crate::games::{self, DeterministicStrategy, Game};
use crate::prob::Prob;
use crate::sim::{self, SimConfig, SimStrategy};
use crate::xor_sdp::{self, SdpError};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

/// Exit code for validation failures.
pub const EXIT_INVALID: i32 = 2;
/// Exit code for solver divergence.
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "anchorlab",
    version,
    about = "Desk-scale laboratory for multiplayer nonlocal games"
)]
pub struct Cli {
    /// Output directory; artifacts and the manifest land here. Without it,
    /// the primary output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GameInput {
    /// Game JSON file; stdin when omitted.
    #[arg(long)]
    pub game: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Emit a builtin game as JSON: chsh, ffl, or nxor with a sign table.
    Builtin {
        name: String,
        /// JSON file holding the ±1 sign table for nxor.
        #[arg(long)]
        signs: Option<PathBuf>,
    },
    /// Classical value by exhaustive strategy enumeration.
    Value {
        #[command(flatten)]
        input: GameInput,
        /// Emit the full JSON result instead of the 7-digit value line.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = games::DEFAULT_STRATEGY_CAP)]
        cap: u128,
    },
    /// Minimum winning probability over deterministic strategies.
    WorstCase {
        #[command(flatten)]
        input: GameInput,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = games::DEFAULT_STRATEGY_CAP)]
        cap: u128,
    },
    /// n-fold parallel repetition; emits the repeated game as JSON.
    Repeat {
        n: usize,
        #[command(flatten)]
        input: GameInput,
    },
    /// α-anchoring transform; emits the anchored game as JSON.
    Anchor {
        alpha: f64,
        #[command(flatten)]
        input: GameInput,
    },
    /// Quantum XOR value via the symmetrized SDP.
    XorValue {
        #[command(flatten)]
        input: GameInput,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: bool,
        /// Also dump the primal matrix Z and dual vector y.
        #[arg(long)]
        dump_solution: bool,
    },
    /// Evaluate a closed-form bound formula; prints a JSON report.
    Bound {
        /// Formula id, e.g. two-player-decay, multiplayer-decay,
        /// expanded-decay, anchored-value, generalized-anchor,
        /// yuen-entangled, yuen-tail, delta-multiplayer,
        /// epsilon-threshold, coordinate-budget, threshold-fraction-2p,
        /// threshold-fraction-multi.
        formula: String,
        /// Named parameters, repeated: --param eps=0.1 --param n=100 …
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Brute-forced repeated values against a clamped bound, as CSV.
    BoundVsTruth {
        #[command(flatten)]
        input: GameInput,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// two-player-decay | multiplayer-decay | expanded-decay |
        /// yuen-entangled
        #[arg(long, default_value = "two-player-decay")]
        bound: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = games::DEFAULT_STRATEGY_CAP)]
        cap: u128,
    },
    /// Monte Carlo conditional-closeness estimation on a repeated game.
    Simulate {
        #[command(flatten)]
        input: GameInput,
        /// Strategy JSON ({"maps": ...} or {"mixture": ...}). With --alpha,
        /// missing entries for the anchor question fall back to each
        /// player's first answer.
        #[arg(long)]
        strategy: PathBuf,
        /// Anchor the input game with this α before simulating.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Conditioning coordinates, comma separated (may be empty).
        #[arg(long, default_value = "0")]
        coords: String,
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also run the marginal-equality check.
        #[arg(long)]
        marginals: bool,
    },
    /// Seeded inequality fuzz suites, as CSV.
    Fuzz {
        /// quantum | raz | probfacts
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 200)]
        channels: u64,
        #[arg(long, default_value_t = 16)]
        dims: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Optimality-residual audit of an explicit XOR-game strategy.
    Audit {
        /// Strategy JSON file; use --canonical to generate one instead.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Audit the canonical optimal CHSH(n) strategy.
        #[arg(long)]
        canonical: Option<usize>,
        /// Signed block identity check for this odd n.
        #[arg(long)]
        block_identity: Option<usize>,
        #[arg(long, default_value = "all")]
        checks: String,
    },
    /// Re-execute a recorded manifest to byte-identical output.
    Replay { manifest: PathBuf },
}

/// Everything needed to reproduce a run.
#[derive(Serialize, Deserialize, Debug)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub stdin: Option<String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp_epoch_secs: u64,
}

#[derive(Debug)]
pub struct RunOutput {
    /// Primary output, printed to stdout (or written to --out).
    pub primary: String,
    /// Name of the primary artifact when --out is used.
    pub primary_name: &'static str,
    /// Extra artifacts, written only when --out is given.
    pub extra: Vec<(String, String)>,
}

fn fmt7(x: f64) -> String {
    let s = format!("{x:.7}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn read_game(input: &GameInput, stdin: &mut dyn Read) -> Result<Game, String> {
    let text = match &input.game {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read game file {}: {e}", path.display()))?,
        None => {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| format!("cannot read game JSON from stdin: {e}"))?;
            buf
        }
    };
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("game JSON parse error: {e}"))?;
    Game::from_json(&value).map_err(|e| e.to_string())
}

fn parse_params(list: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in list {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("bad --param `{item}`, expected key=value"))?;
        let value: f64 = v
            .parse()
            .map_err(|e| format!("bad value in --param `{item}`: {e}"))?;
        out.insert(k.to_string(), value);
    }
    Ok(out)
}

fn param(map: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64, String> {
    match map.get(key) {
        Some(v) => Ok(*v),
        None => default.ok_or_else(|| format!("missing --param {key}=…")),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SimStrategyJson {
    Plain(games::StrategyJson),
    Mixture {
        mixture: Vec<MixturePart>,
    },
}

#[derive(Deserialize)]
struct MixturePart {
    weight: f64,
    maps: Vec<BTreeMap<String, String>>,
}

fn read_strategy(path: &Path, game: &Game) -> Result<SimStrategy, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read strategy file {}: {e}", path.display()))?;
    let parsed: SimStrategyJson =
        serde_json::from_str(&text).map_err(|e| format!("strategy JSON parse error: {e}"))?;
    // Strategies written for the unanchored game get a default response at
    // the anchor question (the predicate auto-wins there anyway).
    let fill = |mut maps: Vec<BTreeMap<String, String>>| -> Vec<BTreeMap<String, String>> {
        for (p, map) in maps.iter_mut().enumerate() {
            let has_anchor = game
                .questions()
                .get(p)
                .is_some_and(|qs| qs.iter().any(|q| q == games::ANCHOR_LABEL));
            if has_anchor && !map.contains_key(games::ANCHOR_LABEL) {
                map.insert(
                    games::ANCHOR_LABEL.to_string(),
                    game.answers()[p][0].clone(),
                );
            }
        }
        maps
    };
    match parsed {
        SimStrategyJson::Plain(s) => {
            let sj = games::StrategyJson { maps: fill(s.maps) };
            Ok(SimStrategy::Deterministic(
                sj.resolve(game).map_err(|e| e.to_string())?,
            ))
        }
        SimStrategyJson::Mixture { mixture } => {
            let mut parts: Vec<(f64, Vec<DeterministicStrategy>)> = Vec::new();
            for p in mixture {
                let sj = games::StrategyJson { maps: fill(p.maps) };
                parts.push((p.weight, sj.resolve(game).map_err(|e| e.to_string())?));
            }
            Ok(SimStrategy::Mixture(parts))
        }
    }
}

/// Exit classification for error values.
fn classify(err: &str) -> i32 {
    if err.contains("solver diverged") {
        EXIT_DIVERGED
    } else {
        EXIT_INVALID
    }
}

/// Execute a parsed command. `seed_override` (from ANCHORLAB_SEED or a
/// replayed manifest) takes precedence over seed flags. Returns the
/// produced output plus the effective seed.
pub fn run(
    command: &Command,
    stdin: &mut dyn Read,
    seed_override: Option<u64>,
) -> Result<(RunOutput, u64), String> {
    let mut effective_seed = seed_override.unwrap_or(0);
    let out = match command {
        Command::Builtin { name, signs } => {
            let game = match name.as_str() {
                "chsh" => games::chsh(),
                "ffl" => games::ffl(),
                "nxor" => {
                    let path = signs
                        .as_ref()
                        .ok_or("nxor needs --signs pointing at a JSON sign table")?;
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read sign table: {e}"))?;
                    let table: Vec<Vec<i8>> = serde_json::from_str(&text)
                        .map_err(|e| format!("sign table parse error: {e}"))?;
                    games::nxor(&table).map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown builtin `{other}`")),
            };
            RunOutput {
                primary: serde_json::to_string_pretty(&game.to_json()).unwrap(),
                primary_name: "game.json",
                extra: vec![],
            }
        }
        Command::Value { input, json, cap } => {
            let game = read_game(input, stdin)?;
            let r = games::classical_value_capped(&game, *cap).map_err(|e| e.to_string())?;
            value_output(&game, &r, *json)
        }
        Command::WorstCase { input, json, cap } => {
            let game = read_game(input, stdin)?;
            let r = games::worst_case_value_capped(&game, *cap).map_err(|e| e.to_string())?;
            value_output(&game, &r, *json)
        }
        Command::Repeat { n, input } => {
            let game = read_game(input, stdin)?;
            let repeated = games::repeat(&game, *n).map_err(|e| e.to_string())?;
            RunOutput {
                primary: serde_json::to_string_pretty(&repeated.to_json()).unwrap(),
                primary_name: "game.json",
                extra: vec![],
            }
        }
        Command::Anchor { alpha, input } => {
            let game = read_game(input, stdin)?;
            let anchored =
                games::anchor(&game, &Prob::from_f64(*alpha)).map_err(|e| e.to_string())?;
            RunOutput {
                primary: serde_json::to_string_pretty(&anchored.to_json()).unwrap(),
                primary_name: "game.json",
                extra: vec![],
            }
        }
        Command::XorValue {
            input,
            tol,
            json,
            dump_solution,
        } => {
            let game = read_game(input, stdin)?;
            let g = xor_sdp::xor_matrix(&game).map_err(|e| e.to_string())?;
            let sol = xor_sdp::quantum_bias(&g, *tol).map_err(sdp_err)?;
            let mut report = serde_json::json!({
                "bias": sol.bias(),
                "value": sol.value(),
                "dual_bias": sol.dual_bias,
                "gap": sol.gap,
                "iterations": sol.iterations,
                "fallback_used": sol.fallback_used,
            });
            if *dump_solution {
                let side = sol.z.nrows();
                report["z"] = serde_json::json!({
                    "side": side,
                    "entries": sol.z.iter().copied().collect::<Vec<f64>>(),
                });
                report["y"] = serde_json::json!(sol.y);
            }
            RunOutput {
                primary: if *json {
                    serde_json::to_string_pretty(&report).unwrap()
                } else {
                    fmt7(sol.value())
                },
                primary_name: "xor-value.json",
                extra: vec![],
            }
        }
        Command::Bound { formula, params } => {
            let p = parse_params(params)?;
            let report = eval_bound(formula, &p)?;
            RunOutput {
                primary: report,
                primary_name: "bound.json",
                extra: vec![],
            }
        }
        Command::BoundVsTruth {
            input,
            n_max,
            bound,
            params,
            cap,
        } => {
            let game = read_game(input, stdin)?;
            let p = parse_params(params)?;
            let choice = match bound.as_str() {
                "two-player-decay" => BoundChoice::TwoPlayerDecay,
                "multiplayer-decay" => BoundChoice::MultiplayerDecay,
                "expanded-decay" => BoundChoice::ExpandedDecay,
                "yuen-entangled" => BoundChoice::YuenEntangled,
                other => return Err(format!("unknown bound `{other}`")),
            };
            let defaults = BoundParams::default();
            let bp = BoundParams {
                eps: param(&p, "eps", Some(defaults.eps))?,
                alpha: param(&p, "alpha", Some(defaults.alpha))?,
                c: param(&p, "c", Some(defaults.c))?,
                k: param(&p, "k", Some(defaults.k))?,
                capital_omega_const: param(
                    &p,
                    "const",
                    Some(defaults.capital_omega_const),
                )?,
            };
            let rows = bounds::bound_vs_truth(&game, *n_max, choice, &bp, *cap)
                .map_err(|e| e.to_string())?;
            RunOutput {
                primary: bounds::bound_vs_truth_csv(&rows),
                primary_name: "bound-vs-truth.csv",
                extra: vec![],
            }
        }
        Command::Simulate {
            input,
            strategy,
            alpha,
            n,
            coords,
            target,
            samples,
            seed,
            marginals,
        } => {
            let mut game = read_game(input, stdin)?;
            if let Some(a) = alpha {
                game = games::anchor(&game, &Prob::from_f64(*a)).map_err(|e| e.to_string())?;
            }
            let strat = read_strategy(strategy, &game)?;
            let cond_coords: Vec<usize> = if coords.trim().is_empty() {
                vec![]
            } else {
                coords
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("bad --coords: {e}"))?
            };
            effective_seed = seed_override.unwrap_or(*seed);
            let cfg = SimConfig {
                game,
                strategy: strat,
                repetitions: *n,
                cond_coords,
                target: *target,
                samples: *samples,
                seed: effective_seed,
            };
            let rep = sim::simulate_conditional(&cfg).map_err(|e| e.to_string())?;
            let mut extra = vec![("cells.csv".to_string(), sim::closeness_cells_csv(&rep))];
            if *marginals {
                let m = sim::marginal_equality_check(&cfg).map_err(|e| e.to_string())?;
                extra.push((
                    "marginals.json".to_string(),
                    serde_json::to_string_pretty(&m).unwrap(),
                ));
            }
            RunOutput {
                primary: serde_json::to_string_pretty(&rep).unwrap(),
                primary_name: "closeness.json",
                extra,
            }
        }
        Command::Fuzz {
            suite,
            trials,
            channels,
            dims,
            seed,
        } => {
            effective_seed = seed_override.unwrap_or(*seed);
            let rows = match suite.as_str() {
                "quantum" => {
                    entropy::inequality_fuzz(*trials as usize, *channels as usize, effective_seed)
                        .map_err(|e| e.to_string())?
                }
                "raz" => entropy::raz_fuzz(*trials as usize, effective_seed)
                    .map_err(|e| e.to_string())?,
                "probfacts" => sim::probfact_fuzz(*trials as usize, *dims, effective_seed),
                other => return Err(format!("unknown fuzz suite `{other}`")),
            };
            let failures = rows.iter().filter(|r| !r.holds).count();
            let csv = entropy::fuzz_rows_to_csv(&rows);
            if failures > 0 {
                eprintln!("warning: {failures} fuzz rows violated their inequality");
            }
            RunOutput {
                primary: csv,
                primary_name: "fuzz.csv",
                extra: vec![],
            }
        }
        Command::Audit {
            strategy,
            canonical,
            block_identity,
            checks,
        } => {
            let mut report = serde_json::Map::new();
            if let Some(n) = block_identity {
                let b = audit::block_identity_check(*n).map_err(|e| e.to_string())?;
                report.insert("block_identity".into(), serde_json::to_value(&b).unwrap());
            }
            let strat = match (strategy, canonical) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read strategy: {e}"))?;
                    let sj: AuditStrategyJson = serde_json::from_str(&text)
                        .map_err(|e| format!("strategy parse error: {e}"))?;
                    Some(sj.resolve().map_err(|e| e.to_string())?)
                }
                (None, Some(n)) => {
                    Some(audit::canonical_chsh_strategy(*n).map_err(|e| e.to_string())?)
                }
                (None, None) => None,
            };
            if let Some(s) = strat {
                let all = checks == "all";
                if all || checks.contains("condition-zero") {
                    let c = audit::condition_zero_epsilon(&s).map_err(|e| e.to_string())?;
                    report.insert("condition_zero".into(), serde_json::to_value(&c).unwrap());
                }
                if all || checks.contains("equivalence") {
                    let e = audit::equivalence_residuals(&s).map_err(|e| e.to_string())?;
                    report.insert("equivalence".into(), serde_json::to_value(&e).unwrap());
                }
                if all || checks.contains("anticommutator") {
                    let a = audit::anticommutator_residual(&s).map_err(|e| e.to_string())?;
                    report.insert("anticommutator".into(), serde_json::to_value(&a).unwrap());
                }
                if (all || checks.contains("approximality")) && s.n >= 2 {
                    let a = audit::approximality_residual(&s, 0, 1).map_err(|e| e.to_string())?;
                    report.insert("approximality".into(), serde_json::to_value(&a).unwrap());
                    let r = audit::repeated_approximality_residual(&s, 0, 1)
                        .map_err(|e| e.to_string())?;
                    report.insert(
                        "repeated_approximality".into(),
                        serde_json::to_value(&r).unwrap(),
                    );
                }
                if (all || checks.contains("permutation")) && s.n >= 2 {
                    let mut perm: Vec<usize> = (0..s.n).collect();
                    perm.swap(0, 1);
                    let p = audit::permutation_error_residual(&s, &vec![1; s.n], &perm)
                        .map_err(|e| e.to_string())?;
                    report.insert("permutation_swap01".into(), serde_json::to_value(&p).unwrap());
                }
            }
            if report.is_empty() {
                return Err(
                    "nothing to audit: pass --strategy, --canonical, or --block-identity".into(),
                );
            }
            RunOutput {
                primary: serde_json::to_string_pretty(&serde_json::Value::Object(report)).unwrap(),
                primary_name: "audit.json",
                extra: vec![],
            }
        }
        Command::Replay { .. } => unreachable!("replay is handled by the caller"),
    };
    Ok((out, effective_seed))
}

fn sdp_err(e: SdpError) -> String {
    e.to_string()
}

fn value_output(game: &Game, r: &games::ValueResult, json: bool) -> RunOutput {
    let primary = if json {
        let strategy = games::StrategyJson::from_strategies(game, &r.strategy);
        serde_json::to_string_pretty(&serde_json::json!({
            "value": r.value.to_f64(),
            "exact": r.value.as_exact().map(|e| e.to_string()),
            "strategies_scanned": r.strategies_scanned.to_string(),
            "maximizer": serde_json::to_value(&strategy.maps).unwrap(),
        }))
        .unwrap()
    } else {
        fmt7(r.value.to_f64())
    };
    RunOutput {
        primary,
        primary_name: "value.json",
        extra: vec![],
    }
}

fn eval_bound(formula: &str, p: &BTreeMap<String, f64>) -> Result<String, String> {
    let to_json = |r: &bounds::BoundReport| serde_json::to_string_pretty(r).unwrap();
    let scalar = |formula: &str, value: f64, inputs: &BTreeMap<String, f64>| {
        serde_json::to_string_pretty(&serde_json::json!({
            "formula": formula,
            "inputs": inputs,
            "raw": value,
            "clamped": value.clamp(0.0, 1.0),
            "vacuous": value >= 1.0,
        }))
        .unwrap()
    };
    let get = |k: &str| param(p, k, None);
    let getd = |k: &str, d: f64| param(p, k, Some(d));
    let out = match formula {
        "anchored-value" => {
            let v = bounds::anchored_value(get("omega")?, get("alpha")?)
                .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "two-player-decay" => to_json(
            &bounds::two_player_decay(
                get("eps")?,
                get("alpha")?,
                get("n")? as u64,
                getd("s", 1.0)?,
                getd("c", 1.0)?,
            )
            .map_err(|e| e.to_string())?,
        ),
        "multiplayer-decay" => to_json(
            &bounds::multiplayer_decay(
                get("eps")?,
                get("alpha")?,
                get("players")? as usize,
                get("k")? as u64,
                getd("s", 1.0)?,
                get("c")?,
            )
            .map_err(|e| e.to_string())?,
        ),
        "expanded-decay" => to_json(
            &bounds::expanded_decay(
                getd("c", 1.0)?,
                get("eps")?,
                get("n")? as u64,
                get("k")?,
                get("alphabet_size")? as u64,
            )
            .map_err(|e| e.to_string())?,
        ),
        "generalized-anchor" => {
            let v = bounds::generalized_anchor_exponent(
                get("omega")?,
                get("k")? as u64,
                get("size_a")? as u64,
                get("size_b")? as u64,
                getd("const", 1.0)?,
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "yuen-entangled" => to_json(
            &bounds::yuen_entangled_bound(get("val")?, get("n")? as u64, getd("c", 1.0)?)
                .map_err(|e| e.to_string())?,
        ),
        "yuen-tail" => to_json(
            &bounds::yuen_value_tail(
                getd("c_g", 1.0)?,
                get("len_a")?,
                get("eps")?,
                get("n")? as u64,
            )
            .map_err(|e| e.to_string())?,
        ),
        "delta-multiplayer" => {
            let v = bounds::delta_multiplayer(
                get("n")? as u64,
                get("coord_count")? as u64,
                get("question_product")?,
                get("p_win")?,
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "epsilon-threshold" => {
            let v = bounds::epsilon_threshold(
                get("delta")?,
                get("c")?,
                get("players")? as usize,
                get("alpha")?,
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "coordinate-budget" => {
            let b =
                bounds::coordinate_budget(get("players")? as usize, get("eps")?, get("p_win")?)
                    .map_err(|e| e.to_string())?;
            serde_json::to_string_pretty(&b).unwrap()
        }
        "dependency-break-order" => {
            let v = bounds::dependency_break_order(
                get("delta")?,
                get("alpha")?,
                get("players")? as usize,
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "povm-order" => {
            let v = bounds::povm_order(get("delta")?, get("alpha")?, get("players")? as usize)
                .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "pinsker-order" => {
            let v = bounds::pinsker_order(get("delta")?, get("alpha")?, get("players")? as usize)
                .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "threshold-fraction-2p" => {
            let v = bounds::threshold_fraction_two_player(
                get("xi")?,
                get("eps")?,
                p.get("log_norm").copied(),
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        "threshold-fraction-multi" => {
            let v = bounds::threshold_fraction_multiplayer(
                get("xi")?,
                get("eps")?,
                get("players")? as usize,
                p.get("log_norm").copied(),
            )
            .map_err(|e| e.to_string())?;
            scalar(formula, v, p)
        }
        other => return Err(format!("unknown bound formula `{other}`")),
    };
    Ok(out)
}

/// Full entry point: parses argv, resolves the seed override, runs, writes
/// outputs and the manifest. Returns the process exit code.
pub fn main_with(args: Vec<String>, stdin: &mut dyn Read) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success exits.
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env_seed = std::env::var("ANCHORLAB_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());

    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest, cli.out.as_deref(), env_seed);
    }

    // Commands that read stdin need it captured for the manifest.
    let needs_stdin = matches!(
        &cli.command,
        Command::Value { input, .. }
        | Command::WorstCase { input, .. }
        | Command::Repeat { input, .. }
        | Command::Anchor { input, .. }
        | Command::XorValue { input, .. }
        | Command::BoundVsTruth { input, .. }
        | Command::Simulate { input, .. } if input.game.is_none()
    );
    let captured = if needs_stdin {
        let mut buf = String::new();
        if stdin.read_to_string(&mut buf).is_err() {
            eprintln!("error: cannot read stdin");
            return EXIT_INVALID;
        }
        Some(buf)
    } else {
        None
    };
    let mut reader: Box<dyn Read> = match &captured {
        Some(text) => Box::new(std::io::Cursor::new(text.clone().into_bytes())),
        None => Box::new(std::io::empty()),
    };

    match run(&cli.command, &mut reader, env_seed) {
        Ok((output, seed)) => {
            emit(&cli, &output);
            write_manifest(&cli, &args, captured, seed);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn emit(cli: &Cli, output: &RunOutput) {
    match &cli.out {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("error: cannot create {}: {e}", dir.display());
                return;
            }
            let path = dir.join(output.primary_name);
            if let Err(e) = std::fs::write(&path, &output.primary) {
                eprintln!("error: cannot write {}: {e}", path.display());
            }
            for (name, text) in &output.extra {
                let path = dir.join(name);
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                }
            }
        }
        None => {
            println!("{}", output.primary);
        }
    }
}

fn write_manifest(cli: &Cli, args: &[String], stdin: Option<String>, seed: u64) {
    let manifest = RunManifest {
        command: args.iter().skip(1).cloned().collect(),
        stdin,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_epoch_secs: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let text = serde_json::to_string_pretty(&manifest).unwrap();
    let path = match &cli.out {
        Some(dir) => dir.join("manifest.json"),
        None => {
            let dir = std::env::temp_dir().join("anchorlab-manifests");
            if std::fs::create_dir_all(&dir).is_err() {
                return;
            }
            dir.join(format!(
                "manifest-{}-{}.json",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_nanos())
                    .unwrap_or(0)
            ))
        }
    };
    if std::fs::write(&path, text).is_ok() {
        eprintln!("manifest: {}", path.display());
    }
}

fn replay(path: &Path, out_override: Option<&Path>, env_seed: Option<u64>) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read manifest {}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let manifest: RunManifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: manifest parse error: {e}");
            return EXIT_INVALID;
        }
    };
    let mut args = vec!["anchorlab".to_string()];
    args.extend(manifest.command.iter().cloned());
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: recorded command no longer parses: {e}");
            return EXIT_INVALID;
        }
    };
    let mut reader: Box<dyn Read> = match &manifest.stdin {
        Some(text) => Box::new(std::io::Cursor::new(text.clone().into_bytes())),
        None => Box::new(std::io::empty()),
    };
    // Env still wins over the manifest seed.
    let seed = env_seed.or(Some(manifest.seed));
    match run(&cli.command, &mut reader, seed) {
        Ok((output, _)) => {
            let effective = Cli {
                out: out_override.map(Path::to_path_buf).or(cli.out),
                command: cli.command,
            };
            emit(&effective, &output);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}
