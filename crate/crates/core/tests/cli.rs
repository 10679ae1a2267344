//! End-to-end tests of the anchorlab binary: pipelines over standard
//! streams, exit codes, manifest writing, and byte-identical replay.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anchorlab"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn anchorlab");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("wait anchorlab")
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .stdin(Stdio::null())
        .output()
        .expect("run anchorlab")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn help_and_version() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
}

#[test]
fn builtin_value_pipeline() {
    let game = run(&["builtin", "chsh"]);
    assert!(game.status.success());
    let value = run_with_stdin(&["value"], &String::from_utf8_lossy(&game.stdout));
    assert!(value.status.success());
    assert_eq!(stdout_str(&value), "0.75");
}

#[test]
fn ffl_repeat_pipeline() {
    let game = run(&["builtin", "ffl"]);
    let repeated = run_with_stdin(&["repeat", "2"], &String::from_utf8_lossy(&game.stdout));
    assert!(repeated.status.success());
    let value = run_with_stdin(&["value"], &String::from_utf8_lossy(&repeated.stdout));
    assert_eq!(stdout_str(&value), "0.6666667");
}

#[test]
fn xor_value_pipeline() {
    let game = run(&["builtin", "chsh"]);
    let out = run_with_stdin(
        &["xor-value", "--tol", "1e-6"],
        &String::from_utf8_lossy(&game.stdout),
    );
    assert!(out.status.success());
    assert_eq!(stdout_str(&out), "0.8535534");
}

#[test]
fn anchor_pipeline_matches_formula() {
    let game = run(&["builtin", "chsh"]);
    let anchored = run_with_stdin(&["anchor", "0.5"], &String::from_utf8_lossy(&game.stdout));
    assert!(anchored.status.success());
    let value = run_with_stdin(&["value"], &String::from_utf8_lossy(&anchored.stdout));
    assert_eq!(stdout_str(&value), "0.9375");
}

#[test]
fn game_json_round_trips_losslessly() {
    let game = run(&["builtin", "ffl"]);
    let text = String::from_utf8_lossy(&game.stdout).to_string();
    // Piping a game through a 1-fold repeat is the identity on values and
    // the JSON itself parses back into the same game.
    let worst = run_with_stdin(&["worst-case"], &text);
    assert!(worst.status.success());
    assert_eq!(stdout_str(&worst), "0");
}

#[test]
fn bound_subcommand_emits_report() {
    let out = run(&[
        "bound",
        "two-player-decay",
        "--param",
        "eps=0.1",
        "--param",
        "alpha=0.5",
        "--param",
        "n=1000",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["formula"], "two-player-decay");
    assert_eq!(v["vacuous"], true);
    assert_eq!(v["clamped"], 1.0);
}

#[test]
fn bound_vs_truth_csv() {
    let game = run(&["builtin", "ffl"]);
    let out = run_with_stdin(
        &["bound-vs-truth", "--n-max", "2", "--bound", "two-player-decay"],
        &String::from_utf8_lossy(&game.stdout),
    );
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,true_value,raw_bound,clamped_bound,consistent"
    );
    for line in lines {
        assert!(line.ends_with("true"), "inconsistent row: {line}");
        assert!(line.contains("0.6666666666666666"));
    }
}

#[test]
fn fuzz_suites_run_clean() {
    for suite in ["quantum", "raz", "probfacts"] {
        let out = run(&["fuzz", suite, "--trials", "50", "--seed", "9"]);
        assert!(out.status.success(), "{suite} failed");
        let text = stdout_str(&out);
        assert!(text.starts_with("instance_seed,lhs,rhs,slack,holds,check"));
        assert!(!text.contains("false"), "{suite} had violations");
    }
}

#[test]
fn audit_canonical_reports_small_epsilon() {
    let out = run(&["audit", "--canonical", "2", "--block-identity", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["condition_zero"]["epsilon"].as_f64().unwrap().abs() <= 1e-9);
    assert!(v["equivalence"]["forward_holds"].as_bool().unwrap());
    assert!(v["anticommutator"]["holds"].as_bool().unwrap());
    assert!(v["block_identity"]["deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn invalid_inputs_exit_2() {
    // Alpha outside (0,1) names the violated invariant.
    let game = run(&["builtin", "chsh"]);
    let out = run_with_stdin(&["anchor", "1.5"], &String::from_utf8_lossy(&game.stdout));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha"), "stderr: {err}");

    // FFL is not an XOR game.
    let game = run(&["builtin", "ffl"]);
    let out = run_with_stdin(&["xor-value"], &String::from_utf8_lossy(&game.stdout));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an XOR game"));

    // Cap exceeded.
    let game = run(&["builtin", "chsh"]);
    let repeated = run_with_stdin(&["repeat", "2"], &String::from_utf8_lossy(&game.stdout));
    let out = run_with_stdin(
        &["value", "--cap", "100"],
        &String::from_utf8_lossy(&repeated.stdout),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("search space too large"));
}

#[test]
fn manifest_written_and_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run1");
    let game = run(&["builtin", "chsh"]);
    let game_path = dir.path().join("chsh.json");
    std::fs::write(&game_path, &game.stdout).unwrap();

    // Simulation with an explicit output directory.
    let strategy_path = dir.path().join("strategy.json");
    std::fs::write(
        &strategy_path,
        serde_json::json!({
            "maps": [
                {"0": "0", "1": "0", "⊥": "0"},
                {"0": "0", "1": "0", "⊥": "0"}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let anchored = run_with_stdin(&["anchor", "0.5"], &String::from_utf8_lossy(&game.stdout));
    let anchored_path = dir.path().join("anchored.json");
    std::fs::write(&anchored_path, &anchored.stdout).unwrap();

    let out = run(&[
        "--out",
        out_dir.to_str().unwrap(),
        "simulate",
        "--game",
        anchored_path.to_str().unwrap(),
        "--strategy",
        strategy_path.to_str().unwrap(),
        "--n",
        "2",
        "--coords",
        "0",
        "--target",
        "1",
        "--samples",
        "20000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = out_dir.join("manifest.json");
    assert!(manifest.exists(), "manifest written alongside outputs");
    let report1 = std::fs::read(out_dir.join("closeness.json")).unwrap();
    let cells1 = std::fs::read(out_dir.join("cells.csv")).unwrap();

    // Replay into a fresh directory: byte-identical artifacts.
    let out_dir2 = dir.path().join("run2");
    let replayed = run(&[
        "--out",
        out_dir2.to_str().unwrap(),
        "replay",
        manifest.to_str().unwrap(),
    ]);
    assert!(
        replayed.status.success(),
        "{}",
        String::from_utf8_lossy(&replayed.stderr)
    );
    let report2 = std::fs::read(out_dir2.join("closeness.json")).unwrap();
    let cells2 = std::fs::read(out_dir2.join("cells.csv")).unwrap();
    assert_eq!(report1, report2, "replayed report differs");
    assert_eq!(cells1, cells2, "replayed cells differ");
}

#[test]
fn seed_env_var_overrides() {
    let game = run(&["builtin", "chsh"]);
    let anchored = run_with_stdin(&["anchor", "0.5"], &String::from_utf8_lossy(&game.stdout));
    let dir = tempfile::tempdir().unwrap();
    let anchored_path = dir.path().join("anchored.json");
    std::fs::write(&anchored_path, &anchored.stdout).unwrap();
    let strategy_path = dir.path().join("strategy.json");
    std::fs::write(
        &strategy_path,
        serde_json::json!({
            "maps": [
                {"0": "0", "1": "0", "⊥": "0"},
                {"0": "0", "1": "0", "⊥": "0"}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let base_args = [
        "simulate",
        "--game",
        anchored_path.to_str().unwrap(),
        "--strategy",
        strategy_path.to_str().unwrap(),
        "--n",
        "2",
        "--coords",
        "0",
        "--target",
        "1",
        "--samples",
        "5000",
        "--seed",
        "7",
    ];
    let with_env = bin()
        .args(base_args)
        .env("ANCHORLAB_SEED", "123")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&with_env)).unwrap();
    assert_eq!(v["seed"], 123, "env seed must win");
    let without = run(&base_args);
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&without)).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn manifest_lands_in_temp_for_stdout_runs() {
    let out = run(&["builtin", "chsh"]);
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err
        .lines()
        .find(|l| l.starts_with("manifest: "))
        .expect("manifest path echoed");
    let path = Path::new(line.trim_start_matches("manifest: "));
    assert!(path.exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(manifest["command"][0], "builtin");
}

#[test]
fn simulate_alpha_anchors_inline() {
    let dir = tempfile::tempdir().unwrap();
    let game = run(&["builtin", "chsh"]);
    let game_path = dir.path().join("chsh.json");
    std::fs::write(&game_path, &game.stdout).unwrap();
    // Strategy written for the unanchored game: the anchor question is
    // auto-filled.
    let strategy_path = dir.path().join("strategy.json");
    std::fs::write(
        &strategy_path,
        serde_json::json!({
            "maps": [
                {"0": "0", "1": "0"},
                {"0": "0", "1": "0"}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--game",
        game_path.to_str().unwrap(),
        "--strategy",
        strategy_path.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--n",
        "2",
        "--coords",
        "0",
        "--target",
        "1",
        "--samples",
        "5000",
        "--seed",
        "3",
        "--marginals",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["wins"].as_u64().unwrap() > 0);
}

#[test]
fn zero_tolerance_is_a_validation_error() {
    let game = run(&["builtin", "chsh"]);
    let out = run_with_stdin(
        &["xor-value", "--tol", "0"],
        &String::from_utf8_lossy(&game.stdout),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance"));
}
