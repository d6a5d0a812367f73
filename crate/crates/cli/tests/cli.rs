use std::fs;
use std::process::Command;

use coinflip_cli::{run, Output, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK};
use serde_json::Value;
use tempfile::TempDir;

fn cf(args: &[&str]) -> Output {
    run(
        std::iter::once("coinflip").chain(args.iter().copied()),
        None,
    )
}

fn cf_env(args: &[&str], mode: &str) -> Output {
    run(
        std::iter::once("coinflip").chain(args.iter().copied()),
        Some(mode),
    )
}

fn json_prefix(text: &str) -> Value {
    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<Value>();
    stream.next().expect("a JSON document").expect("valid JSON")
}

fn exact(v: &Value, field: &str) -> String {
    v[field]["exact"]
        .as_str()
        .unwrap_or_else(|| panic!("{field} in {v}"))
        .to_string()
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn check_exit_codes() {
    let half = cf(&[
        "check",
        "--spec",
        "0.5,0.5,0.5,0.5,0.5,0.5",
        "--setting",
        "classical",
    ]);
    assert_eq!(half.code, EXIT_INFEASIBLE, "{half:?}");

    let slack = cf(&[
        "check",
        "--spec",
        "0.5,0.5,0.7072,0.7072,0.7072,0.7072",
        "--setting",
        "quantum",
    ]);
    assert_eq!(slack.code, EXIT_OK, "{slack:?}");

    let invalid = cf(&[
        "check",
        "--spec",
        "0.6,0.6,1,1,1,1",
        "--setting",
        "classical",
    ]);
    assert_eq!(invalid.code, EXIT_ERROR);
    assert!(invalid.stderr.starts_with("error:"));

    let malformed = cf(&["check", "--spec", "0.5,x,1,1,1,1", "--setting", "classical"]);
    assert_eq!(malformed.code, EXIT_ERROR);
    let short = cf(&["check", "--spec", "0.5,0.5", "--setting", "classical"]);
    assert_eq!(short.code, EXIT_ERROR);
}

#[test]
fn check_json_verdict() {
    let out = cf(&[
        "check",
        "--spec",
        "7/16,15/32,3/4,3/4,3/4,3/4",
        "--setting",
        "classical",
        "--json",
    ]);
    assert_eq!(out.code, EXIT_INFEASIBLE);
    let v = json_prefix(&out.stdout);
    assert_eq!(v["feasible"], Value::Bool(false));
}

#[test]
fn synthesize_then_analyze_round_trip() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "cf2.json");
    let out = cf(&[
        "synthesize",
        "--spec",
        "7/16,7/16,3/4,3/4,3/4,3/4",
        "--setting",
        "classical",
        "--out",
        &file,
    ]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");

    let a = cf(&["analyze", &file, "--oracle"]);
    assert_eq!(a.code, EXIT_OK, "{a:?}");
    let v = json_prefix(&a.stdout);
    assert_eq!(exact(&v, "p00"), "7/16");
    assert_eq!(exact(&v, "p11"), "7/16");
    for f in ["force_a0", "force_a1", "force_b0", "force_b1"] {
        assert_eq!(exact(&v, f), "3/4");
    }
    assert!(a.stdout.contains("oracle: exact match"));

    let float = cf(&["analyze", &file, "--mode", "float"]);
    let v = json_prefix(&float.stdout);
    assert_eq!(v["mode"], "float");
    assert_eq!(v["p00"]["decimal"].as_f64(), Some(0.4375));
}

#[test]
fn coinflip1_forcing_values() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "cf1.json");
    let out = cf(&[
        "synthesize",
        "--spec",
        "1/2,1/2,1/2,1/2,1,1",
        "--setting",
        "classical",
        "--out",
        &file,
    ]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    let v = json_prefix(&cf(&["analyze", &file]).stdout);
    assert_eq!(exact(&v, "force_a0"), "1/1");
    assert_eq!(exact(&v, "force_a1"), "1/1");
    assert_eq!(exact(&v, "force_b0"), "1/2");
    assert_eq!(exact(&v, "force_b1"), "1/2");
}

#[test]
fn weak_coin_flip_spec_uses_wcf_nodes() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "wcf.json");
    let out = cf(&[
        "synthesize",
        "--spec",
        "1/2,1/2,1,51/100,51/100,1",
        "--setting",
        "quantum",
        "--out",
        &file,
    ]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.contains("\"wcf\""), "{text}");
    let v = json_prefix(&cf(&["analyze", &file]).stdout);
    assert_eq!(exact(&v, "p00"), "1/2");
    assert_eq!(exact(&v, "p11"), "1/2");
}

#[test]
fn infeasible_synthesis_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("none.json");
    let out = cf(&[
        "synthesize",
        "--spec",
        "0.5,0.5,0.5,0.5,0.5,0.5",
        "--setting",
        "classical",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_INFEASIBLE);
    assert!(!file.exists());
}

#[test]
fn analyze_reports_parse_location() {
    let dir = TempDir::new().unwrap();
    let bad = path_str(&dir, "bad.json");
    fs::write(
        &bad,
        "{\"format\": \"cf-tree/1\", \"root\": {\"leaf\": \"maybe\"}}",
    )
    .unwrap();
    let out = cf(&["analyze", &bad]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("root"), "{}", out.stderr);

    let truncated = path_str(&dir, "trunc.json");
    fs::write(&truncated, "{\"format\": ").unwrap();
    let out = cf(&["analyze", &truncated]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("line"), "{}", out.stderr);
}

#[test]
fn sweep_figures() {
    let fig2 = cf(&["sweep", "--figure", "2", "--step", "0.5"]);
    assert_eq!(fig2.code, EXIT_OK);
    let lines: Vec<&str> = fig2.stdout.lines().collect();
    assert_eq!(lines[0], "a,definitional,quantum,classical");
    let first: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[..2], [0.0, 0.5]);
    assert!((first[2] - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(first[3], 1.0);
    let mid: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((mid[2] - 0.5).abs() < 1e-12 && (mid[3] - 0.5).abs() < 1e-12);
    assert!(!fig2.stdout.contains('\r'));

    let fig1 = cf(&["sweep", "--figure", "1", "--step", "0.0625"]);
    let row = fig1
        .stdout
        .lines()
        .find(|l| l.starts_with("0.5625,"))
        .expect("p00 = 9/16 row");
    let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[1] - 5.0 / 16.0).abs() < 1e-12);
    assert!((cells[2] - 7.0 / 16.0).abs() < 1e-12);

    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "fig.csv");
    assert_eq!(
        cf(&["sweep", "--figure", "2", "--step", "0.1", "--out", &file]).code,
        EXIT_OK
    );
    assert!(fs::read_to_string(&file)
        .unwrap()
        .starts_with("a,definitional"));

    assert_eq!(cf(&["sweep", "--figure", "3"]).code, EXIT_ERROR);
    assert_eq!(
        cf(&["sweep", "--figure", "2", "--step", "0"]).code,
        EXIT_ERROR
    );
    assert_eq!(
        cf(&["sweep", "--figure", "2", "--step", "0.75"]).code,
        EXIT_ERROR
    );
}

#[test]
fn simulate_honest_and_scripted() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "cf1.json");
    // CoinFlip1(1/2, 1/2, 1, 1): honest outputs 1/2 each.
    let out = cf(&[
        "synthesize",
        "--spec",
        "1/2,1/2,1/2,1/2,1,1",
        "--setting",
        "classical",
        "--out",
        &file,
    ]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");

    let sim = cf(&["simulate", &file, "--trials", "100000", "--seed", "42"]);
    assert_eq!(sim.code, EXIT_OK, "{sim:?}");
    let v = json_prefix(&sim.stdout);
    let n = |k: &str| v[k].as_u64().unwrap();
    assert_eq!(n("zero") + n("one") + n("abort"), 100_000);
    assert_eq!(n("seed"), 42);
    let sigma = (0.25f64 / 100_000.0).sqrt();
    assert!((n("zero") as f64 / 1e5 - 0.5).abs() <= 3.0 * sigma);
    assert_eq!(v["reference"]["zero"]["within_3_sigma"], Value::Bool(true));

    let again = cf(&["simulate", &file, "--trials", "100000", "--seed", "42"]);
    assert_eq!(again.stdout, sim.stdout);

    let script = path_str(&dir, "always0.json");
    fs::write(
        &script,
        r#"{"party": "alice", "decisions": [{"path": [], "send": "0"}]}"#,
    )
    .unwrap();
    let cheat = cf(&[
        "simulate", &file, "--trials", "10000", "--seed", "7", "--script", &script,
    ]);
    assert_eq!(cheat.code, EXIT_OK, "{cheat:?}");
    let v = json_prefix(&cheat.stdout);
    assert_eq!(v["zero"].as_u64(), Some(10_000));

    let empty = path_str(&dir, "empty.json");
    fs::write(&empty, r#"{"party": "alice", "decisions": []}"#).unwrap();
    let mismatch = cf(&["simulate", &file, "--trials", "10", "--script", &empty]);
    assert_eq!(mismatch.code, EXIT_ERROR);

    assert_eq!(cf(&["simulate", &file, "--trials", "0"]).code, EXIT_ERROR);
}

#[test]
fn mode_selection() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "t.json");
    cf(&[
        "synthesize",
        "--spec",
        "1/4,1/4,1/2,1/2,1,1",
        "--setting",
        "classical",
        "--out",
        &file,
    ]);
    let env_float = json_prefix(&cf_env(&["analyze", &file], "float").stdout);
    assert_eq!(env_float["mode"], "float");
    let flag_wins = json_prefix(&cf_env(&["analyze", &file, "--mode", "rational"], "float").stdout);
    assert_eq!(flag_wins["mode"], "rational");
    assert_eq!(
        json_prefix(&cf(&["analyze", &file]).stdout)["mode"],
        "rational"
    );

    let decimal = cf(&[
        "check",
        "--spec",
        "0.25,0.25,0.5,0.5,1,1",
        "--setting",
        "classical",
        "--json",
    ]);
    assert!(decimal.stdout.contains("\"decimal\""), "{}", decimal.stdout);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_coinflip");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("CF_MODE")
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(
        status(&[
            "check",
            "--spec",
            "1/2,1/2,1,1,1,1",
            "--setting",
            "classical"
        ]),
        Some(0)
    );
    assert_eq!(
        status(&[
            "check",
            "--spec",
            "1/2,1/2,1/2,1/2,1/2,1/2",
            "--setting",
            "quantum"
        ]),
        Some(2)
    );
    assert_eq!(status(&["nonsense"]), Some(1));
    let out = Command::new(bin)
        .args(["sweep", "--figure", "2", "--step", "0.5"])
        .env("CF_MODE", "rational")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("a,definitional"));
}
