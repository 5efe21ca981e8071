use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use lstring_core::lemmas::closed_walk;
use lstring_core::word::parse_sequence;
use lstring_core::{Loop, LoopSequence, Vertex};

const P: &str = "@(0,0) +1 +2 -1 -2";

fn lstring(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lstring"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LSTRING_CACHE")
        .output()
        .expect("binary runs")
}

fn report(out: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn series_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = lstring(dir.path(), &["series", "-k", "0", "--beta", "1e-4", "--imax", "3", P]);
    assert!(o.status.success());
    let r = report(dir.path(), "series");
    assert_eq!(r["result"]["series"]["value"].as_f64().unwrap(), 5.0e-5);
    assert_eq!(r["result"]["series"]["value_exact"], "1/20000");
    assert!(r["provenance"]["config_hash"].as_str().unwrap().len() == 64);
    let csv = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(csv.starts_with("i,a,a_f64,term_f64\n0,0,"));
}

#[test]
fn enumerate_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = lstring(dir.path(), &["enumerate", "--a", "1", "--b", "0", "--c", "0", "--d", "0", "--list", P]);
    assert!(o.status.success());
    let r = report(dir.path(), "enumerate");
    assert_eq!(r["result"]["sums"]["count"], 4);
    assert_eq!(r["result"]["sums"]["signed"], "1/2·β");
    assert_eq!(r["result"]["trajectories"].as_array().unwrap().len(), 4);
}

#[test]
fn worked_trajectory_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = lstring(dir.path(), &["verify-master", "--figure7"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("-1/226492416000·β^7"));
    assert_eq!(report(dir.path(), "verify-master")["passed"], true);
}

#[test]
fn parse_errors_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let o = lstring(dir.path(), &["core", "@(0,0) +1 -1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warning") && err.contains("empty sequence"), "{err}");

    let o = lstring(dir.path(), &["core", &format!("{P} ; {P}")]);
    assert!(o.status.success());
    assert_eq!(report(dir.path(), "core")["result"]["stats"]["ell"], 16);

    let o = lstring(dir.path(), &["core", "@(0,0) +1 +2 +2 -2 -1 -2"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("backtracks erased"));
    assert_eq!(report(dir.path(), "core")["warnings"].as_array().unwrap().len(), 1);

    assert_eq!(lstring(dir.path(), &["core", "@(0,0) +1 +2"]).status.code(), Some(2));
    assert_eq!(lstring(dir.path(), &["core", "--dim", "3", P]).status.code(), Some(2));
    assert_eq!(lstring(dir.path(), &["core", "--colour", "3", P]).status.code(), Some(2));
}

#[test]
fn coefficient_cache_persists() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lstring"))
            .args(["coeff", "--imax", "2", "-k", "1", P, "--out"])
            .arg(dir.path())
            .env("LSTRING_CACHE", &cache)
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    let first = std::fs::read_to_string(cache.join("coefficients.jsonl")).unwrap();
    assert!(first.lines().any(|l| l.contains("\"i\":1,\"k\":1") && l.contains("\"b_num\":\"1\"")));
    assert!(run().status.success());
    assert_eq!(std::fs::read_to_string(cache.join("coefficients.jsonl")).unwrap(), first);
    let r = report(dir.path(), "coeff");
    let b11 = r["result"]["table"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["i"] == 1 && e["k"] == 1)
        .unwrap()
        .clone();
    assert_eq!((b11["b_num"].as_str(), b11["b_den"].as_str()), (Some("1"), Some("1")));
}

#[test]
fn monte_carlo_reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mc-estimate", "--N", "3", "--beta", "0.2", "--sweeps", "600", "--burn-in", "50", "--seed", "4", "@(1,1) +1 +2 -1 -2"];
    assert!(lstring(a.path(), &args).status.success());
    assert!(lstring(b.path(), &args).status.success());
    let ja = std::fs::read(a.path().join("mc-estimate.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.path().join("mc-estimate.json")).unwrap());
    assert_eq!(report(a.path(), "mc-estimate")["provenance"]["seed"], 4);
}

#[test]
fn failed_verification_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // Δ grows when N shrinks, so a descending ladder cannot pass
    let o = lstring(
        dir.path(),
        &["mc-verify", "--beta", "0.1", "--sweeps", "1000", "--burn-in", "100", "--ladder", "4,2", "@(1,1) +1 +2 -1 -2"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(dir.path(), "mc-verify")["passed"], false);
    assert!(dir.path().join("ladder.csv").exists());
}

#[test]
fn region_errors_surface() {
    let dir = tempfile::tempdir().unwrap();
    let o = lstring(dir.path(), &["mc-verify", "--sweeps", "100", P]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not inside the box"));
}

fn arb_word() -> impl Strategy<Value = String> {
    let one = (prop::collection::vec(-3i32..=3, 2), prop::collection::vec((1i8..=2, any::<bool>()), 1..10))
        .prop_map(|(start, steps)| {
            let steps: Vec<i8> = steps.into_iter().map(|(a, s)| if s { a } else { -a }).collect();
            let w = closed_walk(2, &steps);
            let body: Vec<String> = w.iter().map(|s| format!("{s:+}")).collect();
            format!("@({},{}) {}", start[0], start[1], body.join(" "))
        });
    prop::collection::vec(one, 1..=3).prop_map(|ws| ws.join(" ; "))
}

proptest! {
    #[test]
    fn words_round_trip(text in arb_word()) {
        if let Ok((s, _)) = parse_sequence(&text) {
            let (again, warnings) = parse_sequence(&s.to_string()).unwrap();
            prop_assert!(warnings.is_empty());
            prop_assert_eq!(again.to_string(), s.to_string());
            prop_assert_eq!(again, s);
        }
    }
}

#[test]
fn plaquette_sequence_stats() {
    let (s, _) = parse_sequence(&format!("{P} ; {P}")).unwrap();
    let p = Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2]).unwrap();
    assert_eq!(s, LoopSequence::new(vec![p.clone(), p]).unwrap());
    assert_eq!((s.len(), s.ell()), (8, 16));
}
