use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_fdlab");

fn fdlab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("fdlab runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut all = vec!["verify"];
    all.extend_from_slice(args);
    all.extend(["--out", out.to_str().unwrap()]);
    let o = fdlab(&all);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (o.status.code().unwrap(), serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn hex8(bytes: &[u8]) -> String {
    Sha256::digest(bytes)[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn list_prints_every_suite_once() {
    let o = fdlab(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(ids.len(), 38);
    for prefix in ["axb.", "heis.", "su2.", "decomp."] {
        assert!(ids.iter().any(|i| i.starts_with(prefix)), "{prefix}");
    }
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());
}

#[test]
fn explain_known_and_unknown() {
    let o = fdlab(&["explain", "su2.f_pi_bound"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("tolerance"));
    assert!(text.contains("n/(2n+2)"));
    assert_eq!(fdlab(&["explain", "axb.nope"]).status.code(), Some(2));
}

#[test]
fn f_pi_bound_report() {
    let (code, r) = report(&["su2.f_pi_bound", "--seed", "42"]);
    assert_eq!(code, 0);
    let ratios: Vec<&Value> =
        r["records"].as_array().unwrap().iter().filter(|x| x["id"].as_str().unwrap().contains("/ratio/")).collect();
    assert_eq!(ratios.len(), 5);
    for x in ratios {
        let id = x["id"].as_str().unwrap();
        let n: f64 = id.rsplit("n=").next().unwrap().parse().unwrap();
        assert!((x["lhs"][0].as_f64().unwrap() - n / (2.0 * n + 2.0)).abs() < 1e-12, "{id}");
        assert_eq!(x["pass"], true);
    }
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn summary_matches_records() {
    let (code, r) = report(&["su2.*", "decomp.heis_translation"]);
    assert_eq!(code, 0);
    let recs = r["records"].as_array().unwrap();
    let passed = recs.iter().filter(|x| x["pass"] == true).count();
    assert_eq!(r["summary"]["total"], recs.len());
    assert_eq!(r["summary"]["passed"], passed);
    for x in recs {
        let res = x["residual"].as_f64().unwrap();
        let bound = x["tolerance"].as_f64().unwrap() + x["tail_bound"].as_f64().unwrap();
        assert_eq!(x["pass"] == true, res <= bound, "{}", x["id"]);
        assert!(x["wall_time_ms"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(r["config"]["seed"], 42);
}

#[test]
fn exit_codes() {
    assert_eq!(report(&["su2.torus"]).0, 0);
    assert_eq!(report(&["su2.schur", "axb.rep_unitarity", "--tol-scale", "1e-300"]).0, 1);
    assert_eq!(report(&["nosuch.*"]).0, 2);
    assert_eq!(report(&["su2.torus", "--tol-scale", "-1"]).0, 2);
    assert_eq!(report(&["su2.torus", "--max-n-heis", "7"]).0, 2);
    let o = fdlab(&["verify", "nosuch.*"]);
    assert!(String::from_utf8(o.stderr).unwrap().contains("nosuch"));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("run.cfg");
    std::fs::write(
        &kv,
        "# comment\nsuites = su2.torus, su2.schur\nseed = 9\ncorpus_size = 3\nquad.b_cutoff = fixed:40\ntol.su2.schur = 1e-7\n",
    )
    .unwrap();
    let (code, r) = report(&["--config", kv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["suites"].as_array().unwrap().len(), 2);
    assert_eq!(r["suites"][1]["corpus_size"], 3);
    assert!(r["records"].as_array().unwrap().iter().filter(|x| x["id"].as_str().unwrap().starts_with("su2.schur")).all(|x| x["tolerance"] == 1e-7));

    let js = dir.path().join("run.json");
    std::fs::write(&js, r#"{"suites": ["su2.torus"], "seed": 5, "tol_scale": 2.0}"#).unwrap();
    let (code, r) = report(&["--config", js.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(code, 0);
    assert_eq!(r["config"]["seed"], 6);
    assert_eq!(r["records"][0]["tolerance"], 2e-12);

    for bad in ["suites = su2.torus\nbogus = 1\n", "seed = minus one\n", "{\"suites\": [\"su2.torus\"], \"bogus\": 1}", "tol.nosuch = 1e-3\n"] {
        std::fs::write(&kv, bad).unwrap();
        assert_eq!(report(&["--config", kv.to_str().unwrap()]).0, 2, "{bad}");
    }
    assert_eq!(report(&["--config", dir.path().join("missing").to_str().unwrap()]).0, 2);
}

#[test]
fn empty_corpus() {
    let (code, r) = report(&["su2.schur", "axb.rep_unitarity", "--corpus-size", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"]["total"], 0);
    for s in r["suites"].as_array().unwrap() {
        assert_eq!(s["corpus_size"], 0);
        assert_eq!(s["corpus_digest"], hex8(b""));
    }
}

#[test]
fn corpus_digests_regenerate() {
    let (_, a) = report(&["su2.key_estimate", "heis.coeff_two_path", "--corpus-size", "6"]);
    let (_, b) = report(&["su2.key_estimate", "heis.coeff_two_path", "--corpus-size", "6"]);
    let (_, c) = report(&["su2.key_estimate", "heis.coeff_two_path", "--corpus-size", "6", "--seed", "43"]);
    for s in 0..2 {
        assert_eq!(a["suites"][s]["corpus_digest"], b["suites"][s]["corpus_digest"]);
        assert_ne!(a["suites"][s]["corpus_digest"], c["suites"][s]["corpus_digest"]);
    }
    // The suite digest is the digest of the comma-joined per-input digests, in corpus order.
    for s in a["suites"].as_array().unwrap() {
        let id = s["id"].as_str().unwrap();
        let mut per_case: Vec<(usize, String)> = a["records"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|x| x["id"].as_str().unwrap().starts_with(&format!("{id}/")))
            .map(|x| {
                let idx = x["id"].as_str().unwrap().split('/').nth(1).unwrap().parse().unwrap();
                (idx, x["inputs_digest"].as_str().unwrap().to_string())
            })
            .collect();
        per_case.dedup();
        assert_eq!(per_case.len(), 6);
        let joined: Vec<String> = per_case.into_iter().map(|(_, d)| d).collect();
        assert_eq!(s["corpus_digest"].as_str().unwrap(), hex8(joined.join(",").as_bytes()));
    }
}

#[test]
fn report_goes_to_stdout_without_out() {
    let o = fdlab(&["verify", "su2.torus"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["summary"]["failed"], 0);
    assert!(r["tool_version"].as_str().is_some());
}
