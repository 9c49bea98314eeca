use serde_json::Value;
use std::process::{Command, Output};
use wglab_cli::ResultEnvelope;

fn wglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wglab")).args(args).output().expect("binary runs")
}

fn envelopes(out: &Output) -> Vec<ResultEnvelope> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is an envelope"))
        .collect()
}

#[test]
fn margin_with_printed_constants() {
    let out = wglab(&["margin", "--paper-constants"]);
    assert_eq!(out.status.code(), Some(0));
    let env = &envelopes(&out)[0];
    assert_eq!(env.cmd, "margin");
    let m = env.outputs["raw_margin"].as_f64().unwrap();
    assert!((m - 0.011_777).abs() < 1e-6, "{m}");
}

#[test]
fn local_factors_at_five() {
    let out = wglab(&["local", "--p", "5", "--N", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &envelopes(&out)[0].outputs;
    assert_eq!(o["K"], "204");
    assert_eq!(o["L"], "1024");
    assert_eq!(o["omega"], "1020/1024");
}

#[test]
fn reps_of_44_include_all_twos() {
    let out = wglab(&["reps", "--N", "44"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &envelopes(&out)[0].outputs;
    let found = o["records"].as_array().unwrap().iter().any(|r| {
        r["x"] == 2 && r["primes"] == serde_json::json!([2, 2, 2, 2, 2])
    });
    assert!(found, "{o}");
}

#[test]
fn usage_and_validation_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["reps"],
        &["reps", "--N", "45"],
        &["local", "--p", "0", "--N", "0"],
        &["crconst", "--method", "simpson"],
        &["crconst", "--r", "7", "--step", "0.25"],
        &["reps", "--N", "44", "--format", "xml"],
    ] {
        let out = wglab(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(wglab(&["--help"]).status.code(), Some(0));
}

#[test]
fn property_failure_exits_two_after_writing() {
    // sixteen Monte Carlo samples overshoot the c_7 cap at this seed
    let out = wglab(&["crconst", "--r", "7", "--method", "mc", "--samples", "16", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let env = &envelopes(&out)[0];
    assert_eq!(env.outputs["rows"][0]["within_bound"], false);
    assert_eq!(env.seed, 3);
}

#[test]
fn envelopes_round_trip() {
    for args in [
        &["margin", "--paper-constants"][..],
        &["local", "--p", "7", "--N", "6"],
        &["sseries", "--N", "1000", "--cutoff", "200"],
        &["crconst", "--r", "9"],
        &["arcs", "--alpha", "1/3"],
    ] {
        let out = wglab(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        for line in String::from_utf8_lossy(&out.stdout).lines() {
            let env: ResultEnvelope = serde_json::from_str(line).unwrap();
            let again: ResultEnvelope = serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
            assert_eq!(env, again);
            let raw: Value = serde_json::from_str(line).unwrap();
            let keys: Vec<_> = raw.as_object().unwrap().keys().cloned().collect();
            assert_eq!(keys, ["cmd", "inputs", "ms", "outputs", "seed", "version"]);
        }
    }
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["crconst", "--r", "8", "--method", "mc", "--samples", "4096", "--seed", "11", "--no-timing"];
    let a = wglab(&args);
    let b = wglab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = wglab(&["crconst", "--r", "8", "--method", "mc", "--samples", "4096", "--seed", "12", "--no-timing"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn csv_for_verify_range() {
    let out = wglab(&["verify-range", "--lo", "10000", "--hi", "10010", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "cmd");
    let n_col = headers.iter().position(|h| h == "n").unwrap();
    let found_col = headers.iter().position(|h| h == "found").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    let ns: Vec<u64> = rows.iter().map(|r| r[n_col].parse().unwrap()).collect();
    assert_eq!(ns, [10000, 10002, 10004, 10006, 10008, 10010]);
    assert!(rows.iter().all(|r| &r[found_col] == "true"));
}

#[test]
fn csv_for_constants_table() {
    let out = wglab(&["crconst", "--format", "csv", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    let r_col = headers.iter().position(|h| h == "r").unwrap();
    let ok_col = headers.iter().position(|h| h == "within_bound").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 30);
    assert_eq!(&rows[0][r_col], "7");
    assert_eq!(&rows[29][r_col], "36");
    assert!(rows.iter().all(|r| &r[ok_col] == "true"));
}

#[test]
fn params_file_fills_unset_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.txt");
    std::fs::write(&path, "# local factor run\np = 7\nN=6\n--no-timing = true\n").unwrap();
    let path = path.to_str().unwrap();

    let out = wglab(&["local", "--params", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let env = &envelopes(&out)[0];
    assert_eq!(env.outputs["K"], "2430");
    assert_eq!(env.outputs["L"], "5832");
    assert_eq!(env.ms, 0.0);

    // an explicit flag wins over the file
    let out = wglab(&["local", "--params", path, "--N", "0"]);
    let env = &envelopes(&out)[0];
    assert_eq!(env.inputs["N"], 0);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(wglab(&["local", "--params", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.jsonl");
    let out = wglab(&["margin", "--paper-constants", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let env: ResultEnvelope = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(env.cmd, "margin");
}
