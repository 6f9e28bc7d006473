use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn encbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_encbound")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn bound_examples() {
    let runs = json(&encbound(&["bound", "runs", "n=8", "s=3"]));
    assert_eq!(runs["t"], 6.0);
    assert_eq!(runs["probability"], 0.125);
    assert_eq!(runs["asymptotic"], false);
    let trivial = json(&encbound(&["bound", "chernoff-basic", "n=100", "eps=0"]));
    assert_eq!(trivial["probability"], 1.0);
    let tri = json(&encbound(&["bound", "triangles-down", "c=0.2"]));
    assert!((tri["probability"].as_f64().unwrap() - 0.008).abs() < 1e-15);
    let via_flag = json(&encbound(&["bound", "runs", "--params", "n=8", "s=3"]));
    assert_eq!(via_flag, runs);
}

#[test]
fn bound_errors_exit_1() {
    let o = encbound(&["bound", "no-such-bound"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("runs") && err.contains("moser"), "{err}");
    assert_eq!(encbound(&["bound", "runs", "n=8"]).status.code(), Some(1));
    assert_eq!(encbound(&["bound", "runs", "n=8", "s=3", "q=1"]).status.code(), Some(1));
    assert_eq!(encbound(&["bound", "runs", "n=eight", "s=3"]).status.code(), Some(1));
    assert_eq!(encbound(&["bound", "runs", "n=8", "s=3", "n=9"]).status.code(), Some(1));
}

#[test]
fn codec_examples() {
    let o = encbound(&["codec", "elias-gamma", "encode", "5"]);
    assert_eq!(stdout(&o).trim(), "111001");
    let runs = json(&encbound(&["codec", "runs", "roundtrip-exhaustive", "n=12", "t=5"]));
    assert_eq!(runs["failures"], 0);
    assert_eq!(runs["domain"].as_u64().unwrap() + runs["skipped"].as_u64().unwrap(), 4096);
    let inssort = json(&encbound(&["codec", "inssort", "roundtrip-exhaustive", "n=6"]));
    assert_eq!((inssort["failures"].as_u64(), inssort["domain"].as_u64()), (Some(0), Some(720)));
}

#[test]
fn codec_roundtrips_every_id() {
    let cases: &[&[&str]] = &[
        &["unary", "max=300"],
        &["elias-gamma"],
        &["elias-delta"],
        &["elias-omega"],
        &["urns", "n=5", "t=3"],
        &["clique", "n=5", "t=3"],
        &["clique", "n=5", "t=3", "encoding=subset-rank"],
        &["inssort", "n=5"],
    ];
    for case in cases {
        for mode in ["roundtrip-exhaustive", "roundtrip-random"] {
            let mut args = vec!["codec", case[0], mode];
            args.extend_from_slice(&case[1..]);
            if mode == "roundtrip-random" {
                args.push("trials=500");
            }
            let r = json(&encbound(&args));
            assert_eq!(r["failures"], 0, "{args:?}");
            assert!(r["domain"].as_u64().unwrap() > 0, "{args:?}");
        }
    }
}

#[test]
fn codec_packed_files() {
    let path = scratch("omega.bin");
    let o = encbound(&["codec", "elias-omega", "encode", "1", "2", "3", "1000000", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let back = encbound(&["codec", "elias-omega", "decode", "--input", path.to_str().unwrap()]);
    assert_eq!(stdout(&back).trim(), "1 2 3 1000000");

    let perm = encbound(&["codec", "inssort", "encode", "n=5", "3,1,5,2,4"]);
    let bits = stdout(&perm).trim().to_string();
    let back = encbound(&["codec", "inssort", "decode", "n=5", &bits]);
    assert_eq!(stdout(&back).trim(), "3,1,5,2,4");

    let urns = encbound(&["codec", "urns", "encode", "n=4", "t=3", "2,0,2,2"]);
    let bits = stdout(&urns).trim().to_string();
    assert_eq!(stdout(&encbound(&["codec", "urns", "decode", "n=4", "t=3", &bits])).trim(), "2,0,2,2");
}

#[test]
fn codec_errors_exit_1() {
    // Not a witness: no run of 4 ones.
    assert_eq!(encbound(&["codec", "runs", "encode", "n=6", "t=4", "101101"]).status.code(), Some(1));
    assert_eq!(encbound(&["codec", "runs", "roundtrip-exhaustive", "n=40", "t=5"]).status.code(), Some(1));
    assert_eq!(encbound(&["codec", "huffman", "encode", "3"]).status.code(), Some(1));
    assert_eq!(encbound(&["codec", "runs", "scramble", "n=4", "t=2"]).status.code(), Some(1));
    assert_eq!(encbound(&["codec", "inssort", "roundtrip-exhaustive", "n=4", "t=2"]).status.code(), Some(1));
}

#[test]
fn experiment_examples() {
    let runs = json(&encbound(&["experiment", "runs", "n=1024", "t=20", "trials=100000", "seed=42"]));
    assert_eq!(runs["verdict"], "pass");
    assert_eq!(runs["trials"], 100000);
    let moser = json(&encbound(&["experiment", "moser", "k=8", "m=32", "r=7", "trials=100", "seed=7"]));
    assert_eq!(moser["verdict"], "pass");
    assert_eq!(moser["stats"]["unsatisfied_results"], 0.0);
    let tri = json(&encbound(&["experiment", "triangles", "n=200", "c=0.2", "trials=10000", "seed=1"]));
    let (p, sigma) = (tri["empirical_prob"].as_f64().unwrap(), tri["mc_stderr"].as_f64().unwrap());
    assert!(p <= 0.008 + 3.0 * sigma);
    for key in [
        "experiment",
        "params",
        "trials",
        "seed",
        "exceed_count",
        "empirical_prob",
        "bound",
        "threshold",
        "mc_stderr",
        "asymptotic",
        "verdict",
        "wall_ms",
    ] {
        assert!(tri.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn experiment_errors_exit_1() {
    assert_eq!(encbound(&["experiment", "no-such"]).status.code(), Some(1));
    assert_eq!(encbound(&["experiment", "triangles", "n=200", "c=0.2", "bogus=1"]).status.code(), Some(1));
    assert_eq!(encbound(&["experiment", "triangles", "n=200"]).status.code(), Some(1));
    assert_eq!(encbound(&["experiment", "runs", "n=64", "trials=10", "--trials", "10"]).status.code(), Some(1));
    assert_eq!(encbound(&["experiment", "runs", "n=64", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(encbound(&["suite", "nightly"]).status.code(), Some(1));
    assert_eq!(encbound(&[]).status.code(), Some(1));
}

fn without_wall_ms(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("wall_ms");
    v.to_string()
}

#[test]
fn same_seed_same_bytes() {
    let args = ["experiment", "urns", "n=256", "trials=2000", "seed=5"];
    let (a, b) = (stdout(&encbound(&args)), stdout(&encbound(&args)));
    assert_eq!(without_wall_ms(&a), without_wall_ms(&b));
    // Byte-identical once the timing field is blanked.
    let blank = |s: &str| {
        let start = s.find("\"wall_ms\":").unwrap();
        let end = start + s[start..].find(',').unwrap();
        format!("{}{}", &s[..start], &s[end..])
    };
    assert_eq!(blank(&a), blank(&b));
    let other = stdout(&encbound(&["experiment", "urns", "n=256", "trials=2000", "seed=6"]));
    assert_ne!(without_wall_ms(&a), without_wall_ms(&other));
}

#[test]
fn thread_cap_keeps_results() {
    let args = ["experiment", "records", "n=128", "trials=3000", "seed=3"];
    let free = stdout(&encbound(&args));
    let one = Command::new(env!("CARGO_BIN_EXE_encbound")).args(args).env("ENCBOUND_THREADS", "1").output().unwrap();
    assert_eq!(without_wall_ms(&free), without_wall_ms(&stdout(&one)));
    let bad = Command::new(env!("CARGO_BIN_EXE_encbound")).args(args).env("ENCBOUND_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

/// Flattens the JSON report to the CSV column names.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let name = match prefix {
                    "" => k.clone(),
                    "params" => format!("param.{k}"),
                    "stats" => format!("stat.{k}"),
                    "histogram" => format!("hist.{k}"),
                    p => format!("{p}.{k}"),
                };
                flatten(&name, v, out);
            }
        }
        Value::Number(_) => out.push((prefix.to_string(), v.to_string())),
        _ => {}
    }
}

#[test]
fn csv_matches_json() {
    let base = ["experiment", "runs", "n=256", "trials=3000", "seed=9"];
    let j = stdout(&encbound(&base));
    let c = stdout(&encbound(&[&base[..], &["--format", "csv"]].concat()));
    let mut lines = c.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
    let mut numbers = Vec::new();
    flatten("", &serde_json::from_str(&j).unwrap(), &mut numbers);
    assert!(numbers.len() > 10);
    for (name, value) in numbers {
        if name == "wall_ms" {
            continue;
        }
        let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no CSV column {name}"));
        let (csv, json): (f64, f64) = (row[i].parse().unwrap(), value.parse().unwrap());
        assert_eq!(csv.to_bits(), json.to_bits(), "{name}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("report.json");
    let o = encbound(&["experiment", "bst-height", "n=64", "trials=200", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "asymptotic-info");
}

#[test]
fn help_lists_ids_and_defaults() {
    let o = encbound(&["experiment", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for id in ["runs", "percolation-components", "moser", "s=10", "c=9.943483"] {
        assert!(text.contains(id), "help lacks {id}");
    }
    let text = stdout(&encbound(&["bound", "--help"]));
    assert!(text.contains("linear-probing-search") && text.contains("k1=4"));
    assert!(stdout(&encbound(&["codec", "--help"])).contains("inssort"));
    assert_eq!(encbound(&["--version"]).status.code(), Some(0));
}

#[test]
fn quick_suite() {
    let o = encbound(&["suite", "quick"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{err}");
    assert_eq!(err.lines().filter(|l| l.contains(": PASS")).count(), 5, "{err}");
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
}
