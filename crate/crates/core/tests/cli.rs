use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tvstair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvstair")).args(args).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// `c₁` for the staircase `g_n` from `2λ Σ_i max(c − i/n, 0)/n = 1`, by plain bisection.
fn staircase_c1(n: usize, lambda: f64) -> f64 {
    let gap = |c: f64| (1..=n).map(|i| (c - i as f64 / n as f64).max(0.0)).sum::<f64>() / n as f64;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 2.0 * lambda * gap(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn rof_staircase_matches_bisection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = tvstair(&["rof-staircase", "--lambda", "9", "--n", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "rof-staircase");
    assert_eq!(v["config"]["lambda"], 9.0);
    let c1 = v["result"][0]["c1"].as_f64().unwrap();
    assert!((c1 - staircase_c1(100, 9.0)).abs() <= 1e-10, "c1 = {c1}");
}

#[test]
fn staircase_needs_lambda_above_four() {
    assert_eq!(tvstair(&["rof-staircase", "--lambda", "4", "--n", "100"]).status.code(), Some(2));
    assert_eq!(tvstair(&["rof-staircase", "--lambda", "-1"]).status.code(), Some(1));
}

#[test]
fn constant_signal_has_zero_energy() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    std::fs::write(&input, "x,value\n0,0.7\n0.25,0.7\n0.5,0.7\n0.75,0.7\n1,0.7\n").unwrap();
    for mode in ["discrete", "relaxed", "relaxed-hat"] {
        let out = dir.path().join(format!("{mode}.json"));
        let o = tvstair(&[
            "energy-eval",
            "--input",
            input.to_str().unwrap(),
            "--mode",
            mode,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(read_json(&out)["result"]["breakdown"]["total"].as_f64(), Some(0.0), "{mode}");
    }
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(tvstair(&["rof-exact", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(tvstair(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tvstair(&["energy-eval"]).status.code(), Some(1));
    assert_eq!(tvstair(&["--jobs", "0", "rof-exact"]).status.code(), Some(1));
    assert_eq!(tvstair(&["energy-eval", "--input", "/nonexistent.csv"]).status.code(), Some(1));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# staircase run\nlambda = 16\nn = 20\n").unwrap();
    let out = dir.path().join("r.json");
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());
    assert_eq!(tvstair(&["--config", c, "rof-staircase", "--n", "40", "--out", o]).status.code(), Some(0));
    let v = read_json(&out);
    assert_eq!(v["config"]["lambda"], 16.0);
    assert_eq!(v["result"][0]["n"], 40);

    std::fs::write(&cfg, "lambda = 16\ntypo = 1\n").unwrap();
    assert_eq!(tvstair(&["--config", c, "rof-staircase"]).status.code(), Some(1));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = tvstair(&[
            "--jobs",
            jobs,
            "compare",
            "--lambda",
            "9,16",
            "--n-list",
            "10,20",
            "--cells",
            "400",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "4");
    // the thread count is part of the recorded config, nothing else may differ
    let strip = |bytes: &[u8]| {
        let mut v: Value = serde_json::from_slice(bytes).unwrap();
        v["config"].as_object_mut().unwrap().remove("jobs");
        v.as_object_mut().unwrap().remove("config");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a, run("a.json", "1"));
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let cases: Vec<Vec<String>> = vec![
        vec!["rof-exact".into(), "--datum".into(), "staircase".into(), "--csv".into(), p("u.csv")],
        vec!["hot-denoise".into(), "--cells".into(), "200".into(), "--n".into(), "10".into(), "--csv".into(), p("h.csv")],
        vec!["cantor-fixture".into(), "--csv".into(), p("i.csv")],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = tvstair(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["command"], args[0]);
    }
    // the denoised CSV feeds back into energy-eval
    let o = tvstair(&["energy-eval", "--input", &p("h.csv")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(p("i.csv")).unwrap().lines().count(), 256);
}
