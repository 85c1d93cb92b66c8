use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sdnse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdnse"))
        .args(args)
        .env_remove("SDNSE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", stderr(out)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL_RUN: &str = "nu = 0.1\nN = 8\ndt = 0.02\nT = 0.2\nseed = 11\ninitial.kind = \"random\"\ninitial.norm = 0.05\nK = 20\n";

const FORCED_RUN: &str = "nu = 0.05\nN = 8\ndt = 0.02\nT = 0.1\nforcing.profile = \"kolmogorov\"\nforcing.amplitude = 1.0\ninitial.kind = \"zero\"\nK = 20\n";

const CORPUS: &str = "dim = 1\nhalf_width = 3.0\nnodes = 3201\nK = 20\n\n[[generator]]\nkind = \"gaussian\"\ncenter = [0.2]\nwidth = 0.5\n\n[[generator]]\nkind = \"bump\"\nradius = 1.0\namplitude = 2.0\n";

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&sdnse(&["--help"])), 0);
    assert_eq!(code(&sdnse(&["--version"])), 0);
    assert_eq!(code(&sdnse(&["nse", "run", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&sdnse(&[])), 1);
    assert_eq!(code(&sdnse(&["bogus"])), 1);
    assert_eq!(
        code(&sdnse(&["sdnorm", "--input", "x.csv", "--frobnicate"])),
        1
    );
    assert_eq!(
        code(&sdnse(&["verify", "--suite", "nope", "--corpus", "c.toml"])),
        1
    );
    let out = sdnse(&[
        "nse",
        "run",
        "--config",
        "/nonexistent/run.toml",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read"), "{}", stderr(&out));
    assert_eq!(
        code(&sdnse(&[
            "--threads",
            "0",
            "testfns",
            "dump",
            "--level",
            "1",
            "--cube",
            "1",
            "--grid",
            "3"
        ])),
        1
    );
}

#[test]
fn malformed_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out").display().to_string();
    for (name, text) in [
        (
            "unknown_key.toml",
            "nu = 0.1\nN = 8\ndt = 0.1\nT = 1\nbogus = 3\n",
        ),
        ("not_toml.toml", "nu = = 0.1\n"),
        ("odd_grid.toml", "nu = 0.1\nN = 7\ndt = 0.1\nT = 1\n"),
        ("bad_steps.toml", "nu = 0.1\nN = 8\ndt = 0.3\nT = 1\n"),
    ] {
        let cfg = write(dir.path(), name, text);
        let out = sdnse(&["nse", "run", "--config", &cfg, "--out", &out_dir]);
        assert_eq!(code(&out), 1, "{name}: {}", stderr(&out));
    }
}

#[test]
fn sdnorm_of_zero_field_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "zero.csv",
        "x,y,u1,u2\n0,0,0,0\n0,1,0,0\n1,0,0,0\n1,1,0,0\n",
    );
    let report = dir.path().join("report.json");
    let out = sdnse(&[
        "sdnorm",
        "--input",
        &input,
        "--p",
        "2",
        "--K",
        "20",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["K", "tail_bound", "value", "warnings"]);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["tail_bound"], 0.0);
    assert_eq!(v["K"], 20);
}

#[test]
fn sdnorm_scales_linearly_and_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = String::from("x,u1\n");
    let mut b = String::from("x,u1\n");
    for i in 0..=400 {
        let x = -2.0 + 4.0 * i as f64 / 400.0;
        let f = (-x * x * 4.0f64).exp();
        a.push_str(&format!("{x},{f}\n"));
        b.push_str(&format!("{x},{}\n", 3.0 * f));
    }
    let pa = write(dir.path(), "a.csv", &a);
    let pb = write(dir.path(), "b.csv", &b);
    for p in ["1", "2", "inf"] {
        let va = json(&sdnse(&["sdnorm", "--input", &pa, "--p", p, "--K", "30"]));
        let vb = json(&sdnse(&["sdnorm", "--input", &pb, "--p", p, "--K", "30"]));
        let (va, vb) = (va["value"].as_f64().unwrap(), vb["value"].as_f64().unwrap());
        assert!(va > 0.0);
        assert!((vb - 3.0 * va).abs() <= 1e-12 * vb, "p={p}: {va} {vb}");
    }
    assert_eq!(code(&sdnse(&["sdnorm", "--input", &pa, "--p", "0.5"])), 1);
    let ragged = write(dir.path(), "ragged.csv", "x,u1\n0,1\n1\n");
    assert_eq!(code(&sdnse(&["sdnorm", "--input", &ragged])), 1);
    let missing = write(
        dir.path(),
        "missing.csv",
        "x,y,u1\n0,0,1\n0,1,1\n1,0,1\n1,1,1\n",
    );
    assert_eq!(code(&sdnse(&["sdnorm", "--input", &missing])), 1);
}

#[test]
fn testfns_dump_has_one_row_per_point() {
    let out = sdnse(&[
        "testfns", "dump", "--level", "2", "--cube", "5", "--grid", "11", "--dim", "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re_xi,im_xi"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r[1].hypot(r[2]) < 0.5, "|xi| must stay below 1/n: {r:?}");
    }
    // the profile vanishes at the cube faces and peaks inside
    assert!(rows[0][1].hypot(rows[0][2]) < rows[5][1].hypot(rows[5][2]));
}

#[test]
fn nse_run_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", SMALL_RUN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = sdnse(&[
        "--threads",
        "1",
        "nse",
        "run",
        "--config",
        &cfg,
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = Command::new(env!("CARGO_BIN_EXE_sdnse"))
        .args(["nse", "run", "--config", &cfg, "--out", b.to_str().unwrap()])
        .env("SDNSE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in [
        "series.csv",
        "checkpoints.csv",
        "fields/u_000010.csv",
        "run.toml",
    ] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let series = std::fs::read_to_string(a.join("series.csv")).unwrap();
    let mut lines = series.lines();
    assert_eq!(
        lines.next(),
        Some("t,E,enstrophy,sd_norm,div_max,rho_min,rho_max")
    );
    assert_eq!(lines.count(), 11);
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["subcommand"], "nse run");
    let hash = manifest["outputs"]["series.csv"].as_str().unwrap();
    assert_eq!(
        hash,
        sdnse::manifest::sha256_file(&a.join("series.csv")).unwrap()
    );
}

#[test]
fn density_run_writes_density_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "N = 8\ndt = 0.02\nT = 0.1\ncheckpoint_every = 5\ndensity.mu = 0.1\ndensity.beta = 1.0\ninitial.amplitude = 0.2\nK = 10\n",
    );
    let out_dir = dir.path().join("out");
    let out = sdnse(&[
        "nse",
        "run",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let index = std::fs::read_to_string(out_dir.join("checkpoints.csv")).unwrap();
    assert!(index
        .lines()
        .nth(1)
        .unwrap()
        .ends_with("fields/rho_000000.csv"));
    let series = sdnse::fieldio::read_table(&out_dir.join("series.csv")).unwrap();
    for (lo, hi) in series.columns[5].iter().zip(&series.columns[6]) {
        assert!(*lo >= 0.2 - 1e-6 && *hi <= 1.0 + 1e-6, "{lo} {hi}");
    }
}

#[test]
fn monitor_reports_and_passes_on_a_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", SMALL_RUN);
    let traj = dir.path().join("traj");
    assert_eq!(
        code(&sdnse(&[
            "nse",
            "run",
            "--config",
            &cfg,
            "--out",
            traj.to_str().unwrap()
        ])),
        0
    );
    let out = sdnse(&[
        "monitor",
        "--trajectory",
        traj.to_str().unwrap(),
        "--nu",
        "0.1",
        "--K",
        "20",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    for key in [
        "M_hat",
        "f_sup",
        "gamma",
        "u_plus",
        "u_minus",
        "sigma",
        "margins",
        "contraction",
        "alpha_hat",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["f_sup"], 0.0);
    assert_eq!(v["u_minus"], 0.0);
    let m = v["M_hat"].as_f64().unwrap();
    assert_eq!(v["u_plus"].as_f64().unwrap(), 0.1 / m);
    assert_eq!(v["margins"].as_array().unwrap().len(), 11);
    assert!(v["contraction"]["bounded_by_initial"].as_bool().unwrap());
    assert!(v["energy_passed"].as_bool().unwrap());

    let l2 = json(&sdnse(&[
        "monitor",
        "--trajectory",
        traj.to_str().unwrap(),
        "--norm",
        "l2",
        "--no-contraction",
    ]));
    assert_eq!(l2["norm"], "L2");
    assert!(l2["contraction"].is_null());
    // unforced L² margins are −ν‖∇u‖² ≤ 0
    for m in l2["margins"].as_array().unwrap() {
        assert!(m[1].as_f64().unwrap() <= 0.0);
    }
}

#[test]
fn monitor_with_gamma_above_one_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", FORCED_RUN);
    let traj = dir.path().join("traj");
    let out = sdnse(&[
        "nse",
        "run",
        "--config",
        &cfg,
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = sdnse(&[
        "monitor",
        "--trajectory",
        traj.to_str().unwrap(),
        "--norm",
        "l2",
        "--m-hat",
        "10",
    ]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("no real distinct roots"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn monitor_on_a_missing_trajectory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = sdnse(&["monitor", "--trajectory", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_passes_on_a_resolved_corpus_and_fails_on_a_coarse_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "corpus.toml", CORPUS);
    let out = sdnse(&["verify", "--suite", "embeddings", "--corpus", &corpus]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["suite"], "embeddings");
    assert_eq!(v["failed_count"], 0);
    assert!(v["passed_count"].as_u64().unwrap() >= 10);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["measured"].is_object());
    }
    // at 401 nodes the finite-difference derivative misses the duality tolerance
    let coarse = write(
        dir.path(),
        "coarse.toml",
        &CORPUS.replace("nodes = 3201", "nodes = 401"),
    );
    let out = sdnse(&["verify", "--suite", "embeddings", "--corpus", &coarse]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["failed_count"], 1);
}

#[test]
fn pipeline_writes_a_combined_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("out = \"result\"\n\n[run]\n");
    text.push_str(SMALL_RUN);
    text.push_str("\n[monitor]\nK = 20\nnorm = \"sd2\"\n\n[verify]\n");
    text.push_str(CORPUS.split("\n\n[[generator]]").next().unwrap());
    text.push_str("\n\n[[verify.generator]]\nkind = \"gaussian\"\nwidth = 0.4\n");
    let cfg = write(dir.path(), "full.toml", &text);
    let out = sdnse(&["pipeline", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let result = dir.path().join("result");
    let report: Value =
        serde_json::from_slice(&std::fs::read(result.join("pipeline.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["run"]["steps"], 10);
    assert!(report["monitor"]["M_hat"].as_f64().unwrap() > 0.0);
    assert_eq!(report["verify"]["failed_count"], 0);
    assert!(result.join("trajectory/series.csv").exists());
    assert!(result.join("manifest.json").exists());
}
