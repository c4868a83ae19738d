use std::path::Path;
use std::process::{Command, Output};

fn grc(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grc"));
    cmd.args(args);
    match env_out {
        Some(dir) => cmd.env("GRC_OUT_DIR", dir),
        None => cmd.env_remove("GRC_OUT_DIR"),
    };
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const PATH4: &str = "4 3 3\n0 1 1\n1 2 1\n2 3 1\n";

#[test]
fn gen_then_run_writes_both_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let out = grc(
        &[
            "gen",
            "--family",
            "cycle",
            "--n",
            "8",
            "--weights",
            "distinct",
            "--out",
            g.to_str().unwrap(),
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = grc(
        &[
            "run",
            "--graph",
            g.to_str().unwrap(),
            "--algo",
            "mst",
            "--seeds",
            "3",
            "--format",
            "csv",
        ],
        Some(dir.path()),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4);
    assert!(stdout.lines().skip(1).all(|l| l.contains(",true,")));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("run.csv")).unwrap(),
        stdout
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(summary["success_rate"], 1.0);
}

#[test]
fn verify_exit_codes_carry_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(
        dir.path(),
        "yes.txt",
        &format!("{PATH4}H: 0 1 2\nST: 0 3\n"),
    );
    let no = write(dir.path(), "no.txt", &format!("{PATH4}H: 0 2\nST: 0 3\n"));
    assert_eq!(
        grc(
            &["verify", "--graph", &yes, "--task", "st-connectivity"],
            None
        )
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        grc(
            &["verify", "--graph", &no, "--task", "st-connectivity"],
            None
        )
        .status
        .code(),
        Some(1)
    );
    let bad = grc(&["verify", "--graph", &yes, "--task", "no-such-task"], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn cutsim_reports_rounds_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", PATH4);
    let cut = write(dir.path(), "cut.txt", "# side A\n0 1\n");
    let out = grc(
        &[
            "cutsim", "--graph", &g, "--algo", "mst", "--cut", &cut, "--rounds", "12",
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatches 0"));
}

#[test]
fn fit_reads_a_batch_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{
            "name": "mst-small",
            "algorithm": { "mst": { "c": 2 } },
            "graph": { "family": { "family": "path", "sizes": [4, 8, 16], "weights": { "uniform": { "max": 4 } } } },
            "seeds": { "range": { "start": 0, "count": 2 } }
        }"#,
    );
    let out = grc(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = dir.path().join("mst-small.csv");
    let out = grc(
        &[
            "fit",
            "--csv",
            csv.to_str().unwrap(),
            "--model",
            "loglog",
            "--w",
            "4",
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fit: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(fit["points"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{ "name": "x", "algorithm": { "mst": { "c": -1 } }, "seeds": { "list": [0] } }"#,
    );
    let out = grc(&["run", "--config", &cfg], Some(dir.path()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("algorithm.mst.c"));
}

#[test]
fn trace_prints_one_line_per_node_and_round() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", PATH4);
    let out = grc(
        &["trace", "--graph", &g, "--algo", "mst", "--rounds", "5"],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 20);
}
