use std::path::Path;
use std::process::{Command, Output};

fn fpsp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpsp"))
        .args(args)
        .current_dir(dir)
        .env_remove("FPSP_MAX_P")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_then_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "gen", "--p", "7", "--family", "interval", "--start", "1", "--len", "3", "--out",
            "B.set",
        ],
    );
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("B.set")).unwrap(),
        "p=7\n1\n2\n3\n"
    );
    let o = fpsp(
        dir.path(),
        &[
            "energy", "--p", "7", "--A", "B.set", "--B", "B.set", "--op", "diff", "--n", "4",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "115\n");
}

#[test]
fn vinh_on_full_field_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "verify", "theorem", "--id", "Vinh_1_2", "--p", "101", "--A", "full",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["exact_pass"], true);
    assert_eq!(rows[0]["lhs"], 101 * 101);
}

#[test]
fn theorem_csv_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "verify",
            "theorem",
            "--id",
            "Cor_1_7",
            "--p",
            "1009",
            "--A",
            "subgroup:28",
            "--csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("theorem,p,family,seed,|A|,|B|,|C|,|D|,m,lhs,rhs,ratio,hyp_ok")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn set_specs_and_setop() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "setop",
            "--p",
            "101",
            "--A",
            "interval:1:10",
            "--B",
            "interval:1:10",
            "--count",
        ],
    );
    assert_eq!(stdout(&o), "19\n");
    let o = fpsp(
        dir.path(),
        &[
            "setop",
            "--p",
            "7",
            "--A",
            "interval:1:3",
            "--affine",
            "2,1",
        ],
    );
    // {2x + 1 : x = 1, 2, 3} = {3, 5, 0}
    assert_eq!(stdout(&o), "p=7\n0\n3\n5\n");
    let o = fpsp(
        dir.path(),
        &[
            "setop",
            "--p",
            "13",
            "--A",
            "subgroup:4",
            "--B",
            "star",
            "--op",
            "prod",
            "--count",
        ],
    );
    assert_eq!(stdout(&o), "12\n");
}

#[test]
fn image_and_mu() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "image",
            "--p",
            "7",
            "--A",
            "interval:1:2",
            "--B",
            "interval:0:1",
            "--count",
        ],
    );
    // g = id, h = 1: {a(1 + 0)} = {1, 2}
    assert_eq!(stdout(&o), "2\n");
    let o = fpsp(dir.path(), &["mu", "--p", "101", "--g", "power:2"]);
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn incidence_from_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("r.txt"),
        "p=5\n0 0 0\n1 1 1\n2 2 2\n3 3 3\n4 4 4\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("s.txt"), "p=5\n1 4 0 0\n0 0 1 1\n").unwrap();
    let o = fpsp(
        dir.path(),
        &["incidence", "max-collinear", "--points", "r.txt"],
    );
    assert_eq!(stdout(&o), "5\n");
    // X - Y = 0 holds on the whole diagonal; Z + 1 = 0 at (4,4,4) only
    let o = fpsp(
        dir.path(),
        &[
            "incidence",
            "count",
            "--points",
            "r.txt",
            "--planes",
            "s.txt",
        ],
    );
    assert_eq!(stdout(&o), "6\n");
    let o = fpsp(
        dir.path(),
        &[
            "incidence",
            "rudnev-ratio",
            "--points",
            "r.txt",
            "--planes",
            "s.txt",
        ],
    );
    let row: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(row["incidences"], 6);
}

#[test]
fn exact_failure_exits_one() {
    // g = id with random h: g·h is not injective, so the
    // max(|A|,|C|,|X_k|) collinearity bound for products fails here
    let dir = tempfile::tempdir().unwrap();
    let o = fpsp(
        dir.path(),
        &[
            "verify",
            "lemma-chain",
            "--p",
            "101",
            "--A",
            "interval:1:16",
            "--B",
            "interval:1:32",
            "--C",
            "interval:1:32",
            "--h",
            "random",
            "--kind",
            "prod",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["chain"], "lemma_prod");
}

#[test]
fn chains_pass_on_intervals() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &[
            "verify",
            "lemma-chain",
            "--p",
            "101",
            "--A",
            "interval:1:8",
            "--B",
            "interval:1:16",
            "--C",
            "interval:1:16",
        ][..],
        &[
            "verify",
            "n-chain",
            "--p",
            "101",
            "--A",
            "interval:1:8",
            "--B",
            "interval:1:16",
            "--C",
            "interval:1:16",
        ],
        &[
            "verify",
            "composite",
            "--p",
            "101",
            "--B",
            "random:20:3",
            "--C",
            "random:12:4",
        ],
        &[
            "verify",
            "phi",
            "--p",
            "101",
            "--B",
            "interval:1:20",
            "--C",
            "interval:1:20",
        ],
    ] {
        let o = fpsp(dir.path(), args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fpsp(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(
        fpsp(
            dir.path(),
            &["energy", "--p", "100", "--A", "full", "--B", "full"]
        )
        .status
        .code(),
        Some(2)
    );
    std::fs::write(dir.path().join("dup.set"), "p=7\n1\n1\n").unwrap();
    let o = fpsp(
        dir.path(),
        &["energy", "--p", "7", "--A", "dup.set", "--B", "full"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dup.set:3"));
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"primes": [101], "families": ["interval"], "sizes": [4], "x": 1}"#,
    )
    .unwrap();
    assert_eq!(
        fpsp(dir.path(), &["sweep", "--config", "bad.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn max_p_env_lowers_cap() {
    let dir = tempfile::tempdir().unwrap();
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_fpsp"))
            .args([
                "energy",
                "--p",
                "101",
                "--A",
                "interval:1:3",
                "--B",
                "interval:1:3",
            ])
            .current_dir(dir.path())
            .env("FPSP_MAX_P", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("50").status.code(), Some(2));
    assert_eq!(run("101").status.code(), Some(0));
    // raising above the built-in maximum is ignored
    assert_eq!(run("99999999999").status.code(), Some(0));
}

#[test]
fn sweep_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "primes": [101],
            "families": ["interval", "random", "subgroup"],
            "sizes": [6, 10],
            "seeds": {"start": 0, "end": 3},
            "functions": [{"g1": "random", "h1": "random"}],
            "theorems": ["Vinh_1_2", "Cor_1_7", "T_1_5"],
            "chains": ["lemma_sum", "n_chain", "composite", "phi"]
        }"#,
    )
    .unwrap();
    let mut outs = Vec::new();
    for w in ["1", "4"] {
        let json = format!("w{w}.json");
        let csv = format!("w{w}.csv");
        let o = fpsp(
            dir.path(),
            &[
                "sweep",
                "--config",
                "cfg.json",
                "--workers",
                w,
                "--out",
                &json,
                "--csv",
                &csv,
            ],
        );
        assert!(
            matches!(o.status.code(), Some(0 | 1)),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        outs.push((
            std::fs::read(dir.path().join(json)).unwrap(),
            std::fs::read(dir.path().join(csv)).unwrap(),
        ));
    }
    assert_eq!(outs[0], outs[1]);
    let report: serde_json::Value = serde_json::from_slice(&outs[0].0).unwrap();
    assert_eq!(report["aggregates"]["instances"], 18);
}
