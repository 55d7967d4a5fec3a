use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_complement-opt");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut all = vec!["run", "--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn zero_coupling_rows_are_bell() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--experiment",
            "quantity-vs-n",
            "--g",
            "0",
            "--T",
            "1",
            "--N",
            "5",
            "--objective",
            "visibility",
            "--restarts",
            "2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("quantity-vs-n/custom-visibility.csv");
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "n",
            "V",
            "P",
            "C",
            "reservoir_C",
            "outcome_probability",
            "closure_residual",
            "angles"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let v: f64 = r[1].parse().unwrap();
        let p: f64 = r[2].parse().unwrap();
        let c: f64 = r[3].parse().unwrap();
        assert!(v.abs() < 1e-12 && p.abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
    }
}

#[test]
fn output_layout_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["strong", "weak"] {
        let o = run_in(
            dir.path(),
            &[
                "--experiment",
                "delta-d",
                "--preset",
                preset,
                "--objective",
                "concurrence",
                "--n-max",
                "3",
                "--seed",
                "5",
            ],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        let printed = String::from_utf8(o.stdout).unwrap();
        assert!(printed
            .trim_end()
            .ends_with(&format!("delta-d/{preset}-concurrence.csv")));
    }
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("delta-d/manifest.json")).unwrap(),
    )
    .unwrap();
    let runs = manifest["runs"].as_object().unwrap();
    assert_eq!(runs.len(), 2);
    let strong = &runs["strong-concurrence.csv"];
    assert_eq!(strong["seed"], 5);
    assert_eq!(strong["coupling"]["N"], 20);
    assert_eq!(strong["budget"]["restarts"], 16);
    assert!(strong["config"].as_str().unwrap().contains("n-max = 3"));
    assert!(strong["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn manifest_config_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--experiment",
            "uniform-sweep",
            "--preset",
            "weak",
            "--theta-steps",
            "12",
            "--n-max",
            "6",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv_path = dir.path().join("uniform-sweep/weak.csv");
    let first = fs::read(&csv_path).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("uniform-sweep/manifest.json")).unwrap(),
    )
    .unwrap();
    let config_path = dir.path().join("replay.cfg");
    fs::write(
        &config_path,
        manifest["runs"]["weak.csv"]["config"].as_str().unwrap(),
    )
    .unwrap();
    fs::remove_file(&csv_path).unwrap();
    let o = run(&["run", "--config", config_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&csv_path).unwrap(), first);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.cfg");
    fs::write(
        &config_path,
        format!(
            "# distinguishability profile\nexperiment = distinguishability\npreset = strong\nout = {}\n",
            dir.path().display()
        ),
    )
    .unwrap();
    let o = run(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--preset",
        "weak",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("distinguishability/weak.csv").exists());
    assert!(!dir.path().join("distinguishability/strong.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--experiment",
        "quantity-vs-n",
        "--preset",
        "weak",
        "--objective",
        "visibility",
        "--n-max",
        "4",
        "--seed",
        "3",
    ];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let rel = "quantity-vs-n/weak-visibility.csv";
    assert_eq!(
        fs::read(a.path().join(rel)).unwrap(),
        fs::read(b.path().join(rel)).unwrap()
    );
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    fs::write(&bad_key, "experiment = table\nrestart = 4\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "--config", bad_key.to_str().unwrap()],
        vec!["run", "--experiment", "quantity-vs-n"],
        vec![
            "run",
            "--experiment",
            "quantity-vs-n",
            "--objective",
            "entropy",
        ],
        vec!["run", "--experiment", "nope"],
        vec!["run", "--experiment", "table", "--restarts", "0"],
        vec!["run", "--experiment", "uniform-sweep", "--n-max", "40"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("field"), "{args:?}: {}", stderr(&o));
    }
    let o = run(&["run", "--config", bad_key.to_str().unwrap()]);
    assert!(stderr(&o).contains("restart"));
}

#[test]
fn numeric_domain_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--experiment",
            "distinguishability",
            "--g",
            "5",
            "--T",
            "10",
            "--N",
            "20",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("'g'"));
    let o = run_in(
        dir.path(),
        &[
            "--experiment",
            "continuous-limit",
            "--k",
            "100",
            "--n-min",
            "2",
            "--n-max",
            "8",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_config_file_exits_1() {
    let o = run(&["run", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(BIN)
        .env("COMPLEMENT_OPT_THREADS", "0")
        .args([
            "run",
            "--experiment",
            "distinguishability",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN)
        .env("COMPLEMENT_OPT_THREADS", "2")
        .args([
            "run",
            "--experiment",
            "distinguishability",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = run(&["verify", "--samples", "300", "--seed", "7"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let b = run(&["verify", "--samples", "300", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 5);
}

#[test]
fn verify_catches_injected_sign_flip() {
    let o = run(&["verify", "--samples", "100", "--inject-sign-flip"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    let closure = text.lines().find(|l| l.starts_with("closure")).unwrap();
    assert!(closure.ends_with("FAIL"));
}
