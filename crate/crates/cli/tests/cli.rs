use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hiddencomm"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn invalid_parameters_exit_with_two() {
    for args in [
        vec!["thresholds", "--n", "10", "--k", "20"],
        vec!["thresholds", "--p", "1.5"],
        vec!["experiment", "--channel", "noisy:0.7", "--trials", "1"],
        vec![
            "experiment",
            "--detector",
            "ml",
            "--n",
            "200",
            "--k",
            "10",
            "--trials",
            "1",
        ],
        vec!["gen", "--n", "50", "--k", "5", "--channel", "noisy:0.1"],
        vec![
            "phase", "--alpha", "0.1", "--alpha", "0.2", "--alpha", "0.3",
        ],
        vec!["thresholds", "--no-such-flag"],
        vec!["exponent-curve", "--beta-range", "0:5"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn missing_input_file_exits_with_one() {
    let out = run(&["detect", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"n": 500, "k": 50, "p": 0.3, "q": 0.05, "channel": "noisy:0.2"}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_config = stdout(&run(&["thresholds", "--config", cfg]));
    let direct = stdout(&run(&[
        "thresholds",
        "--n",
        "500",
        "--k",
        "50",
        "--p",
        "0.3",
        "--q",
        "0.05",
        "--channel",
        "noisy:0.2",
    ]));
    assert_eq!(from_config, direct);
    let overridden = stdout(&run(&["thresholds", "--config", cfg, "--p", "0.1"]));
    assert_ne!(overridden, direct);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"nodes": 500}"#).unwrap();
    assert_eq!(
        run(&["thresholds", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_headers_and_row_counts() {
    let exp = stdout(&run(&[
        "experiment",
        "--n",
        "500",
        "--k",
        "25",
        "--p",
        "0.2",
        "--q",
        "0.02",
        "--channel",
        "noisy:0.2",
        "--trials",
        "4",
    ]));
    let lines: Vec<&str> = exp.lines().collect();
    assert!(lines[0].starts_with("trial,seed,zeta_no_side"));
    assert_eq!(lines.len(), 1 + 4 + 2);
    assert!(lines[5].starts_with("mean,") && lines[6].starts_with("std,"));

    let de = stdout(&run(&["de", "--channel", "noisy:0.1", "--t-max", "5"]));
    assert_eq!(de.lines().next(), Some("t,v_t,pred_err"));
    assert_eq!(de.lines().count(), 7);

    let psi = stdout(&run(&[
        "psi-curve",
        "--alpha",
        "0.1",
        "--alpha",
        "0.3",
        "--points",
        "5",
    ]));
    assert_eq!(psi.lines().next(), Some("alpha,a,psi_minus_1"));
    assert_eq!(psi.lines().count(), 11);

    let exponent = stdout(&run(&["exponent-curve", "--points", "5"]));
    assert_eq!(exponent.lines().next(), Some("beta,exponent,case"));
    assert_eq!(exponent.lines().count(), 6);

    let phase = stdout(&run(&["phase", "--resolution", "4"]));
    assert_eq!(phase.lines().next(), Some("b,c,region"));
    assert_eq!(phase.lines().count(), 17);

    let th = stdout(&run(&[
        "thresholds",
        "--p",
        "0.04",
        "--channel",
        "noisy:0.1",
    ]));
    assert!(th.starts_with("quantity,value,threshold,verdict\n"));
    assert!(th.lines().any(|l| l.starts_with("lambda_Lambda_e,69.49")));
}

#[test]
fn gen_then_detect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = (dir.path().join("g.txt"), dir.path().join("s.csv"));
    let (g, s) = (g.to_str().unwrap(), s.to_str().unwrap());
    stdout(&run(&[
        "gen",
        "--n",
        "12",
        "--k",
        "3",
        "--p",
        "0.6",
        "--q",
        "0.2",
        "--channel",
        "noisy:0.2",
        "--seed",
        "7",
        "--out",
        g,
        "--side-out",
        s,
    ]));
    let csv = stdout(&run(&[
        "detect",
        "--graph",
        g,
        "--side",
        s,
        "--channel",
        "noisy:0.2",
        "--detector",
        "ml",
    ]));
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows.iter().filter(|r| r[2] == "1").count(), 3);
    assert_eq!(rows.iter().filter(|r| r[3] == "1").count(), 3);
}
