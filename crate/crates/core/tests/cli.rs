//! Black-box tests of the `qmetro` binary.

use std::path::Path;
use std::process::{Command, Output};

fn qmetro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmetro"))
        .args(args)
        .env_remove("QMETRO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn exit_status_zero_on_success() {
    let out = qmetro(&["probs", "--eta", "0.4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = records(&stdout(&out));
    assert_eq!(
        header,
        [
            "kind",
            "eta",
            "v",
            "phi",
            "outcome",
            "p_circuit",
            "p_closed_form"
        ]
    );
    assert_eq!(rows.len(), 4);
    let p: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert_eq!(p, [0.4, 0.4, 0.2, 0.0]);
    assert!(!stderr(&out).is_empty(), "summary line expected on stderr");
}

#[test]
fn exit_status_two_on_usage_errors() {
    for args in [
        &["probs", "--eta", "2.0"][..],
        &["probs"],
        &["probs", "--eta", "0.1", "--bogus", "1"],
        &["sweep", "--eta-grid", "0:0.5:x"],
        &["simulate", "--eta", "0.5", "--repetitions", "1"],
        &["simulate", "--eta", "0.5", "--estimator", "bayes"],
        &["fisher", "--format", "xml"],
        &["teleport"],
    ] {
        let out = qmetro(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn exit_status_one_on_computation_errors() {
    // Full damping leaves no phase signal to estimate.
    let out = qmetro(&["simulate", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn no_partial_output_on_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let out = qmetro(&[
        "sweep",
        "--eta-grid",
        "0.2,0.6,1",
        "--repetitions",
        "5",
        "-o",
        p,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists());
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        0,
        "temp file left behind"
    );

    let out = qmetro(&[
        "fisher",
        "--eta",
        "0.5",
        "-o",
        "/nonexistent-dir/fisher.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fisher_table_values() {
    let out = qmetro(&["fisher", "--eta", "0.5", "--v", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = records(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let get = |name: &str| rows[0][column(&header, name)].parse::<f64>().unwrap();
    assert_eq!(get("f_single_closed"), 0.5);
    assert!((get("f_ancilla_closed") - 2.0 / 3.0).abs() < 1e-11);
    assert!((get("qfi_single_numeric") - 0.5).abs() < 1e-6);
    assert!((get("qfi_ancilla_numeric") - 2.0 / 3.0).abs() < 1e-6);
    assert!((get("cfi_ancilla") - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(get("crossover_eta"), 0.0);
}

#[test]
fn simulate_uses_protocol_defaults() {
    let out = qmetro(&["simulate", "--eta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = records(&stdout(&out));
    let get = |name: &str| rows[0][column(&header, name)].clone();
    assert_eq!(get("repetitions"), "50");
    assert_eq!(get("events"), "2000");
    assert_eq!(get("seed"), "42");
    assert_eq!(get("estimator"), "inversion");
    assert_eq!(get("kind"), "ancilla");
}

#[test]
fn sweep_grid_and_schema() {
    let out = qmetro(&[
        "sweep",
        "--eta-grid",
        "0:0.9:0.1",
        "--v",
        "0.95",
        "--repetitions",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = records(&stdout(&out));
    assert_eq!(
        header,
        [
            "eta",
            "sd_single_theory",
            "sd_ancilla_theory",
            "sd_simulated",
            "sd_sim_stderr"
        ]
    );
    assert_eq!(rows.len(), 10);
    let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(etas.first(), Some(&0.0));
    assert!((etas[9] - 0.9).abs() < 1e-12);
}

#[test]
fn default_sweep_shows_ancilla_advantage() {
    let out = qmetro(&["sweep", "--repetitions", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = records(&stdout(&out));
    for row in &rows {
        let eta: f64 = row[0].parse().unwrap();
        let single: f64 = row[1].parse().unwrap();
        let ancilla: f64 = row[2].parse().unwrap();
        if eta == 0.0 {
            assert_eq!(single, ancilla);
        } else {
            assert!(ancilla < single, "eta {eta}");
        }
    }
}

#[test]
fn converge_four_point_grid() {
    let out = qmetro(&[
        "converge",
        "--eta",
        "0.5",
        "--events-grid",
        "10,100,1000,2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = records(&stdout(&out));
    assert_eq!(header[0], "events");
    let events: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(events, ["10", "100", "1000", "2000"]);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = qmetro(&[
            "sweep",
            "--v",
            "0.95",
            "--repetitions",
            "40",
            "--seed",
            "9",
            "--threads",
            threads,
            "--include-single",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let other = qmetro(&[
        "sweep",
        "--v",
        "0.95",
        "--repetitions",
        "40",
        "--seed",
        "10",
        "--include-single",
    ]);
    assert_ne!(other.stdout, a);
}

#[test]
fn seed_from_environment_and_flag_precedence() {
    let with_env = |seed: &str, extra: &[&str]| {
        let mut args = vec!["simulate", "--eta", "0.3", "--repetitions", "4"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_qmetro"))
            .args(&args)
            .env("QMETRO_SEED", seed)
            .output()
            .unwrap()
    };
    let env_run = with_env("777", &[]);
    let flag_run = qmetro(&[
        "simulate",
        "--eta",
        "0.3",
        "--repetitions",
        "4",
        "--seed",
        "777",
    ]);
    assert_eq!(env_run.stdout, flag_run.stdout);
    let overridden = with_env("777", &["--seed", "5"]);
    let flag_only = qmetro(&[
        "simulate",
        "--eta",
        "0.3",
        "--repetitions",
        "4",
        "--seed",
        "5",
    ]);
    assert_eq!(overridden.stdout, flag_only.stdout);
    assert_eq!(with_env("not-a-number", &[]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# working point\neta = 0.25\nv = 0.9\nrepetitions = 6\nseed = 3\nformat = json\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();

    let out = qmetro(&["simulate", "--config", c]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json[0]["eta"], 0.25);
    assert_eq!(json[0]["v"], 0.9);
    assert_eq!(json[0]["repetitions"], 6);
    assert_eq!(json[0]["seed"], 3);

    let out = qmetro(&["simulate", "--config", c, "--eta", "0.5", "--format", "csv"]);
    let (header, rows) = records(&stdout(&out));
    assert_eq!(rows[0][column(&header, "eta")], "0.5");
    assert_eq!(rows[0][column(&header, "repetitions")], "6");

    std::fs::write(&cfg, "eta = 7\n").unwrap();
    assert_eq!(qmetro(&["probs", "--config", c]).status.code(), Some(2));
    assert_eq!(
        qmetro(&["probs", "--config", "/nonexistent.conf"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_output_matches_csv() {
    let csv_out = qmetro(&["fisher", "--eta-grid", "0,0.5"]);
    let json_out = qmetro(&["fisher", "--eta-grid", "0,0.5", "--format", "json"]);
    let (header, rows) = records(&stdout(&csv_out));
    let json: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(json.len(), rows.len());
    for (obj, row) in json.iter().zip(&rows) {
        for (name, cell) in header.iter().zip(row) {
            assert_eq!(
                obj[name].as_f64().unwrap(),
                cell.parse::<f64>().unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn csv_round_trips_at_twelve_digits() {
    let out = qmetro(&[
        "sweep",
        "--eta-grid",
        "0.05:0.95:0.15",
        "--repetitions",
        "20",
    ]);
    let text = stdout(&out);
    assert!(text.ends_with('\n'));
    assert!(!text.contains("\r\n"));
    assert!(text.lines().all(|l| !l.ends_with(',')));
    let (_, rows) = records(&text);
    for row in rows {
        let eta: f64 = row[0].parse().unwrap();
        let n = 2000.0;
        let expected = [
            (1.0 / (n * (1.0 - eta))).sqrt(),
            (1.0 / (n * 2.0 * (1.0 - eta) / (2.0 - eta))).sqrt(),
        ];
        for (cell, value) in row[1..3].iter().zip(expected) {
            let parsed: f64 = cell.parse().unwrap();
            assert!(
                ((parsed - value) / value).abs() < 1e-11,
                "{cell} vs {value}"
            );
            assert_eq!(cell, &qmetro::table::format_number(value));
        }
    }
}

#[test]
fn angles_accept_pi_tokens() {
    let a = qmetro(&["probs", "--eta", "0.2", "--phi", "pi/2"]);
    let b = qmetro(&["probs", "--eta", "0.2", "--phi", "0.5pi"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_and_help() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("probs.json");
    let out = qmetro(&[
        "probs",
        "--eta",
        "0.4",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&path).exists());
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);

    let help = qmetro(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sweep"));
}
