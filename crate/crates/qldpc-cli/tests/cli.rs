// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! End-to-end tests of the command-line interface: every subcommand, the
//! exit-code contract (0 ok, 1 usage, 2 runtime), and the file formats the
//! subcommands exchange.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qldpc-cli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning the binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Runs and demands success, returning stdout.
fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "args {args:?} failed: {}",
        stderr(&out)
    );
    stdout(&out)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates a small code into `dir` and returns its path.
fn small_code(dir: &Path) -> PathBuf {
    let code = dir.join("code.json");
    ok(&[
        "generate-code",
        "--s",
        "2",
        "--seed",
        "11",
        "--out",
        path_str(&code),
    ]);
    code
}

#[test]
fn the_full_pipeline_runs_and_zero_noise_never_fails() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let circ = dir.path().join("circ.json");
    let layout = dir.path().join("layout.json");
    let csv = dir.path().join("sim.csv");

    let gen_note = ok(&[
        "generate-code",
        "--s",
        "2",
        "--seed",
        "11",
        "--out",
        path_str(&code),
    ]);
    assert!(gen_note.contains("n=100, k=4"), "got: {gen_note}");

    let build_note = ok(&[
        "build-circuit",
        "--code",
        path_str(&code),
        "--kind",
        "cardinal",
        "--out",
        path_str(&circ),
    ]);
    assert!(build_note.contains("depth"), "got: {build_note}");

    let layout_note = ok(&[
        "layout",
        "--code",
        path_str(&code),
        "--strategy",
        "two_factor",
        "--out",
        path_str(&layout),
    ]);
    assert!(layout_note.contains("all planar: true"), "got: {layout_note}");

    ok(&[
        "simulate",
        "--code",
        path_str(&code),
        "--p",
        "0",
        "--trials",
        "25",
        "--rounds",
        "1",
        "--out",
        path_str(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let row = text
        .lines()
        .find(|l| !l.starts_with('#') && !l.starts_with("s,"))
        .unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[3], "0", "rate column");
    assert_eq!(cols[5], "0", "failures column: {row}");

    for out_file in [&code, &circ, &layout] {
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_file).unwrap()).unwrap();
        assert!(parsed.is_object(), "{} is JSON", out_file.display());
    }
}

#[test]
fn a_prebuilt_circuit_file_reproduces_the_on_the_fly_run() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let circ = dir.path().join("circ.json");
    ok(&[
        "build-circuit",
        "--code",
        path_str(&code),
        "--out",
        path_str(&circ),
    ]);
    let common = [
        "--code",
        path_str(&code),
        "--p",
        "0.002",
        "--trials",
        "40",
        "--rounds",
        "2",
        "--seed",
        "7",
    ];
    let mut args_a = vec!["simulate"];
    args_a.extend_from_slice(&common);
    let mut args_b = args_a.clone();
    args_b.extend_from_slice(&["--circuit", path_str(&circ)]);
    let a = ok(&args_a);
    let b = ok(&args_b);
    assert_eq!(a, b);
}

#[test]
fn help_exits_zero_and_names_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for cmd in [
        "generate-code",
        "build-circuit",
        "layout",
        "simulate",
        "rounds-sweep",
        "fit",
        "table",
    ] {
        assert!(text.contains(cmd), "--help misses {cmd}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let unknown = run(&["table", "--bogus-flag"]);
    assert_eq!(unknown.status.code(), Some(1));
    let missing = run(&["generate-code", "--s", "2"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("--out"));
    let bad_value = run(&["build-circuit", "--code", "x.json", "--kind", "sideways"]);
    assert_eq!(bad_value.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let bad_rate = run(&[
        "simulate",
        "--code",
        path_str(&code),
        "--p",
        "1.5",
        "--trials",
        "10",
        "--rounds",
        "1",
    ]);
    assert_eq!(bad_rate.status.code(), Some(2));
    assert!(stderr(&bad_rate).contains("outside [0, 1)"));

    let missing_file = run(&[
        "simulate",
        "--code",
        path_str(&dir.path().join("nope.json")),
        "--p",
        "0.001",
        "--trials",
        "10",
        "--rounds",
        "1",
    ]);
    assert_eq!(missing_file.status.code(), Some(2));
}

#[test]
fn config_files_drive_simulate_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"code":{{"kind":"file","path":{:?}}},"p_list":[0.0],"trials":12,"rounds":1,"master_seed":3}}"#,
            path_str(&code)
        ),
    )
    .unwrap();
    let base = ok(&["simulate", "--config", path_str(&cfg)]);
    assert!(base.contains("\n2,100,4,0,12,0,"), "got: {base}");
    let overridden = ok(&["simulate", "--config", path_str(&cfg), "--trials", "5"]);
    assert!(overridden.contains("\n2,100,4,0,5,0,"), "got: {overridden}");
}

#[test]
fn per_trial_output_buckets_failures_by_round() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let text = ok(&[
        "simulate",
        "--code",
        path_str(&code),
        "--p",
        "0.003",
        "--trials",
        "40",
        "--rounds",
        "3",
        "--per-trial",
    ]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "trial,seed,p,rounds,failed,failure_round_bucket"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6, "row: {line}");
        assert_eq!(cols[0], rows.to_string());
        match cols[4] {
            "true" => {
                let bucket: usize = cols[5].parse().expect("failed rows carry a bucket");
                assert!((1..=3).contains(&bucket));
            }
            "false" => assert!(cols[5].is_empty(), "successes have no bucket: {line}"),
            other => panic!("failed column holds {other}"),
        }
        rows += 1;
    }
    assert_eq!(rows, 40);

    let two_rates = run(&[
        "simulate",
        "--code",
        path_str(&code),
        "--p",
        "0.001,0.002",
        "--trials",
        "5",
        "--rounds",
        "1",
        "--per-trial",
    ]);
    assert_eq!(two_rates.status.code(), Some(2));
    assert!(stderr(&two_rates).contains("exactly one rate"));
}

#[test]
fn rounds_sweep_emits_one_row_per_round_count_and_a_tail_line() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let text = ok(&[
        "rounds-sweep",
        "--code",
        path_str(&code),
        "--p",
        "0.002",
        "--trials",
        "30",
        "--rounds-list",
        "1,2,6,7,8",
    ]);
    assert!(text.contains("p,rounds,trials,failures,pl_T"));
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("p,") && l.contains(','))
        .count();
    assert_eq!(data_rows, 5);
    assert!(text.contains("# tail p=0.002:"), "got: {text}");
}

#[test]
fn fit_recovers_the_law_its_input_was_drawn_from() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, c2, c3, pt) = (0.5_f64, 1.1, 0.25, 3.0e-3);
    let mut paths = Vec::new();
    for k in [100_u64, 900, 2500] {
        let mut text = String::from("s,n,k,p,trials,failures,pl_T,pl_round,ci_lo,ci_hi\n");
        for p in [1.0e-3_f64, 1.5e-3, 2.2e-3, 3.0e-3] {
            let pl = c1 * (p / pt).powf(c2 * (k as f64).powf(c3));
            text.push_str(&format!("0,{},{},{},1,0,{},0,0,0\n", 25 * k, k, p, pl));
        }
        let path = dir.path().join(format!("rows_{k}.csv"));
        std::fs::write(&path, text).unwrap();
        paths.push(path);
    }
    let fit_json = dir.path().join("fit.json");
    let mut args = vec!["fit", "--rows"];
    args.extend(paths.iter().map(|p| path_str(p)));
    args.extend_from_slice(&["--out", path_str(&fit_json)]);
    ok(&args);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fit_json).unwrap()).unwrap();
    let rel = |field: &str, want: f64| {
        let got = report[field].as_f64().unwrap();
        assert!(
            (got - want).abs() / want < 0.01,
            "{field}: got {got}, want {want}"
        );
    };
    rel("c1", c1);
    rel("c2", c2);
    rel("c3", c3);
    rel("p_t", pt);

    let empty = run(&["fit", "--rows"]);
    assert_eq!(empty.status.code(), Some(1), "no value for --rows is usage");
    let missing = run(&["fit", "--rows", path_str(&dir.path().join("absent.csv"))]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn the_default_table_matches_the_reference_overheads() {
    let text = ok(&["table"]);
    for cell in ["78400", "387200", "4.94", "313600", "9.18", "906304", "14.73"] {
        assert!(text.contains(cell), "table misses {cell}:\n{text}");
    }
    let json_text = ok(&["table", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert_eq!(rows[0]["surface_qubits"], 387200);

    let shifted = ok(&["table", "--surface-exponent-offset", "1", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&shifted).unwrap();
    let ds: Vec<i64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["d"].as_i64().unwrap())
        .collect();
    assert_eq!(ds, [11, 13, 17]);

    let above_threshold = run(&["table", "--pt", "1e-5"]);
    assert_eq!(above_threshold.status.code(), Some(2), "p above p_t");
}

#[test]
fn coloration_circuits_build_from_the_cli_too() {
    let dir = tempfile::tempdir().unwrap();
    let code = small_code(dir.path());
    let note = ok(&[
        "build-circuit",
        "--code",
        path_str(&code),
        "--kind",
        "coloration",
    ]);
    assert!(note.contains("Coloration circuit"), "got: {note}");
}
