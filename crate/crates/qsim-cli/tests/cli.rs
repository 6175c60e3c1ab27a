//! End-to-end tests of the `qsim` binary: output formats, engine selection,
//! seed echoing, and the exact exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn circuit_path(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.pop();
    path.pop();
    path.push("circuits");
    path.push(name);
    path.to_string_lossy().into_owned()
}

fn qsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn run_path_engine_draper() {
    let out = qsim(&[
        "run",
        &circuit_path("draper2.qc"),
        "--input",
        "0101",
        "--engine",
        "path",
        "--shots",
        "1000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0110 1000 1.000000"), "{text}");
    assert!(text.contains("seed: 7"));
    assert!(text.contains("engine: path"));
}

#[test]
fn run_uses_file_input_directive() {
    let out = qsim(&[
        "run",
        &circuit_path("draper2.qc"),
        "--shots",
        "50",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("0110 50 1.000000"));
}

#[test]
fn engines_agree_on_deterministic_circuit() {
    let base = [
        "run",
        &circuit_path("draper2.qc"),
        "--input",
        "0101",
        "--shots",
        "200",
        "--seed",
        "9",
    ];
    for engine_args in [
        vec!["--engine", "dense"],
        vec!["--engine", "hybrid", "--mem-budget", "1"],
    ] {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(engine_args.iter());
        let out = qsim(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stdout(&out).contains("0110 200 1.000000"), "{}", stdout(&out));
    }
}

#[test]
fn hybrid_reports_switch_pc() {
    let out = qsim(&[
        "run",
        &circuit_path("draper2.qc"),
        "--engine",
        "hybrid",
        "--mem-budget",
        "1",
        "--shots",
        "20",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("switch_pc: 0"), "{text}");
}

#[test]
fn json_output_is_reproducible() {
    let args = [
        "run",
        &circuit_path("bell.qc"),
        "--shots",
        "400",
        "--seed",
        "11",
        "--output",
        "json",
    ];
    let first = qsim(&args);
    let second = qsim(&args);
    assert!(first.status.success());
    let a = stdout(&first);
    let b = stdout(&second);
    let ja: serde_json::Value = serde_json::from_str(&a).unwrap();
    let jb: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(ja["histogram"], jb["histogram"]);
    assert_eq!(ja["seed"], 11);
    assert_eq!(ja["engine"], "path");
    assert_eq!(ja["shots"], 400);
    let counts = ja["histogram"].as_object().unwrap();
    let total: u64 = counts.values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 400);
    for key in counts.keys() {
        assert!(key == "00" || key == "11", "unexpected outcome {key}");
    }
}

#[test]
fn auto_seed_is_echoed_and_reusable() {
    let first = qsim(&[
        "run",
        &circuit_path("bell.qc"),
        "--shots",
        "100",
        "--output",
        "json",
    ]);
    assert!(first.status.success());
    let ja: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let seed = ja["seed"].as_u64().unwrap().to_string();
    let second = qsim(&[
        "run",
        &circuit_path("bell.qc"),
        "--shots",
        "100",
        "--seed",
        &seed,
        "--output",
        "json",
    ]);
    let jb: serde_json::Value = serde_json::from_str(&stdout(&second)).unwrap();
    assert_eq!(ja["histogram"], jb["histogram"]);
}

#[test]
fn trace_streams_to_stderr() {
    let out = qsim(&[
        "run",
        &circuit_path("draper2.qc"),
        "--shots",
        "2",
        "--seed",
        "5",
        "--trace",
    ]);
    assert!(out.status.success());
    let trace = stderr(&out);
    let lines: Vec<&str> = trace.lines().filter(|l| l.starts_with("trace ")).collect();
    assert_eq!(lines.len(), 18, "{trace}"); // 9 gates × 2 shots
    assert!(lines[0].contains("shot=0 pc=0"));
    assert!(lines.iter().all(|l| l.contains("state=") && l.contains("p=")));
}

#[test]
fn jobs_do_not_change_results() {
    let mut histograms = Vec::new();
    for jobs in ["1", "4"] {
        let out = qsim(&[
            "run",
            &circuit_path("bell.qc"),
            "--shots",
            "500",
            "--seed",
            "21",
            "--jobs",
            jobs,
            "--output",
            "json",
        ]);
        assert!(out.status.success());
        let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        histograms.push(value["histogram"].clone());
    }
    assert_eq!(histograms[0], histograms[1]);
}

#[test]
fn amps_path_and_dense() {
    for engine in ["path", "dense"] {
        let out = qsim(&[
            "amps",
            &circuit_path("draper2.qc"),
            "--input",
            "0101",
            "--engine",
            engine,
            "0110",
            "0101",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = stdout(&out);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("0110"), "{engine}: {text}");
        assert!(lines[0].contains("|amp|=1.000000000000"), "{engine}: {text}");
        assert!(lines[1].starts_with("0101"));
        assert!(lines[1].contains("|amp|=0.000000000000"), "{engine}: {text}");
    }
}

#[test]
fn amps_interference_target_is_zero() {
    let out = qsim(&[
        "amps",
        &circuit_path("interference.qc"),
        "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("|amp|=0.000000000000"));
}

#[test]
fn stats_draper() {
    let out = qsim(&["stats", &circuit_path("draper2.qc")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("s=4 t=9 k=4 b_max=2 bound=16"), "{text}");
}

#[test]
fn verify_draper_passes() {
    let out = qsim(&[
        "verify",
        &circuit_path("draper2.qc"),
        "--input",
        "0101",
        "--shots",
        "2000",
        "--seed",
        "13",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("amplitude deviation"));
    assert!(text.trim_end().ends_with("PASS"), "{text}");
}

#[test]
fn shipped_draper_file_matches_builder() {
    let text = std::fs::read_to_string(circuit_path("draper2.qc")).unwrap();
    let doc = qsim_core::parse_circuit(&text).unwrap();
    let built = qsim_core::gates::draper_adder(2).unwrap();
    assert_eq!(doc.circuit().len(), built.len());
    for (a, b) in doc.circuit().gates().iter().zip(built.gates()) {
        assert_eq!(a.operands(), b.operands());
        assert!(a.gate().max_entry_distance(b.gate()) <= 1e-12, "{}", a.gate().name());
    }
    assert_eq!(doc.default_input().unwrap().to_string(), "0101");
}

#[test]
fn exit_code_1_on_parse_error() {
    let dir = std::env::temp_dir().join("qsim-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.qc");
    std::fs::write(&bad, "qubits 2\ngate WAT 0\n").unwrap();
    let out = qsim(&["run", bad.to_str().unwrap(), "--input", "00"]);
    assert_eq!(out.status.code(), Some(1));
    let diag = stderr(&out);
    assert!(diag.contains("line 2"), "{diag}");

    let missing = dir.join("missing.qc");
    let out = qsim(&["run", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_1_on_non_unitary_defgate() {
    let dir = std::env::temp_dir().join("qsim-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("nonunitary.qc");
    std::fs::write(
        &bad,
        "qubits 1\ninput 0\ndefgate BROKEN 1\n1 1\n0 1\nendgate\ngate BROKEN 0\n",
    )
    .unwrap();
    let out = qsim(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not unitary"), "{}", stderr(&out));
}

#[test]
fn exit_code_2_on_bad_flags() {
    let draper = circuit_path("draper2.qc");
    // unknown engine
    let out = qsim(&["run", &draper, "--engine", "warp"]);
    assert_eq!(out.status.code(), Some(2));
    // hybrid without budget
    let out = qsim(&["run", &draper, "--engine", "hybrid"]);
    assert_eq!(out.status.code(), Some(2));
    // zero shots
    let out = qsim(&["run", &draper, "--shots", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // wrong input width
    let out = qsim(&["run", &draper, "--input", "01"]);
    assert_eq!(out.status.code(), Some(2));
    // no input at all
    let out = qsim(&["run", &circuit_path("bell.qc"), "--shots", "1"]);
    assert!(out.status.success()); // bell.qc declares one
    // clap-level unknown flag
    let out = qsim(&["run", &draper, "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
    // amps with hybrid engine
    let out = qsim(&["amps", &draper, "--engine", "hybrid", "0110"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_width_guard_exits_2() {
    let dir = std::env::temp_dir().join("qsim-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let wide = dir.join("wide.qc");
    let mut text = String::from("qubits 21\ninput 000000000000000000000\n");
    text.push_str("gate H 0\n");
    std::fs::write(&wide, text).unwrap();
    let out = qsim(&["verify", wide.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("guard"), "{}", stderr(&out));
}
