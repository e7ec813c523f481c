//! Subcommand behaviour and exit codes.

mod common;

use std::process::Command;

use common::*;

#[test]
fn check_accepts_the_uam_requirement() {
    let o = reqmon(&["check", &fixture("ros001.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("1 requirement(s)"));
}

#[test]
fn check_reports_syntax_errors_with_a_position() {
    let o = reqmon(&["check", &fixture("syntax_error.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, reqmon_cli::EXIT_INPUT);
    // The block starts on line 2 of the file.
    assert!(o.stderr.contains("2:40"), "{}", o.stderr);
}

#[test]
fn check_warns_on_an_empty_file() {
    let o = reqmon(&["check", &fixture("empty.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.contains("warning"));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_reports_every_validation_problem() {
    let dir = tempfile::tempdir().unwrap();
    let vars = dir.path().join("v.vars");
    std::fs::write(&vars, "x : numeric\nb : boolean\n").unwrap();
    let reqs = dir.path().join("r.req");
    std::fs::write(
        &reqs,
        "# id: A\nc shall satisfy x\n# id: B\nc shall satisfy nope\n# id: C\nc shall satisfy b\n",
    )
    .unwrap();
    let o = reqmon(&["check", reqs.to_str().unwrap(), "--vars", vars.to_str().unwrap()]);
    assert_eq!(o.code, reqmon_cli::EXIT_INPUT);
    assert!(o.stderr.contains("`A`"), "{}", o.stderr);
    assert!(o.stderr.contains("nope"), "{}", o.stderr);
    assert!(!o.stderr.contains("`C`"));
}

#[test]
fn check_rejects_names_the_generator_cannot_emit() {
    let dir = tempfile::tempdir().unwrap();
    let vars = dir.path().join("v.vars");
    std::fs::write(&vars, "step : boolean\n").unwrap();
    let reqs = dir.path().join("r.req");
    std::fs::write(&reqs, "# id: A\nc shall satisfy step\n").unwrap();
    let o = reqmon(&["check", reqs.to_str().unwrap(), "--vars", vars.to_str().unwrap()]);
    assert_eq!(o.code, reqmon_cli::EXIT_INPUT);
    assert!(o.stderr.contains("reserved"), "{}", o.stderr);
}

#[test]
fn formalize_writes_the_component_specification() {
    let o = reqmon(&["formalize", &fixture("ros001.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("S[10,10]"));
    assert!(o.stdout.contains("\"component\": \"ROS_component\""));

    let o = reqmon(&["formalize", &fixture("empty.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("\"requirements\": []"));

    let o = reqmon(&[
        "formalize",
        &fixture("ros001.req"),
        "--vars",
        &fixture("ros001.vars"),
        "--rate",
        "2",
    ]);
    assert!(o.stdout.contains("S[20,20]") && o.stdout.contains("H[0,20]"));
}

#[test]
fn formalize_rejects_scoped_requirements() {
    let dir = tempfile::tempdir().unwrap();
    let reqs = dir.path().join("r.req");
    std::fs::write(&reqs, "# id: M\nin flight mode c shall satisfy windspeed > 0\n").unwrap();
    let o = reqmon(&["formalize", reqs.to_str().unwrap(), "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, reqmon_cli::EXIT_INPUT);
    assert!(o.stderr.contains("scope"), "{}", o.stderr);
}

#[test]
fn gen_writes_the_package_tree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ros001_spec_file(dir.path());
    let out = dir.path().join("ws");
    let o = reqmon(&["gen", &spec, "--varmap", &fixture("varmap.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let tree = read_tree(&out);
    let files: Vec<_> = tree.keys().map(String::as_str).collect();
    assert_eq!(
        files,
        [
            "copilot_monitor/CMakeLists.txt",
            "copilot_monitor/copilot/monitor.c",
            "copilot_monitor/copilot/monitor.h",
            "copilot_monitor/package.xml",
            "copilot_monitor/src/logger_node.cpp",
            "copilot_monitor/src/monitor_node.cpp",
        ]
    );
    assert_eq!(o.stdout.lines().count(), 6);
}

#[test]
fn gen_reports_unmapped_variables() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ros001_spec_file(dir.path());
    let vm = dir.path().join("vm.json");
    std::fs::write(
        &vm,
        r#"{"variables": [{"name": "windspeed", "type": "std_msgs/msg/Float32", "topic": "windspeed"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("ws");
    let o = reqmon(&["gen", &spec, "--varmap", vm.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, reqmon_cli::EXIT_GENERATION);
    assert!(o.stderr.contains("current_consumption"), "{}", o.stderr);
}

#[test]
fn gen_split_writes_one_package_per_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let o = reqmon(&[
        "formalize",
        &fixture("two_reqs.req"),
        "--vars",
        &fixture("ros001.vars"),
        "--out",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let out = dir.path().join("ws");
    let o = reqmon(&[
        "gen",
        spec.to_str().unwrap(),
        "--varmap",
        &fixture("varmap.json"),
        "--out",
        out.to_str().unwrap(),
        "--split",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let mut packages: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    packages.sort();
    assert_eq!(packages, ["copilot_monitor_ros_001", "copilot_monitor_ros_002"]);
    let second = std::fs::read_to_string(out.join("copilot_monitor_ros_002/copilot/monitor.h")).unwrap();
    assert!(second.contains("extern double windspeed;"));
    assert!(!second.contains("current_consumption"));
}

#[test]
fn gen_options() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ros001_spec_file(dir.path());
    let out = dir.path().join("ws");
    let dump = dir.path().join("monitor.json");
    let o = reqmon(&[
        "gen",
        &spec,
        "--varmap",
        &fixture("varmap.json"),
        "--out",
        out.to_str().unwrap(),
        "--prefix",
        "uam/monitors",
        "--package",
        "uam_pkg",
        "--c-float",
        "--dump-monitor",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let node = std::fs::read_to_string(out.join("uam_pkg/src/monitor_node.cpp")).unwrap();
    assert!(node.contains("\"uam/monitors/handlerpropROS_001\""));
    let header = std::fs::read_to_string(out.join("uam_pkg/copilot/monitor.h")).unwrap();
    assert!(header.contains("extern float current_consumption;"));
    assert!(std::fs::read_to_string(dump).unwrap().contains("\"externs\""));

    let o = reqmon(&[
        "gen",
        &spec,
        "--varmap",
        &fixture("varmap.json"),
        "--out",
        out.to_str().unwrap(),
        "--package",
        "Bad-Name",
    ]);
    assert_eq!(o.code, reqmon_cli::EXIT_GENERATION);
}

fn simulate(trace: &str, extra: &[&str]) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = ros001_spec_file(dir.path());
    let mut args = vec!["simulate", spec.as_str(), "--varmap"];
    let vm = fixture("varmap.json");
    args.push(&vm);
    args.push("--trace");
    args.push(trace);
    args.extend_from_slice(extra);
    reqmon(&args)
}

#[test]
fn simulate_summarizes_violations() {
    let violation = fixture("uam_violation.jsonl");
    let recovery = fixture("uam_recovery.jsonl");
    for extra in [&[][..], &["--policy", "all"], &["--policy", "clock:1"]] {
        let o = simulate(&violation, extra);
        assert_eq!((o.code, o.stdout.as_str()), (0, "ROS-001: 1\n"), "{extra:?} {}", o.stderr);
        let o = simulate(&recovery, extra);
        assert_eq!((o.code, o.stdout.as_str()), (0, "ROS-001: 0\n"), "{extra:?}");
    }
}

#[test]
fn per_message_stepping_double_counts_lockstep_instants() {
    // Two inputs per instant: the monitor takes 41 steps for 21 instants, so
    // the deadline expires before the current drops at t = 15.
    let o = simulate(&fixture("uam_recovery.jsonl"), &["--per-message"]);
    assert_eq!(o.stdout, "ROS-001: 1\n");
    let o = simulate(&fixture("uam_violation.jsonl"), &["--per-message"]);
    assert_eq!(o.stdout, "ROS-001: 1\n");
}

#[test]
fn simulate_writes_log_step_table_and_fired_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let csv = dir.path().join("steps.csv");
    let fired = dir.path().join("fired.txt");
    let o = simulate(
        &fixture("uam_violation.jsonl"),
        &[
            "--log",
            log.to_str().unwrap(),
            "--steps-csv",
            csv.to_str().unwrap(),
            "--fired",
            fired.to_str().unwrap(),
        ],
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(std::fs::read_to_string(&fired).unwrap(), "20,handlerpropROS_001\n");
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().next(), Some("current_consumption,windspeed,cc_t,ws_t"));
    assert_eq!(csv.lines().count(), 22);
    let log = std::fs::read_to_string(&log).unwrap();
    assert!(log.contains(r#""topic":"copilot/handlerpropROS_001","value":null"#));
    assert!(log.contains(r#"{"log":"violation: handlerpropROS_001 at seq"#));
}

#[test]
fn simulate_reports_trace_problems() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"t\": 0, \"topic\": \"windspeed\", \"value\": 7}\n{\"t\": 1,\n").unwrap();
    let o = simulate(bad.to_str().unwrap(), &[]);
    assert_eq!(o.code, reqmon_cli::EXIT_SIMULATION);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);

    std::fs::write(&bad, "{\"t\": 0, \"topic\": \"windspeed\", \"value\": true}\n").unwrap();
    let o = simulate(bad.to_str().unwrap(), &[]);
    assert_eq!(o.code, reqmon_cli::EXIT_SIMULATION);

    let o = simulate(dir.path().join("missing.jsonl").to_str().unwrap(), &[]);
    assert_eq!(o.code, reqmon_cli::EXIT_SIMULATION);

    let o = simulate(&fixture("uam_violation.jsonl"), &["--policy", "clock:0"]);
    assert_eq!(o.code, reqmon_cli::EXIT_USAGE);
}

#[test]
fn explain_names_persistence_and_deadline() {
    let o = reqmon(&["explain", &fixture("ros001.req")]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("10-step persistence"), "{}", o.stdout);
    assert!(o.stdout.contains("10-step deadline"), "{}", o.stdout);
    assert!(o.stdout.contains("S[10,10]"));

    let o = reqmon(&["explain", &fixture("unconditional.req")]);
    assert!(o.stdout.contains("must hold at every step"), "{}", o.stdout);

    let o = reqmon(&["explain", &fixture("empty.req")]);
    assert_eq!((o.code, o.stdout.as_str()), (0, ""));

    let o = reqmon(&["explain", &fixture("ros001.req"), "--rate", "3"]);
    assert!(o.stdout.contains("30-step persistence") && o.stdout.contains("30-step deadline"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(reqmon(&[]).code, reqmon_cli::EXIT_USAGE);
    assert_eq!(reqmon(&["frobnicate"]).code, reqmon_cli::EXIT_USAGE);
    assert_eq!(reqmon(&["check", &fixture("ros001.req")]).code, reqmon_cli::EXIT_USAGE);
    assert_eq!(
        reqmon(&["check", &fixture("ros001.req"), "--vars", &fixture("ros001.vars"), "--rate", "0"]).code,
        reqmon_cli::EXIT_USAGE
    );
    let help = reqmon(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("simulate"));
    assert_eq!(reqmon(&["--version"]).code, 0);
}

#[test]
fn missing_inputs_use_the_stage_exit_code() {
    let o = reqmon(&["check", "/nonexistent.req", "--vars", &fixture("ros001.vars")]);
    assert_eq!(o.code, reqmon_cli::EXIT_INPUT);
    let dir = tempfile::tempdir().unwrap();
    let spec = ros001_spec_file(dir.path());
    let o = reqmon(&["gen", &spec, "--varmap", "/nonexistent.json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, reqmon_cli::EXIT_GENERATION);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_reqmon");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["check", &fixture("ros001.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = status(&["check", &fixture("syntax_error.req"), "--vars", &fixture("ros001.vars")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error:"));
    assert_eq!(status(&["nope"]).status.code(), Some(1));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}
