use std::path::Path;
use std::process::{Command, Output};

fn qinsdel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinsdel")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn matrix_prints_table_paths_and_candidates() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.txt", "0 1 2\n");
    write(dir.path(), "y.txt", "# received\n1,1,2\n");
    let o = qinsdel(&["matrix", "x.txt", "y.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in [
        "0 1 2 3",
        "1 2 3 4",
        "2 1 2 3",
        "3 2 3 2",
        "bottom path: v3,3 v2,2 v1,1 v0,1 v0,0",
        "top path: v3,3 v2,2 v2,1 v1,0 v0,0",
        "S1 = {1}",
        "S2 = {2}",
        "J = {1,2}",
    ] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
}

#[test]
fn matrix_json_has_annotated_arcs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.txt", "0 1 2");
    write(dir.path(), "y.txt", "1 1 2");
    let o = qinsdel(&["matrix", "x.txt", "y.txt", "--json", "--out", "m.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(v["matrix"], serde_json::json!([[0, 1, 2, 3], [1, 2, 3, 4], [2, 1, 2, 3], [3, 2, 3, 2]]));
    assert_eq!(v["distance"], 2);
    assert_eq!(v["s1"], serde_json::json!([1]));
    assert_eq!(v["s2"], serde_json::json!([2]));
    for k in ["1", "2", "3"] {
        assert!(v["arcs"][k].is_array());
    }
}

#[test]
fn equal_sequences_give_empty_candidates() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.txt", "0 1 2 0");
    let o = qinsdel(&["candidates", "x.txt", "x.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("S1 = {}") && text.contains("S2 = {}"), "{text}");
}

#[test]
fn malformed_input_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.txt", "0 1\n2 z\n");
    write(dir.path(), "y.txt", "1 1 2");
    let o = qinsdel(&["matrix", "x.txt", "y.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 3"), "{err}");
    let o = qinsdel(&["--q", "2", "candidates", "y.txt", "y.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(qinsdel(&["matrix", "missing.txt", "y.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(qinsdel(&["no-such-command"], dir.path()).status.code(), Some(2));
}

#[test]
fn encode_channel_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let ok = |args: &[&str]| {
        let o = qinsdel(args, p);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        o
    };
    ok(&["encode", "--seed", "5", "--out", "cw.json", "--message-out", "mu.json"]);
    for (j2, j1, sigma) in [("2", "5", "basis:5"), ("3", "3", "mixed"), ("6", "1", "random:1")] {
        ok(&["channel", "--state", "cw.json", "--j2", j2, "--j1", j1, "--sigma", sigma, "--out", "rx.json"]);
        let o = ok(&["decode", "--state", "rx.json", "--target", "mu.json", "--out", "report.json"]);
        assert!(stdout(&o).is_empty());
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p.join("report.json")).unwrap()).unwrap();
        assert!(report["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    }
    let o = qinsdel(&["decode", "--state", "rx.json", "--target", "mu.json", "--threshold", "1.1"], p);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_writes_reports_and_respects_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cfg = r#"{"messages": 1, "insertion_indices": [1, 4], "deletion_indices": [2, 6],
                  "sigma": {"basis": false, "random_pure": 1, "maximally_mixed": true}}"#;
    write(p, "cfg.json", cfg);
    let o = qinsdel(&["experiment", "--config", "cfg.json", "--out", "out/report.json", "--threads", "1"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(p.join("out/report.csv")).unwrap();
    assert!(csv.starts_with("run_id,J1,J2,sigma_kind,branch,S1,S2,fidelity,pass\n"), "{csv}");
    assert!(p.join("out/report.json").exists());

    write(p, "hi.json", &cfg.replace("\"messages\": 1", "\"messages\": 1, \"threshold\": 1.1"));
    let o = qinsdel(&["experiment", "--config", "hi.json"], p);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("passed 0"), "{}", stdout(&o));

    write(p, "bad.json", r#"{"mesages": 1}"#);
    assert_eq!(qinsdel(&["experiment", "--config", "bad.json"], p).status.code(), Some(2));
}

#[test]
fn verify_classical_refuses_t1_and_reports_faults() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = qinsdel(&["verify", "classical", "--t", "1"], p);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t >= 2"));

    write(p, "small.json", r#"{"t_values": [2], "marker_n_max": 6, "enumerate_n_max": 5, "random_pairs": 50}"#);
    let o = qinsdel(&["verify", "classical", "--config", "small.json", "--out", "ok.json"], p);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = qinsdel(&["verify", "classical", "--config", "small.json", "--fault", "swap-priorities"], p);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL extremality") && text.contains("counterexample {"), "{text}");
    let o = qinsdel(&["verify", "classical", "--config", "small.json", "--budget", "10"], p);
    assert_eq!(o.status.code(), Some(2));
}
