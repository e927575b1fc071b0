use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_debilandia"));
    c.env_remove("DEBILANDIA_ATLAS");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn accepting_fixture_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(bin()
        .args(["verify", "--instance"])
        .arg(fixture("accept1.json"))
        .arg("--report")
        .arg(&report));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "accept");
    assert!(r["total_counted"].as_u64().unwrap() <= r["bound"].as_u64().unwrap());
    for key in ["counters", "f_N", "bound", "reason"] {
        assert!(r.get(key).is_some(), "report lacks {key}");
    }
}

#[test]
fn wrong_first_element_exits_one_with_condition_1() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(bin()
        .args(["verify", "--instance"])
        .arg(fixture("bad_first.json"))
        .arg("--report")
        .arg(&report));
    assert_eq!(code(&out), 1);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "reject");
    assert!(r["reason"].as_str().unwrap().starts_with("condition 1"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("r{i}.json"));
        let trace = dir.path().join(format!("t{i}.jsonl"));
        let out = run(bin()
            .args(["verify", "--instance"])
            .arg(fixture("accept1.json"))
            .arg("--report")
            .arg(&path)
            .arg("--trace")
            .arg(&trace));
        assert_eq!(code(&out), 0);
        reports.push((std::fs::read(&path).unwrap(), std::fs::read(&trace).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(bin().arg("frobnicate"));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn malformed_instance_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"A\": [1, 4], \"L\": [2]}").unwrap();
    assert_eq!(code(&run(bin().args(["verify", "--instance"]).arg(&bad))), 2);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(bin().args(["verify", "--instance"]).arg(&bad))), 2);
    assert_eq!(
        code(&run(bin()
            .args(["verify", "--instance"])
            .arg(dir.path().join("missing.json")))),
        2
    );
}

#[test]
fn simulate_trace_is_line_delimited_json() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let snap = dir.path().join("s.json");
    let out = run(bin()
        .args(["simulate", "--machine"])
        .arg(fixture("incrementer.json"))
        .args(["--max-gens", "50", "--trace"])
        .arg(&trace)
        .arg("--snapshot")
        .arg(&snap));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // three carries then no matching rule
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["outcome"]["terminated"], "no_matching_packet");
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["generations_run"], 3);
    assert!(std::fs::metadata(&snap).unwrap().len() > 0);
}

#[test]
fn simulate_points_file() {
    let out = run(bin()
        .args(["simulate", "--points"])
        .arg(fixture("accept1_points.json"))
        .args(["--max-gens", "5"]));
    assert_eq!(code(&out), 0);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["initial_tiles"], 9);
    assert_eq!(summary["stopped"], true);
}

#[test]
fn encode_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let out = run(bin()
        .args([
            "encode", "--set-a", "1,3", "--tuples", "auto", "--e", "2", "--marker", "25", "--out",
        ])
        .arg(&inst));
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(
        v["L"],
        serde_json::json!([2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 4, 4, 25])
    );
    // junk-only grid: condition 6
    let out = run(bin().args(["verify", "--instance"]).arg(&inst));
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("condition 6"));

    let out = run(bin()
        .args(["encode", "--set-a", "1,3", "--e", "2", "--marker", "26", "--out"])
        .arg(&inst));
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let out = run(bin()
        .args(["solve", "--set-a", "1,3", "--max-gens", "100", "--out"])
        .arg(&cert));
    assert_eq!(code(&out), 1);
    assert!(!cert.exists());

    let out = run(bin()
        .args(["solve", "--set-a", "1,3,6,8,9", "--max-gens", "100", "--out"])
        .arg(&cert));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponential"));

    let out = run(bin()
        .args([
            "solve",
            "--set-a",
            "6,10,11,14,16,18,21,22,23,24,26,27,29",
            "--cap",
            "13",
            "--max-gens",
            "1000",
            "--out",
        ])
        .arg(&cert));
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read(&cert).unwrap(),
        std::fs::read(fixture("accept1.json")).unwrap()
    );
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(bin()
        .args(["bench", "--sizes", "1,2,3", "--trials", "5", "--seed", "9", "--csv"])
        .arg(&csv));
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 16);
    assert!(rows[0].starts_with("m,trial,set_a,cells_placed,claimed_cells"));
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let m: u64 = cols[0].parse().unwrap();
        let placed: u64 = cols[cols.len() - 6].parse().unwrap();
        assert_eq!(placed, m * m, "{row}");
    }
}

#[test]
fn atlas_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    let out = run(bin()
        .env("DEBILANDIA_ATLAS", &missing)
        .args(["verify", "--instance"])
        .arg(fixture("accept1.json")));
    assert_eq!(code(&out), 2);

    let copy = dir.path().join("atlas.json");
    std::fs::copy(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/atlas-v1.json"),
        &copy,
    )
    .unwrap();
    let out = run(bin()
        .env("DEBILANDIA_ATLAS", &copy)
        .args(["verify", "--instance"])
        .arg(fixture("accept1.json")));
    assert_eq!(code(&out), 0);
}
