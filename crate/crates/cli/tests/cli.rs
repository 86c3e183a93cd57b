use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_plegma-lab"));
    c.env_remove("PLEGMA_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plegma-lab-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn enumerate_five_tuples() {
    let o = run(&["plegma", "enumerate", "--n", "5", "--k", "2", "--l", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[[")).count(), 5);
    assert!(text.contains("C(5,4) = 5"));

    let o = run(&["--format", "csv", "plegma", "enumerate", "--n", "5", "--k", "2", "--l", "2"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn schreier_eval_with_partition() {
    let o = run(&["norm", "eval", "--engine", "schreier_plegmatic", "--k", "1", "--vec", "[[[1,3],1],[[2,4],1]]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("1.41421"), "{text}");
    assert!(text.contains("partition: {[1,3]} {[2,4]}"), "{text}");
}

#[test]
fn cesaro_functionals_match_closed_form() {
    let o = run(&["sm", "cesaro", "--gen", "xk_basis", "--k", "1", "--n-max", "12", "--functionals", "paper"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("n =")).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with("equal")), "{text}");
    assert!(text.contains("limit of the closed form: 2/9"));
}

#[test]
fn json_output_parses() {
    let o = run(&["--format", "json", "norm", "eval", "--engine", "l2", "--vec", "[[[1],3],[[2],4]]"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"]["exact"], "5");
}

#[test]
fn invalid_input_exits_2() {
    let o = run(&["norm", "eval", "--engine", "l1", "--vec", "[[[3,1],1]]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("strictly increasing"));
    assert_eq!(run(&["plegma", "enumerate", "--k", "2"]).status.code(), Some(2));
    assert_eq!(run(&["norm", "eval", "--engine", "nope", "--vec", "[]"]).status.code(), Some(2));
}

#[test]
fn exact_bound_exceeded_exits_3() {
    let entries: Vec<String> = (1..=13).map(|i| format!("[[{i},{}],1]", i + 20)).collect();
    let vec = format!("[{}]", entries.join(","));
    let o = run(&["norm", "eval", "--engine", "schreier_plegmatic", "--k", "1", "--vec", &vec]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("scale refusal"));

    let o = run(&["norm", "eval", "--engine", "schreier_plegmatic", "--k", "1", "--mode", "greedy", "--vec", &vec]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn corrupted_tsirelson_config_is_rejected() {
    let cfg = r#"{"engine":"tsirelson","config":{"label":"corrupt","m":[4,8,16],"n":[2,8,64]}}"#;
    let o = run(&["norm", "selfcheck", "--engine", cfg, "--samples", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("validation failed"), "{}", stderr(&o));

    let o = run(&["selftest", "--only", "6", "--engine-config", cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("[FAIL] config: validation failed"));
}

#[test]
fn desk_preset_warns() {
    let o = run(&["norm", "eval", "--engine", "tsirelson", "--vec", "[[[1],1],[[2],1]]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("relaxed"));
}

#[test]
fn out_dir_is_deterministic() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for dir in [&a, &b] {
        let o = bin()
            .args(["--out", dir.to_str().unwrap(), "sm", "cesaro", "--gen", "xk_basis", "--n-max", "4", "--functionals", "paper"])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["result.json", "result.csv", "manifest.json"] {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "sm cesaro");
    assert_eq!(manifest["args"]["n_max"], 4);
}

#[test]
fn run_config_matches_direct_call() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "plegma enumerate", "args": {"n": 6, "k": 1, "l": 3}, "format": "csv"}"#).unwrap();
    let via = run(&["run", "--config", cfg.to_str().unwrap()]);
    let direct = run(&["--format", "csv", "plegma", "enumerate", "--n", "6", "--k", "1", "--l", "3"]);
    assert_eq!(via.status.code(), Some(0));
    assert_eq!(stdout(&via), stdout(&direct));

    std::fs::write(&cfg, r#"{"command": "plegma enumerate", "oops": 1}"#).unwrap();
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn ctd_round_trip() {
    let dir = scratch("ctd");
    let o = run(&["--out", dir.to_str().unwrap(), "seq", "ctd-extract", "--sample-seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let input = format!("@{}", dir.join("result.json").display());
    let o = run(&["seq", "ctd-verify", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("decomposition ok"));
}

#[test]
fn thread_count_from_env() {
    let o = bin().env("PLEGMA_LAB_THREADS", "2").args(["ramsey", "free", "--n", "6", "--k", "2", "--l", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("largest family: 9 sets"));
}

#[test]
fn quick_selftest_passes() {
    let o = run(&["selftest", "--quick", "--only", "3,6,9,12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("4 of 4 criteria pass"));
}
