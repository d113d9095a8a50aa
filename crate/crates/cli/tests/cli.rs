use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hitfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitfam"))
        .args(args)
        .env_remove("HITFAM_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const RACY: &str = "poset v1\nevents 7\nevent r\nevent a\nevent b\nevent a0\nevent a1\nevent b0\nevent b1\n\
                    edge r a\nedge r b\nedge a a0\nedge a a1\nedge b b0\nedge b b1\n\
                    race a0 b1\nrace a1 b\n";

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&hitfam(&[])), 1);
    assert_eq!(code(&hitfam(&["gen", "--shape", "tree", "--d", "2", "--method", "dfs"])), 1);
    assert_eq!(code(&hitfam(&["gen", "--shape", "tree", "--height", "2", "--d", "3", "--method", "dfs"])), 1);
    assert_eq!(code(&hitfam(&["bounds", "--shape", "tree", "--n", "4", "--d", "3"])), 1);
    assert_eq!(code(&hitfam(&["--help"])), 0);
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.poset", "poset v1\nevents 2\nevent a\nedge a b\n");
    let o = hitfam(&["stats", "--poset", &bad]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let missing = dir.path().join("missing.poset");
    assert_eq!(code(&hitfam(&["stats", "--poset", missing.to_str().unwrap()])), 2);
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_hitfam"))
        .args(["gen", "--shape", "tree", "--height", "3", "--d", "3", "--method", "pattern"])
        .env("HITFAM_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn verify_round_trip_and_thinned_family() {
    let dir = tempfile::tempdir().unwrap();
    let poset = dir.path().join("dt.poset");
    let fam = dir.path().join("dt.family");
    let o = hitfam(&["gen", "--shape", "doubletree", "--height", "2", "--d", "3", "--method", "doubletree", "--out", fam.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&fam).unwrap();
    assert!(text.starts_with("family v1 d=3"));
    assert!(text.contains("# M h=2 block_width=5"));

    // poset file for the same double tree, written by the library
    let p = hitfam::shapes::double_tree(2).unwrap();
    fs::write(&poset, hitfam::harness::format_poset(&hitfam::harness::AnnotatedPoset::new(p))).unwrap();
    let o = hitfam(&["verify", "--poset", poset.to_str().unwrap(), "--family", fam.to_str().unwrap(), "--d", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("ok: 8 schedules"));

    // drop the last schedule row
    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.iter().rposition(|l| !l.starts_with('#') && !l.starts_with("family")).unwrap();
    lines.remove(last);
    let thin = write(dir.path(), "thin.family", &(lines.join("\n") + "\n"));
    let o = hitfam(&["verify", "--poset", poset.to_str().unwrap(), "--family", &thin, "--d", "3"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("missed tuple"), "{}", stderr(&o));
}

#[test]
fn gen_verify_reports_stats() {
    let o = hitfam(&["gen", "--shape", "chainplus", "--n", "3", "--d", "3", "--method", "interleave", "--verify"]);
    assert_eq!(code(&o), 0);
    let stats: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(stats["family_size"], 4);
    assert_eq!(stats["verified"], true);
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with("family")).count(), 4);
}

#[test]
fn bounds_json() {
    let o = hitfam(&["bounds", "--shape", "antichain", "--n", "64", "--d", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 64);
    assert_eq!(v["greedy_upper"], 71);
    let lower = v["lower"].as_f64().unwrap();
    assert!((lower - 64f64.log2()).abs() < 0.1, "{lower}");
}

#[test]
fn stats_and_prune() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "racy.poset", RACY);
    let o = hitfam(&["stats", "--poset", &path]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n_events"], 7);
    assert_eq!(v["height"], 3);
    assert_eq!(v["is_tree"], true);
    assert_eq!(v["n_races"], 2);
    assert_eq!(v["n_racing_events"], 4);

    let o = hitfam(&["prune", "--poset", &path]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = stdout(&o).lines().filter(|l| !l.starts_with("family") && !l.starts_with('#')).count();
    assert!(rows >= 1 && rows <= 8, "{rows}");
}

#[test]
fn seeded_runs_are_repeatable() {
    let args = ["gen", "--shape", "antichain", "--n", "9", "--d", "3", "--method", "random", "--seed", "5"];
    let a = hitfam(&args);
    let b = hitfam(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = hitfam(&["gen", "--shape", "antichain", "--n", "9", "--d", "3", "--method", "random", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}
