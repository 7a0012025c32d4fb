use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clpsched::cli::RunReport;
use clpsched::localsearch::{read_jsonl, replay};
use clpsched::model::{Instance, PartialSchedule, ScheduleFile};
use clpsched::toolkit::gen_chain;
use tempfile::TempDir;

const E1: &str = r#"{"machines":2,"jobs":[{"p":2,"eligible":[0,1]},{"p":2,"eligible":[0]},{"p":2,"eligible":[1]}]}"#;
const E2: &str = r#"{"machines":2,"jobs":[{"p":6,"eligible":[0,1]},{"p":2,"eligible":[0]},{"p":2,"eligible":[0]},{"p":2,"eligible":[0]}]}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clpsched")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lp_prints_optimum_and_probes() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1.json", E1);
    let o = bin(&["lp", s(&e1)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OPT_LP 4\nT=4 feasible\nT=3 infeasible\n");
    let single = write(&dir, "one.json", r#"{"machines":3,"jobs":[{"p":9,"eligible":[1]}]}"#);
    assert!(stdout(&bin(&["lp", s(&single)])).starts_with("OPT_LP 9\n"));
}

#[test]
fn malformed_input_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"machines\": 2,\n \"jobs\": [oops]}");
    let o = bin(&["lp", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = bin(&["lp", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let empty_elig = write(&dir, "e.json", r#"{"machines":2,"jobs":[{"p":1,"eligible":[]}]}"#);
    assert_eq!(bin(&["solve", s(&empty_elig)]).status.code(), Some(2));
}

#[test]
fn solve_verify_and_trace_round_trip() {
    let dir = TempDir::new().unwrap();
    let inst_path = write(&dir, "chain.json", &gen_chain(5, 8).unwrap().to_json_string());
    let (sched, report, trace) = (dir.path().join("s.json"), dir.path().join("r.json"), dir.path().join("t.jsonl"));
    let o = bin(&["solve", s(&inst_path), "--out", s(&sched), "--report", s(&report), "--trace", s(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let report: RunReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let file = ScheduleFile::load(&sched).unwrap();
    assert_eq!(report.t, 8);
    assert_eq!(report.makespan, Some(file.makespan));
    assert!(17 * file.makespan <= 33 * report.t);
    assert!(!report.stuck && report.certificate.is_none());
    assert_eq!(report.instance_sha256.len(), 64);

    let inst = Instance::load(&inst_path).unwrap();
    let records = read_jsonl(std::io::BufReader::new(fs::File::open(&trace).unwrap())).unwrap();
    assert!(records.iter().any(|r| r.event_name() == "block+"));
    let replayed = replay(&inst, &PartialSchedule::empty(&inst), &records).unwrap();
    assert_eq!(replayed.to_vec().unwrap(), file.assignment);

    let o = bin(&["verify", s(&inst_path), s(&sched), "--T", "8"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "valid\n".to_string()));
}

#[test]
fn solve_worked_examples() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1.json", E1);
    let o = bin(&["solve", s(&e1)]);
    let file: ScheduleFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(file.makespan, 4);

    let e2 = write(&dir, "e2.json", E2);
    let o = bin(&["solve", s(&e2), "--variant", "general"]);
    let file: ScheduleFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(file.makespan, 6);
    let o = bin(&["solve", s(&e2), "--variant", "two-size"]);
    assert_eq!(o.status.code(), Some(0));
    let report: RunReport = serde_json::from_str(&String::from_utf8_lossy(&o.stderr)).unwrap();
    assert_eq!((report.variant.as_str(), report.ratio_num, report.ratio_den), ("two-size", Some(2), Some(1)));
}

#[test]
fn two_size_precondition_exits_2() {
    let dir = TempDir::new().unwrap();
    // big size 6 but the LP needs T = 8
    let p = write(
        &dir,
        "x.json",
        r#"{"machines":1,"jobs":[{"p":6,"eligible":[0]},{"p":2,"eligible":[0]}]}"#,
    );
    let o = bin(&["solve", s(&p), "--variant", "two-size"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}

#[test]
fn cap_exceeded_exits_3() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "chain.json", &gen_chain(5, 8).unwrap().to_json_string());
    assert_eq!(bin(&["solve", s(&p), "--cap", "1"]).status.code(), Some(3));
}

#[test]
fn verify_rejects_bad_schedules() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"machines":2,"jobs":[{"p":5,"eligible":[0,1]},{"p":5,"eligible":[0,1]}]}"#);
    let two_big = write(&dir, "a.json", r#"{"assignment":[0,0],"makespan":10}"#);
    // 5 is big at T = 6 and a load of 10 still fits 33/17 * 6
    let o = bin(&["verify", s(&inst), s(&two_big), "--T", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("2 big jobs"));
    let wrong = write(&dir, "b.json", r#"{"assignment":[0,7],"makespan":5}"#);
    let o = bin(&["verify", s(&inst), s(&wrong), "--T", "5"]);
    assert!(stdout(&o).starts_with("invalid\n") && stdout(&o).contains("does not exist"));
    let ok = write(&dir, "c.json", r#"{"assignment":[1,0],"makespan":5}"#);
    assert_eq!(stdout(&bin(&["verify", s(&inst), s(&ok), "--T", "5"])), "valid\n");
}

#[test]
fn oracle_reports_gap() {
    let dir = TempDir::new().unwrap();
    assert_eq!(stdout(&bin(&["oracle", s(&write(&dir, "e1.json", E1))])), "OPT 4\nOPT_LP 4\ngap 1/1\n");
    assert_eq!(stdout(&bin(&["oracle", s(&write(&dir, "e2.json", E2))])), "OPT 6\nOPT_LP 6\ngap 1/1\n");
    let one = write(&dir, "o.json", r#"{"machines":1,"jobs":[{"p":3,"eligible":[0]}]}"#);
    assert_eq!(stdout(&bin(&["oracle", s(&one)])), "OPT 3\nOPT_LP 3\ngap 1/1\n");
    let many = Instance::new(2, vec![(1, vec![0, 1]); 15]).unwrap();
    let big = write(&dir, "big.json", &many.to_json_string());
    assert_eq!(bin(&["oracle", s(&big)]).status.code(), Some(3));
}

#[test]
fn gen_output_reparses() {
    let o = bin(&["gen", "--machines", "3", "--jobs", "8", "--max-size", "10", "--density", "0.5", "--seed", "42"]);
    let inst = Instance::from_json_str(&stdout(&o)).unwrap();
    assert_eq!((inst.machine_count(), inst.job_count()), (3, 8));
    assert_eq!(stdout(&o), stdout(&bin(&["gen", "--machines", "3", "--jobs", "8", "--max-size", "10", "--density", "0.5", "--seed", "42"])));
    let o = bin(&["gen", "--small", "2", "--big", "6", "--small-count", "3", "--big-count", "1", "--machines", "2"]);
    assert_eq!(Instance::from_json_str(&stdout(&o)).unwrap().distinct_sizes(), vec![2, 6]);
}

#[test]
fn bench_is_deterministic_and_bounded() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path| {
        vec!["bench".to_string(), "--count".into(), "100".into(), "--seed".into(), "7".into(), "--jobs".into(), "8".into(),
             "--out".into(), p.to_str().unwrap().into(), "--no-timing".into()]
    };
    let o = Command::new(env!("CARGO_BIN_EXE_clpsched")).args(args(&a)).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    Command::new(env!("CARGO_BIN_EXE_clpsched")).args(args(&b)).output().unwrap();
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next(), Some("seed,n,m,T,makespan,ratio_num,ratio_den,events,time_ms"));
    for line in text.lines().skip(1) {
        let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(17 * f[5] <= 33 * f[6], "{line}");
    }
    assert!(stdout(&o).contains("failures 0"));

    let empty = dir.path().join("e.csv");
    bin(&["bench", "--count", "0", "--out", s(&empty)]);
    assert_eq!(fs::read_to_string(&empty).unwrap(), "seed,n,m,T,makespan,ratio_num,ratio_den,events,time_ms\n");
}
