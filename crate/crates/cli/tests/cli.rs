use std::path::Path;
use std::process::{Command, Output};

use kh_cli::RunRecord;

const LEFT_TREFOIL: &str = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]";
const RIGHT_TREFOIL: &str = "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]";
const FIGURE_EIGHT: &str = "PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]";

fn kh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kh")).args(args).env_remove("KH_CACHE_DIR").output().expect("kh runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(o: &Output) -> RunRecord {
    serde_json::from_slice(&o.stdout).expect("stdout is a run record")
}

#[test]
fn compute_trefoil_reduced() {
    let o = kh(&["compute", "--pd", LEFT_TREFOIL, "--reduced"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r.flavor, "reduced");
    assert_eq!(r.pages[&2].values().sum::<usize>(), 3);
    assert_eq!(r.collapse_page, 2);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pages"]["2"]["0,-2"], 1);
    assert_eq!(v["total_homology"]["-8"], 1);
}

#[test]
fn compute_unknot_single_class() {
    let o = kh(&["compute", "--pd", "U", "--reduced"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r.pages[&2].iter().collect::<Vec<_>>(), vec![(&"0,0".to_string(), &1)]);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&kh(&["compute", "--pd", "PD[X(1,2,3)]"])), 2);
    assert_eq!(code(&kh(&["compute", "--pd", "PD[X(1,2,1,2)]"])), 2);
    assert_eq!(code(&kh(&["compute", "--pd", "PD[X(1,1,2,2),X(2,3,3,1)]"])), 2);
    assert_eq!(code(&kh(&["compute", "--pd", LEFT_TREFOIL, "--basepoint", "9"])), 2);
    assert_eq!(code(&kh(&["compute", "--pd", "@/no/such/file"])), 2);
    assert_eq!(code(&kh(&["compute", "--pd", FIGURE_EIGHT, "--max-generators", "10"])), 3);
    assert_eq!(code(&kh(&["compute", "--pd", LEFT_TREFOIL, "--reduced", "--unreduced"])), 2);
}

#[test]
fn output_is_deterministic_and_csv_matches() {
    let args = ["compute", "--pd", FIGURE_EIGHT, "--unreduced"];
    let (a, b) = (kh(&args), kh(&args));
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&kh(&["compute", "--pd", FIGURE_EIGHT, "--unreduced", "--output", "csv"]));
    let rows: usize = record(&a).pages.values().map(|p| p.len()).sum();
    assert_eq!(csv.lines().count(), rows + 1);
    assert!(csv.starts_with("r,h,q,dim\n"));
}

#[test]
fn timings_only_on_request() {
    let plain = record(&kh(&["compute", "--pd", LEFT_TREFOIL]));
    assert!(plain.meta.timings.is_none());
    let timed = record(&kh(&["compute", "--pd", LEFT_TREFOIL, "--timings"]));
    assert!(timed.meta.timings.is_some());
}

#[test]
fn ss_truncates_pages() {
    let r = record(&kh(&["ss", "--pd", FIGURE_EIGHT, "--max-page", "3"]));
    assert_eq!(r.pages.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
    assert_eq!(code(&kh(&["ss", "--pd", FIGURE_EIGHT, "--max-page", "1"])), 2);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn probe_reports() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", &format!("# small\n3_1,{RIGHT_TREFOIL}\n4_1,{FIGURE_EIGHT}\n"));
    let o = kh(&["probe", &corpus, "--reduced"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "name,flavor,crossings,collapse_page,late_differentials,status\n3_1,reduced,3,2,,collapse\n4_1,reduced,4,2,,collapse\n"
    );
    let both = kh(&["probe", &corpus, "--output", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&both.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);

    let empty = write(dir.path(), "e.csv", "");
    let o = kh(&["probe", &empty]);
    assert_eq!((code(&o), stdout(&o).lines().count()), (0, 1));

    let bad = write(dir.path(), "b.csv", &format!("3_1,{RIGHT_TREFOIL}\n4_1,PD[X(4,2,5\n"));
    let o = kh(&["probe", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&kh(&["probe", "/no/such/corpus"])), 2);
}

#[test]
fn invariance_contract() {
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--moves", "R1:1:+"])), 0);
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--moves", "R2:1:3 ,R1:2:-\nR1:5:+ # kink"])), 0);
    let o = kh(&["invariance", "--pd", LEFT_TREFOIL, "--pd", FIGURE_EIGHT]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("differs at"));
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--pd", LEFT_TREFOIL])), 0);
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--pd", RIGHT_TREFOIL])), 4);
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--pd", "PD[X(1,2"])), 2);
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL, "--moves", "R7:1"])), 2);
    assert_eq!(code(&kh(&["invariance", "--pd", LEFT_TREFOIL])), 2);
}

#[test]
fn tqft_check_contract() {
    let a = kh(&["tqft-check", "--count", "1000", "--seed", "42"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), "words=1000 seed=42 passed=1000 failed=0\n");
    assert_eq!(code(&kh(&["tqft-check", "--count", "0"])), 2);
    let bad = kh(&["tqft-check", "--count", "200", "--seed", "3", "--corrupt"]);
    assert_eq!(code(&bad), 1);
    let text = stdout(&bad);
    assert!(text.contains("minimal failing subword: "), "{text}");
    assert_eq!(bad.stdout, kh(&["tqft-check", "--count", "200", "--seed", "3", "--corrupt"]).stdout);
}

#[test]
fn grading_contract() {
    assert_eq!(stdout(&kh(&["grading", "saddle"])), "A=0 M=-1/2 delta=1/2\n");
    assert_eq!(stdout(&kh(&["grading", "birth", "saddle"])), "A=0 M=0 delta=0\n");
    assert_eq!(stdout(&kh(&["grading"])), "A=0 M=0 delta=0\n");
    assert_eq!(stdout(&kh(&["grading", "--surface", "-1,0,0"])), "A=0 M=-1/2 delta=1/2\n");
    assert_eq!(stdout(&kh(&["grading", "--surface", "1,0,0"])), "A=0 M=1/2 delta=-1/2\n");
    let v: serde_json::Value = serde_json::from_slice(&kh(&["grading", "pos-stab", "--output", "json"]).stdout).unwrap();
    assert_eq!((v["alexander2"].as_i64(), v["maslov2"].as_i64()), (Some(1), Some(1)));
    assert_eq!(code(&kh(&["grading", "twist"])), 2);
}

#[test]
fn cache_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().display().to_string();
    let args = ["compute", "--pd", FIGURE_EIGHT, "--cache", &cache];
    let first = kh(&args);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = kh(&args);
    assert_eq!(first.stdout, second.stdout);
    let via_env = Command::new(env!("CARGO_BIN_EXE_kh"))
        .args(["compute", "--pd", FIGURE_EIGHT])
        .env("KH_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert_eq!(via_env.stdout, first.stdout);
    let moved = kh(&["compute", "--pd", FIGURE_EIGHT, "--basepoint", "3", "--cache", &cache]);
    assert_eq!(code(&moved), 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}
