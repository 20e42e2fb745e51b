use std::path::Path;
use std::process::{Command, Output};

use gwasym::recursions::p2_genus0;
use gwasym_cli::cache::{self, Format};
use serde_json::Value;

fn run(args: &[&str], cache_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwasym"))
        .args(args)
        .env("GWASYM_CACHE_DIR", cache_dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn compute_writes_to_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compute", "p2", "--dmax", "25"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let path = dir.path().join("p2-g0-d25.txt");
    assert_eq!(cache::read(&path).unwrap(), p2_genus0(25));
    let r = report(&out);
    assert_eq!(r["report_version"], 1);
    assert_eq!(r["command"][0], "compute");
    assert!(r["runtime"]["wall_seconds"].is_number());
}

#[test]
fn explicit_out_path_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sub.csv");
    let out = run(&["compute", "p2", "--dmax", "10", "--format", "csv", "--out", target.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("# columns=d,n,N"));
    assert_eq!(cache::parse(&text).unwrap(), p2_genus0(10));
}

#[test]
fn space_genus_one_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compute", "p3", "--genus", "1", "--dmax", "3"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn doubled_entry_fails_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let table = p2_genus0(30);
    let bad = table.with_entry(7, 0, table.n(7).unwrap().clone() * 2u32).unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, cache::serialize(&bad, Format::Cache)).unwrap();
    let out = run(&["bounds", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("FAIL"), "{}", stderr(&out));
    assert_eq!(report(&out)["results"]["all_pass"], false);
}

#[test]
fn bounds_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g0.txt");
    std::fs::write(&path, cache::serialize(&p2_genus0(40), Format::Cache)).unwrap();
    let strip = |o: &Output| {
        let mut v = report(o);
        v.as_object_mut().unwrap().remove("runtime");
        v
    };
    let a = run(&["bounds", path.to_str().unwrap()], dir.path());
    let b = run(&["bounds", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn unreadable_and_malformed_caches_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(&["bounds", dir.path().join("nope.txt").to_str().unwrap()], dir.path());
    assert_eq!(code(&missing), 3);
    let junk = dir.path().join("junk.txt");
    std::fs::write(&junk, "# target=p2\n1\t1/2\n").unwrap();
    assert_eq!(code(&run(&["bounds", junk.to_str().unwrap()], dir.path())), 3);
}

#[test]
fn short_table_has_no_singularity_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g0.txt");
    std::fs::write(&path, cache::serialize(&p2_genus0(20), Format::Cache)).unwrap();
    let out = run(&["singularity", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 3);
    assert!(!stderr(&out).is_empty());
}

#[test]
fn singularity_needs_genus_zero_plane_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compute", "p2", "--genus", "1", "--dmax", "10"], dir.path());
    assert_eq!(code(&out), 0);
    let g1 = dir.path().join("p2-g1-d10.txt");
    assert_eq!(code(&run(&["singularity", g1.to_str().unwrap()], dir.path())), 2);
    let few = run(&["singularity", g1.to_str().unwrap(), "--coeffs", "3"], dir.path());
    assert_eq!(code(&few), 2);
}

#[test]
fn monotone_suite_with_models() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        run(&["verify", "--suite", "monotone", "--model", "1,0,1", "--model", "1/2,3,2", "--dmax", "60"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"monotone_from\""), "{text}");
    let bad = run(&["verify", "--suite", "monotone", "--model", "0,1,1"], dir.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn rays_reject_points_off_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["compute", "p3", "--dmax", "6"], dir.path())), 0);
    let p3 = dir.path().join("p3-g0-d6.txt");
    let ok = run(&["verify", p3.to_str().unwrap(), "--suite", "rays"], dir.path());
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let off = run(&["verify", p3.to_str().unwrap(), "--suite", "rays", "--ray", "1,3"], dir.path());
    assert_eq!(code(&off), 2);
}

#[test]
fn unknown_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&run(&["compute", "p4", "--dmax", "3"], dir.path())), 2);
}
