use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grinblat"))
}

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child =
        bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn tmp(name: &str, content: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grinblat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn lower_bound_family_has_no_matching() {
    let g = run(&["gen", "lower-bound", "4"], b"");
    assert_eq!(g.status.code(), Some(0));
    let e = run(&["exact"], &g.stdout);
    assert_eq!(e.status.code(), Some(1));
}

#[test]
fn random_instance_solves_and_verifies() {
    let g = run(&["gen", "random", "50", "--c", "5000", "--seed", "7"], b"");
    assert_eq!(g.status.code(), Some(0));
    let s = run(&["solve", "--telemetry"], &g.stdout);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert_eq!(String::from_utf8(s.stdout.clone()).unwrap().lines().count(), 50);
    assert!(String::from_utf8_lossy(&s.stderr).contains("\"phase_reached\""));
    let inst = tmp("r50.txt", &g.stdout);
    let good = tmp("r50.m", &s.stdout);
    let v = run(&["verify", inst.to_str().unwrap(), good.to_str().unwrap()], b"");
    assert_eq!(v.status.code(), Some(0));
    // swap the elements of two relations
    let text = String::from_utf8(s.stdout).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let first: Vec<&str> = lines[0].split(' ').collect();
    let second: Vec<&str> = lines[1].split(' ').collect();
    let (l0, l1) = (format!("1 {} {}", second[1], second[2]), format!("2 {} {}", first[1], first[2]));
    lines[0] = l0;
    lines[1] = l1;
    let bad = tmp("r50.bad", (lines.join("\n") + "\n").as_bytes());
    let v = run(&["verify", inst.to_str().unwrap(), bad.to_str().unwrap()], b"");
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stderr).contains("invalid matching"));
}

#[test]
fn solve_is_byte_reproducible() {
    let g = run(&["gen", "random", "40", "--c", "100", "--seed", "3"], b"");
    let a = run(&["solve", "--c", "100"], &g.stdout);
    let b = run(&["solve", "--c", "100"], &g.stdout);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(run(&["bogus"], b"").status.code(), Some(64));
    assert_eq!(run(&["gen", "lower-bound", "x"], b"").status.code(), Some(64));
    assert_eq!(run(&["--help"], b"").status.code(), Some(0));
    assert_eq!(run(&["--version"], b"").status.code(), Some(0));
    let e = run(&["exact"], b"grinblat 1 1 5\nrel 1 1\n4 4\n");
    assert_eq!(e.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&e.stderr).contains("line 3"));
}

#[test]
fn search_reports_both_outcomes() {
    let s = run(&["search", "2", "4", "--max-ground", "8"], b"");
    assert_eq!(s.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&s.stdout).starts_with("grinblat 1 2 "));
    let s = run(&["search", "2", "5", "--max-ground", "8"], b"");
    assert_eq!(s.status.code(), Some(1));
}

#[test]
fn planted_writes_its_matching() {
    let m = std::env::temp_dir().join(format!("grinblat-cli-{}-planted.m", std::process::id()));
    let g = run(&["gen", "planted", "40", "--c", "0", "--seed", "1", "--matching", m.to_str().unwrap()], b"");
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&m).unwrap().lines().count(), 39);
    assert_eq!(run(&["gen", "planted", "10"], b"").status.code(), Some(64));
}

#[test]
fn experiment_writes_csv() {
    let cfg = tmp(
        "exp.toml",
        b"master_seed = 4\ntrials = 2\nn = [30]\nc = [0]\ngenerators = [\"uniform\", \"planted\"]\ntiming = false\n",
    );
    let out = run(&["experiment", cfg.to_str().unwrap()], b"");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("generator,n,c,trials"));
    let bad = tmp("bad.toml", b"trials = 1\n");
    assert_eq!(run(&["experiment", bad.to_str().unwrap()], b"").status.code(), Some(2));
}
