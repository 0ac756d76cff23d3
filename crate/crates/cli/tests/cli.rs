use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cascade_core::machines::{compose_cascade, equivalent, parse_machine, Machine};
use cascade_core::MealyMachine;

fn cascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = cascade(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn mealy(path: &Path) -> MealyMachine {
    match parse_machine(&fs::read_to_string(path).unwrap()).unwrap() {
        Machine::Mealy(m) => m,
        other => panic!("expected mealy, got {}", other.kind()),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimize_keeps_cascade_behaviour() {
    let dir = tempfile::tempdir().unwrap();
    let (h, t, out) = (dir.path().join("h.txt"), dir.path().join("t.txt"), dir.path().join("r.txt"));
    ok(&["generate", "random", "--states", "5", "--in", "2", "--out", "3", "--seed", "1", "-o", s(&h)]);
    ok(&["generate", "random", "--states", "6", "--in", "3", "--out", "2", "--seed", "2", "-o", s(&t)]);
    for method in ["proposed", "naive"] {
        ok(&["minimize", "--head", s(&h), "--tail", s(&t), "-o", s(&out), "--method", method]);
        let (hm, tm, rm) = (mealy(&h), mealy(&t), mealy(&out));
        assert!(rm.num_states() <= tm.num_states());
        assert!(equivalent(&compose_cascade(&hm, &tm).unwrap(), &compose_cascade(&hm, &rm).unwrap()).unwrap());
    }
}

#[test]
fn minimize_emits_cnf_files() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("cnf");
    fs::create_dir(&cnf).unwrap();
    let (h, t, out) = (dir.path().join("h.txt"), dir.path().join("t.txt"), dir.path().join("r.txt"));
    ok(&["generate", "random", "--states", "3", "--in", "2", "--out", "2", "--seed", "3", "-o", s(&h)]);
    ok(&["generate", "random", "--states", "4", "--in", "2", "--out", "2", "--seed", "4", "-o", s(&t)]);
    ok(&["minimize", "--head", s(&h), "--tail", s(&t), "-o", s(&out), "--method", "naive", "--emit-cnf", s(&cnf)]);
    let files: Vec<_> = fs::read_dir(&cnf).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in files {
        assert!(fs::read_to_string(&f).unwrap().lines().any(|l| l.starts_with("p cnf ")));
    }
}

#[test]
fn feasible_reports_witness_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (h, m) = (dir.path().join("h.txt"), dir.path().join("m.txt"));
    // A constant head hides its input, so the identity model cannot be met.
    fs::write(&h, "type mealy\ninputs a b\noutputs c\nstates s\ninitial s\ntrans s a s c\ntrans s b s c\n").unwrap();
    fs::write(&m, "type mealy\ninputs a b\noutputs x y\nstates s\ninitial s\ntrans s a s x\ntrans s b s y\n").unwrap();
    let out = cascade(&["feasible", "--head", s(&h), "--model", s(&m)]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("infeasible"));
    assert_eq!(text.lines().count(), 3);

    let out = ok(&["feasible", "--head", s(&h), "--model", s(&h)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "feasible");
}

#[test]
fn split_then_synthesize() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    ok(&["generate", "exp-family", "--n", "1", "-o", s(&p("om.txt"))]);
    ok(&["generate", "split", "--om", s(&p("om.txt")), "-o-head", s(&p("h.txt")), "-o-model", s(&p("m.txt"))]);
    let (hp, mp, tp) = (p("h.txt"), p("m.txt"), p("t.txt"));
    for minimal in [false, true] {
        let mut args = vec!["synthesize", "--head", s(&hp), "--model", s(&mp), "-o", s(&tp)];
        if minimal {
            args.push("--minimal");
        }
        ok(&args);
        let (h, m, t) = (mealy(&hp), mealy(&mp), mealy(&tp));
        assert!(equivalent(&compose_cascade(&h, &t).unwrap(), &m).unwrap());
    }
}

#[test]
fn np_reduction_writes_both_machines() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    fs::write(
        p("n.txt"),
        "type om\ninputs a b\noutputs 0 1\nstates p q\ninitial p\ntrans p a { q } 1\ntrans q b { p } 0\n",
    )
    .unwrap();
    ok(&["generate", "np-reduction", "--om", s(&p("n.txt")), "-o-head", s(&p("h.txt")), "-o-tail", s(&p("t.txt"))]);
    let (h, t) = (mealy(&p("h.txt")), mealy(&p("t.txt")));
    assert_eq!(h.outputs().len(), t.inputs().len());
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    ok(&["bench", "bimodal", "--count", "3", "--min", "3", "--max", "5", "--alpha", "2", "-o", s(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    ok(&["bench", "compare", "--sizes", "3", "--seeds", "0..1", "--alpha", "2", "--timeout", "30", "-o", s(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("proposed") && text.contains("naive"));
}

#[test]
fn malformed_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    fs::write(&h, "type mealy\ninputs a\noutputs x\nstates s\ninitial s\n").unwrap();
    let out = cascade(&["minimize", "--head", s(&h), "--tail", s(&h), "-o", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
}
