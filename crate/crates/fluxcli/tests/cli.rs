use std::path::PathBuf;
use std::process::{Command, Output};

use fluxgroup::builders::alternating;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fluxcli"))
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

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fluxcli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn group_reports() {
    let o = run(&["group", "(1 2 3 4 5);(1 2 3)"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for want in ["order: 60", "perfect: yes", "simple: yes", "classes: 5 sizes 1 20 15 12 12"] {
        assert!(s.contains(want), "{want} missing from\n{s}");
    }

    let s = stdout(&run(&["group", "(1 2)"]));
    assert!(s.contains("order: 2"));
    assert!(s.contains("solvable: yes"));
    assert!(s.contains("quotient: SolvableGroup"));

    let s = stdout(&run(&["group", "S5"]));
    assert!(s.contains("quotient: |P| = 60 |N| = 1 |P/N| = 60 perfect yes simple yes"), "{s}");
    let s = stdout(&run(&["--group", "S4", "group"]));
    assert!(s.contains("derived series: 24 > 12 > 4 > 1"), "{s}");
}

#[test]
fn group_parse_errors_carry_position() {
    let o = run(&["group", "(1 2 3);(1 x)"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 1, column"), "{e}");
}

#[test]
fn synth_toffoli_word() {
    let o = run(&["synth", "--toffoli"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("arity 2\n"));
    assert!(s.contains("# nodes 14 flattened length 14"), "{s}");
    assert!(s.contains("# basis pairs 4/4 [ok]"), "{s}");
    let s = stdout(&run(&["synth", "--toffoli", "--d", "3"]));
    assert!(s.contains("basis pairs 9/9 [ok]"), "{s}");
}

#[test]
fn synth_tables() {
    let g = alternating(5).unwrap();
    let identity: String = g.elements().iter().map(|p| format!("{p} -> ()\n")).collect();
    let path = scratch("identity.tab", &identity);
    let o = run(&["synth", "--table", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("flattened length 0"), "{s}");
    assert!(s.contains("exhaustive checks 60/60 [ok]"), "{s}");

    let partial = scratch("partial.tab", "(1 2 3) -> (3 4 5)\n");
    let o = run(&["synth", "--table", partial.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no entry for input"), "{}", stderr(&o));

    let bad = scratch("bad.tab", "(1 2 3) -> (3 4 5)\n(1 2 3) ; () -> ()\n");
    let o = run(&["synth", "--table", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["--seed", "5", "synth", "--random"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exhaustive checks 60/60 [ok]"));
}

#[test]
fn synth_writes_word_file() {
    let out = scratch("toffoli.word", "");
    let o = run(&["synth", "--toffoli", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let word = std::fs::read_to_string(&out).unwrap();
    let prog = fluxword::Program::from_dag_text(&word).unwrap();
    assert_eq!(prog.arity(), 2);
    assert!(stdout(&o).contains("basis pairs 4/4"));
}

#[test]
fn simulate_ancilla_fusion_frequency() {
    let f = scratch("anc.braid", "ancilla (3 4 5)\nancilla (3 5 4)\nfuse 0 2\n");
    let o = run(&["--trials", "4000", "--seed", "3", "simulate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("fuse 0 2 -> "), "{s}");
    let line = s.lines().find(|l| l.starts_with("fusion 0 vacuum")).unwrap();
    assert!(line.contains("analytic 0.050000"), "{line}");
    assert!(line.ends_with("[ok]"), "{line}");
}

#[test]
fn simulate_exchange_and_reverse() {
    let f = scratch(
        "xchg.braid",
        "vacpair (3 4 5)\nvacpair (1 2 3)\nxchg 1 ccw\nxchg 1 cw\nfuse 0 1\n",
    );
    let s = stdout(&run(&["--trials", "200", "simulate", f.to_str().unwrap()]));
    let line = s.lines().find(|l| l.starts_with("fusion 0 vacuum")).unwrap();
    assert!(line.contains("observed 1.000000 (200/200)"), "{line}");
}

/// The conjugated target flux is read back with a probe loop against an
/// ancilla carrying the expected value.
#[test]
fn simulate_pair_conjugation() {
    let g = alternating(5).unwrap();
    let a = g.parse_elem("(1 2 3)").unwrap();
    let t = g.parse_elem("(3 4 5)").unwrap();
    let expect = g.mul(g.mul(a, t), g.inv(a));
    let other = g.mul(g.mul(g.inv(a), t), a);
    assert_ne!(expect, other);
    let body = |y| {
        format!(
            "ancilla (1 2 3)\nancilla (3 4 5)\nconjpair 0 1 +1\nancilla {}\nprobe-new standard\nprobe-loop 3..4\nprobe-fuse\n",
            g.elem(y)
        )
    };
    let f = scratch("conj.braid", &body(expect));
    let s = stdout(&run(&["--trials", "100", "simulate", f.to_str().unwrap()]));
    assert!(s.contains("observed 1.000000 (100/100)"), "{s}");
    let f = scratch("conj-wrong.braid", &body(other));
    let s = stdout(&run(&["--trials", "100", "simulate", f.to_str().unwrap()]));
    assert!(!s.contains("observed 1.000000 (100/100)"), "{s}");
}

#[test]
fn simulate_reports_refusals_with_lines() {
    let f = scratch("bad.braid", "ancilla (1 2 3)\nvacpair (3 4 5)\nbogus 1\n");
    let o = run(&["simulate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn run_circuit_file() {
    let f = scratch("c.circ", "enc 0 1\nenc 1 1\nenc 2 0\ntof 0 1 2\nmz 2\n");
    let o = run(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("mz 2 -> 1"), "{}", stdout(&o));
}

#[test]
fn demos_pass_and_print_bands() {
    let o = run(&["demo", "toffoli", "--d", "2", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("basis agreements 8/8 [ok]"));

    let o = run(&["demo", "measure-z", "--trials", "3000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("one-copy vacuum rate: observed"), "{s}");
    assert!(s.contains("analytic 0.050000 band"), "{s}");

    let o = run(&["demo", "distill", "--budget", "small"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("warning: budget exhausted"), "{}", stdout(&o));
}

#[test]
fn demo_fails_when_bound_fails() {
    // Every vacuum pair is charged, so no x~0 attempt succeeds.
    let o = run(&["--sector-charged-weight", "1", "demo", "xzero", "--trials", "300"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["demo", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["synth"]).status.code(), Some(2));
    assert_eq!(run(&["--sector-charged-weight", "2", "demo", "xzero"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_config_gives_identical_output() {
    let a = scratch("t1.txt", "");
    let b = scratch("t2.txt", "");
    let args = |p: &PathBuf| {
        vec![
            "--seed".to_string(),
            "9".into(),
            "--trials".into(),
            "400".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
            "demo".into(),
            "xzero".into(),
        ]
    };
    let o1 = bin().args(args(&a)).output().unwrap();
    let o2 = bin().args(args(&b)).output().unwrap();
    assert_eq!(o1.stdout, o2.stdout);
    let (t1, t2) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!t1.is_empty());
    assert_eq!(t1, t2);
    let o3 = run(&["--seed", "10", "--trials", "400", "demo", "xzero"]);
    assert_ne!(o1.stdout, o3.stdout);
}

#[test]
fn accept_single_criterion() {
    let o = run(&["accept", "--only", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("criterion 5 group theorems: PASS\n"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("criterion")).count(), 1);
}
