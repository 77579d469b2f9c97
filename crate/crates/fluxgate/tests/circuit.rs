mod common;

use common::*;
use fluxgate::{parse_circuit, run_circuit, CircuitOp, GateError};

#[test]
fn parses_all_ops() {
    let text = "# demo\nenc 0 1\nenc 1 1\nenc 2 0\ntof 0 1 2\ncsum 0 2\nx 2\nz 1  # comment\nmz 2\nmx 1\nmxz 1 1 1\n";
    let ops = parse_circuit(text).unwrap();
    assert_eq!(ops.len(), 10);
    assert_eq!(ops[0], (2, CircuitOp::Enc(0, 1)));
    assert_eq!(ops[3].1, CircuitOp::Tof(0, 1, 2));
    assert_eq!(ops[9], (11, CircuitOp::Mxz(1, 1, 1)));
}

#[test]
fn reports_bad_lines() {
    assert!(matches!(parse_circuit("enc 0\n"), Err(GateError::Parse { line: 1, .. })));
    assert!(matches!(parse_circuit("\nfoo 1\n"), Err(GateError::Parse { line: 2, .. })));
    assert!(matches!(parse_circuit("x -1\n"), Err(GateError::Parse { line: 1, .. })));
    let mut reg = register(2, 1);
    let ops = parse_circuit("enc 0 0\ncsum 0 4\n").unwrap();
    assert!(matches!(run_circuit(&mut reg, &ops), Err(GateError::Parse { line: 2, .. })));
}

#[test]
fn runs_a_toffoli_circuit() {
    let mut reg = register(3, 4);
    let ops = parse_circuit("enc 0 2\nenc 1 2\nenc 2 1\ntof 0 1 2\nmz 2\ncsum 0 1\nmz 1\nx 0\nmz 0\n").unwrap();
    let lines = run_circuit(&mut reg, &ops).unwrap();
    assert_eq!(lines, vec!["mz 2 -> 2", "mz 1 -> 1", "mz 0 -> 0"]);
    assert!(!reg.has_xone());
}

#[test]
fn z_gates_bootstrap_on_demand() {
    let mut reg = register(2, 6);
    let ops = parse_circuit("enc 0 1\nz 0\nz 0\nmz 0\nmxz 0 1 1\n").unwrap();
    let lines = run_circuit(&mut reg, &ops).unwrap();
    assert!(reg.has_xone());
    assert!(reg.y_reference().is_some());
    assert_eq!(lines[0], "mz 0 -> 1");
    assert_eq!(lines.len(), 2);
}
