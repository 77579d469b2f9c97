//! Logical circuit files, one operation per line:
//!
//! ```text
//! enc <q> <digit>
//! tof <q1> <q2> <q3>
//! csum <qc> <qt>
//! x <q>
//! z <q>
//! mz <q>
//! mx <q>
//! mxz <q> <a> <b>
//! ```
//!
//! Qudit labels are circuit-local integers; `enc` binds a label.

use std::collections::HashMap;

use crate::register::{QuditId, QuditRegister};
use crate::GateError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitOp {
    Enc(usize, u32),
    Tof(usize, usize, usize),
    Csum(usize, usize),
    X(usize),
    Z(usize),
    Mz(usize),
    Mx(usize),
    Mxz(usize, u32, u32),
}

pub fn parse_circuit(text: &str) -> Result<Vec<(usize, CircuitOp)>, GateError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let err = |msg: &str| GateError::Parse {
            line,
            msg: msg.to_string(),
        };
        let nums: Vec<u64> = words[1..]
            .iter()
            .map(|w| w.parse::<u64>().map_err(|_| err(&format!("bad number '{w}'"))))
            .collect::<Result<_, _>>()?;
        let want = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(err(&format!("'{}' takes {n} arguments", words[0])))
            }
        };
        let q = |k: usize| nums[k] as usize;
        let op = match words[0] {
            "enc" => {
                want(2)?;
                CircuitOp::Enc(q(0), nums[1] as u32)
            }
            "tof" => {
                want(3)?;
                CircuitOp::Tof(q(0), q(1), q(2))
            }
            "csum" => {
                want(2)?;
                CircuitOp::Csum(q(0), q(1))
            }
            "x" => {
                want(1)?;
                CircuitOp::X(q(0))
            }
            "z" => {
                want(1)?;
                CircuitOp::Z(q(0))
            }
            "mz" => {
                want(1)?;
                CircuitOp::Mz(q(0))
            }
            "mx" => {
                want(1)?;
                CircuitOp::Mx(q(0))
            }
            "mxz" => {
                want(3)?;
                CircuitOp::Mxz(q(0), nums[1] as u32, nums[2] as u32)
            }
            other => return Err(err(&format!("unknown op '{other}'"))),
        };
        out.push((line, op));
    }
    Ok(out)
}

/// Runs a circuit; returns one line per measurement. `z`, `mx` and `mxz`
/// bootstrap the `x~1` reference on first use.
pub fn run_circuit(reg: &mut QuditRegister, ops: &[(usize, CircuitOp)]) -> Result<Vec<String>, GateError> {
    let mut labels: HashMap<usize, QuditId> = HashMap::new();
    let mut lines = Vec::new();
    for (line, op) in ops {
        let at = |e: GateError| match e {
            GateError::Parse { .. } => e,
            other => GateError::Parse {
                line: *line,
                msg: other.to_string(),
            },
        };
        let get = |l: usize| {
            labels.get(&l).copied().ok_or(GateError::Parse {
                line: *line,
                msg: format!("qudit {l} not encoded"),
            })
        };
        let needs_x1 = matches!(op, CircuitOp::Z(_) | CircuitOp::Mx(_) | CircuitOp::Mxz(..));
        if needs_x1 && !reg.has_xone() {
            reg.bootstrap_xone().map_err(at)?;
        }
        if reg.d() == 2 && matches!(op, CircuitOp::Mxz(..)) && reg.y_reference().is_none() {
            reg.bootstrap_iy().map_err(at)?;
        }
        match *op {
            CircuitOp::Enc(l, n) => {
                let q = reg.encode(n).map_err(at)?;
                if let Some(old) = labels.insert(l, q) {
                    reg.release(old).map_err(at)?;
                }
            }
            CircuitOp::Tof(a, b, c) => reg.toffoli(get(a)?, get(b)?, get(c)?).map_err(at)?,
            CircuitOp::Csum(a, b) => reg.controlled_sum(get(a)?, get(b)?).map_err(at)?,
            CircuitOp::X(a) => reg.gate_x(get(a)?).map_err(at)?,
            CircuitOp::Z(a) => reg.gate_z(get(a)?).map_err(at)?,
            CircuitOp::Mz(a) => {
                let o = reg.measure_z(get(a)?, None).map_err(at)?;
                lines.push(format!("mz {a} -> {}", o.digit));
            }
            CircuitOp::Mx(a) => {
                let o = reg.measure_x(get(a)?, None).map_err(at)?;
                lines.push(format!("mx {a} -> {}", o.digit));
            }
            CircuitOp::Mxz(a, x, z) => {
                if reg.d() == 2 && reg.y_reference().is_none() {
                    reg.bootstrap_iy().map_err(at)?;
                }
                let j = reg.measure_xazb(get(a)?, x, z).map_err(at)?;
                lines.push(format!("mxz {a} {x} {z} -> {j}"));
            }
        }
    }
    Ok(lines)
}
