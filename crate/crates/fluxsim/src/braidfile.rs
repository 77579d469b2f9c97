//! Text braid programs, one operation per line:
//!
//! ```text
//! vacpair <class-rep-cycles>
//! ancilla <cycles>
//! xchg <pos> cw|ccw
//! conjpair <actor-pair> <target-pair> +1|-1
//! fuse <i> <j>
//! probe-new standard|trivial
//! probe-loop <i>..<j>
//! probe-fuse
//! ```
//!
//! Pairs are numbered from 0 in creation order; `fuse` and `probe-loop`
//! take line positions; `probe-loop` and `probe-fuse` act on the newest
//! probe. `#` starts a comment.

use std::sync::Arc;

use fluxgroup::{ElemId, FiniteGroup};

use crate::probe::{ProbeId, Representation};
use crate::system::{AnyonSystem, Direction, PairId, SectorModel};
use crate::SimError;

#[derive(Clone, Debug, PartialEq)]
pub enum BraidOp {
    VacPair(ElemId),
    Ancilla(ElemId),
    Exchange(usize, Direction),
    ConjPair { actor: usize, target: usize, power: i32 },
    Fuse(usize, usize),
    ProbeNew(String),
    ProbeLoop(usize, usize),
    ProbeFuse,
}

fn perr(line: usize, msg: impl Into<String>) -> SimError {
    SimError::Parse {
        line,
        msg: msg.into(),
    }
}

fn num(line: usize, s: Option<&str>) -> Result<usize, SimError> {
    let s = s.ok_or_else(|| perr(line, "missing number"))?;
    s.parse().map_err(|_| perr(line, format!("bad number '{s}'")))
}

/// Parses a braid program; returns `(line number, op)` pairs.
pub fn parse_braid_program(text: &str, g: &FiniteGroup) -> Result<Vec<(usize, BraidOp)>, SimError> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (cmd, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let mut words = rest.split_whitespace();
        let elem = |s: &str| g.parse_elem(s).map_err(|e| perr(line, e.to_string()));
        let op = match cmd {
            "vacpair" => BraidOp::VacPair(elem(rest)?),
            "ancilla" => BraidOp::Ancilla(elem(rest)?),
            "xchg" => {
                let pos = num(line, words.next())?;
                let dir = match words.next() {
                    Some("cw") => Direction::Cw,
                    Some("ccw") => Direction::Ccw,
                    other => return Err(perr(line, format!("bad direction {other:?}"))),
                };
                BraidOp::Exchange(pos, dir)
            }
            "conjpair" => {
                let actor = num(line, words.next())?;
                let target = num(line, words.next())?;
                let power = match words.next() {
                    Some("+1") | Some("1") => 1,
                    Some("-1") => -1,
                    other => return Err(perr(line, format!("bad power {other:?}"))),
                };
                BraidOp::ConjPair { actor, target, power }
            }
            "fuse" => BraidOp::Fuse(num(line, words.next())?, num(line, words.next())?),
            "probe-new" => match words.next() {
                Some(n @ ("standard" | "trivial")) => BraidOp::ProbeNew(n.to_string()),
                other => return Err(perr(line, format!("unknown representation {other:?}"))),
            },
            "probe-loop" => {
                let r = words.next().ok_or_else(|| perr(line, "missing range"))?;
                let (a, b) = r.split_once("..").ok_or_else(|| perr(line, "range must be i..j"))?;
                BraidOp::ProbeLoop(num(line, Some(a))?, num(line, Some(b))?)
            }
            "probe-fuse" => BraidOp::ProbeFuse,
            other => return Err(perr(line, format!("unknown op '{other}'"))),
        };
        if cmd != "vacpair" && cmd != "ancilla" && words.next().is_some() {
            return Err(perr(line, "trailing tokens"));
        }
        ops.push((line, op));
    }
    Ok(ops)
}

/// Runs a parsed program; errors carry the offending line number.
pub fn run_braid_program(sys: &mut AnyonSystem, ops: &[(usize, BraidOp)]) -> Result<(), SimError> {
    run_braid_program_with(sys, ops, 0.0)
}

/// Like [`run_braid_program`], with weight `charged` on the charged sector
/// of every `vacpair`.
pub fn run_braid_program_with(
    sys: &mut AnyonSystem,
    ops: &[(usize, BraidOp)],
    charged: f64,
) -> Result<(), SimError> {
    let mut pairs: Vec<PairId> = Vec::new();
    let mut probes: Vec<ProbeId> = Vec::new();
    let g = sys.group_arc().clone();
    for (line, op) in ops {
        let at = |e: SimError| SimError::AtLine {
            line: *line,
            source: Box::new(e),
        };
        let pos_anyon = |sys: &AnyonSystem, p: usize| {
            sys.line()
                .get(p)
                .copied()
                .ok_or(SimError::PositionOutOfRange(p))
        };
        match op {
            BraidOp::VacPair(r) => {
                let model = SectorModel {
                    magnetic: vec![(*r, 1.0 - charged)],
                    charged,
                };
                pairs.push(sys.create_vacuum_pair(&model).map_err(at)?)
            }
            BraidOp::Ancilla(x) => pairs.push(sys.create_flux_ancilla(*x)),
            BraidOp::Exchange(p, d) => sys.exchange(*p, *d).map_err(at)?,
            BraidOp::ConjPair { actor, target, power } => {
                let a = *pairs.get(*actor).ok_or_else(|| at(perr(*line, "no such pair")))?;
                let t = *pairs.get(*target).ok_or_else(|| at(perr(*line, "no such pair")))?;
                sys.conjugate_pair(a, t, *power).map_err(at)?;
            }
            BraidOp::Fuse(i, j) => {
                let a = pos_anyon(sys, *i).map_err(at)?;
                let b = pos_anyon(sys, *j).map_err(at)?;
                sys.fuse(a, b).map_err(at)?;
            }
            BraidOp::ProbeNew(name) => {
                let rep = if name == "trivial" {
                    Representation::trivial(&g)
                } else {
                    Representation::standard(&g).map_err(at)?
                };
                probes.push(sys.create_charge_probe(Arc::new(rep)));
            }
            BraidOp::ProbeLoop(i, j) => {
                let p = *probes.last().ok_or_else(|| at(perr(*line, "no probe")))?;
                let ids = (*i..=*j).map(|k| pos_anyon(sys, k)).collect::<Result<Vec<_>, _>>().map_err(at)?;
                sys.encircle_with_probe(p, &ids).map_err(at)?;
            }
            BraidOp::ProbeFuse => {
                let p = probes.pop().ok_or_else(|| at(perr(*line, "no probe")))?;
                sys.fuse_probe(p).map_err(at)?;
            }
        }
    }
    Ok(())
}
