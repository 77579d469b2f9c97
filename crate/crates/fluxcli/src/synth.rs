//! `synth`: product-form programs from tables, plus their verification.
//!
//! Table files hold one entry per line, inputs separated by `;`:
//!
//! ```text
//! # f(x, y)
//! (1 2 3) ; (3 4 5) -> (1 2)(3 4)
//! () ; () -> ()
//! ```
//!
//! `()`, `1` and `e` denote the identity.

use std::collections::HashMap;

use fluxgroup::{ElemId, FiniteGroup, QuditParams};
use fluxword::{synthesize, toffoli_program, Evaluator, Program, WordError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, Report};

/// Exhaustive verification up to this many inputs, sampling beyond.
pub const EXHAUSTIVE_LIMIT: usize = 1_000_000;
pub const SAMPLES: usize = 10_000;

pub fn parse_elem(g: &FiniteGroup, s: &str) -> Result<ElemId, fluxgroup::GroupError> {
    match s.trim() {
        "()" | "1" | "e" => Ok(g.identity()),
        t => g.parse_elem(t),
    }
}

/// Value table: arity and entries keyed by input tuples.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub arity: usize,
    pub entries: HashMap<Vec<ElemId>, ElemId>,
}

impl Table {
    pub fn get(&self, xs: &[ElemId]) -> Option<ElemId> {
        self.entries.get(xs).copied()
    }
}

pub fn parse_table(text: &str, g: &FiniteGroup) -> Result<Table, WordError> {
    let mut table = Table::default();
    let mut arity = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| WordError::Parse { line, msg };
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| err("expected 'inputs -> output'".into()))?;
        let inputs = lhs
            .split(';')
            .map(|s| parse_elem(g, s).map_err(|e| err(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let out = parse_elem(g, rhs).map_err(|e| err(e.to_string()))?;
        match arity {
            None => arity = Some(inputs.len()),
            Some(k) if k != inputs.len() => {
                return Err(err(format!("{} inputs, earlier lines have {k}", inputs.len())));
            }
            _ => {}
        }
        if let Some(prev) = table.entries.insert(inputs, out) {
            if prev != out {
                return Err(err("conflicting entry".into()));
            }
        }
    }
    table.arity = arity.ok_or(WordError::Parse {
        line: 0,
        msg: "empty table".into(),
    })?;
    Ok(table)
}

/// Random table on `G^arity`.
pub fn random_table(g: &FiniteGroup, arity: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut entries = HashMap::new();
    let mut tuple = vec![0 as ElemId; arity];
    for idx in 0..n.pow(arity as u32) {
        let mut r = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = (r % n) as ElemId;
            r /= n;
        }
        entries.insert(tuple.clone(), rng.gen_range(0..n) as ElemId);
    }
    Table { arity, entries }
}

pub fn synthesize_table(g: &FiniteGroup, table: &Table) -> Result<Program, WordError> {
    synthesize(g, table.arity, &|xs: &[ElemId]| table.get(xs))
}

/// Mismatches of `prog` against `table` over `G^arity`, exhaustive when
/// small enough, sampled otherwise. Returns `(checked, mismatches, exhaustive)`.
pub fn verify_table(
    g: &FiniteGroup,
    prog: &Program,
    table: &Table,
    seed: u64,
) -> Result<(usize, usize, bool), WordError> {
    let ev = Evaluator::new(prog, g)?;
    let n = g.order();
    let total = n.checked_pow(table.arity as u32).unwrap_or(usize::MAX);
    let mut bad = 0;
    let mut buf = Vec::new();
    let mut tuple = vec![0 as ElemId; table.arity];
    if total <= EXHAUSTIVE_LIMIT {
        for idx in 0..total {
            let mut r = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = (r % n) as ElemId;
                r /= n;
            }
            let want = table.get(&tuple).ok_or_else(|| WordError::MissingEntry(tuple.clone()))?;
            bad += usize::from(ev.eval_with(&tuple, &mut buf) != want);
        }
        return Ok((total, bad, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLES {
        for slot in tuple.iter_mut() {
            *slot = rng.gen_range(0..n) as ElemId;
        }
        let want = table.get(&tuple).ok_or_else(|| WordError::MissingEntry(tuple.clone()))?;
        bad += usize::from(ev.eval_with(&tuple, &mut buf) != want);
    }
    Ok((SAMPLES, bad, false))
}

/// Toffoli conjugating function checked on all `d^2` basis pairs.
pub fn toffoli_check(g: &FiniteGroup, params: &QuditParams) -> Result<(Program, usize, usize), WordError> {
    let prog = toffoli_program(g, params)?;
    let ev = Evaluator::new(&prog, g)?;
    let d = params.d;
    let mut ok = 0;
    for i in 0..d {
        for j in 0..d {
            let v = ev.eval(&[params.basis_flux(g, i), params.basis_flux(g, j)]);
            ok += usize::from(v == g.pow(params.a, ((i * j) % d) as i64));
        }
    }
    Ok((prog, ok, (d * d) as usize))
}

fn length_line(prog: &Program) -> String {
    format!("nodes {} flattened length {}", prog.size(), prog.flat_len())
}

/// What to synthesize.
pub enum SynthSource<'a> {
    Toffoli(&'a QuditParams),
    Table(&'a str),
    Random { arity: usize, seed: u64 },
}

/// Program text and a verification summary.
pub fn cmd_synth(g: &FiniteGroup, src: SynthSource) -> Result<(String, Report), CliError> {
    let mut r = Report::new();
    let prog = match src {
        SynthSource::Toffoli(params) => {
            let (prog, ok, n) = toffoli_check(g, params)?;
            r.line(format!(
                "toffoli d={} a={} b={}",
                params.d,
                g.elem(params.a),
                g.elem(params.b)
            ));
            r.line(length_line(&prog));
            r.check(ok == n, format!("basis pairs {ok}/{n}"));
            prog
        }
        SynthSource::Table(text) => {
            let table = parse_table(text, g)?;
            let prog = synthesize_table(g, &table)?;
            let (n, bad, exhaustive) = verify_table(g, &prog, &table, 0)?;
            r.line(format!("table arity {} entries {}", table.arity, table.entries.len()));
            r.line(length_line(&prog));
            let how = if exhaustive { "exhaustive" } else { "sampled" };
            r.check(bad == 0, format!("{how} checks {}/{n}", n - bad));
            prog
        }
        SynthSource::Random { arity, seed } => {
            let table = random_table(g, arity, seed);
            let prog = synthesize_table(g, &table)?;
            let (n, bad, exhaustive) = verify_table(g, &prog, &table, seed)?;
            r.line(format!("random table arity {arity} seed {seed}"));
            r.line(length_line(&prog));
            let how = if exhaustive { "exhaustive" } else { "sampled" };
            r.check(bad == 0, format!("{how} checks {}/{n}", n - bad));
            prog
        }
    };
    Ok((prog.to_dag_text(), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluxgroup::builders::alternating;
    use proptest::prelude::*;

    fn table_text(g: &FiniteGroup, t: &Table) -> String {
        let mut keys: Vec<_> = t.entries.keys().cloned().collect();
        keys.sort();
        keys.iter()
            .map(|k| {
                let lhs: Vec<String> = k.iter().map(|&x| g.elem(x).to_string()).collect();
                format!("{} -> {}\n", lhs.join(" ; "), g.elem(t.entries[k]))
            })
            .collect()
    }

    #[test]
    fn parse_errors_name_the_line() {
        let g = alternating(5).unwrap();
        let e = parse_table("# c\n() -> ()\n(1 2 3) -> (1 2)\n", &g).unwrap_err();
        assert!(matches!(e, WordError::Parse { line: 3, .. }), "{e}");
        let e = parse_table("() -> ()\n() ; () -> ()\n", &g).unwrap_err();
        assert!(matches!(e, WordError::Parse { line: 2, .. }));
        let e = parse_table("e -> ()\n1 -> (1 2 3)\n", &g).unwrap_err();
        assert!(matches!(e, WordError::Parse { line: 2, .. }));
        assert!(parse_table("# nothing\n", &g).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn printed_tables_round_trip(seed in any::<u64>()) {
            let g = alternating(5).unwrap();
            let t = random_table(&g, 1, seed);
            let back = parse_table(&table_text(&g, &t), &g).unwrap();
            prop_assert_eq!(back.arity, 1);
            prop_assert_eq!(back.entries, t.entries);
        }

        #[test]
        fn random_unary_tables_synthesize(seed in any::<u64>()) {
            let g = alternating(5).unwrap();
            let t = random_table(&g, 1, seed);
            let prog = synthesize_table(&g, &t).unwrap();
            prop_assert_eq!(verify_table(&g, &prog, &t, seed).unwrap(), (60, 0, true));
        }
    }
}
