#![allow(dead_code)]

use std::sync::Arc;

use fluxgate::{LogicalContext, QuditId, QuditRegister, RegisterOptions};
use fluxgroup::builders::{alternating, sl2_5, symmetric};
use fluxgroup::{find_qudit_params, simple_perfect_quotient, FiniteGroup, QuditPreference};
use fluxoracle::{extract_density, DensityMatrix, OracleError, PairCode};
use fluxsim::trial_rng;

pub fn a5() -> Arc<FiniteGroup> {
    Arc::new(alternating(5).unwrap())
}

pub fn register(d: u32, seed: u64) -> QuditRegister {
    let g = a5();
    let mut pref = QuditPreference::with_d(d);
    if d == 3 {
        pref.a = Some(g.parse_elem("(1 2 3)").unwrap());
    }
    let p = find_qudit_params(&g, &pref).unwrap();
    let ctx = LogicalContext::pure(g, p).unwrap();
    QuditRegister::new(ctx, trial_rng(seed, 0), RegisterOptions::default()).unwrap()
}

/// Coset register over S5 (`P = A5`, `N = 1`) or SL(2,5) (`P = G`, `N = Z2`).
pub fn coset_register(g: FiniteGroup, seed: u64, opts: RegisterOptions) -> QuditRegister {
    let cc = simple_perfect_quotient(&g).unwrap();
    let qp = find_qudit_params(&cc.quotient, &QuditPreference::with_d(2)).unwrap();
    let ctx = LogicalContext::coset(&cc, qp).unwrap();
    QuditRegister::new(ctx, trial_rng(seed, 0), opts).unwrap()
}

pub fn s5_register(seed: u64) -> QuditRegister {
    coset_register(symmetric(5).unwrap(), seed, RegisterOptions::default())
}

pub fn sl25_register(seed: u64) -> QuditRegister {
    coset_register(sl2_5().unwrap(), seed, RegisterOptions::default())
}

/// Reduced logical density of `qs`; fails when any configuration leaves
/// the computational subspace.
pub fn density(reg: &QuditRegister, qs: &[QuditId]) -> Result<DensityMatrix, OracleError> {
    let ctx = reg.context();
    let decode = |x| ctx.classify(x).map(|(n, t)| (n, t as usize));
    let code = PairCode {
        d: reg.d(),
        decode: &decode,
    };
    extract_density(reg.system(), &reg.pairs(qs).unwrap(), &code)
}

pub fn in_subspace(reg: &QuditRegister, q: QuditId) -> bool {
    density(reg, &[q]).map(|r| (r.trace() - 1.0).abs() < 1e-9).unwrap_or(false)
}
