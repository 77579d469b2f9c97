#![allow(dead_code)]

use std::sync::Arc;

use fluxgate::{LogicalContext, QuditId, QuditRegister, RegisterOptions};
use fluxgroup::builders::alternating;
use fluxgroup::{find_qudit_params, FiniteGroup, QuditParams, QuditPreference};
use fluxoracle::{extract_density, extract_logical_state, DenseState, DensityMatrix, PairCode};
use fluxsim::trial_rng;

pub fn a5() -> Arc<FiniteGroup> {
    Arc::new(alternating(5).unwrap())
}

/// d = 2: a = (12)(34), b = (345). d = 3: a = (123).
pub fn a5_params(g: &FiniteGroup, d: u32) -> QuditParams {
    let mut pref = QuditPreference::with_d(d);
    if d == 3 {
        pref.a = Some(g.parse_elem("(1 2 3)").unwrap());
    }
    find_qudit_params(g, &pref).unwrap()
}

pub fn register_with(d: u32, seed: u64, trial: u64, opts: RegisterOptions) -> QuditRegister {
    let g = a5();
    let p = a5_params(&g, d);
    let ctx = LogicalContext::pure(g, p).unwrap();
    QuditRegister::new(ctx, trial_rng(seed, trial), opts).unwrap()
}

pub fn register(d: u32, seed: u64) -> QuditRegister {
    register_with(d, seed, 0, RegisterOptions::default())
}

pub fn extract(reg: &QuditRegister, qs: &[QuditId]) -> DenseState {
    let ctx = reg.context();
    let decode = |x| ctx.classify(x).map(|(n, t)| (n, t as usize));
    let code = PairCode {
        d: reg.d(),
        decode: &decode,
    };
    extract_logical_state(reg.system(), &reg.pairs(qs).unwrap(), &code).unwrap()
}

pub fn density(reg: &QuditRegister, qs: &[QuditId]) -> DensityMatrix {
    let ctx = reg.context();
    let decode = |x| ctx.classify(x).map(|(n, t)| (n, t as usize));
    let code = PairCode {
        d: reg.d(),
        decode: &decode,
    };
    extract_density(reg.system(), &reg.pairs(qs).unwrap(), &code).unwrap()
}

/// Which `x~r` the bootstrap settled on.
pub fn xone_index(reg: &QuditRegister) -> usize {
    let ctx = reg.context();
    let decode = |x| ctx.classify(x).map(|(n, t)| (n, t as usize));
    let code = PairCode {
        d: reg.d(),
        decode: &decode,
    };
    let s = extract_logical_state(reg.system(), &[reg.xone_pair().unwrap()], &code).unwrap();
    (0..reg.d())
        .find(|&r| fluxoracle::fidelity(&s, &DenseState::x_eigenstate(reg.d(), r)).unwrap() > 1.0 - 1e-9)
        .expect("x~1 reference is an X eigenstate")
}
