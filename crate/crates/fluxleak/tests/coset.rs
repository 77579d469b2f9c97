mod common;

use common::*;
use fluxgate::{GateError, LogicalContext, QuditRegister, RegisterOptions};
use fluxgroup::builders::symmetric;
use fluxgroup::{find_qudit_params, simple_perfect_quotient, QuditParams, QuditPreference};
use fluxleak::{incomplete_swap, leakage_correct_general, prepare_rho_xzero, LeakError, LeakOptions, Stage, Verdict};
use fluxoracle::DenseState;
use fluxsim::{trial_rng, SectorModel};

#[test]
fn pure_mode_is_refused() {
    let mut reg = register(2, 1);
    let q = reg.encode(0).unwrap();
    assert_eq!(leakage_correct_general(&mut reg, q, &LeakOptions::default()), Err(LeakError::NotCoset));
    assert_eq!(prepare_rho_xzero(&mut reg), Err(LeakError::NotCoset));
}

#[test]
fn clean_coset_inputs_pass_unchanged() {
    for mut reg in [s5_register(2), sl25_register(2)] {
        for n in 0..2u32 {
            let q = reg.encode(n).unwrap();
            let rep = leakage_correct_general(&mut reg, q, &LeakOptions::default()).unwrap();
            assert_eq!((rep.stage, rep.verdict), (Stage::CosetFilter, Verdict::Clean));
            let want = DenseState::basis(2, &[n as usize]).unwrap();
            assert!(density(&reg, &[q]).unwrap().fidelity_with(&want).unwrap() > 1.0 - 1e-9);
            reg.release(q).unwrap();
        }
    }
}

#[test]
fn flux_outside_p_is_projected_in_two_swaps() {
    let mut reg = s5_register(4);
    let g = reg.context().sim_group().clone();
    let odd: Vec<_> = g.ids().filter(|&x| reg.context().epi(x).is_none()).collect();
    assert_eq!(odd.len(), 60);
    for &t in odd.iter().step_by(3) {
        let q = reg.encode(1).unwrap();
        let p = reg.pair(q).unwrap();
        reg.system_mut().multiply_flux(p.first, t, false).unwrap();
        reg.system_mut().multiply_flux(p.second, g.inv(t), true).unwrap();
        incomplete_swap(&mut reg, q).unwrap();
        // One swap: every flux lies in P.
        let p = reg.pair(q).unwrap();
        for (x, _) in reg.system().flux_distribution(p.first).unwrap() {
            assert!(reg.context().epi(x).is_some());
        }
        incomplete_swap(&mut reg, q).unwrap();
        assert!(in_subspace(&reg, q));
        reg.release(q).unwrap();

        let q = reg.encode(0).unwrap();
        let p = reg.pair(q).unwrap();
        reg.system_mut().multiply_flux(p.first, t, false).unwrap();
        reg.system_mut().multiply_flux(p.second, g.inv(t), true).unwrap();
        let rep = leakage_correct_general(&mut reg, q, &LeakOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Clean);
        assert!(in_subspace(&reg, q));
        reg.release(q).unwrap();
    }
}

#[test]
fn kernel_net_flux_passes_stage_one() {
    let mut reg = sl25_register(6);
    let g = reg.context().sim_group().clone();
    let z = g
        .ids()
        .find(|&x| x != g.identity() && reg.context().epi(x) == Some(reg.context().logical_group().identity()))
        .unwrap();
    for n in 0..2u32 {
        let q = reg.encode(n).unwrap();
        let p = reg.pair(q).unwrap();
        reg.system_mut().multiply_flux(p.second, z, false).unwrap();
        assert!(!in_subspace(&reg, q));
        let rep = leakage_correct_general(&mut reg, q, &LeakOptions::default()).unwrap();
        assert_eq!((rep.stage, rep.verdict), (Stage::CosetFilter, Verdict::Clean));
        let want = DenseState::basis(2, &[n as usize]).unwrap();
        assert!(density(&reg, &[q]).unwrap().fidelity_with(&want).unwrap() > 1.0 - 1e-9);
        reg.release(q).unwrap();
    }
    // A net flux outside N is caught.
    let q = reg.encode(0).unwrap();
    let p = reg.pair(q).unwrap();
    let h = g.ids().find(|&x| reg.context().epi(x) != Some(reg.context().logical_group().identity())).unwrap();
    reg.system_mut().multiply_flux(p.second, h, false).unwrap();
    let rep = leakage_correct_general(&mut reg, q, &LeakOptions::default()).unwrap();
    assert_eq!((rep.stage, rep.verdict), (Stage::NetFlux, Verdict::Replaced));
    assert!(in_subspace(&reg, q));
}

#[test]
fn trivial_kernel_xzero_matches_pure_mode() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(2)).unwrap();
    let cc = simple_perfect_quotient(&g).unwrap();
    let qp = QuditParams {
        a: cc.epi(p.a).unwrap(),
        b: cc.epi(p.b).unwrap(),
        d: 2,
    };
    let mut pure = QuditRegister::new(LogicalContext::pure(g.clone(), p).unwrap(), trial_rng(5, 0), RegisterOptions::default()).unwrap();
    let mut coset = QuditRegister::new(LogicalContext::coset(&cc, qp).unwrap(), trial_rng(5, 0), RegisterOptions::default()).unwrap();
    for _ in 0..5 {
        pure.prepare_xzero().unwrap();
        prepare_rho_xzero(&mut coset).unwrap();
    }
    assert_eq!(pure.transcript(), coset.transcript());
}

#[test]
fn rho_xzero_in_binary_icosahedral_mode() {
    let mut reg = sl25_register(8);
    let want = DenseState::x_eigenstate(2, 0);
    for _ in 0..5 {
        let q = prepare_rho_xzero(&mut reg).unwrap();
        let rho = density(&reg, &[q]).unwrap();
        assert!(rho.fidelity_with(&want).unwrap() > 1.0 - 1e-9);
        reg.release(q).unwrap();
    }
}

#[test]
fn uncertifiable_vacuum_sectors() {
    let s5 = symmetric(5).unwrap();
    let t = s5.parse_elem("(1 2)").unwrap();
    for model in [
        SectorModel {
            magnetic: vec![],
            charged: 1.0,
        },
        SectorModel::concentrated(t),
    ] {
        let opts = RegisterOptions {
            sector: Some(model),
            retry_cap: 40,
            ..Default::default()
        };
        let mut reg = coset_register(s5.clone(), 3, opts);
        assert_eq!(reg.xzero_attempts(100).unwrap(), 0);
        assert_eq!(
            prepare_rho_xzero(&mut reg),
            Err(LeakError::Gate(GateError::ProtocolStalled { attempts: 40 }))
        );
    }
}
