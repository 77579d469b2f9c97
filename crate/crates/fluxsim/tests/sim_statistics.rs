use std::sync::Arc;

use fluxgroup::builders::alternating;
use fluxgroup::{ElemId, FiniteGroup};
use fluxsim::{trial_rng, AnyonSystem, FusionOutcome, Representation, SectorModel};

const N: u64 = 100_000;

fn a5() -> Arc<FiniteGroup> {
    Arc::new(alternating(5).unwrap())
}

fn el(g: &FiniteGroup, s: &str) -> ElemId {
    g.parse_elem(s).unwrap()
}

/// |k - n p| within 3 binomial standard deviations.
fn within_3_sigma(k: u64, n: u64, p: f64) -> bool {
    let mu = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    (k as f64 - mu).abs() <= 3.0 * sigma.max(1e-12)
}

#[test]
fn flux_against_inverse_ancilla() {
    let g = a5();
    let b = el(&g, "(3 4 5)");
    let mut hits = 0;
    for t in 0..N {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(11, t));
        sys.set_recording(false);
        let q = sys.create_flux_ancilla(b);
        let a = sys.create_flux_ancilla(g.inv(b));
        if sys.fuse(q.first, a.first).unwrap() == FusionOutcome::Vacuum {
            hits += 1;
        }
    }
    assert!(within_3_sigma(hits, N, 1.0 / 20.0), "{hits}");
}

#[test]
fn fresh_vacuum_pair_always_vanishes() {
    let g = a5();
    let model = SectorModel::uniform(&g, 0.25);
    for t in 0..N {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(12, t));
        sys.set_recording(false);
        let v = sys.create_vacuum_pair(&model).unwrap();
        assert_eq!(sys.fuse(v.first, v.second).unwrap(), FusionOutcome::Vacuum);
    }
}

#[test]
fn probe_rates_follow_characters() {
    let g = a5();
    let rep = Arc::new(Representation::standard(&g).unwrap());
    for (flux, want) in [("()", 1.0), ("(1 2 3)", 1.0 / 16.0), ("(1 2)(3 4)", 0.0)] {
        let x = el(&g, flux);
        assert!((rep.vacuum_probability(x) - want).abs() < 1e-12);
        let mut hits = 0;
        for t in 0..N {
            let mut sys = AnyonSystem::new(g.clone(), trial_rng(13, t));
            sys.set_recording(false);
            let p = sys.create_flux_ancilla(x);
            let pr = sys.create_charge_probe(rep.clone());
            sys.encircle_with_probe(pr, &[p.first]).unwrap();
            if sys.fuse_probe(pr).unwrap() {
                hits += 1;
            }
        }
        assert!(within_3_sigma(hits, N, want), "{flux}: {hits}");
    }
}

#[test]
fn probe_on_superposed_flux_collapses() {
    let g = a5();
    let rep = Arc::new(Representation::standard(&g).unwrap());
    let b = el(&g, "(3 4 5)");
    // Loop around one member of a vacuum pair together with a b^-1 anyon:
    // vacuum rate is (1/20) * 1 + (19/20) * E|chi/m|^2 over the rest of the class.
    let cls = g.class_of(b).to_vec();
    let expected: f64 = cls
        .iter()
        .map(|&h| rep.vacuum_probability(g.mul(h, g.inv(b))))
        .sum::<f64>()
        / cls.len() as f64;
    let n = 20_000;
    let mut hits = 0;
    for t in 0..n {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(14, t));
        sys.set_recording(false);
        let v = sys.create_vacuum_pair(&SectorModel::concentrated(b)).unwrap();
        let a = sys.create_flux_ancilla(b);
        let pr = sys.create_charge_probe(rep.clone());
        sys.encircle_word(pr, &[(v.first, false), (a.second, false)]).unwrap();
        if sys.fuse_probe(pr).unwrap() {
            hits += 1;
        }
        assert!(sys.invariant_error() < 1e-9);
    }
    assert!(within_3_sigma(hits, n, expected), "{hits} vs {expected}");
}

#[test]
fn compare_fluxes_one_sided() {
    let g = a5();
    let rep = Arc::new(Representation::standard(&g).unwrap());
    let x = el(&g, "(1 2 3 4 5)");
    for t in 0..2000 {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(15, t));
        sys.set_recording(false);
        let p = sys.create_flux_ancilla(x);
        let q = sys.create_flux_ancilla(x);
        assert!(sys.compare_fluxes(p, q, 5, &rep).unwrap());
    }
    // Fluxes differing by a 3-cycle: false "equal" rate bounded by (1/16)^reps.
    let y = g.mul(el(&g, "(1 2 3)"), x);
    let mut false_equal = 0;
    for t in 0..20_000 {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(16, t));
        sys.set_recording(false);
        let p = sys.create_flux_ancilla(x);
        let q = sys.create_flux_ancilla(y);
        if sys.compare_fluxes(p, q, 1, &rep).unwrap() {
            false_equal += 1;
        }
    }
    let want = rep.vacuum_probability(g.mul(x, g.inv(y)));
    assert!(within_3_sigma(false_equal, 20_000, want), "{false_equal}");
    assert!(want <= 9.0 / 16.0);
}
