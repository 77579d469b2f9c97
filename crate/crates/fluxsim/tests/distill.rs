use std::collections::HashMap;
use std::sync::Arc;

use fluxgroup::{ElemId, FiniteGroup};
use fluxsim::{
    distill_flux_bins, AnyonSystem, BinLabel, DistillBudget, Representation, SectorModel,
};

fn flux_of(sys: &AnyonSystem, a: u32) -> ElemId {
    let d = sys.flux_distribution(a).unwrap();
    assert_eq!(d.len(), 1, "bin fluxes are definite");
    d[0].0
}

/// Extends `gens -> images` along shortest words; checks it is a bijective
/// homomorphism and returns it.
fn automorphism(g: &FiniteGroup, images: &[ElemId]) -> Option<Vec<ElemId>> {
    let mut map: Vec<Option<ElemId>> = vec![None; g.order()];
    map[g.identity() as usize] = Some(g.identity());
    let mut frontier = vec![g.identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for (i, &s) in g.generators().iter().enumerate() {
                let y = g.mul(x, s);
                if map[y as usize].is_none() {
                    map[y as usize] = Some(g.mul(map[x as usize].unwrap(), images[i]));
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let map: Vec<ElemId> = map.into_iter().map(|m| m.unwrap()).collect();
    for x in g.ids() {
        for y in g.ids() {
            if map[g.mul(x, y) as usize] != g.mul(map[x as usize], map[y as usize]) {
                return None;
            }
        }
    }
    let mut seen = map.clone();
    seen.sort_unstable();
    seen.dedup();
    (seen.len() == g.order()).then_some(map)
}

fn check_consistent(sys: &AnyonSystem, report: &fluxsim::DistillReport) {
    let g = sys.group();
    let gen_bins = report.generator_bins.clone().expect("labelled");
    let images: Vec<ElemId> = gen_bins
        .iter()
        .map(|&b| flux_of(sys, report.bins[b].pairs[0].first))
        .collect();
    let alpha = automorphism(g, &images).expect("generator images extend to an automorphism");
    let mut labelled = 0;
    for bin in &report.bins {
        let f = flux_of(sys, bin.pairs[0].first);
        for p in &bin.pairs {
            assert_eq!(flux_of(sys, p.first), f);
        }
        if let BinLabel::Element(x) = bin.label {
            assert_eq!(alpha[x as usize], f);
            labelled += 1;
        }
    }
    assert_eq!(labelled, report.bins.len());
}

#[test]
fn cyclic_fluxes_are_power_related() {
    let z5 = Arc::new(FiniteGroup::parse("(1 2 3 4 5)").unwrap());
    let rep = Arc::new(Representation::standard(&z5).unwrap());
    let mut sys = AnyonSystem::seeded(z5.clone(), 4);
    let model = SectorModel::uniform(&z5, 0.0);
    let budget = DistillBudget { pairs: 60, ..Default::default() };
    let report = distill_flux_bins(&mut sys, &model, budget, &rep).unwrap();
    assert!(!report.partial);
    assert_eq!(report.bins.len(), 4);
    check_consistent(&sys, &report);
    let gen = report.generator_bins.clone().unwrap()[0];
    let gf = flux_of(&sys, report.bins[gen].pairs[0].first);
    let mut powers: HashMap<ElemId, i64> = HashMap::new();
    for k in 1..5 {
        powers.insert(z5.pow(gf, k), k);
    }
    for bin in &report.bins {
        let BinLabel::Element(x) = bin.label else { panic!("unlabelled") };
        let f = flux_of(&sys, bin.pairs[0].first);
        let k = powers[&f];
        assert_eq!(x, z5.pow(z5.generators()[0], k));
    }
}

#[test]
fn full_a5_labels_up_to_automorphism() {
    let a5 = Arc::new(FiniteGroup::parse("(1 2 3 4 5);(1 2 3)").unwrap());
    let rep = Arc::new(Representation::standard(&a5).unwrap());
    let five = a5.parse_elem("(1 2 3 4 5)").unwrap();
    let three = a5.parse_elem("(1 2 3)").unwrap();
    let model = SectorModel {
        magnetic: vec![(five, 0.4), (three, 0.6)],
        charged: 0.0,
    };
    let mut sys = AnyonSystem::seeded(a5.clone(), 8);
    sys.set_recording(false);
    let budget = DistillBudget { pairs: 160, ..Default::default() };
    let report = distill_flux_bins(&mut sys, &model, budget, &rep).unwrap();
    assert!(!report.partial);
    assert!(report.bins.len() >= 20);
    check_consistent(&sys, &report);
}

#[test]
fn zero_budget_and_exhaustion() {
    let a5 = Arc::new(FiniteGroup::parse("(1 2 3 4 5);(1 2 3)").unwrap());
    let rep = Arc::new(Representation::standard(&a5).unwrap());
    let model = SectorModel::uniform(&a5, 0.0);
    let mut sys = AnyonSystem::seeded(a5.clone(), 1);
    let none = distill_flux_bins(&mut sys, &model, DistillBudget { pairs: 0, ..Default::default() }, &rep).unwrap();
    assert!(none.bins.is_empty() && !none.partial);
    let tight = DistillBudget { pairs: 30, probes: 40, reps: 4, guesses: 10 };
    let report = distill_flux_bins(&mut sys, &model, tight, &rep).unwrap();
    assert!(report.partial);
    assert!(report.probes_used <= 40);
}
