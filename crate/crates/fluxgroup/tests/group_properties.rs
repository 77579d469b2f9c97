use std::collections::BTreeSet;

use fluxgroup::builders::{alternating, direct_product, sl2_5, symmetric};
use fluxgroup::{simple_perfect_quotient, ElemId, FiniteGroup};
use proptest::prelude::*;

fn groups() -> Vec<FiniteGroup> {
    vec![
        symmetric(4).unwrap(),
        alternating(5).unwrap(),
        symmetric(5).unwrap(),
        sl2_5().unwrap(),
    ]
}

/// Normal subgroups as unions of classes closed under multiplication.
fn brute_normal_subgroups(g: &FiniteGroup) -> BTreeSet<Vec<ElemId>> {
    let classes: Vec<Vec<ElemId>> = g.conjugacy_classes().to_vec();
    let rest = &classes[1..];
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << rest.len()) {
        let mut set: BTreeSet<ElemId> = classes[0].iter().copied().collect();
        for (i, c) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.extend(c.iter().copied());
            }
        }
        if g.order() % set.len() != 0 {
            continue;
        }
        let closed = set
            .iter()
            .all(|&x| set.iter().all(|&y| set.contains(&g.mul(x, y))));
        if closed {
            out.insert(set.into_iter().collect());
        }
    }
    out
}

#[test]
fn normal_subgroups_match_brute_force() {
    for g in groups() {
        assert!(g.order() <= 400);
        let fast: BTreeSet<Vec<ElemId>> = g
            .normal_subgroups()
            .iter()
            .map(|s| s.members().to_vec())
            .collect();
        let brute = brute_normal_subgroups(&g);
        assert_eq!(fast, brute);
        let simple_by_brute = brute.len() == 2;
        assert_eq!(g.is_simple(), simple_by_brute);
    }
}

#[test]
fn quotient_kernel_is_n_for_small_groups() {
    for g in [symmetric(5).unwrap(), sl2_5().unwrap()] {
        let ctx = simple_perfect_quotient(&g).unwrap();
        assert_eq!(ctx.kernel(), ctx.n.members().to_vec());
    }
}

#[test]
fn quotient_epi_sampled_on_a5_squared() {
    let a5 = alternating(5).unwrap();
    let g = direct_product(&a5, &a5).unwrap();
    let ctx = simple_perfect_quotient(&g).unwrap();
    let q = &ctx.quotient;
    let n = g.order() as u64;
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % n) as ElemId
    };
    for _ in 0..5000 {
        let (x, y) = (next(), next());
        let lhs = ctx.epi(g.mul(x, y)).unwrap();
        let rhs = q.mul(ctx.epi(x).unwrap(), ctx.epi(y).unwrap());
        assert_eq!(lhs, rhs);
    }
    assert_eq!(ctx.kernel().len(), 60);
}

proptest! {
    #[test]
    fn group_laws_hold(gi in 0usize..4, xs in prop::collection::vec((0usize..10_000, 0usize..10_000, 0usize..10_000), 1000)) {
        let gs = groups();
        let g = &gs[gi];
        let n = g.order();
        for (a, b, c) in xs {
            let (a, b, c) = ((a % n) as ElemId, (b % n) as ElemId, (c % n) as ElemId);
            prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
            prop_assert_eq!(g.mul(g.identity(), a), a);
            let direct = g.elem(a).mul(g.elem(b));
            prop_assert_eq!(g.index_of(&direct), Some(g.mul(a, b)));
        }
    }

    #[test]
    fn classes_partition_and_are_invariant(gi in 0usize..4) {
        let gs = groups();
        let g = &gs[gi];
        let mut seen = vec![false; g.order()];
        for class in g.conjugacy_classes() {
            prop_assert_eq!(g.order() % class.len(), 0);
            for &x in class {
                prop_assert!(!seen[x as usize]);
                seen[x as usize] = true;
                for y in g.ids() {
                    prop_assert_eq!(g.class_index(g.conj(y, x)), g.class_index(x));
                }
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }
}
