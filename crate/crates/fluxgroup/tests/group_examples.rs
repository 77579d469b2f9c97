use std::collections::BTreeSet;

use fluxgroup::builders::{alternating, cyclic, direct_product, sl2_5, symmetric};
use fluxgroup::{
    find_qudit_params, simple_perfect_quotient, FiniteGroup, GroupError, Perm, QuditPreference,
};

fn a5() -> FiniteGroup {
    FiniteGroup::parse("(1 2 3 4 5);(1 2 3)").unwrap()
}

/// Class sizes by conjugating with every element directly on permutations.
fn brute_class_sizes(g: &FiniteGroup) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    for x in g.elements() {
        if seen.contains(x) {
            continue;
        }
        let class: BTreeSet<Perm> = g.elements().iter().map(|y| y.conjugate(x)).collect();
        sizes.push(class.len());
        seen.extend(class);
    }
    sizes.sort();
    sizes
}

#[test]
fn compose_examples() {
    let id = Perm::identity(5);
    let g = Perm::parse("(3 4 5)", 5).unwrap();
    assert_eq!(id.compose(&g).unwrap(), g);
    assert_eq!(g.compose(&g).unwrap(), Perm::parse("(3 5 4)", 5).unwrap());
    let a = Perm::parse("(1 2)(3 4)", 5).unwrap();
    let aba = a.mul(&g).mul(&a.inverse());
    assert_eq!(aba, Perm::parse("(4 3 5)", 5).unwrap());
}

#[test]
fn conjugacy_class_examples() {
    let z3 = FiniteGroup::parse("(1 2 3)").unwrap();
    assert_eq!(z3.conjugacy_classes().len(), 3);
    let g = a5();
    let mut sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.len()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
    assert_eq!(sizes, brute_class_sizes(&g));
    let b = g.parse_elem("(345)").unwrap();
    assert_eq!(g.class_of(b).len(), 20);
}

#[test]
fn class_sizes_match_brute_force() {
    for g in [symmetric(4).unwrap(), symmetric(5).unwrap(), sl2_5().unwrap()] {
        let mut sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, brute_class_sizes(&g));
        for s in sizes {
            assert_eq!(g.order() % s, 0);
        }
    }
}

#[test]
fn derived_series_examples() {
    let g = a5();
    let orders: Vec<usize> = g.derived_series().iter().map(|s| s.order()).collect();
    assert_eq!(orders, vec![60]);
    assert!(g.is_perfect());

    let s4 = symmetric(4).unwrap();
    let orders: Vec<usize> = s4.derived_series().iter().map(|s| s.order()).collect();
    assert_eq!(orders, vec![24, 12, 4, 1]);
    assert!(s4.is_solvable());

    let z6 = cyclic(6).unwrap();
    let orders: Vec<usize> = z6.derived_series().iter().map(|s| s.order()).collect();
    assert_eq!(orders, vec![6, 1]);
}

#[test]
fn derived_series_terms_are_normal() {
    for g in [symmetric(4).unwrap(), symmetric(5).unwrap(), sl2_5().unwrap()] {
        let series = g.derived_series();
        for w in series.windows(2) {
            assert!(w[1].is_subset_of(&w[0]));
            assert!(g.is_normal_in(&w[1], &w[0]));
            assert!(g.is_normal(&w[1]));
        }
    }
}

#[test]
fn simplicity_examples() {
    assert!(a5().is_simple());
    assert!(!symmetric(5).unwrap().is_simple());
    assert!(!FiniteGroup::parse("").unwrap().is_simple());
    assert!(cyclic(5).unwrap().is_simple());
    assert!(!sl2_5().unwrap().is_simple());
}

#[test]
fn quotient_of_s5() {
    let ctx = simple_perfect_quotient(&symmetric(5).unwrap()).unwrap();
    assert_eq!(ctx.p.order(), 60);
    assert_eq!(ctx.n.order(), 1);
    assert_eq!(ctx.quotient.order(), 60);
    assert!(ctx.quotient.is_perfect() && ctx.quotient.is_simple());
}

#[test]
fn quotient_of_a5_squared() {
    let g = direct_product(&a5(), &a5()).unwrap();
    assert_eq!(g.order(), 3600);
    let ctx = simple_perfect_quotient(&g).unwrap();
    assert_eq!(ctx.p.order(), 3600);
    assert_eq!(ctx.n.order(), 60);
    assert_eq!(ctx.quotient.order(), 60);
    // N is one of the two factors: it moves only one block of points.
    let moved: BTreeSet<bool> = ctx
        .n
        .members()
        .iter()
        .filter(|&&x| x != 0)
        .map(|&x| g.elem(x).apply(0) != 0 || g.elem(x).apply(1) != 1 || g.elem(x).apply(2) != 2)
        .collect();
    assert_eq!(moved.len(), 1);
}

#[test]
fn quotient_of_sl25() {
    let g = sl2_5().unwrap();
    assert_eq!(g.order(), 120);
    let ctx = simple_perfect_quotient(&g).unwrap();
    assert_eq!(ctx.p.order(), 120);
    assert_eq!(ctx.n.order(), 2);
    for &z in ctx.n.members() {
        assert!(g.ids().all(|x| g.commutes(x, z)));
    }
    assert_eq!(ctx.quotient.order(), 60);
    assert_eq!(ctx.kernel(), ctx.n.members().to_vec());
}

#[test]
fn quotient_epi_is_homomorphism() {
    let g = sl2_5().unwrap();
    let ctx = simple_perfect_quotient(&g).unwrap();
    let q = &ctx.quotient;
    for &x in ctx.p.members() {
        for &y in ctx.p.members() {
            let lhs = ctx.epi(g.mul(x, y)).unwrap();
            let rhs = q.mul(ctx.epi(x).unwrap(), ctx.epi(y).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn solvable_quotient_is_refused() {
    let err = simple_perfect_quotient(&symmetric(4).unwrap()).unwrap_err();
    assert_eq!(err, GroupError::SolvableGroup);
    let err = simple_perfect_quotient(&FiniteGroup::parse("(1 2)").unwrap()).unwrap_err();
    assert_eq!(err, GroupError::SolvableGroup);
}

#[test]
fn qudit_parameter_examples() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(2)).unwrap();
    assert_eq!(g.elem(p.a).to_string(), "(1 2)(3 4)");
    assert_eq!(g.elem(p.b).to_string(), "(3 4 5)");
    assert_eq!(p.d, 2);
    assert_eq!(g.elem(p.basis_flux(&g, 1)).to_string(), "(3 5 4)");

    let p = find_qudit_params(&g, &QuditPreference::with_d(3)).unwrap();
    assert_eq!(g.elem(p.a).to_string(), "(1 2 3)");
    assert_eq!(g.elem(p.b).to_string(), "(3 4 5)");
    let basis: Vec<String> = p.basis(&g).iter().map(|&x| g.elem(x).to_string()).collect();
    assert_eq!(basis, vec!["(3 4 5)", "(1 4 5)", "(2 4 5)"]);

    let err = find_qudit_params(&g, &QuditPreference::with_d(7)).unwrap_err();
    assert_eq!(err, GroupError::NoSuchParameters(Some(7)));

    let default = find_qudit_params(&g, &QuditPreference::default()).unwrap();
    assert_eq!(default.d, 2);
}

#[test]
fn qudit_parameters_in_quotients() {
    for g in [symmetric(5).unwrap(), sl2_5().unwrap()] {
        let ctx = simple_perfect_quotient(&g).unwrap();
        let q = &ctx.quotient;
        let p = find_qudit_params(q, &QuditPreference::default()).unwrap();
        assert!(!q.commutes(p.a, p.b));
        let basis = p.basis(q);
        let distinct: BTreeSet<_> = basis.iter().collect();
        assert_eq!(distinct.len(), p.d as usize);
    }
}

#[test]
fn alternating_orders() {
    for (n, o) in [(3, 3), (4, 12), (5, 60), (6, 360)] {
        assert_eq!(alternating(n).unwrap().order(), o);
    }
    assert_eq!(symmetric(5).unwrap().order(), 120);
}
