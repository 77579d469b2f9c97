use fluxgroup::builders::{alternating, direct_product, symmetric};
use fluxgroup::{find_qudit_params, ElemId, FiniteGroup, QuditPreference};
use fluxword::{
    conjugate_product_expression, controlled_sum_extension, multi_point_delta, point_delta,
    point_delta_on, synthesize, toffoli_constants, toffoli_program, Evaluator, WordError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn a5() -> FiniteGroup {
    alternating(5).unwrap()
}

fn el(g: &FiniteGroup, s: &str) -> ElemId {
    g.parse_elem(s).unwrap()
}

#[test]
fn commutator_of_three_cycles() {
    let g = a5();
    let c = g.commutator(el(&g, "(3 4 5)"), el(&g, "(2 3 4)"));
    assert_eq!(g.elem(c).to_string(), "(2 5)(3 4)");
}

#[test]
fn qubit_constants_reproduce() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(2)).unwrap();
    let k = toffoli_constants(&g, &p);
    assert_eq!(g.elem(k.c).to_string(), "(3 4 5)");
    assert_eq!(g.elem(k.d).to_string(), "(2 3 4)");
    assert_eq!(g.elem(k.e).to_string(), "(2 5)(3 4)");
    let aba = g.conj(p.a, p.b);
    assert_eq!(g.elem(aba).to_string(), "(3 5 4)");
}

#[test]
fn qubit_toffoli_table_and_length() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(2)).unwrap();
    let prog = toffoli_program(&g, &p).unwrap();
    let ev = Evaluator::new(&prog, &g).unwrap();
    for i in 0..2u32 {
        for j in 0..2u32 {
            let x = p.basis_flux(&g, i);
            let y = p.basis_flux(&g, j);
            assert_eq!(ev.eval(&[x, y]), g.pow(p.a, (i * j) as i64), "i={i} j={j}");
        }
    }
    let word = prog.flatten_simplified(1 << 20).unwrap();
    assert_eq!(word.len(), 9);
}

#[test]
fn qutrit_toffoli_on_basis() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(3)).unwrap();
    let prog = toffoli_program(&g, &p).unwrap();
    let ev = Evaluator::new(&prog, &g).unwrap();
    for i in 0..3u32 {
        for j in 0..3u32 {
            let v = ev.eval(&[p.basis_flux(&g, i), p.basis_flux(&g, j)]);
            assert_eq!(v, g.pow(p.a, ((i * j) % 3) as i64));
        }
    }
}

#[test]
fn conjugate_expression_maps_c_to_target() {
    let g = a5();
    let c = el(&g, "(3 4 5)");
    for t in g.ids() {
        let prog = conjugate_product_expression(&g, c, t).unwrap();
        let ev = Evaluator::new(&prog, &g).unwrap();
        assert_eq!(ev.eval(&[c]), t);
        assert_eq!(ev.eval(&[g.identity()]), g.identity());
    }
}

#[test]
fn point_delta_exhaustive_on_a5() {
    let g = a5();
    let b = el(&g, "(3 4 5)");
    let c = el(&g, "(1 2)(3 4)");
    let table = Evaluator::new(&point_delta(&g, b, c).unwrap(), &g)
        .unwrap()
        .unary_table();
    for x in g.ids() {
        let want = if x == b { c } else { g.identity() };
        assert_eq!(table[x as usize], want);
    }
}

#[test]
fn point_delta_at_identity_and_every_point() {
    let g = a5();
    let c = el(&g, "(1 2 3 4 5)");
    for b in g.ids() {
        let t = Evaluator::new(&point_delta(&g, b, c).unwrap(), &g)
            .unwrap()
            .unary_table();
        for x in g.ids() {
            assert_eq!(t[x as usize], if x == b { c } else { g.identity() });
        }
    }
}

#[test]
fn restricted_delta_exact_on_domain() {
    let g = a5();
    let p = find_qudit_params(&g, &QuditPreference::with_d(3)).unwrap();
    let basis = p.basis(&g);
    let c = p.a;
    for &b in &basis {
        let prog = point_delta_on(&g, &basis, b, c).unwrap();
        let ev = Evaluator::new(&prog, &g).unwrap();
        for &x in &basis {
            assert_eq!(ev.eval(&[x]), if x == b { c } else { g.identity() });
        }
    }
    let off = g.ids().find(|x| !basis.contains(x)).unwrap();
    assert_eq!(
        point_delta_on(&g, &basis, off, c).unwrap_err(),
        WordError::PointOutsideDomain
    );
}

#[test]
fn two_input_delta_on_all_pairs() {
    let g = a5();
    let pt = [el(&g, "(1 2 3)"), el(&g, "(1 4)(2 5)")];
    let c = el(&g, "(2 4 5)");
    let prog = multi_point_delta(&g, &pt, c).unwrap();
    let ev = Evaluator::new(&prog, &g).unwrap();
    let mut scratch = Vec::new();
    for x in g.ids() {
        for y in g.ids() {
            let want = if [x, y] == pt { c } else { g.identity() };
            assert_eq!(ev.eval_with(&[x, y], &mut scratch), want);
        }
    }
}

#[test]
fn random_unary_tables_synthesize_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in [a5(), alternating(6).unwrap()] {
        for _ in 0..3 {
            let n = g.order();
            let vals: Vec<ElemId> = (0..n).map(|_| rng.gen_range(0..n) as ElemId).collect();
            let prog = synthesize(&g, 1, &|x: &[ElemId]| Some(vals[x[0] as usize])).unwrap();
            let got = Evaluator::new(&prog, &g).unwrap().unary_table();
            assert_eq!(got, vals);
        }
    }
}

#[test]
fn random_binary_table_on_a5() {
    let g = a5();
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vals: Vec<ElemId> = (0..n * n).map(|_| rng.gen_range(0..n) as ElemId).collect();
    let table = |x: &[ElemId]| Some(vals[x[0] as usize * n + x[1] as usize]);
    let prog = synthesize(&g, 2, &table).unwrap();
    let ev = Evaluator::new(&prog, &g).unwrap();
    for x in g.ids() {
        for y in g.ids() {
            assert_eq!(ev.eval(&[x, y]), table(&[x, y]).unwrap());
        }
    }
}

#[test]
fn missing_entry_reported() {
    let g = a5();
    let err = synthesize(&g, 1, &|x: &[ElemId]| (x[0] != 5).then_some(0)).unwrap_err();
    assert_eq!(err, WordError::MissingEntry(vec![5]));
}

#[test]
fn unsupported_groups_refused() {
    for g in [symmetric(4).unwrap(), symmetric(5).unwrap(), direct_product(&a5(), &a5()).unwrap()] {
        assert!(matches!(
            point_delta(&g, 1, 1),
            Err(WordError::SynthesisUnsupported(_))
        ));
    }
}

#[test]
fn controlled_sum_extension_values() {
    let g = a5();
    for d in [2u32, 3] {
        let p = find_qudit_params(&g, &QuditPreference::with_d(d)).unwrap();
        let t = Evaluator::new(&controlled_sum_extension(&g, &p).unwrap(), &g)
            .unwrap()
            .unary_table();
        for x in g.ids() {
            let want = match p.digit_of(&g, x) {
                Some(i) if i > 0 => g.pow(p.a, i as i64),
                _ => g.identity(),
            };
            assert_eq!(t[x as usize], want);
        }
    }
}
