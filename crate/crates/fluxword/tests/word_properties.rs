use fluxgroup::builders::alternating;
use fluxgroup::{ElemId, FiniteGroup};
use fluxword::{evaluate_word, simplify_word, word_from_text, word_to_text, Atom, Evaluator, Program, ProgramBuilder};
use proptest::prelude::*;

fn a5() -> FiniteGroup {
    alternating(5).unwrap()
}

/// Random DAG from an op list; each op refers to earlier nodes by index.
fn build(g: &FiniteGroup, ops: &[(u8, usize, usize, usize)]) -> Program {
    let mut b = ProgramBuilder::new(2, g.degree());
    let mut nodes = vec![b.input(0), b.input(1)];
    for &(kind, x, y, c) in ops {
        let nx = nodes[x % nodes.len()];
        let ny = nodes[y % nodes.len()];
        let n = match kind % 6 {
            0 => b.concat(nx, ny),
            1 => b.inverse(nx),
            2 => b.commutator(nx, ny),
            3 => b.constant(g.elem((c % g.order()) as ElemId).clone()),
            4 => b.input_inverse(c % 2),
            _ => b.conjugate_by_const(&g.elem((c % g.order()) as ElemId).clone(), nx),
        };
        nodes.push(n);
    }
    b.finish(*nodes.last().unwrap())
}

proptest! {
    #[test]
    fn dag_matches_flattened_word(
        ops in prop::collection::vec((0u8..6, 0usize..64, 0usize..64, 0usize..60), 1..14),
        x in 0u16..60, y in 0u16..60,
    ) {
        let g = a5();
        let prog = build(&g, &ops);
        let env = [g.elem(x).clone(), g.elem(y).clone()];
        let dag = prog.evaluate(&env).unwrap();
        if let Ok(word) = prog.flatten(1 << 16) {
            prop_assert_eq!(word.len() as u64, prog.flat_len());
            prop_assert_eq!(&evaluate_word(&word, g.degree(), &env), &dag);
            let simple = simplify_word(&word);
            prop_assert!(simple.len() <= word.len());
            prop_assert_eq!(&evaluate_word(&simple, g.degree(), &env), &dag);
            let back = word_from_text(&word_to_text(&simple), g.degree()).unwrap();
            prop_assert_eq!(back, simple);
        }
        let ev = Evaluator::new(&prog, &g).unwrap();
        prop_assert_eq!(g.elem(ev.eval(&[x, y])), &dag);
    }

    #[test]
    fn dag_text_round_trip(ops in prop::collection::vec((0u8..6, 0usize..64, 0usize..64, 0usize..60), 1..14)) {
        let g = a5();
        let prog = build(&g, &ops);
        let back = Program::from_dag_text(&prog.to_dag_text()).unwrap();
        for x in [0u16, 7, 33] {
            for y in [0u16, 19, 59] {
                let env = [g.elem(x).clone(), g.elem(y).clone()];
                prop_assert_eq!(back.evaluate(&env).unwrap(), prog.evaluate(&env).unwrap());
            }
        }
    }

    #[test]
    fn concatenated_words_multiply(
        w1 in prop::collection::vec((0u8..3, 0u16..60), 0..12),
        w2 in prop::collection::vec((0u8..3, 0u16..60), 0..12),
        x in 0u16..60,
    ) {
        let g = a5();
        let atom = |(k, e): (u8, u16)| match k {
            0 => Atom::Const(g.elem(e).clone()),
            1 => Atom::Input(0),
            _ => Atom::InputInverse(0),
        };
        let a: Vec<Atom> = w1.into_iter().map(atom).collect();
        let b: Vec<Atom> = w2.into_iter().map(atom).collect();
        let env = [g.elem(x).clone()];
        let ab: Vec<Atom> = a.iter().chain(b.iter()).cloned().collect();
        let lhs = evaluate_word(&ab, g.degree(), &env);
        let rhs = evaluate_word(&a, g.degree(), &env).mul(&evaluate_word(&b, g.degree(), &env));
        prop_assert_eq!(lhs, rhs);
        let p = Program::from_word(1, g.degree(), &ab);
        prop_assert_eq!(p.evaluate(&env).unwrap(), evaluate_word(&ab, g.degree(), &env));
    }
}
