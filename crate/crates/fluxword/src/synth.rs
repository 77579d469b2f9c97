//! Synthesis of product-form programs from function tables.
//!
//! Point deltas are grown one killed point at a time with commutators
//! `[u, g x^-1]`; multi-input deltas nest commutators across slots; a
//! table becomes the product of one delta per non-identity entry.

use std::collections::HashMap;

use fluxgroup::{ElemId, FiniteGroup, QuditParams};

use crate::program::{NodeId, Program, ProgramBuilder};
use crate::WordError;

/// BFS tree of products of conjugates of one element.
#[derive(Clone, Debug)]
struct ConjTree {
    /// `(previous product, conjugating element)` for each reachable element.
    parent: Vec<Option<(ElemId, ElemId)>>,
}

/// Incremental synthesis context sharing one DAG across many deltas.
pub struct Synthesizer<'g> {
    g: &'g FiniteGroup,
    b: ProgramBuilder,
    domains: Vec<Vec<ElemId>>,
    trees: HashMap<ElemId, ConjTree>,
    skeletons: HashMap<(usize, ElemId), (NodeId, ElemId)>,
    multis: HashMap<Vec<ElemId>, (NodeId, ElemId)>,
}

fn check_supported(g: &FiniteGroup) -> Result<(), WordError> {
    if g.is_abelian() || !g.is_simple() {
        return Err(WordError::SynthesisUnsupported(format!(
            "group of order {} is not simple and non-abelian",
            g.order()
        )));
    }
    Ok(())
}

impl<'g> Synthesizer<'g> {
    /// Context whose deltas are exact on all of `G` in every slot.
    pub fn new(g: &'g FiniteGroup, arity: usize) -> Result<Self, WordError> {
        let all: Vec<ElemId> = g.ids().collect();
        Self::with_domains(g, vec![all; arity])
    }

    /// Context whose deltas are exact on `domains[i]` in slot `i` only.
    pub fn with_domains(g: &'g FiniteGroup, domains: Vec<Vec<ElemId>>) -> Result<Self, WordError> {
        check_supported(g)?;
        Ok(Synthesizer {
            g,
            b: ProgramBuilder::new(domains.len(), g.degree()),
            domains,
            trees: HashMap::new(),
            skeletons: HashMap::new(),
            multis: HashMap::new(),
        })
    }

    pub fn builder(&mut self) -> &mut ProgramBuilder {
        &mut self.b
    }

    pub fn finish(&self, root: NodeId) -> Program {
        self.b.finish(root)
    }

    fn tree(&mut self, c: ElemId) -> &ConjTree {
        let g = self.g;
        self.trees.entry(c).or_insert_with(|| {
            let mut conjugators: Vec<(ElemId, ElemId)> = Vec::new();
            let mut seen = vec![false; g.order()];
            for x in g.ids() {
                let y = g.conj(x, c);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    conjugators.push((y, x));
                }
            }
            let mut parent = vec![None; g.order()];
            let mut visited = vec![false; g.order()];
            visited[g.identity() as usize] = true;
            let mut frontier = vec![g.identity()];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &(y, x) in &conjugators {
                        let w = g.mul(v, y);
                        if !visited[w as usize] {
                            visited[w as usize] = true;
                            parent[w as usize] = Some((v, x));
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            ConjTree { parent }
        })
    }

    /// Conjugating elements `x_1..x_m` with `target = prod x_k c x_k^-1`,
    /// of minimal length.
    pub fn conjugate_expression(&mut self, c: ElemId, target: ElemId) -> Vec<ElemId> {
        let id = self.g.identity();
        if target == id {
            return Vec::new();
        }
        assert!(c != id, "cannot express a non-identity element with c = 1");
        let tree = self.tree(c);
        let mut xs = Vec::new();
        let mut cur = target;
        while cur != id {
            let (prev, x) = tree.parent[cur as usize].expect("simple group: every element reachable");
            xs.push(x);
            cur = prev;
        }
        xs.reverse();
        xs
    }

    /// Turns a node with value `from` (and identity elsewhere) into one with
    /// value `to`, by substituting it into a product of conjugates.
    pub fn shift(&mut self, node: NodeId, from: ElemId, to: ElemId) -> NodeId {
        if to == self.g.identity() {
            return self.b.empty();
        }
        if from == to {
            return node;
        }
        let xs = self.conjugate_expression(from, to);
        let parts: Vec<NodeId> = xs
            .iter()
            .map(|&x| {
                let p = self.g.elem(x).clone();
                self.b.conjugate_by_const(&p, node)
            })
            .collect();
        self.b.product(&parts)
    }

    /// First member of the class of `p` not commuting with `q`, with a
    /// conjugating element.
    fn noncommuting_conjugate(&self, p: ElemId, q: ElemId) -> (ElemId, ElemId) {
        let g = self.g;
        let d = *g
            .class_of(p)
            .iter()
            .find(|&&d| !g.commutes(d, q))
            .expect("centreless group: some conjugate fails to commute");
        let z = g.ids().find(|&z| g.conj(z, p) == d).expect("d conjugate to p");
        (d, z)
    }

    /// Delta on slot `slot` at point `b`, before its final value shift.
    ///
    /// Returns the node and its value at `b`; the node is the identity on
    /// every other point of the slot's domain.
    pub fn point_skeleton(&mut self, slot: usize, b: ElemId) -> Result<(NodeId, ElemId), WordError> {
        if let Some(&hit) = self.skeletons.get(&(slot, b)) {
            return Ok(hit);
        }
        let g = self.g;
        let domain = self.domains[slot].clone();
        let bi = domain
            .iter()
            .position(|&x| x == b)
            .ok_or(WordError::PointOutsideDomain)?;
        let id = g.identity();
        let inp = self.b.input(slot);
        let (mut u, mut vals) = if b != id {
            (inp, domain.clone())
        } else {
            let y0 = g.ids().find(|&y| y != id).expect("non-trivial group");
            let c = self.b.constant(g.elem(g.inv(y0)).clone());
            let u = self.b.concat(inp, c);
            let vals = domain.iter().map(|&y| g.mul(y, g.inv(y0))).collect();
            (u, vals)
        };
        for (xi, &x) in domain.iter().enumerate() {
            if xi == bi || vals[xi] == id {
                continue;
            }
            let p = vals[bi];
            let xinv = g.inv(x);
            let q = g.mul(b, xinv);
            let (_, z) = self.noncommuting_conjugate(p, q);
            let zp = g.elem(z).clone();
            let shifted = self.b.conjugate_by_const(&zp, u);
            let xc = self.b.constant(g.elem(xinv).clone());
            let q_node = self.b.concat(inp, xc);
            u = self.b.commutator(shifted, q_node);
            for (yi, &y) in domain.iter().enumerate() {
                vals[yi] = g.commutator(g.conj(z, vals[yi]), g.mul(y, xinv));
            }
        }
        let out = (u, vals[bi]);
        debug_assert!(out.1 != id);
        self.skeletons.insert((slot, b), out);
        Ok(out)
    }

    /// Node equal to `c` at `b` in slot `slot`, identity elsewhere on the domain.
    pub fn point_delta(&mut self, slot: usize, b: ElemId, c: ElemId) -> Result<NodeId, WordError> {
        if c == self.g.identity() {
            return Ok(self.b.empty());
        }
        let (node, val) = self.point_skeleton(slot, b)?;
        Ok(self.shift(node, val, c))
    }

    /// Delta on the tuple `points` (slots `0..n`), before its value shift.
    pub fn multi_skeleton(&mut self, points: &[ElemId]) -> Result<(NodeId, ElemId), WordError> {
        assert!(!points.is_empty(), "at least one point");
        if points.len() == 1 {
            return self.point_skeleton(0, points[0]);
        }
        if let Some(&hit) = self.multis.get(points) {
            return Ok(hit);
        }
        let n = points.len();
        let (left, l) = self.multi_skeleton(&points[..n - 1])?;
        let (right, r) = self.point_skeleton(n - 1, points[n - 1])?;
        let (d, z) = self.noncommuting_conjugate(r, l);
        let zp = self.g.elem(z).clone();
        let shifted = self.b.conjugate_by_const(&zp, right);
        let node = self.b.commutator(left, shifted);
        let out = (node, self.g.commutator(l, d));
        self.multis.insert(points.to_vec(), out);
        Ok(out)
    }

    /// Node equal to `c` exactly on `points`, identity elsewhere on the domains.
    pub fn multi_delta(&mut self, points: &[ElemId], c: ElemId) -> Result<NodeId, WordError> {
        if c == self.g.identity() {
            return Ok(self.b.empty());
        }
        let (node, val) = self.multi_skeleton(points)?;
        Ok(self.shift(node, val, c))
    }

    /// Balanced product, keeping flattening recursion shallow.
    pub fn balanced_product(&mut self, xs: &[NodeId]) -> NodeId {
        match xs.len() {
            0 => self.b.empty(),
            1 => xs[0],
            n => {
                let l = self.balanced_product(&xs[..n / 2]);
                let r = self.balanced_product(&xs[n / 2..]);
                self.b.concat(l, r)
            }
        }
    }
}

/// `h` with `h(c) = target` and `h(1) = 1`, as a product of conjugates of
/// the input.
pub fn conjugate_product_expression(
    g: &FiniteGroup,
    c: ElemId,
    target: ElemId,
) -> Result<Program, WordError> {
    let mut s = Synthesizer::new(g, 1)?;
    if c == g.identity() && target != g.identity() {
        return Err(WordError::SynthesisUnsupported("c must not be the identity".into()));
    }
    let inp = s.b.input(0);
    let root = s.shift(inp, c, target);
    Ok(s.finish(root))
}

/// `delta(b) = c`, `delta(g) = 1` for every other `g` in `G`.
pub fn point_delta(g: &FiniteGroup, b: ElemId, c: ElemId) -> Result<Program, WordError> {
    let mut s = Synthesizer::new(g, 1)?;
    let root = s.point_delta(0, b, c)?;
    Ok(s.finish(root))
}

/// Like [`point_delta`] but only exact on `domain`.
pub fn point_delta_on(
    g: &FiniteGroup,
    domain: &[ElemId],
    b: ElemId,
    c: ElemId,
) -> Result<Program, WordError> {
    let mut s = Synthesizer::with_domains(g, vec![domain.to_vec()])?;
    let root = s.point_delta(0, b, c)?;
    Ok(s.finish(root))
}

/// `c` exactly on the tuple `points`, identity elsewhere in `G^n`.
pub fn multi_point_delta(g: &FiniteGroup, points: &[ElemId], c: ElemId) -> Result<Program, WordError> {
    let mut s = Synthesizer::new(g, points.len())?;
    let root = s.multi_delta(points, c)?;
    Ok(s.finish(root))
}

/// Program agreeing with `table` on all of `G^arity`.
pub fn synthesize(
    g: &FiniteGroup,
    arity: usize,
    table: &dyn Fn(&[ElemId]) -> Option<ElemId>,
) -> Result<Program, WordError> {
    let all: Vec<ElemId> = g.ids().collect();
    synthesize_on(g, &vec![all; arity], table)
}

/// Program agreeing with `table` on the product of `domains`.
pub fn synthesize_on(
    g: &FiniteGroup,
    domains: &[Vec<ElemId>],
    table: &dyn Fn(&[ElemId]) -> Option<ElemId>,
) -> Result<Program, WordError> {
    let mut s = Synthesizer::with_domains(g, domains.to_vec())?;
    let mut terms = Vec::new();
    let mut tuple = vec![0usize; domains.len()];
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(Program::identity(domains.len(), g.degree()));
    }
    loop {
        let point: Vec<ElemId> = tuple.iter().zip(domains).map(|(&i, d)| d[i]).collect();
        let v = table(&point).ok_or_else(|| WordError::MissingEntry(point.clone()))?;
        if v != g.identity() {
            if point.is_empty() {
                let c = s.b.constant(g.elem(v).clone());
                terms.push(c);
            } else {
                terms.push(s.multi_delta(&point, v)?);
            }
        }
        // Odometer over the product of domains.
        let mut k = tuple.len();
        loop {
            if k == 0 {
                let root = s.balanced_product(&terms);
                return Ok(s.finish(root));
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < domains[k].len() {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Intermediate elements of the two-input qubit Toffoli construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToffoliConstants {
    /// `[a, b]`; the shifted inputs `g b^-1` take values in `{1, c}`.
    pub c: ElemId,
    /// Partner of `c` in the commutator, chosen from the class of `c`.
    pub d: ElemId,
    /// `[c, d]`, mapped onto `a` by the outer function.
    pub e: ElemId,
}

/// Constants for the qubit construction; `d` is the first member of the
/// class of `c` that does not commute with it.
pub fn toffoli_constants(g: &FiniteGroup, params: &QuditParams) -> ToffoliConstants {
    let c = g.commutator(params.a, params.b);
    let d = *g
        .class_of(c)
        .iter()
        .find(|&&d| !g.commutes(c, d))
        .expect("centreless group");
    ToffoliConstants {
        c,
        d,
        e: g.commutator(c, d),
    }
}

/// Conjugating function for the Toffoli gate: `f(|i>, |j>) = a^(ij)` on
/// basis fluxes.
///
/// For `d = 2` this is `h2([g1 b^-1, h1(g2 b^-1)])` with `h1(c) = d`,
/// `h2(e) = a`; for larger `d` it is a table synthesis restricted to the
/// basis in both slots. Values off the basis are unspecified.
pub fn toffoli_program(g: &FiniteGroup, params: &QuditParams) -> Result<Program, WordError> {
    let basis = params.basis(g);
    if params.d == 2 {
        let k = toffoli_constants(g, params);
        toffoli_program_with(g, params, k)
    } else {
        let d = params.d;
        let table = |xs: &[ElemId]| -> Option<ElemId> {
            let i = params.digit_of(g, xs[0])?;
            let j = params.digit_of(g, xs[1])?;
            Some(g.pow(params.a, ((i * j) % d) as i64))
        };
        synthesize_on(g, &[basis.clone(), basis], &table)
    }
}

/// Qubit Toffoli with caller-chosen constants.
pub fn toffoli_program_with(
    g: &FiniteGroup,
    params: &QuditParams,
    k: ToffoliConstants,
) -> Result<Program, WordError> {
    if params.d != 2 {
        return Err(WordError::SynthesisUnsupported(
            "commutator Toffoli needs d = 2".into(),
        ));
    }
    if g.commutes(k.c, k.d) || k.e != g.commutator(k.c, k.d) {
        return Err(WordError::SynthesisUnsupported("c and d must not commute".into()));
    }
    let mut s = Synthesizer::new(g, 2)?;
    let binv = g.elem(g.inv(params.b)).clone();
    let g1 = s.b.input(0);
    let g2 = s.b.input(1);
    let bc = s.b.constant(binv);
    let g1p = s.b.concat(g1, bc);
    let g2p = s.b.concat(g2, bc);
    let inner = s.shift(g2p, k.c, k.d);
    let comm = s.b.commutator(g1p, inner);
    let root = s.shift(comm, k.e, params.a);
    Ok(s.finish(root))
}

/// Unary function `a^i b a^-i -> a^i`, identity on every other element of
/// `G`. Conjugating a `|0>` pair by it is a controlled-sum extended to all
/// fluxes.
pub fn controlled_sum_extension(g: &FiniteGroup, params: &QuditParams) -> Result<Program, WordError> {
    let mut s = Synthesizer::new(g, 1)?;
    let mut terms = Vec::new();
    for i in 1..params.d {
        let point = params.basis_flux(g, i);
        let value = g.pow(params.a, i as i64);
        terms.push(s.point_delta(0, point, value)?);
    }
    let root = s.balanced_product(&terms);
    Ok(s.finish(root))
}
