use std::sync::Arc;

use fluxgroup::{CosetContext, ElemId, FiniteGroup, QuditParams};
use fluxsim::Complex64;
use fluxword::{Atom, Node, Program, ProgramBuilder};

use crate::GateError;

/// How logical fluxes map onto simulated fluxes.
///
/// In pure mode the logical group is the simulated group. In coset mode
/// the logical group is a simple perfect quotient `P/N` and a logical flux
/// `x` stands for the ensemble `rho_x` over its preimages.
#[derive(Clone, Debug)]
pub struct LogicalContext {
    sim: Arc<FiniteGroup>,
    logical: Arc<FiniteGroup>,
    epi: Vec<Option<ElemId>>,
    lift: Vec<ElemId>,
    params: QuditParams,
    coset: bool,
}

impl LogicalContext {
    pub fn pure(g: Arc<FiniteGroup>, params: QuditParams) -> Result<LogicalContext, GateError> {
        check_params(&g, &params)?;
        let ids: Vec<ElemId> = g.ids().collect();
        Ok(LogicalContext {
            sim: g.clone(),
            logical: g,
            epi: ids.iter().map(|&x| Some(x)).collect(),
            lift: ids,
            params,
            coset: false,
        })
    }

    /// Coset mode over `ctx`; `params` are over the quotient.
    pub fn coset(ctx: &CosetContext, params: QuditParams) -> Result<LogicalContext, GateError> {
        let q = Arc::new(ctx.quotient.clone());
        check_params(&q, &params)?;
        let sim = Arc::new(ctx.g.clone());
        let epi: Vec<Option<ElemId>> = sim.ids().map(|x| ctx.epi(x)).collect();
        let lift = q
            .ids()
            .map(|y| ctx.preimage(y).first().copied().ok_or(GateError::NotInQuotient))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LogicalContext {
            sim,
            logical: q,
            epi,
            lift,
            params,
            coset: true,
        })
    }

    pub fn sim_group(&self) -> &Arc<FiniteGroup> {
        &self.sim
    }

    pub fn logical_group(&self) -> &Arc<FiniteGroup> {
        &self.logical
    }

    pub fn params(&self) -> &QuditParams {
        &self.params
    }

    pub fn d(&self) -> usize {
        self.params.d as usize
    }

    pub fn is_coset(&self) -> bool {
        self.coset
    }

    /// Image of a simulated flux, `None` outside `P`.
    pub fn epi(&self, x: ElemId) -> Option<ElemId> {
        self.epi[x as usize]
    }

    pub fn lift(&self, y: ElemId) -> ElemId {
        self.lift[y as usize]
    }

    /// Logical basis flux of digit `n`.
    pub fn basis_flux(&self, n: u32) -> ElemId {
        self.params.basis_flux(&self.logical, n)
    }

    /// Digit carried by a simulated first flux.
    pub fn digit_of(&self, x: ElemId) -> Option<u32> {
        self.params.digit_of(&self.logical, self.epi(x)?)
    }

    /// `(digit, x lift(x_n)^-1)`: the digit and the offset inside `N`.
    pub fn classify(&self, x: ElemId) -> Option<(usize, ElemId)> {
        let n = self.digit_of(x)?;
        let l = self.lift(self.basis_flux(n));
        Some((n as usize, self.sim.mul(x, self.sim.inv(l))))
    }

    /// Ensemble for a pair carrying logical flux `y`: per conjugacy class
    /// of the simulated group, weight `|C ∩ f^-1(y)|` and a uniform
    /// superposition over that intersection.
    pub fn rho_parts(&self, y: ElemId) -> Vec<(f64, Vec<(ElemId, Complex64)>)> {
        let mut by_class: Vec<(usize, Vec<ElemId>)> = Vec::new();
        for x in self.sim.ids() {
            if self.epi(x) != Some(y) {
                continue;
            }
            let c = self.sim.class_index(x);
            match by_class.iter_mut().find(|e| e.0 == c) {
                Some(e) => e.1.push(x),
                None => by_class.push((c, vec![x])),
            }
        }
        by_class.sort_by_key(|e| e.0);
        by_class
            .into_iter()
            .map(|(_, xs)| {
                let amp = Complex64::new(1.0 / (xs.len() as f64).sqrt(), 0.0);
                (xs.len() as f64, xs.into_iter().map(|x| (x, amp)).collect())
            })
            .collect()
    }

    /// Rewrites a program over the logical group as one over the simulated
    /// group, lifting each constant.
    pub fn lift_program(&self, p: &Program) -> Result<Program, GateError> {
        if !self.coset {
            return Ok(p.clone());
        }
        let mut b = ProgramBuilder::new(p.arity(), self.sim.degree());
        let mut map = Vec::with_capacity(p.nodes().len());
        for node in p.nodes() {
            let id = match node {
                Node::Empty => b.empty(),
                Node::Atom(Atom::Const(c)) => {
                    let y = self.logical.index_of(c).ok_or(GateError::NotInQuotient)?;
                    b.constant(self.sim.elem(self.lift(y)).clone())
                }
                Node::Atom(a) => b.atom(a.clone()),
                Node::Concat(x, y) => b.concat(map[*x], map[*y]),
                Node::Inverse(x) => b.inverse(map[*x]),
                Node::Commutator(x, y) => b.commutator(map[*x], map[*y]),
            };
            map.push(id);
        }
        Ok(b.finish(map[p.root()]))
    }
}

fn check_params(g: &FiniteGroup, p: &QuditParams) -> Result<(), GateError> {
    let prime = p.d >= 2 && (2..p.d).all(|k| p.d % k != 0);
    if !prime || (p.a as usize) >= g.order() || (p.b as usize) >= g.order() {
        return Err(GateError::BadParams);
    }
    let basis = p.basis(g);
    let mut sorted = basis.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != basis.len() || p.basis_flux(g, p.d) != p.b {
        return Err(GateError::BadParams);
    }
    Ok(())
}
