use std::collections::HashMap;

use crate::group::{ElemId, FiniteGroup};
use crate::perm::Perm;
use crate::subgroup::Subgroup;
use crate::GroupError;

/// `G`, the perfect normal subgroup `P`, a maximal normal `N` of `P`, and
/// the simple perfect quotient `P/N` with its canonical epimorphism.
///
/// The quotient is realised by the action of `P` on the cosets `xN`.
#[derive(Clone, Debug)]
pub struct CosetContext {
    pub g: FiniteGroup,
    pub p: Subgroup,
    pub n: Subgroup,
    pub quotient: FiniteGroup,
    epi: Vec<Option<ElemId>>,
    coset_of: Vec<Option<usize>>,
}

impl CosetContext {
    /// Image of `x` in `P/N`, or `None` when `x` lies outside `P`.
    pub fn epi(&self, x: ElemId) -> Option<ElemId> {
        self.epi[x as usize]
    }

    /// Elements of `G` mapping to `y`.
    pub fn preimage(&self, y: ElemId) -> Vec<ElemId> {
        self.p
            .members()
            .iter()
            .copied()
            .filter(|&x| self.epi[x as usize] == Some(y))
            .collect()
    }

    /// Index of the coset `xN`, for `x` in `P`.
    pub fn coset_index(&self, x: ElemId) -> Option<usize> {
        self.coset_of[x as usize]
    }

    pub fn kernel(&self) -> Vec<ElemId> {
        self.preimage(self.quotient.identity())
    }
}

/// Derived-series limit `P`, a largest proper normal subgroup `N` of `P`,
/// and the quotient `P/N`, verified perfect and simple.
pub fn simple_perfect_quotient(g: &FiniteGroup) -> Result<CosetContext, GroupError> {
    let series = g.derived_series();
    let p = series.last().expect("non-empty").clone();
    if p.is_trivial() {
        return Err(GroupError::SolvableGroup);
    }
    let p_gens: Vec<Perm> = p.generators().iter().map(|&x| g.elem(x).clone()).collect();
    let p_group = FiniteGroup::generate(g.degree(), &p_gens)?;
    let normals = p_group.normal_subgroups();
    let n_local = normals
        .iter()
        .filter(|s| s.order() < p_group.order())
        .max_by(|a, b| a.order().cmp(&b.order()).then(b.members().cmp(a.members())))
        .expect("trivial subgroup is proper")
        .clone();
    let n_gens: Vec<ElemId> = n_local
        .generators()
        .iter()
        .map(|&x| g.index_of(p_group.elem(x)).expect("P inside G"))
        .collect();
    let n = g.subgroup(&n_gens);

    // Coset labels: smallest member of xN.
    let mut coset_of = vec![None; g.order()];
    let mut reps: Vec<ElemId> = Vec::new();
    for &x in p.members() {
        if coset_of[x as usize].is_some() {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &m in n.members() {
            coset_of[g.mul(x, m) as usize] = Some(id);
        }
    }
    let m = reps.len();
    let action = |x: ElemId| -> Result<Perm, GroupError> {
        let images: Vec<u8> = reps
            .iter()
            .map(|&r| coset_of[g.mul(x, r) as usize].expect("P closed") as u8)
            .collect();
        Perm::from_images(images)
    };
    if m > crate::perm::MAX_DEGREE {
        return Err(GroupError::BadDegree(m));
    }
    let q_gens = p
        .generators()
        .iter()
        .map(|&x| action(x))
        .collect::<Result<Vec<_>, _>>()?;
    let quotient = FiniteGroup::generate(m, &q_gens)?;
    let mut epi = vec![None; g.order()];
    let mut cache: HashMap<usize, ElemId> = HashMap::new();
    for &x in p.members() {
        let c = coset_of[x as usize].expect("in P");
        let y = match cache.get(&c) {
            Some(&y) => y,
            None => {
                let y = quotient
                    .index_of(&action(x)?)
                    .expect("action lands in quotient");
                cache.insert(c, y);
                y
            }
        };
        epi[x as usize] = Some(y);
    }
    if quotient.order() != m || !quotient.is_perfect() || !quotient.is_simple() {
        return Err(GroupError::QuotientCheck(format!(
            "|P/N| = {} is not simple and perfect",
            quotient.order()
        )));
    }
    Ok(CosetContext {
        g: g.clone(),
        p,
        n,
        quotient,
        epi,
        coset_of,
    })
}
