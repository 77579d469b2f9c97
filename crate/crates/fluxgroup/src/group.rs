use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use crate::perm::{parse_cycles, Perm, MAX_DEGREE};
use crate::GroupError;

/// Index of an element inside its [`FiniteGroup`].
pub type ElemId = u16;

/// Desk-scale cap on enumerated groups.
pub const MAX_ORDER: usize = 20_000;

/// Groups up to this order get a full multiplication table.
const TABLE_LIMIT: usize = 1024;

#[derive(Clone, Debug)]
struct ClassData {
    classes: Vec<Vec<ElemId>>,
    class_of: Vec<usize>,
}

/// A permutation group with every element enumerated.
///
/// Elements are indexed in increasing order of their image tuples, so the
/// identity always has index 0.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<ElemId>,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, ElemId>,
    inverses: Vec<ElemId>,
    table: Option<Vec<ElemId>>,
    classes: OnceLock<ClassData>,
}

impl FiniteGroup {
    /// Enumerates the group generated by `gens` on `degree` points.
    pub fn generate(degree: usize, gens: &[Perm]) -> Result<Self, GroupError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(GroupError::BadDegree(degree));
        }
        for g in gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch(degree, g.degree()));
            }
        }
        let id = Perm::identity(degree);
        let mut seen: HashMap<Perm, ()> = HashMap::new();
        seen.insert(id.clone(), ());
        let mut queue = VecDeque::from([id]);
        let mut found = Vec::new();
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g.mul(&x);
                if !seen.contains_key(&y) {
                    if seen.len() >= MAX_ORDER {
                        return Err(GroupError::TooLarge(MAX_ORDER));
                    }
                    seen.insert(y.clone(), ());
                    queue.push_back(y);
                }
            }
            found.push(x);
        }
        found.sort();
        let lookup: HashMap<Perm, ElemId> = found
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as ElemId))
            .collect();
        let inverses = found.iter().map(|p| lookup[&p.inverse()]).collect();
        let mut gen_ids: Vec<ElemId> = gens.iter().map(|g| lookup[g]).filter(|&i| i != 0).collect();
        gen_ids.sort_unstable();
        gen_ids.dedup();
        let mut group = FiniteGroup {
            degree,
            generators: gen_ids,
            elements: found,
            lookup,
            inverses,
            table: None,
            classes: OnceLock::new(),
        };
        if group.order() <= TABLE_LIMIT {
            let n = group.order();
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let p = group.elements[a].mul(&group.elements[b]);
                    t.push(group.lookup[&p]);
                }
            }
            group.table = Some(t);
        }
        Ok(group)
    }

    /// Parses `"(1 2)(3 4);(3 4 5)"`; lines are treated like semicolons.
    ///
    /// The degree is the largest point mentioned (at least 1).
    pub fn parse(spec: &str) -> Result<Self, GroupError> {
        let mut parsed: Vec<Vec<Vec<usize>>> = Vec::new();
        for (lineno, line) in spec.lines().enumerate() {
            let line_no_comment = line.split('#').next().unwrap_or("");
            let mut offset = 0;
            for piece in line_no_comment.split(';') {
                let cycles = parse_cycles(piece, lineno + 1).map_err(|e| match e {
                    GroupError::Parse { line, col, msg } => GroupError::Parse {
                        line,
                        col: col + offset,
                        msg,
                    },
                    other => other,
                })?;
                if !piece.trim().is_empty() {
                    parsed.push(cycles);
                }
                offset += piece.chars().count() + 1;
            }
        }
        let degree = parsed
            .iter()
            .flatten()
            .flatten()
            .copied()
            .max()
            .unwrap_or(1);
        if degree > MAX_DEGREE {
            return Err(GroupError::BadDegree(degree));
        }
        let gens = parsed
            .into_iter()
            .map(|cycles| {
                let zb: Vec<Vec<usize>> = cycles
                    .into_iter()
                    .map(|c| c.into_iter().map(|p| p - 1).collect())
                    .collect();
                Perm::from_cycles(degree, &zb)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::generate(degree, &gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn elem(&self, i: ElemId) -> &Perm {
        &self.elements[i as usize]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn ids(&self) -> impl Iterator<Item = ElemId> {
        (0..self.order()).map(|i| i as ElemId)
    }

    pub fn index_of(&self, p: &Perm) -> Option<ElemId> {
        self.lookup.get(p).copied()
    }

    /// Parses 1-based cycle notation and locates the element.
    pub fn parse_elem(&self, text: &str) -> Result<ElemId, GroupError> {
        let p = Perm::parse(text, self.degree)?;
        self.index_of(&p)
            .ok_or_else(|| GroupError::NotInGroup(p.to_string()))
    }

    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.lookup[&self.elements[a as usize].mul(&self.elements[b as usize])],
        }
    }

    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inverses[a as usize]
    }

    /// `x * g * x^-1`.
    pub fn conj(&self, x: ElemId, g: ElemId) -> ElemId {
        self.mul(self.mul(x, g), self.inv(x))
    }

    /// `[x, y] = x y x^-1 y^-1`.
    pub fn commutator(&self, x: ElemId, y: ElemId) -> ElemId {
        self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))
    }

    pub fn commutes(&self, x: ElemId, y: ElemId) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn pow(&self, a: ElemId, n: i64) -> ElemId {
        let base = if n < 0 { self.inv(a) } else { a };
        let mut out = self.identity();
        for _ in 0..n.unsigned_abs() {
            out = self.mul(base, out);
        }
        out
    }

    pub fn order_of(&self, a: ElemId) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Product of a sequence, left to right.
    pub fn product(&self, xs: &[ElemId]) -> ElemId {
        xs.iter().fold(self.identity(), |acc, &x| self.mul(acc, x))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|&x| self.generators.iter().all(|&y| self.commutes(x, y)))
    }

    fn class_data(&self) -> &ClassData {
        self.classes.get_or_init(|| {
            let n = self.order();
            let mut class_of = vec![usize::MAX; n];
            let mut classes = Vec::new();
            for start in 0..n {
                if class_of[start] != usize::MAX {
                    continue;
                }
                let cid = classes.len();
                let mut members = vec![start as ElemId];
                class_of[start] = cid;
                let mut i = 0;
                while i < members.len() {
                    let g = members[i];
                    for &x in &self.generators {
                        let y = self.conj(x, g);
                        if class_of[y as usize] == usize::MAX {
                            class_of[y as usize] = cid;
                            members.push(y);
                        }
                    }
                    i += 1;
                }
                members.sort_unstable();
                classes.push(members);
            }
            ClassData { classes, class_of }
        })
    }

    /// Conjugacy classes ordered by smallest member; the first is `{1}`.
    pub fn conjugacy_classes(&self) -> &[Vec<ElemId>] {
        &self.class_data().classes
    }

    pub fn class_index(&self, g: ElemId) -> usize {
        self.class_data().class_of[g as usize]
    }

    pub fn class_of(&self, g: ElemId) -> &[ElemId] {
        &self.class_data().classes[self.class_index(g)]
    }

    /// Smallest member of each class.
    pub fn class_representatives(&self) -> Vec<ElemId> {
        self.conjugacy_classes().iter().map(|c| c[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reports_columns() {
        let err = FiniteGroup::parse("(1 2);(3 x)").unwrap_err();
        match err {
            GroupError::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 6, "column {col}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_is_index_zero() {
        let g = FiniteGroup::parse("(1 2 3);(1 2)").unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.elem(0).is_identity());
        for a in g.ids() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }

    #[test]
    fn trivial_group_from_empty_spec() {
        let g = FiniteGroup::parse("").unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.conjugacy_classes().len(), 1);
    }
}
