use crate::group::{ElemId, FiniteGroup};

/// A subgroup stored as a member set of its parent group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<ElemId>,
    mask: Vec<bool>,
    gens: Vec<ElemId>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn contains(&self, g: ElemId) -> bool {
        self.mask.get(g as usize).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }
}

impl FiniteGroup {
    /// Subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[ElemId]) -> Subgroup {
        let n = self.order();
        let mut mask = vec![false; n];
        let mut members = vec![self.identity()];
        mask[self.identity() as usize] = true;
        let mut kept = Vec::new();
        for &g in gens {
            if mask[g as usize] {
                continue;
            }
            kept.push(g);
            // Re-close: multiply every known member by every kept generator.
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                for &s in &kept {
                    let y = self.mul(x, s);
                    if !mask[y as usize] {
                        mask[y as usize] = true;
                        members.push(y);
                    }
                }
                i += 1;
            }
        }
        members.sort_unstable();
        Subgroup {
            members,
            mask,
            gens: kept,
        }
    }

    pub fn whole(&self) -> Subgroup {
        let gens = self.generators().to_vec();
        self.subgroup(&gens)
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup(&[])
    }

    /// Smallest subgroup containing `gens` that is normalised by `within`.
    pub fn normal_closure_in(&self, within: &Subgroup, gens: &[ElemId]) -> Subgroup {
        let mut current = self.subgroup(gens);
        loop {
            let mut extra = None;
            'search: for &h in within.generators() {
                for &s in current.generators() {
                    let y = self.conj(h, s);
                    if !current.contains(y) {
                        extra = Some(y);
                        break 'search;
                    }
                }
            }
            match extra {
                Some(y) => {
                    let mut g = current.gens.clone();
                    g.push(y);
                    current = self.subgroup(&g);
                }
                None => return current,
            }
        }
    }

    pub fn normal_closure(&self, gens: &[ElemId]) -> Subgroup {
        self.normal_closure_in(&self.whole(), gens)
    }

    /// Subgroup generated by two subgroups.
    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens = a.gens.clone();
        gens.extend_from_slice(&b.gens);
        self.subgroup(&gens)
    }

    /// `[H, H]`: the normal closure in `H` of commutators of generators.
    pub fn commutator_subgroup(&self, h: &Subgroup) -> Subgroup {
        let gs = h.generators();
        let mut comms = Vec::new();
        for (i, &x) in gs.iter().enumerate() {
            for &y in &gs[i + 1..] {
                let c = self.commutator(x, y);
                if c != self.identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure_in(h, &comms)
    }

    /// `[G, G^(1), G^(2), ..]` ending at the first repeated term.
    pub fn derived_series(&self) -> Vec<Subgroup> {
        let mut series = vec![self.whole()];
        loop {
            let last = series.last().expect("non-empty");
            let next = self.commutator_subgroup(last);
            if next.order() == last.order() {
                return series;
            }
            series.push(next);
        }
    }

    /// Normal in `within`: closed under conjugation by its generators.
    pub fn is_normal_in(&self, h: &Subgroup, within: &Subgroup) -> bool {
        within
            .generators()
            .iter()
            .all(|&x| h.generators().iter().all(|&s| h.contains(self.conj(x, s))))
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.is_normal_in(h, &self.whole())
    }

    pub fn is_perfect(&self) -> bool {
        self.commutator_subgroup(&self.whole()).order() == self.order()
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series()
            .last()
            .map(|s| s.is_trivial())
            .unwrap_or(true)
    }

    /// True iff the group is non-trivial and every non-identity class
    /// generates the whole group as a normal subgroup.
    ///
    /// The trivial group is not simple.
    pub fn is_simple(&self) -> bool {
        if self.order() == 1 {
            return false;
        }
        self.class_representatives()
            .into_iter()
            .filter(|&r| r != self.identity())
            .all(|r| self.normal_closure(&[r]).order() == self.order())
    }

    /// Every normal subgroup, as joins of normal closures of class
    /// representatives. Sorted by order, trivial first.
    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        let mut found: Vec<Subgroup> = vec![self.trivial_subgroup()];
        for r in self.class_representatives() {
            if r == self.identity() {
                continue;
            }
            let nc = self.normal_closure(&[r]);
            if !found.iter().any(|s| s.members == nc.members) {
                found.push(nc);
            }
        }
        let mut i = 0;
        while i < found.len() {
            let mut j = 0;
            while j < i {
                let joined = self.join(&found[i], &found[j]);
                if !found.iter().any(|s| s.members == joined.members) {
                    found.push(joined);
                }
                j += 1;
            }
            i += 1;
        }
        found.sort_by(|a, b| a.order().cmp(&b.order()).then(a.members.cmp(&b.members)));
        found
    }
}
