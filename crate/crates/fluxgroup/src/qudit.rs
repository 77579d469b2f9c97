use crate::group::{ElemId, FiniteGroup};
use crate::GroupError;

/// Basis parameters: `|n> = |a^n b a^-n>` for `0 <= n < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuditParams {
    pub a: ElemId,
    pub b: ElemId,
    pub d: u32,
}

impl QuditParams {
    /// Flux of the first anyon of `|n>`.
    pub fn basis_flux(&self, g: &FiniteGroup, n: u32) -> ElemId {
        let an = g.pow(self.a, n as i64);
        g.conj(an, self.b)
    }

    /// All basis fluxes in digit order.
    pub fn basis(&self, g: &FiniteGroup) -> Vec<ElemId> {
        (0..self.d).map(|n| self.basis_flux(g, n)).collect()
    }

    /// Digit of a flux, if it is a basis flux.
    pub fn digit_of(&self, g: &FiniteGroup, flux: ElemId) -> Option<u32> {
        (0..self.d).find(|&n| self.basis_flux(g, n) == flux)
    }
}

/// Optional constraints for [`find_qudit_params`].
#[derive(Clone, Copy, Debug, Default)]
pub struct QuditPreference {
    pub d: Option<u32>,
    pub a: Option<ElemId>,
    pub b: Option<ElemId>,
}

impl QuditPreference {
    pub fn with_d(d: u32) -> Self {
        QuditPreference {
            d: Some(d),
            ..Default::default()
        }
    }
}

/// Length of the orbit of `b` under conjugation by `a`.
pub fn conjugation_period(g: &FiniteGroup, a: ElemId, b: ElemId) -> u32 {
    let mut x = g.conj(a, b);
    let mut k = 1;
    while x != b {
        x = g.conj(a, x);
        k += 1;
    }
    k
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Chooses `(a, b, d)` with `d` prime and `a^i b a^-i` distinct for `i < d`.
///
/// Ties: smallest admissible prime `d`; then `a` smallest in cycle-notation
/// order; then `b` smallest in element-index order. Candidates with composite
/// period are covered because `a^(d/p)` appears in the search itself.
pub fn find_qudit_params(g: &FiniteGroup, pref: &QuditPreference) -> Result<QuditParams, GroupError> {
    let mut a_order: Vec<ElemId> = match pref.a {
        Some(a) => vec![a],
        None => g.ids().filter(|&x| x != g.identity()).collect(),
    };
    a_order.sort_by_key(|&x| (g.elem(x).cycle_key(), x));
    let b_order: Vec<ElemId> = match pref.b {
        Some(b) => vec![b],
        None => g.ids().collect(),
    };
    let mut best: Option<(u32, usize, usize)> = None;
    for (ai, &a) in a_order.iter().enumerate() {
        for (bi, &b) in b_order.iter().enumerate() {
            if g.commutes(a, b) {
                continue;
            }
            let d = conjugation_period(g, a, b);
            if !is_prime(d) || pref.d.is_some_and(|want| d != want) {
                continue;
            }
            if best.map_or(true, |cur| (d, ai, bi) < cur) {
                best = Some((d, ai, bi));
            }
        }
    }
    let best = best.map(|(d, ai, bi)| QuditParams {
        a: a_order[ai],
        b: b_order[bi],
        d,
    });
    best.ok_or(GroupError::NoSuchParameters(pref.d))
}
