use std::collections::BTreeMap;

use fluxgroup::ElemId;
use fluxsim::{AnyonSystem, Charge, Complex64, PairId};

use crate::dense::{DenseState, DensityMatrix, MAX_QUDITS};
use crate::OracleError;

/// Reads a logical digit off the first flux of a pair.
///
/// `decode(x)` returns `(digit, tag)`; the tag separates fluxes that carry
/// the same digit but are distinguishable, such as different elements of
/// one coset.
pub struct PairCode<'a> {
    pub d: usize,
    pub decode: &'a dyn Fn(ElemId) -> Option<(usize, usize)>,
}

/// Reduced density matrix of the logical register held by `pairs`.
pub fn extract_density(sys: &AnyonSystem, pairs: &[PairId], code: &PairCode) -> Result<DensityMatrix, OracleError> {
    let k = pairs.len();
    if k > MAX_QUDITS {
        return Err(OracleError::TooManyQudits(MAX_QUDITS));
    }
    let g = sys.group();
    let mut idx = Vec::with_capacity(k);
    for p in pairs {
        idx.push((sys.slot_index(p.first)?, sys.slot_index(p.second)?));
    }
    let pair_slots: Vec<usize> = idx.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut rho = DensityMatrix::zero(code.d, k);
    let dim = rho.dim();
    for br in sys.branches() {
        for &(a, b) in &idx {
            if br.charges[a] != Charge::Trivial || br.charges[b] != Charge::Trivial {
                return Err(OracleError::OutOfSubspace(Vec::new()));
            }
        }
        let mut env: BTreeMap<(Vec<u16>, Vec<usize>), Vec<Complex64>> = BTreeMap::new();
        for (key, amp) in br.amplitudes() {
            let mut logical = 0;
            let mut tags = Vec::with_capacity(k);
            for &(a, b) in &idx {
                let (x, y) = (key[a], key[b]);
                let decoded = if g.inv(x) == y { (code.decode)(x) } else { None };
                let Some((digit, tag)) = decoded else {
                    return Err(OracleError::OutOfSubspace(key.to_vec()));
                };
                if digit >= code.d {
                    return Err(OracleError::OutOfSubspace(key.to_vec()));
                }
                logical = logical * code.d + digit;
                tags.push(tag);
            }
            let rest: Vec<u16> = key
                .iter()
                .enumerate()
                .filter(|(i, _)| !pair_slots.contains(i))
                .map(|(_, &v)| v)
                .collect();
            env.entry((rest, tags))
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim])[logical] += amp;
        }
        for v in env.values() {
            rho.add_pure(br.weight, v);
        }
    }
    let t = rho.trace();
    if t < 1e-300 {
        return Err(OracleError::ZeroNorm);
    }
    for x in rho.m.iter_mut() {
        *x /= t;
    }
    Ok(rho)
}

/// Logical state of `pairs`, which must be pure and unentangled with the
/// rest of the system.
pub fn extract_logical_state(sys: &AnyonSystem, pairs: &[PairId], code: &PairCode) -> Result<DenseState, OracleError> {
    let rho = extract_density(sys, pairs, code)?;
    let purity = rho.purity();
    if purity < 1.0 - 1e-9 {
        return Err(OracleError::Mixed(purity));
    }
    // Column of the largest diagonal entry is proportional to the state.
    let n = rho.dim();
    let j = (0..n)
        .max_by(|&a, &b| rho.entry(a, a).re.total_cmp(&rho.entry(b, b).re))
        .expect("non-empty");
    let col: Vec<Complex64> = (0..n).map(|i| rho.entry(i, j)).collect();
    DenseState::from_amplitudes(code.d, pairs.len(), col)
}
