use std::collections::BTreeMap;
use std::sync::Arc;

use fluxgroup::{ElemId, FiniteGroup};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::probe::Representation;
use crate::{ProbeId, SimError};

pub type AnyonId = u32;

/// Sparse amplitudes keyed by `[anyon fluxes.., probe indices..]`.
pub(crate) type Amps = BTreeMap<Vec<u16>, Complex64>;

/// Branches lighter than this are dropped after each collapse.
pub(crate) const PRUNE_WEIGHT: f64 = 1e-13;
/// Amplitudes with smaller squared modulus are dropped.
pub(crate) const PRUNE_AMP2: f64 = 1e-30;

/// Deterministic per-trial generator derived from `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Two anyons created together; `first` carries `g`, `second` carries `g^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId {
    pub first: AnyonId,
    pub second: AnyonId,
}

impl PairId {
    pub fn anyons(&self) -> [AnyonId; 2] {
        [self.first, self.second]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Cw,
    Ccw,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }
}

/// Operational electric-charge annotation of one anyon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Charge {
    Trivial,
    /// Blocks vacuum fusion with anything except its creation partner.
    Charged { partner: Option<AnyonId> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionOutcome {
    Vacuum,
    Residual,
}

/// One pure component of the ensemble.
#[derive(Clone, Debug)]
pub struct Branch {
    pub weight: f64,
    /// Indexed like the anyon slots.
    pub charges: Vec<Charge>,
    pub(crate) amps: Amps,
}

impl Branch {
    pub fn amplitudes(&self) -> impl Iterator<Item = (&[u16], Complex64)> {
        self.amps.iter().map(|(k, a)| (k.as_slice(), *a))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    fn norm2(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    fn same_state(&self, other: &Branch) -> bool {
        if self.charges != other.charges || self.amps.len() != other.amps.len() {
            return false;
        }
        let mut ip = Complex64::new(0.0, 0.0);
        for ((ka, a), (kb, b)) in self.amps.iter().zip(other.amps.iter()) {
            if ka != kb {
                return false;
            }
            ip += a.conj() * b;
        }
        ip.norm() > 1.0 - 1e-10
    }
}

/// Probabilities of the superselection sectors of a pair created from the vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorModel {
    /// `(class representative, weight)` for magnetic sectors.
    pub magnetic: Vec<(ElemId, f64)>,
    /// Weight of the aggregated charged/dyonic sector.
    pub charged: f64,
}

impl SectorModel {
    /// Uniform over the non-trivial classes, plus `charged` for the charged sector.
    pub fn uniform(g: &FiniteGroup, charged: f64) -> SectorModel {
        let reps: Vec<ElemId> = g
            .class_representatives()
            .into_iter()
            .filter(|&r| r != g.identity())
            .collect();
        let w = (1.0 - charged) / reps.len().max(1) as f64;
        SectorModel {
            magnetic: reps.into_iter().map(|r| (r, w)).collect(),
            charged,
        }
    }

    /// All weight on the class of `rep`.
    pub fn concentrated(rep: ElemId) -> SectorModel {
        SectorModel {
            magnetic: vec![(rep, 1.0)],
            charged: 0.0,
        }
    }

    fn validated(&self, g: &FiniteGroup) -> Result<Vec<(Option<ElemId>, f64)>, SimError> {
        let mut out = Vec::new();
        let mut total = 0.0;
        let mut seen = Vec::new();
        for &(r, w) in &self.magnetic {
            if r as usize >= g.order() {
                return Err(SimError::NotInGroup);
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(SimError::BadSectorWeights(format!("weight {w}")));
            }
            let c = g.class_index(r);
            if seen.contains(&c) {
                return Err(SimError::BadSectorWeights("class listed twice".into()));
            }
            seen.push(c);
            total += w;
            out.push((Some(g.class_of(r)[0]), w));
        }
        if !(self.charged.is_finite() && self.charged >= 0.0) {
            return Err(SimError::BadSectorWeights(format!("charged weight {}", self.charged)));
        }
        total += self.charged;
        out.push((None, self.charged));
        if total <= 0.0 {
            return Err(SimError::BadSectorWeights("weights sum to zero".into()));
        }
        Ok(out
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(r, w)| (r, w / total))
            .collect())
    }
}

pub(crate) struct ProbeSlot {
    pub id: ProbeId,
    pub rep: Arc<Representation>,
}

/// New-anyon sector passed to [`AnyonSystem::append`].
pub(crate) struct Sector {
    pub weight: f64,
    pub charges: Vec<Charge>,
    pub terms: Vec<(Vec<u16>, Complex64)>,
}

/// Flux anyons on a line, as an ensemble of sparse pure branches.
pub struct AnyonSystem {
    group: Arc<FiniteGroup>,
    rng: ChaCha8Rng,
    next_id: AnyonId,
    pub(crate) next_probe: u32,
    /// Key index -> anyon.
    slots: Vec<AnyonId>,
    /// Left-to-right order.
    line: Vec<AnyonId>,
    pub(crate) probes: Vec<ProbeSlot>,
    pub(crate) branches: Vec<Branch>,
    transcript: Vec<String>,
    recording: bool,
}

fn without(key: &[u16], drop: &[usize]) -> Vec<u16> {
    key.iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, &v)| v)
        .collect()
}

fn remove_sorted<T>(v: &mut Vec<T>, mut idx: Vec<usize>) {
    idx.sort_unstable();
    for i in idx.into_iter().rev() {
        v.remove(i);
    }
}

impl AnyonSystem {
    pub fn new(group: Arc<FiniteGroup>, rng: ChaCha8Rng) -> AnyonSystem {
        let mut amps = Amps::new();
        amps.insert(Vec::new(), Complex64::new(1.0, 0.0));
        AnyonSystem {
            group,
            rng,
            next_id: 0,
            next_probe: 0,
            slots: Vec::new(),
            line: Vec::new(),
            probes: Vec::new(),
            branches: vec![Branch {
                weight: 1.0,
                charges: Vec::new(),
                amps,
            }],
            transcript: Vec::new(),
            recording: true,
        }
    }

    pub fn seeded(group: Arc<FiniteGroup>, seed: u64) -> AnyonSystem {
        AnyonSystem::new(group, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn take_transcript(&mut self) -> Vec<String> {
        std::mem::take(&mut self.transcript)
    }

    pub fn note(&mut self, line: impl FnOnce() -> String) {
        if self.recording {
            self.transcript.push(line());
        }
    }

    pub fn line(&self) -> &[AnyonId] {
        &self.line
    }

    pub fn num_anyons(&self) -> usize {
        self.slots.len()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Key index of an anyon.
    pub fn slot_index(&self, id: AnyonId) -> Result<usize, SimError> {
        self.slots
            .iter()
            .position(|&s| s == id)
            .ok_or(SimError::NoSuchAnyon(id))
    }

    pub fn position(&self, id: AnyonId) -> Result<usize, SimError> {
        self.line
            .iter()
            .position(|&s| s == id)
            .ok_or(SimError::NoSuchAnyon(id))
    }

    pub(crate) fn probe_offset(&self, idx: usize) -> usize {
        self.slots.len() + 2 * idx
    }

    fn fresh_ids(&mut self, n: usize) -> Vec<AnyonId> {
        (0..n)
            .map(|_| {
                let id = self.next_id;
                self.next_id += 1;
                id
            })
            .collect()
    }

    /// Tensors every branch with each sector, inserting new anyon slots
    /// before the probe entries.
    pub(crate) fn append(&mut self, ids: &[AnyonId], sectors: &[Sector]) {
        let n0 = self.slots.len();
        let old = std::mem::take(&mut self.branches);
        for b in old {
            for s in sectors {
                let mut amps = Amps::new();
                for (k, a) in &b.amps {
                    for (t, c) in &s.terms {
                        let mut key = Vec::with_capacity(k.len() + t.len());
                        key.extend_from_slice(&k[..n0]);
                        key.extend_from_slice(t);
                        key.extend_from_slice(&k[n0..]);
                        *amps.entry(key).or_default() += a * c;
                    }
                }
                let mut charges = b.charges.clone();
                charges.extend_from_slice(&s.charges);
                self.branches.push(Branch {
                    weight: b.weight * s.weight,
                    charges,
                    amps,
                });
            }
        }
        self.slots.extend_from_slice(ids);
        self.line.extend_from_slice(ids);
    }

    /// Pair of definite fluxes `g`, `g^-1` at the right end of the line.
    pub fn create_flux_ancilla(&mut self, g: ElemId) -> PairId {
        let ids = self.fresh_ids(2);
        let gi = self.group.inv(g);
        self.append(
            &ids,
            &[Sector {
                weight: 1.0,
                charges: vec![Charge::Trivial; 2],
                terms: vec![(vec![g, gi], Complex64::new(1.0, 0.0))],
            }],
        );
        PairId {
            first: ids[0],
            second: ids[1],
        }
    }

    /// Pair created from the vacuum; one branch per sector of `model`.
    pub fn create_vacuum_pair(&mut self, model: &SectorModel) -> Result<PairId, SimError> {
        let sectors = model.validated(&self.group)?;
        let ids = self.fresh_ids(2);
        let g = self.group.clone();
        let built: Vec<Sector> = sectors
            .iter()
            .map(|&(rep, w)| match rep {
                Some(r) => {
                    let class = g.class_of(r);
                    let amp = Complex64::new(1.0 / (class.len() as f64).sqrt(), 0.0);
                    Sector {
                        weight: w,
                        charges: vec![Charge::Trivial; 2],
                        terms: class.iter().map(|&x| (vec![x, g.inv(x)], amp)).collect(),
                    }
                }
                None => Sector {
                    weight: w,
                    charges: vec![
                        Charge::Charged {
                            partner: Some(ids[1]),
                        },
                        Charge::Charged {
                            partner: Some(ids[0]),
                        },
                    ],
                    terms: vec![(vec![g.identity(); 2], Complex64::new(1.0, 0.0))],
                },
            })
            .collect();
        self.append(&ids, &built);
        self.normalize_and_merge();
        Ok(PairId {
            first: ids[0],
            second: ids[1],
        })
    }

    /// Anyons with arbitrary joint amplitudes over their fluxes; the terms
    /// are normalized. Used to inject states and errors.
    pub fn create_anyons(
        &mut self,
        charges: &[Charge],
        terms: &[(Vec<ElemId>, Complex64)],
    ) -> Result<Vec<AnyonId>, SimError> {
        let n = charges.len();
        let mut merged: BTreeMap<Vec<u16>, Complex64> = BTreeMap::new();
        for (k, a) in terms {
            if k.len() != n {
                return Err(SimError::DimensionMismatch);
            }
            if k.iter().any(|&x| x as usize >= self.group.order()) {
                return Err(SimError::NotInGroup);
            }
            *merged.entry(k.clone()).or_default() += a;
        }
        let norm: f64 = merged.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(SimError::ZeroNorm);
        }
        let ids = self.fresh_ids(n);
        self.append(
            &ids,
            &[Sector {
                weight: 1.0,
                charges: charges.to_vec(),
                terms: merged.into_iter().map(|(k, a)| (k, a / norm)).collect(),
            }],
        );
        Ok(ids)
    }

    /// Pairs `(x_i, x_i^-1)` jointly in `sum_t c_t |x_t>`; each term lists
    /// the first fluxes of all pairs.
    pub fn create_pairs_entangled(
        &mut self,
        terms: &[(Vec<ElemId>, Complex64)],
    ) -> Result<Vec<PairId>, SimError> {
        let k = terms.first().map(|t| t.0.len()).unwrap_or(0);
        let g = self.group.clone();
        let mut expanded = Vec::with_capacity(terms.len());
        for (xs, a) in terms {
            if xs.len() != k {
                return Err(SimError::DimensionMismatch);
            }
            if xs.iter().any(|&x| x as usize >= g.order()) {
                return Err(SimError::NotInGroup);
            }
            let key: Vec<ElemId> = xs.iter().flat_map(|&x| [x, g.inv(x)]).collect();
            expanded.push((key, *a));
        }
        let ids = self.create_anyons(&vec![Charge::Trivial; 2 * k], &expanded)?;
        Ok(ids
            .chunks(2)
            .map(|c| PairId {
                first: c[0],
                second: c[1],
            })
            .collect())
    }

    /// One pair `(x, x^-1)` in an ensemble: each entry is a weight and a
    /// superposition over first fluxes. Weights are normalized.
    pub fn create_pair_mixture(&mut self, parts: &[(f64, Vec<(ElemId, Complex64)>)]) -> Result<PairId, SimError> {
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.is_empty() || parts.iter().any(|p| !(p.0 >= 0.0)) || total <= 0.0 {
            return Err(SimError::BadSectorWeights("mixture weights".into()));
        }
        let g = self.group.clone();
        let mut sectors = Vec::with_capacity(parts.len());
        for (w, terms) in parts {
            if *w == 0.0 {
                continue;
            }
            if terms.iter().any(|&(x, _)| x as usize >= g.order()) {
                return Err(SimError::NotInGroup);
            }
            let norm: f64 = terms.iter().map(|t| t.1.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(SimError::ZeroNorm);
            }
            sectors.push(Sector {
                weight: w / total,
                charges: vec![Charge::Trivial; 2],
                terms: terms.iter().map(|&(x, a)| (vec![x, g.inv(x)], a / norm)).collect(),
            });
        }
        let ids = self.fresh_ids(2);
        self.append(&ids, &sectors);
        if sectors.len() > 1 {
            self.normalize_and_merge();
        }
        Ok(PairId {
            first: ids[0],
            second: ids[1],
        })
    }

    /// Moves every anyon of `other` to the right end of this line, as a
    /// product with the current state. `other` must hold no probes and use
    /// the same group. Returns the new ids in `other`'s line order.
    pub fn absorb(&mut self, other: AnyonSystem) -> Result<Vec<AnyonId>, SimError> {
        if !other.probes.is_empty() || other.group.order() != self.group.order() {
            return Err(SimError::DimensionMismatch);
        }
        let n = other.slots.len();
        let order: Vec<usize> = other
            .line
            .iter()
            .map(|id| other.slots.iter().position(|s| s == id).expect("line anyons have slots"))
            .collect();
        let ids = self.fresh_ids(n);
        let rename = |id: AnyonId| -> AnyonId {
            let s = other.line.iter().position(|&x| x == id).expect("partner on line");
            ids[s]
        };
        let sectors: Vec<Sector> = other
            .branches
            .iter()
            .map(|b| Sector {
                weight: b.weight,
                charges: order
                    .iter()
                    .map(|&s| match b.charges[s] {
                        Charge::Charged { partner: Some(p) } => Charge::Charged {
                            partner: Some(rename(p)),
                        },
                        c => c,
                    })
                    .collect(),
                terms: b
                    .amps
                    .iter()
                    .map(|(k, a)| (order.iter().map(|&s| k[s]).collect(), *a))
                    .collect(),
            })
            .collect();
        self.append(&ids, &sectors);
        if sectors.len() > 1 {
            self.normalize_and_merge();
        }
        Ok(ids)
    }

    /// Multiplies the flux of `id` by `g` in every configuration, on the
    /// left or the right. Not a braid: models a stray flux absorbed from
    /// outside the system.
    pub fn multiply_flux(&mut self, id: AnyonId, g: ElemId, left: bool) -> Result<(), SimError> {
        if g as usize >= self.group.order() {
            return Err(SimError::NotInGroup);
        }
        let s = self.slot_index(id)?;
        let grp = self.group.clone();
        self.map_keys(|k| {
            k[s] = if left { grp.mul(g, k[s]) } else { grp.mul(k[s], g) };
        });
        Ok(())
    }

    /// Replaces the charge tag of an anyon in every branch.
    pub fn set_charge(&mut self, id: AnyonId, charge: Charge) -> Result<(), SimError> {
        let s = self.slot_index(id)?;
        for b in &mut self.branches {
            b.charges[s] = charge;
        }
        self.normalize_and_merge();
        Ok(())
    }

    pub(crate) fn map_keys(&mut self, mut f: impl FnMut(&mut Vec<u16>)) {
        for b in &mut self.branches {
            let old = std::mem::take(&mut b.amps);
            b.amps = old
                .into_iter()
                .map(|(mut k, a)| {
                    f(&mut k);
                    (k, a)
                })
                .collect();
        }
    }

    /// Elementary exchange of the anyons at `pos` and `pos + 1`.
    ///
    /// Counterclockwise, the right anyon moves left and is conjugated by
    /// the left flux: `(l, r) -> (l r l^-1, l)`. Clockwise is the inverse:
    /// `(l, r) -> (r, r^-1 l r)`.
    pub fn exchange(&mut self, pos: usize, dir: Direction) -> Result<(), SimError> {
        if pos + 1 >= self.line.len() {
            return Err(SimError::PositionOutOfRange(pos));
        }
        let l = self.slot_index(self.line[pos])?;
        let r = self.slot_index(self.line[pos + 1])?;
        let g = self.group.clone();
        match dir {
            Direction::Ccw => self.map_keys(|k| k[r] = g.conj(k[l], k[r])),
            Direction::Cw => self.map_keys(|k| k[l] = g.conj(g.inv(k[r]), k[l])),
        }
        self.line.swap(pos, pos + 1);
        Ok(())
    }

    /// Moves anyons to the right end of the line, in the given order,
    /// routing below everything else so no flux changes.
    pub fn transport_to_end(&mut self, ids: &[AnyonId]) -> Result<(), SimError> {
        for &id in ids {
            let p = self.position(id)?;
            self.line.remove(p);
            self.line.push(id);
        }
        Ok(())
    }

    fn check_trivial_net(&self, p: PairId) -> Result<(), SimError> {
        let a = self.slot_index(p.first)?;
        let b = self.slot_index(p.second)?;
        let g = &self.group;
        for br in &self.branches {
            for k in br.amps.keys() {
                if g.mul(k[a], k[b]) != g.identity() {
                    return Err(SimError::NonTrivialNetFlux(p.first, p.second));
                }
            }
        }
        Ok(())
    }

    /// Net flux central in every configuration; braiding around such a
    /// pair leaves the encircling anyons unchanged.
    fn check_central_net(&self, p: PairId) -> Result<(), SimError> {
        let a = self.slot_index(p.first)?;
        let b = self.slot_index(p.second)?;
        let g = &self.group;
        for br in &self.branches {
            for k in br.amps.keys() {
                let h = g.mul(k[a], k[b]);
                if g.generators().iter().any(|&s| !g.commutes(h, s)) {
                    return Err(SimError::NonTrivialNetFlux(p.first, p.second));
                }
            }
        }
        Ok(())
    }

    /// Product of the fluxes of a pair in each configuration is trivial.
    pub fn has_trivial_net_flux(&self, p: PairId) -> Result<bool, SimError> {
        match self.check_trivial_net(p) {
            Ok(()) => Ok(true),
            Err(SimError::NonTrivialNetFlux(..)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Conjugates the target pair by the actor's first flux (`power = 1`)
    /// or its inverse (`power = -1`), by eight elementary exchanges.
    /// Both pairs need central net flux.
    pub fn conjugate_pair(&mut self, actor: PairId, target: PairId, power: i32) -> Result<(), SimError> {
        let ids = [actor.first, actor.second, target.first, target.second];
        for i in 0..4 {
            for j in i + 1..4 {
                if ids[i] == ids[j] {
                    return Err(SimError::OverlappingPairs);
                }
            }
        }
        self.check_central_net(actor)?;
        self.check_central_net(target)?;
        self.transport_to_end(&ids)?;
        let base = self.line.len() - 4;
        use Direction::*;
        const SEQ: [(usize, Direction); 8] = [
            (1, Cw),
            (2, Cw),
            (0, Ccw),
            (1, Ccw),
            (1, Ccw),
            (0, Ccw),
            (2, Ccw),
            (1, Ccw),
        ];
        if power >= 0 {
            for (p, d) in SEQ {
                self.exchange(base + p, d)?;
            }
        } else {
            for (p, d) in SEQ.iter().rev() {
                self.exchange(base + p, d.reversed())?;
            }
        }
        Ok(())
    }

    /// Conjugates `target` by `f(control fluxes)` (or its inverse) directly
    /// on every configuration; equal in effect to the braid realization of
    /// any product-form word for `f`. The target's net flux may be any
    /// central element.
    pub fn conjugate_by_function(
        &mut self,
        controls: &[AnyonId],
        target: PairId,
        inverse: bool,
        f: &mut dyn FnMut(&[ElemId]) -> ElemId,
    ) -> Result<(), SimError> {
        if controls.contains(&target.first) || controls.contains(&target.second) {
            return Err(SimError::OverlappingPairs);
        }
        self.check_central_net(target)?;
        let cs: Vec<usize> = controls
            .iter()
            .map(|&c| self.slot_index(c))
            .collect::<Result<_, _>>()?;
        let t1 = self.slot_index(target.first)?;
        let t2 = self.slot_index(target.second)?;
        let g = self.group.clone();
        let mut env = Vec::with_capacity(cs.len());
        self.map_keys(|k| {
            env.clear();
            env.extend(cs.iter().map(|&c| k[c]));
            let mut h = f(&env);
            if inverse {
                h = g.inv(h);
            }
            k[t1] = g.conj(h, k[t1]);
            k[t2] = g.conj(h, k[t2]);
        });
        Ok(())
    }

    /// Drags `mover` once around `around` by eight counterclockwise
    /// exchanges. When `mover` has trivial net flux it is conjugated by the
    /// net flux of `around`, which is left unchanged.
    pub fn encircle_pair(&mut self, around: PairId, mover: PairId) -> Result<(), SimError> {
        let ids = [around.first, around.second, mover.first, mover.second];
        for i in 0..4 {
            for j in i + 1..4 {
                if ids[i] == ids[j] {
                    return Err(SimError::OverlappingPairs);
                }
            }
        }
        self.transport_to_end(&ids)?;
        let base = self.line.len() - 4;
        for p in [1, 0, 2, 1, 1, 0, 2, 1] {
            self.exchange(base + p, Direction::Ccw)?;
        }
        Ok(())
    }

    /// Marginal flux distribution of one anyon over the ensemble.
    pub fn flux_distribution(&self, id: AnyonId) -> Result<Vec<(ElemId, f64)>, SimError> {
        let s = self.slot_index(id)?;
        let mut out: BTreeMap<ElemId, f64> = BTreeMap::new();
        for b in &self.branches {
            for (k, a) in &b.amps {
                *out.entry(k[s]).or_default() += b.weight * a.norm_sqr();
            }
        }
        Ok(out.into_iter().filter(|&(_, p)| p > 0.0).collect())
    }

    /// Joint distribution of several anyons' fluxes.
    pub fn joint_distribution(&self, ids: &[AnyonId]) -> Result<Vec<(Vec<ElemId>, f64)>, SimError> {
        let ss: Vec<usize> = ids.iter().map(|&i| self.slot_index(i)).collect::<Result<_, _>>()?;
        let mut out: BTreeMap<Vec<ElemId>, f64> = BTreeMap::new();
        for b in &self.branches {
            for (k, a) in &b.amps {
                let v: Vec<ElemId> = ss.iter().map(|&s| k[s]).collect();
                *out.entry(v).or_default() += b.weight * a.norm_sqr();
            }
        }
        Ok(out.into_iter().filter(|&(_, p)| p > 0.0).collect())
    }

    /// Left-to-right product of all anyon fluxes in one configuration.
    pub fn line_product(&self, key: &[u16]) -> ElemId {
        let g = &self.group;
        self.line.iter().fold(g.identity(), |acc, &id| {
            let s = self.slot_index(id).expect("line anyons have slots");
            g.mul(acc, key[s])
        })
    }

    /// Vacuum overlap for fusing `i` and `j`, per branch.
    fn fusion_projection(&self, si: usize, sj: usize, b: &Branch) -> BTreeMap<(usize, Vec<u16>), Complex64> {
        let i_id = self.slots[si];
        let j_id = self.slots[sj];
        let blocked = match (b.charges[si], b.charges[sj]) {
            (Charge::Trivial, Charge::Trivial) => false,
            (Charge::Charged { partner: Some(p) }, Charge::Charged { partner: Some(q) }) => {
                !(p == j_id && q == i_id)
            }
            _ => true,
        };
        let mut v = BTreeMap::new();
        if blocked {
            return v;
        }
        let g = &self.group;
        for (k, a) in &b.amps {
            let (x, y) = (k[si], k[sj]);
            if g.mul(x, y) == g.identity() {
                let c = g.class_index(x);
                let size = g.class_of(x).len() as f64;
                *v.entry((c, without(k, &[si, sj]))).or_default() += a / size.sqrt();
            }
        }
        v
    }

    /// Projective fusion of two anyons: vacuum with probability
    /// `|<Vac(C)|psi>|^2` summed over sectors. On vacuum both anyons are
    /// removed; otherwise the state is projected off the vacuum.
    pub fn fuse(&mut self, i: AnyonId, j: AnyonId) -> Result<FusionOutcome, SimError> {
        self.fuse_with_probability(i, j).map(|r| r.0)
    }

    /// Like [`AnyonSystem::fuse`], also returning the vacuum probability
    /// before collapse.
    pub fn fuse_with_probability(&mut self, i: AnyonId, j: AnyonId) -> Result<(FusionOutcome, f64), SimError> {
        if i == j {
            return Err(SimError::SameAnyon);
        }
        let si = self.slot_index(i)?;
        let sj = self.slot_index(j)?;
        let g = self.group.clone();
        let projections: Vec<_> = self
            .branches
            .iter()
            .map(|b| self.fusion_projection(si, sj, b))
            .collect();
        let probs: Vec<f64> = projections
            .iter()
            .map(|v| v.values().map(|a| a.norm_sqr()).sum::<f64>())
            .collect();
        let p: f64 = self
            .branches
            .iter()
            .zip(&probs)
            .map(|(b, q)| b.weight * q)
            .sum::<f64>()
            .clamp(0.0, 1.0) + 0.0;
        let u: f64 = self.rng.gen();
        let vacuum = u < p;
        let old = std::mem::take(&mut self.branches);
        if vacuum {
            for ((b, proj), _) in old.into_iter().zip(projections).zip(&probs) {
                let mut by_class: BTreeMap<usize, Amps> = BTreeMap::new();
                for ((c, rest), a) in proj {
                    by_class.entry(c).or_default().insert(rest, a);
                }
                for (_, amps) in by_class {
                    let n2: f64 = amps.values().map(|a| a.norm_sqr()).sum();
                    if n2 <= 0.0 {
                        continue;
                    }
                    let n = n2.sqrt();
                    self.branches.push(Branch {
                        weight: b.weight * n2 / p,
                        charges: without_charges(&b.charges, &[si, sj]),
                        amps: amps.into_iter().map(|(k, a)| (k, a / n)).collect(),
                    });
                }
            }
            let mut idx = vec![si, sj];
            idx.sort_unstable();
            remove_sorted(&mut self.slots, idx);
            self.line.retain(|&x| x != i && x != j);
        } else {
            let (lo, hi) = if si < sj { (si, sj) } else { (sj, si) };
            for ((mut b, proj), q) in old.into_iter().zip(projections).zip(probs) {
                if q >= 1.0 - 1e-12 {
                    continue;
                }
                if q > 0.0 {
                    // Subtract the vacuum component, which is spread over
                    // the whole class.
                    let mut amps = std::mem::take(&mut b.amps);
                    for ((c, rest), v) in proj {
                        let class = g.conjugacy_classes()[c].clone();
                        let share = v / (class.len() as f64).sqrt();
                        for x in class {
                            let mut key = rest.clone();
                            let (vlo, vhi) = if si < sj { (x, g.inv(x)) } else { (g.inv(x), x) };
                            key.insert(lo, vlo);
                            key.insert(hi, vhi);
                            *amps.entry(key).or_default() -= share;
                        }
                    }
                    amps.retain(|_, a| a.norm_sqr() > PRUNE_AMP2);
                    let n = (1.0 - q).sqrt();
                    b.amps = amps.into_iter().map(|(k, a)| (k, a / n)).collect();
                }
                b.weight *= (1.0 - q) / (1.0 - p);
                self.branches.push(b);
            }
        }
        self.normalize_and_merge();
        let outcome = if vacuum {
            FusionOutcome::Vacuum
        } else {
            FusionOutcome::Residual
        };
        self.note(|| {
            format!(
                "fuse {i} {j} -> {} p_vac={p:.12}",
                if vacuum { "vacuum" } else { "residual" }
            )
        });
        Ok((outcome, p))
    }

    /// Partial trace over key indices `drop`; returns the split branches.
    pub(crate) fn trace_out_keys(&mut self, drop: &[usize], drop_charges: &[usize]) {
        let old = std::mem::take(&mut self.branches);
        for b in old {
            let mut groups: BTreeMap<Vec<u16>, Amps> = BTreeMap::new();
            for (k, a) in b.amps {
                let vals: Vec<u16> = drop.iter().map(|&d| k[d]).collect();
                groups.entry(vals).or_default().insert(without(&k, drop), a);
            }
            let charges = without_charges(&b.charges, drop_charges);
            for (_, amps) in groups {
                let n2: f64 = amps.values().map(|a| a.norm_sqr()).sum();
                if n2 <= 0.0 {
                    continue;
                }
                let n = n2.sqrt();
                self.branches.push(Branch {
                    weight: b.weight * n2,
                    charges: charges.clone(),
                    amps: amps.into_iter().map(|(k, a)| (k, a / n)).collect(),
                });
            }
        }
        self.normalize_and_merge();
    }

    /// Removes anyons from the line without measuring them (partial trace).
    pub fn discard(&mut self, ids: &[AnyonId]) -> Result<(), SimError> {
        let mut ss: Vec<usize> = ids.iter().map(|&i| self.slot_index(i)).collect::<Result<_, _>>()?;
        ss.sort_unstable();
        ss.dedup();
        self.trace_out_keys(&ss, &ss);
        remove_sorted(&mut self.slots, ss);
        self.line.retain(|x| !ids.contains(x));
        Ok(())
    }

    /// Splits every branch by the flux of one anyon.
    pub fn dephase(&mut self, id: AnyonId) -> Result<(), SimError> {
        let s = self.slot_index(id)?;
        let old = std::mem::take(&mut self.branches);
        for b in old {
            let mut groups: BTreeMap<u16, Amps> = BTreeMap::new();
            for (k, a) in b.amps {
                groups.entry(k[s]).or_default().insert(k, a);
            }
            for (_, amps) in groups {
                let n2: f64 = amps.values().map(|a| a.norm_sqr()).sum();
                let n = n2.sqrt();
                self.branches.push(Branch {
                    weight: b.weight * n2,
                    charges: b.charges.clone(),
                    amps: amps.into_iter().map(|(k, a)| (k, a / n)).collect(),
                });
            }
        }
        self.normalize_and_merge();
        Ok(())
    }

    /// Splits every branch by orthogonal projectors on the pair's logical
    /// space, plus a remainder. `classify` maps a first flux to
    /// `(digit, tag)`; the projector for `v` acts on the digit and leaves
    /// the tag alone. `vectors` must be orthonormal.
    ///
    /// This changes the ensemble decomposition, and the density operator
    /// only when the pair's reduced state has coherences between the
    /// vectors.
    pub fn dephase_pair(
        &mut self,
        pair: PairId,
        classify: &dyn Fn(ElemId) -> Option<(usize, ElemId)>,
        vectors: &[Vec<Complex64>],
    ) -> Result<(), SimError> {
        self.check_trivial_net(pair)?;
        let d = vectors.first().map(|v| v.len()).unwrap_or(0);
        for (i, u) in vectors.iter().enumerate() {
            if u.len() != d {
                return Err(SimError::DimensionMismatch);
            }
            for v in &vectors[i..] {
                let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let want = if std::ptr::eq(u, v) { 1.0 } else { 0.0 };
                if (ip - want).norm() > 1e-9 {
                    return Err(SimError::DimensionMismatch);
                }
            }
        }
        let s1 = self.slot_index(pair.first)?;
        let s2 = self.slot_index(pair.second)?;
        let g = self.group.clone();
        let mut decode: BTreeMap<(usize, ElemId), ElemId> = BTreeMap::new();
        for x in g.ids() {
            if let Some((n, t)) = classify(x) {
                if n >= d {
                    return Err(SimError::DimensionMismatch);
                }
                decode.insert((n, t), x);
            }
        }
        let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
        let rebuild = |rest: &[u16], x: ElemId| {
            let mut key = rest.to_vec();
            let (vlo, vhi) = if s1 < s2 { (x, g.inv(x)) } else { (g.inv(x), x) };
            key.insert(lo, vlo);
            key.insert(hi, vhi);
            key
        };
        let old = std::mem::take(&mut self.branches);
        for b in old {
            let mut groups: BTreeMap<(Vec<u16>, ElemId), Vec<Complex64>> = BTreeMap::new();
            for (k, a) in &b.amps {
                if let Some((n, t)) = classify(k[s1]) {
                    groups
                        .entry((without(k, &[s1, s2]), t))
                        .or_insert_with(|| vec![Complex64::new(0.0, 0.0); d])[n] += a;
                }
            }
            let mut remainder = b.amps.clone();
            for v in vectors {
                let mut amps = Amps::new();
                for ((rest, t), col) in &groups {
                    let c: Complex64 = v.iter().zip(col).map(|(x, y)| x.conj() * y).sum();
                    if c.norm_sqr() <= PRUNE_AMP2 {
                        continue;
                    }
                    for (n, &vn) in v.iter().enumerate() {
                        let Some(&x) = decode.get(&(n, *t)) else {
                            continue;
                        };
                        let a = vn * c;
                        if a.norm_sqr() <= PRUNE_AMP2 {
                            continue;
                        }
                        let key = rebuild(rest, x);
                        *remainder.entry(key.clone()).or_default() -= a;
                        amps.insert(key, a);
                    }
                }
                let n2: f64 = amps.values().map(|a| a.norm_sqr()).sum();
                if n2 > 0.0 {
                    let n = n2.sqrt();
                    self.branches.push(Branch {
                        weight: b.weight * n2,
                        charges: b.charges.clone(),
                        amps: amps.into_iter().map(|(k, a)| (k, a / n)).collect(),
                    });
                }
            }
            remainder.retain(|_, a| a.norm_sqr() > 1e-24);
            let n2: f64 = remainder.values().map(|a| a.norm_sqr()).sum();
            if n2 > 1e-20 {
                let n = n2.sqrt();
                self.branches.push(Branch {
                    weight: b.weight * n2,
                    charges: b.charges.clone(),
                    amps: remainder.into_iter().map(|(k, a)| (k, a / n)).collect(),
                });
            }
        }
        self.normalize_and_merge();
        Ok(())
    }

    /// Replaces the ensemble by one branch drawn with its weight. Later
    /// statistics are unchanged on average.
    pub fn sample_branch(&mut self) {
        if self.branches.len() <= 1 {
            return;
        }
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut pick = self.branches.len() - 1;
        for (i, b) in self.branches.iter().enumerate() {
            acc += b.weight;
            if u < acc {
                pick = i;
                break;
            }
        }
        let mut b = self.branches.swap_remove(pick);
        b.weight = 1.0;
        self.branches = vec![b];
    }

    /// Measures whether one anyon's flux is trivial, then discards it.
    pub fn flux_is_trivial_destructive(&mut self, id: AnyonId) -> Result<bool, SimError> {
        let s = self.slot_index(id)?;
        let e = self.group.identity();
        let probs: Vec<f64> = self
            .branches
            .iter()
            .map(|b| {
                b.amps
                    .iter()
                    .filter(|(k, _)| k[s] == e)
                    .map(|(_, a)| a.norm_sqr())
                    .sum()
            })
            .collect();
        let p: f64 = self
            .branches
            .iter()
            .zip(&probs)
            .map(|(b, q)| b.weight * q)
            .sum::<f64>()
            .clamp(0.0, 1.0) + 0.0;
        let u: f64 = self.rng.gen();
        let trivial = u < p;
        let old = std::mem::take(&mut self.branches);
        for (mut b, q) in old.into_iter().zip(probs) {
            let keep = if trivial { q } else { 1.0 - q };
            if keep <= 1e-15 {
                continue;
            }
            let n = keep.sqrt();
            b.amps = std::mem::take(&mut b.amps)
                .into_iter()
                .filter(|(k, _)| (k[s] == e) == trivial)
                .map(|(k, a)| (k, a / n))
                .collect();
            b.weight *= keep;
            self.branches.push(b);
        }
        self.normalize_and_merge();
        self.note(|| format!("trivial-flux {id} -> {trivial} p_trivial={p:.12}"));
        self.discard(&[id])?;
        Ok(trivial)
    }

    /// Renormalizes weights, prunes negligible branches and merges
    /// branches equal up to a global phase.
    pub(crate) fn normalize_and_merge(&mut self) {
        let total: f64 = self.branches.iter().map(|b| b.weight).sum();
        if total > 0.0 {
            for b in &mut self.branches {
                b.weight /= total;
            }
        }
        self.branches.retain(|b| b.weight >= PRUNE_WEIGHT && !b.amps.is_empty());
        let total: f64 = self.branches.iter().map(|b| b.weight).sum();
        let mut merged: Vec<Branch> = Vec::with_capacity(self.branches.len());
        for mut b in std::mem::take(&mut self.branches) {
            b.weight /= total;
            if let Some(m) = merged.iter_mut().find(|m| m.same_state(&b)) {
                m.weight += b.weight;
            } else {
                merged.push(b);
            }
        }
        self.branches = merged;
    }

    /// Largest deviation from unit weight sum or unit branch norm.
    pub fn invariant_error(&self) -> f64 {
        let total: f64 = self.branches.iter().map(|b| b.weight).sum();
        let mut err = (total - 1.0).abs();
        for b in &self.branches {
            err = err.max((b.norm2() - 1.0).abs());
        }
        err
    }

    pub(crate) fn remove_probe_slot(&mut self, idx: usize) {
        self.probes.remove(idx);
    }

    /// Anyon ids in key order.
    pub fn slots(&self) -> &[AnyonId] {
        &self.slots
    }
}

fn without_charges(c: &[Charge], drop: &[usize]) -> Vec<Charge> {
    c.iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, &v)| v)
        .collect()
}

impl std::fmt::Debug for AnyonSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnyonSystem")
            .field("line", &self.line)
            .field("branches", &self.branches.len())
            .field("probes", &self.probes.len())
            .finish()
    }
}
