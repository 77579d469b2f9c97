//! Sorting vacuum pairs into flux bins and labelling the bins with group
//! elements using only probe loops.

use std::collections::HashMap;
use std::sync::Arc;

use fluxgroup::ElemId;

use crate::probe::Representation;
use crate::system::{AnyonSystem, Charge, PairId, SectorModel};
use crate::{AnyonId, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistillBudget {
    /// Vacuum pairs to create.
    pub pairs: usize,
    /// Total probes available.
    pub probes: usize,
    /// Probes per equality test.
    pub reps: usize,
    /// Generator assignments tried before giving up on labels.
    pub guesses: usize,
}

impl Default for DistillBudget {
    fn default() -> Self {
        DistillBudget {
            pairs: 200,
            probes: 200_000,
            reps: 6,
            guesses: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinLabel {
    Element(ElemId),
    Unlabeled,
}

#[derive(Clone, Debug)]
pub struct FluxBin {
    pub pairs: Vec<PairId>,
    pub label: BinLabel,
}

#[derive(Clone, Debug)]
pub struct DistillReport {
    pub bins: Vec<FluxBin>,
    /// Budget ran out before every pair was binned or labelled.
    pub partial: bool,
    pub probes_used: usize,
    /// Generator bins of the accepted assignment, if any.
    pub generator_bins: Option<Vec<usize>>,
}

struct Probes<'a> {
    rep: &'a Arc<Representation>,
    reps: usize,
    used: usize,
    limit: usize,
}

impl Probes<'_> {
    /// `None` when the budget cannot cover another full test.
    fn trivial(&mut self, sys: &mut AnyonSystem, word: &[(AnyonId, bool)]) -> Result<Option<bool>, SimError> {
        if self.used + self.reps > self.limit {
            return Ok(None);
        }
        let (ok, n) = sys.loop_is_trivial(word, self.reps, self.rep)?;
        self.used += n;
        Ok(Some(ok))
    }
}

/// Creates pairs, bins them by probe equality tests and labels bins by a
/// generator assignment whose relations all pass probe checks.
///
/// Every probe operation is diagonal in the flux basis, so each pair is
/// dephased at creation and one branch is sampled; this gives the same
/// statistics as dephasing through the per-bin discard at the end, and
/// keeps the state a single product of definite fluxes.
pub fn distill_flux_bins(
    sys: &mut AnyonSystem,
    model: &SectorModel,
    budget: DistillBudget,
    rep: &Arc<Representation>,
) -> Result<DistillReport, SimError> {
    let mut report = DistillReport {
        bins: Vec::new(),
        partial: false,
        probes_used: 0,
        generator_bins: None,
    };
    if budget.pairs == 0 {
        return Ok(report);
    }
    let mut probes = Probes {
        rep,
        reps: budget.reps.max(1),
        used: 0,
        limit: budget.probes,
    };
    let mut pairs = Vec::new();
    for _ in 0..budget.pairs {
        let p = sys.create_vacuum_pair(model)?;
        sys.dephase(p.first)?;
        sys.sample_branch();
        let s = sys.slot_index(p.first)?;
        if sys.branches()[0].charges[s] != Charge::Trivial {
            sys.discard(&p.anyons())?;
            continue;
        }
        pairs.push(p);
    }

    let mut bins: Vec<Vec<PairId>> = Vec::new();
    'pairs: for p in pairs {
        for bin in bins.iter_mut() {
            let word = [(bin[0].first, false), (p.second, false)];
            match probes.trivial(sys, &word)? {
                None => {
                    report.partial = true;
                    sys.discard(&p.anyons())?;
                    continue 'pairs;
                }
                Some(true) => {
                    bin.push(p);
                    continue 'pairs;
                }
                Some(false) => {}
            }
        }
        bins.push(vec![p]);
    }
    // One flux per multi-pair bin is given up to force decoherence.
    for bin in bins.iter_mut() {
        if bin.len() >= 2 {
            let p = bin.pop().expect("non-empty");
            sys.discard(&p.anyons())?;
        }
    }

    let labels = label_bins(sys, &bins, &mut probes, budget.guesses, &mut report)?;
    report.probes_used = probes.used;
    report.bins = bins
        .into_iter()
        .zip(labels)
        .map(|(pairs, label)| FluxBin { pairs, label })
        .collect();
    Ok(report)
}

fn label_bins(
    sys: &mut AnyonSystem,
    bins: &[Vec<PairId>],
    probes: &mut Probes,
    guesses: usize,
    report: &mut DistillReport,
) -> Result<Vec<BinLabel>, SimError> {
    let g = sys.group_arc().clone();
    let gens: Vec<ElemId> = g.generators().to_vec();
    let mut labels = vec![BinLabel::Unlabeled; bins.len()];
    if gens.is_empty() {
        return Ok(labels);
    }
    // Shortest positive words over the generators.
    let mut words: Vec<Option<Vec<usize>>> = vec![None; g.order()];
    words[g.identity() as usize] = Some(Vec::new());
    let mut frontier = vec![g.identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for (i, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                if words[y as usize].is_none() {
                    let mut w = words[x as usize].clone().expect("visited");
                    w.push(i);
                    words[y as usize] = Some(w);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let words: Vec<Vec<usize>> = words.into_iter().map(|w| w.expect("generated")).collect();

    let rep_anyon: Vec<AnyonId> = bins.iter().map(|b| b[0].first).collect();
    let mut identity_bins = Vec::new();
    for (i, &a) in rep_anyon.iter().enumerate() {
        match probes.trivial(sys, &[(a, false)])? {
            None => {
                report.partial = true;
                return Ok(labels);
            }
            Some(true) => {
                labels[i] = BinLabel::Element(g.identity());
                identity_bins.push(i);
            }
            Some(false) => {}
        }
    }

    // Candidates per generator: non-identity bins whose flux has the
    // generator's order.
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let mut order_ok: HashMap<(usize, usize), bool> = HashMap::new();
    for &s in &gens {
        let ord = g.order_of(s);
        let mut c = Vec::new();
        for (i, &a) in rep_anyon.iter().enumerate() {
            if identity_bins.contains(&i) {
                continue;
            }
            let ok = match order_ok.get(&(i, ord)) {
                Some(&v) => v,
                None => {
                    let word = vec![(a, false); ord];
                    match probes.trivial(sys, &word)? {
                        None => {
                            report.partial = true;
                            return Ok(labels);
                        }
                        Some(v) => {
                            order_ok.insert((i, ord), v);
                            v
                        }
                    }
                }
            };
            if ok {
                c.push(i);
            }
        }
        if c.is_empty() {
            return Ok(labels);
        }
        candidates.push(c);
    }

    let mut choice = vec![0usize; gens.len()];
    let mut tried = 0;
    let accepted = 'search: loop {
        if tried >= guesses {
            break 'search None;
        }
        tried += 1;
        let assign: Vec<AnyonId> = choice
            .iter()
            .zip(&candidates)
            .map(|(&c, cands)| rep_anyon[cands[c]])
            .collect();
        let mut ok = true;
        'rel: for x in g.ids() {
            for (si, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                let wx = &words[x as usize];
                let wy = &words[y as usize];
                if wy.len() == wx.len() + 1 && wy[..wx.len()] == wx[..] && wy[wx.len()] == si {
                    continue;
                }
                let mut lp: Vec<(AnyonId, bool)> = wx.iter().map(|&i| (assign[i], false)).collect();
                lp.push((assign[si], false));
                lp.extend(wy.iter().rev().map(|&i| (assign[i], true)));
                match probes.trivial(sys, &lp)? {
                    None => {
                        report.partial = true;
                        return Ok(labels);
                    }
                    Some(true) => {}
                    Some(false) => {
                        ok = false;
                        break 'rel;
                    }
                }
            }
        }
        if ok {
            break 'search Some(choice.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect::<Vec<_>>());
        }
        // Odometer over candidate tuples.
        let mut k = choice.len();
        loop {
            if k == 0 {
                break 'search None;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    };
    let Some(gen_bins) = accepted else {
        return Ok(labels);
    };
    let assign: Vec<AnyonId> = gen_bins.iter().map(|&b| rep_anyon[b]).collect();
    for (i, &a) in rep_anyon.iter().enumerate() {
        if labels[i] != BinLabel::Unlabeled {
            continue;
        }
        for x in g.ids() {
            if x == g.identity() {
                continue;
            }
            let mut lp: Vec<(AnyonId, bool)> = words[x as usize].iter().map(|&k| (assign[k], false)).collect();
            lp.push((a, true));
            match probes.trivial(sys, &lp)? {
                None => {
                    report.partial = true;
                    return Ok(labels);
                }
                Some(true) => {
                    labels[i] = BinLabel::Element(x);
                    break;
                }
                Some(false) => {}
            }
        }
    }
    report.generator_bins = Some(gen_bins);
    Ok(labels)
}
