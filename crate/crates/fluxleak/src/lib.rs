//! Leakage detection and correction for qudits stored in flux pairs.
//!
//! A damaged pair is first tested for a net flux by winding probe ancillas
//! around it. Flagged pairs are replaced by `|0>`; the rest go through an
//! incomplete swap that copies the computational part of the flux into a
//! fresh ancilla. In coset mode the swap is done twice.

use std::fmt;

use fluxgate::{GateError, QuditId, QuditRegister};
use fluxgroup::{ElemId, FiniteGroup};
use fluxsim::{AnyonSystem, PairId, SimError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LeakError {
    #[error("probe {probe}: {reps} fusions cannot reach significance (mean {mean:.3}, sd {sd:.3})")]
    Indeterminate {
        probe: ElemId,
        reps: usize,
        mean: f64,
        sd: f64,
    },
    #[error("needs a coset context")]
    NotCoset,
    #[error("probe set is empty")]
    NoProbes,
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    NetFlux,
    ChargeFilter,
    CosetFilter,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::NetFlux => "net-flux",
            Stage::ChargeFilter => "charge-filter",
            Stage::CosetFilter => "coset-filter",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Replaced,
}

/// Fusion counts for one probe element.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTally {
    pub probe: ElemId,
    pub tests: usize,
    pub vacua: usize,
    /// Vacuum rate of an undisturbed probe.
    pub baseline: f64,
    /// Flag when the vacuum count over all reps falls below this.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub flagged: bool,
    pub tallies: Vec<ProbeTally>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    /// Last stage that acted on the qudit.
    pub stage: Stage,
    pub verdict: Verdict,
    pub tallies: Vec<ProbeTally>,
}

impl fmt::Display for LeakageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Clean => "clean",
            Verdict::Replaced => "replaced",
        };
        write!(f, "leakage stage={} verdict={}", self.stage.name(), verdict)?;
        for t in &self.tallies {
            write!(
                f,
                "\nprobe {} tests={} vacua={} baseline={:.6} threshold={:.3}",
                t.probe, t.tests, t.vacua, t.baseline, t.threshold
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LeakOptions {
    /// Probe fusions per probe element.
    pub reps: usize,
    /// Raise the count for probes whose baseline is too small to reach
    /// significance at `reps`.
    pub extend_reps: bool,
    /// One-sided significance, in standard deviations.
    pub sigmas: f64,
    /// Probe elements of the logical group; default: one per non-trivial
    /// class, plus extras until the centralizers meet trivially.
    pub probes: Option<Vec<ElemId>>,
}

impl Default for LeakOptions {
    fn default() -> Self {
        LeakOptions {
            reps: 500,
            extend_reps: true,
            sigmas: 5.0,
            probes: None,
        }
    }
}

/// Class representatives of `q`, extended until the intersection of their
/// centralizers is trivial.
pub fn default_probes(q: &FiniteGroup) -> Vec<ElemId> {
    let mut probes: Vec<ElemId> = q
        .class_representatives()
        .into_iter()
        .filter(|&r| r != q.identity())
        .collect();
    let mut common: Vec<ElemId> = q
        .ids()
        .filter(|&z| probes.iter().all(|&p| q.commutes(z, p)))
        .collect();
    for x in q.ids() {
        if common.len() <= 1 {
            break;
        }
        if common.iter().any(|&z| !q.commutes(z, x)) {
            probes.push(x);
            common.retain(|&z| q.commutes(z, x));
        }
    }
    probes
}

/// Vacuum rate of a `rho_x` ancilla fused against a `rho_x^-1` ancilla,
/// from a scratch simulation.
pub fn probe_baseline(reg: &QuditRegister, x: ElemId) -> Result<f64, LeakError> {
    let ctx = reg.context();
    let q = ctx.logical_group();
    let mut sys = AnyonSystem::seeded(ctx.sim_group().clone(), 0);
    let p = sys.create_pair_mixture(&ctx.rho_parts(x))?;
    let r = sys.create_pair_mixture(&ctx.rho_parts(q.inv(x)))?;
    Ok(sys.fuse_with_probability(p.first, r.first)?.1)
}

/// Smallest count at which a probe of vacuum rate `p` can be flagged at
/// `sigmas`, but at least `reps`.
pub fn reps_needed(p: f64, sigmas: f64, reps: usize) -> usize {
    if p <= 0.0 || p >= 1.0 {
        return reps;
    }
    let n = (sigmas * sigmas * (1.0 - p) / p).floor() as usize + 1;
    n.max(reps)
}

/// Tests whether braiding around `pair` disturbs probe ancillas.
///
/// For each probe `x` a `rho_x` ancilla is wound around the pair and its
/// first anyon fused with a `rho_x^-1` ancilla. The pair is flagged when
/// some probe vanishes significantly less often than its baseline.
pub fn detect_nontrivial_effect(
    reg: &mut QuditRegister,
    pair: PairId,
    probes: &[ElemId],
    reps: usize,
    sigmas: f64,
) -> Result<Detection, LeakError> {
    detect_with(reg, pair, probes, sigmas, &|_| reps)
}

fn detect_with(
    reg: &mut QuditRegister,
    pair: PairId,
    probes: &[ElemId],
    sigmas: f64,
    reps_for: &dyn Fn(f64) -> usize,
) -> Result<Detection, LeakError> {
    if probes.is_empty() {
        return Err(LeakError::NoProbes);
    }
    let q = reg.context().logical_group().clone();
    let mut tallies = Vec::new();
    for &x in probes {
        let p = probe_baseline(reg, x)?;
        let reps = reps_for(p);
        let mean = reps as f64 * p;
        let sd = (reps as f64 * p * (1.0 - p)).sqrt();
        let threshold = mean - sigmas * sd;
        if threshold <= 0.0 {
            return Err(LeakError::Indeterminate { probe: x, reps, mean, sd });
        }
        let mut t = ProbeTally {
            probe: x,
            tests: 0,
            vacua: 0,
            baseline: p,
            threshold,
        };
        while t.tests < reps && (t.vacua as f64) < threshold {
            let m = reg.rho_ancilla(x)?;
            reg.system_mut().encircle_pair(pair, m)?;
            let r = reg.rho_ancilla(q.inv(x))?;
            t.tests += 1;
            if reg.fuse_noted(m.first, r.first, &format!("leak probe {x}"))? {
                t.vacua += 1;
                reg.system_mut().discard(&[m.second, r.second])?;
            } else {
                reg.system_mut().discard(&[m.first, m.second, r.first, r.second])?;
            }
        }
        let flagged = (t.vacua as f64) < threshold;
        tallies.push(t);
        if flagged {
            return Ok(Detection { flagged: true, tallies });
        }
    }
    Ok(Detection { flagged: false, tallies })
}

/// Incomplete swap: a fresh `|0>` ancilla is conjugated by `f(qudit)`, the
/// qudit by `f(ancilla)^-1`, and the ancilla takes the qudit's place.
pub fn incomplete_swap(reg: &mut QuditRegister, q: QuditId) -> Result<(), LeakError> {
    let old = reg.pair(q)?;
    let a = reg.basis_ancilla(0)?;
    reg.conjugate_by_extension(old, a, false)?;
    reg.conjugate_by_extension(a, old, true)?;
    reg.replace_pair(q, a)?;
    reg.system_mut().discard(&old.anyons())?;
    Ok(())
}

fn stage_one(reg: &mut QuditRegister, q: QuditId, opts: &LeakOptions) -> Result<Detection, LeakError> {
    let probes = match &opts.probes {
        Some(p) => p.clone(),
        None => default_probes(reg.context().logical_group()),
    };
    let pair = reg.pair(q)?;
    let (reps, sigmas, extend) = (opts.reps, opts.sigmas, opts.extend_reps);
    let reps_for = move |p: f64| if extend { reps_needed(p, sigmas, reps) } else { reps };
    let det = detect_with(reg, pair, &probes, sigmas, &reps_for)?;
    if det.flagged {
        // The damaged pair leaves the line below everything else.
        let fresh = reg.basis_ancilla(0)?;
        let old = reg.replace_pair(q, fresh)?;
        reg.system_mut().discard(&old.anyons())?;
    }
    Ok(det)
}

fn finish(reg: &mut QuditRegister, q: QuditId, report: LeakageReport) -> LeakageReport {
    let verdict = match report.verdict {
        Verdict::Clean => "clean",
        Verdict::Replaced => "replaced",
    };
    reg.note(format!("leak q{q} -> {} {}", report.stage.name(), verdict));
    report
}

/// Projects qudit `q` back into the computational subspace. Identity on
/// computational states.
pub fn leakage_correct(reg: &mut QuditRegister, q: QuditId, opts: &LeakOptions) -> Result<LeakageReport, LeakError> {
    let det = stage_one(reg, q, opts)?;
    if det.flagged {
        let r = LeakageReport {
            stage: Stage::NetFlux,
            verdict: Verdict::Replaced,
            tallies: det.tallies,
        };
        return Ok(finish(reg, q, r));
    }
    incomplete_swap(reg, q)?;
    let r = LeakageReport {
        stage: Stage::ChargeFilter,
        verdict: Verdict::Clean,
        tallies: det.tallies,
    };
    Ok(finish(reg, q, r))
}

/// Coset-mode correction. The first swap leaves a flux in `P`, the second
/// one a computational flux.
pub fn leakage_correct_general(
    reg: &mut QuditRegister,
    q: QuditId,
    opts: &LeakOptions,
) -> Result<LeakageReport, LeakError> {
    if !reg.context().is_coset() {
        return Err(LeakError::NotCoset);
    }
    let det = stage_one(reg, q, opts)?;
    if det.flagged {
        let r = LeakageReport {
            stage: Stage::NetFlux,
            verdict: Verdict::Replaced,
            tallies: det.tallies,
        };
        return Ok(finish(reg, q, r));
    }
    incomplete_swap(reg, q)?;
    incomplete_swap(reg, q)?;
    let r = LeakageReport {
        stage: Stage::CosetFilter,
        verdict: Verdict::Clean,
        tallies: det.tallies,
    };
    Ok(finish(reg, q, r))
}

/// `x~0` in coset mode: the incomplete swap between a vacuum pair and a
/// `rho_0` ancilla, certified by the vacuum-pair filter.
pub fn prepare_rho_xzero(reg: &mut QuditRegister) -> Result<QuditId, LeakError> {
    if !reg.context().is_coset() {
        return Err(LeakError::NotCoset);
    }
    Ok(reg.prepare_xzero()?)
}
