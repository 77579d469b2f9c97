use std::collections::HashMap;
use std::sync::Arc;

use fluxgroup::ElemId;
use fluxsim::{AnyonSystem, Complex64, FusionOutcome, PairId, Representation, SectorModel};
use fluxword::{controlled_sum_extension, toffoli_program, Atom, Evaluator, Program};
use rand_chacha::ChaCha8Rng;

use crate::context::LogicalContext;
use crate::GateError;

pub type QuditId = usize;

/// How function conjugations are carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationMode {
    /// Braid when the flattened word fits the limit, otherwise compiled.
    Auto,
    /// Always braid; fails for words over the limit.
    Braid,
    /// Apply the tabulated function to every configuration at once.
    Compiled,
}

/// Test deciding whether the vacuum pair of an `x~0` attempt ended in `|b>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XZeroFilter {
    /// Fuse against a `b^-1` ancilla.
    Fusion,
    /// Compare with a `b` ancilla by charge-probe loops.
    Probe { reps: usize },
}

#[derive(Clone, Debug)]
pub struct RegisterOptions {
    pub mode: ConjugationMode,
    /// Longest flattened word realized by braiding.
    pub braid_limit: u64,
    /// Sector model for pairs created from the vacuum; defaults to the
    /// class of `b`.
    pub sector: Option<SectorModel>,
    pub xzero_filter: XZeroFilter,
    pub retry_cap: usize,
    /// Target inconclusive rate for measurements.
    pub epsilon: f64,
    /// Target rate of keeping `x~0` during the bootstrap.
    pub bootstrap_epsilon: f64,
    /// Sample one branch of the ensemble after the bootstrap, fixing the
    /// root of unity of this run.
    pub unravel_bootstrap: bool,
    /// Maximum number of ancilla pairs drawn, if any.
    pub ancilla_budget: Option<usize>,
}

impl Default for RegisterOptions {
    fn default() -> Self {
        RegisterOptions {
            mode: ConjugationMode::Auto,
            braid_limit: 512,
            sector: None,
            xzero_filter: XZeroFilter::Probe { reps: 12 },
            retry_cap: 2000,
            epsilon: 1e-4,
            bootstrap_epsilon: 1e-9,
            unravel_bootstrap: true,
            ancilla_budget: None,
        }
    }
}

/// Fusion counts against one candidate digit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub tests: usize,
    pub vacua: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalOutcome {
    pub digit: u32,
    /// Posterior of `digit` under a uniform prior.
    pub confidence: f64,
    pub tallies: Vec<Tally>,
}

impl LogicalOutcome {
    pub(crate) fn from_tallies(digit: usize, tallies: Vec<Tally>, p: f64) -> LogicalOutcome {
        let like: Vec<f64> = (0..tallies.len())
            .map(|n| {
                let mut l = 1.0;
                for (m, t) in tallies.iter().enumerate() {
                    if m == n {
                        l *= p.powi(t.vacua as i32) * (1.0 - p).powi((t.tests - t.vacua) as i32);
                    } else if t.vacua > 0 {
                        l = 0.0;
                    }
                }
                l
            })
            .collect();
        let total: f64 = like.iter().sum();
        LogicalOutcome {
            digit: digit as u32,
            confidence: if total > 0.0 { like[digit] / total } else { 0.0 },
            tallies,
        }
    }
}

/// A function conjugation ready to run: the flattened word if short
/// enough, and the value table over the simulated group.
#[derive(Clone)]
pub(crate) struct Compiled {
    arity: usize,
    word: Option<Arc<Vec<Atom>>>,
    table: Arc<Vec<ElemId>>,
}

impl Compiled {
    fn new(program: &Program, ctx: &LogicalContext, limit: u64) -> Result<Compiled, GateError> {
        let p = ctx.lift_program(program)?;
        let g = ctx.sim_group();
        let word = p.flatten_simplified(limit).ok().map(Arc::new);
        let ev = Evaluator::new(&p, g)?;
        let n = g.order();
        let arity = p.arity();
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        let mut env = vec![0 as ElemId; arity];
        let mut buf = Vec::new();
        for idx in 0..n.pow(arity as u32) {
            let mut r = idx;
            for slot in env.iter_mut().rev() {
                *slot = (r % n) as ElemId;
                r /= n;
            }
            table.push(ev.eval_with(&env, &mut buf));
        }
        Ok(Compiled { arity, word, table: Arc::new(table) })
    }

    pub(crate) fn flat_len(&self) -> Option<usize> {
        self.word.as_ref().map(|w| w.len())
    }
}

/// Logical qudits over one anyon system.
pub struct QuditRegister {
    pub(crate) ctx: Arc<LogicalContext>,
    pub(crate) sys: AnyonSystem,
    pub(crate) opts: RegisterOptions,
    qudits: Vec<Option<PairId>>,
    pub(crate) xone: Option<PairId>,
    pub(crate) yref: Option<PairId>,
    toffoli: Compiled,
    csum_ext: Compiled,
    shift: Compiled,
    pub(crate) phase_fns: HashMap<u32, Compiled>,
    pub(crate) probe_rep: Arc<Representation>,
    ancillas: usize,
    transcript: Vec<String>,
}

impl QuditRegister {
    pub fn new(ctx: LogicalContext, rng: ChaCha8Rng, opts: RegisterOptions) -> Result<QuditRegister, GateError> {
        let ctx = Arc::new(ctx);
        let q = ctx.logical_group().clone();
        let limit = opts.braid_limit;
        let toffoli = Compiled::new(&toffoli_program(&q, ctx.params())?, &ctx, limit)?;
        let csum_ext = Compiled::new(&controlled_sum_extension(&q, ctx.params())?, &ctx, limit)?;
        let a = q.elem(ctx.params().a).clone();
        let shift = Compiled::new(&Program::from_word(0, q.degree(), &[Atom::Const(a)]), &ctx, limit)?;
        let probe_rep = Arc::new(Representation::standard(ctx.sim_group())?);
        let mut sys = AnyonSystem::new(ctx.sim_group().clone(), rng);
        sys.set_recording(false);
        Ok(QuditRegister {
            ctx,
            sys,
            opts,
            qudits: Vec::new(),
            xone: None,
            yref: None,
            toffoli,
            csum_ext,
            shift,
            phase_fns: HashMap::new(),
            probe_rep,
            ancillas: 0,
            transcript: Vec::new(),
        })
    }

    /// A fresh register with no qudits over the same context and options,
    /// reusing the compiled gate tables.
    pub fn spawn(&self, rng: ChaCha8Rng) -> QuditRegister {
        let mut sys = AnyonSystem::new(self.ctx.sim_group().clone(), rng);
        sys.set_recording(false);
        QuditRegister {
            ctx: Arc::clone(&self.ctx),
            sys,
            opts: self.opts.clone(),
            qudits: Vec::new(),
            xone: None,
            yref: None,
            toffoli: self.toffoli.clone(),
            csum_ext: self.csum_ext.clone(),
            shift: self.shift.clone(),
            phase_fns: self.phase_fns.clone(),
            probe_rep: Arc::clone(&self.probe_rep),
            ancillas: 0,
            transcript: Vec::new(),
        }
    }

    pub fn context(&self) -> &LogicalContext {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.ctx.d()
    }

    pub fn system(&self) -> &AnyonSystem {
        &self.sys
    }

    pub fn system_mut(&mut self) -> &mut AnyonSystem {
        &mut self.sys
    }

    pub fn options(&self) -> &RegisterOptions {
        &self.opts
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn take_transcript(&mut self) -> Vec<String> {
        std::mem::take(&mut self.transcript)
    }

    pub fn note(&mut self, line: String) {
        self.transcript.push(line);
    }

    /// Flattened length of the Toffoli word, if it is short enough to braid.
    pub fn toffoli_word_len(&self) -> Option<usize> {
        self.toffoli.flat_len()
    }

    pub fn has_xone(&self) -> bool {
        self.xone.is_some()
    }

    pub fn xone_pair(&self) -> Option<PairId> {
        self.xone
    }

    pub fn y_reference(&self) -> Option<PairId> {
        self.yref
    }

    pub fn pair(&self, q: QuditId) -> Result<PairId, GateError> {
        self.qudits
            .get(q)
            .copied()
            .flatten()
            .ok_or(GateError::NoSuchQudit(q))
    }

    pub fn pairs(&self, qs: &[QuditId]) -> Result<Vec<PairId>, GateError> {
        qs.iter().map(|&q| self.pair(q)).collect()
    }

    /// Points a logical index at a different pair; the old pair is left
    /// alone.
    pub fn replace_pair(&mut self, q: QuditId, p: PairId) -> Result<PairId, GateError> {
        let old = self.pair(q)?;
        self.qudits[q] = Some(p);
        Ok(old)
    }

    /// Registers an existing pair as a qudit.
    pub fn adopt(&mut self, p: PairId) -> QuditId {
        self.qudits.push(Some(p));
        self.qudits.len() - 1
    }

    /// Drops a qudit, tracing its pair out.
    pub fn release(&mut self, q: QuditId) -> Result<(), GateError> {
        let p = self.pair(q)?;
        self.sys.discard(&p.anyons())?;
        self.qudits[q] = None;
        Ok(())
    }

    fn draw_ancilla(&mut self) -> Result<(), GateError> {
        if let Some(cap) = self.opts.ancilla_budget {
            if self.ancillas >= cap {
                return Err(GateError::PoolExhausted);
            }
        }
        self.ancillas += 1;
        Ok(())
    }

    pub fn ancillas_used(&self) -> usize {
        self.ancillas
    }

    /// Pair holding the ensemble of logical flux `y`.
    pub fn rho_ancilla(&mut self, y: ElemId) -> Result<PairId, GateError> {
        if y as usize >= self.ctx.logical_group().order() {
            return Err(GateError::NotInQuotient);
        }
        self.draw_ancilla()?;
        Ok(self.sys.create_pair_mixture(&self.ctx.rho_parts(y))?)
    }

    /// Ancilla in basis state `|n>`.
    pub fn basis_ancilla(&mut self, n: u32) -> Result<PairId, GateError> {
        self.rho_ancilla(self.ctx.basis_flux(n))
    }

    /// Ancilla whose first flux is the inverse of basis flux `n`.
    pub fn inverse_basis_ancilla(&mut self, n: u32) -> Result<PairId, GateError> {
        let q = self.ctx.logical_group().clone();
        self.rho_ancilla(q.inv(self.ctx.basis_flux(n)))
    }

    /// Vacuum pair from the configured sector model.
    pub fn vacuum_pair(&mut self) -> Result<PairId, GateError> {
        self.draw_ancilla()?;
        let model = match &self.opts.sector {
            Some(m) => m.clone(),
            None => SectorModel::concentrated(self.ctx.lift(self.ctx.params().b)),
        };
        Ok(self.sys.create_vacuum_pair(&model)?)
    }

    /// Fusion whose outcome and probability go to the transcript.
    pub fn fuse_noted(&mut self, i: u32, j: u32, what: &str) -> Result<bool, GateError> {
        let (out, p) = self.sys.fuse_with_probability(i, j)?;
        let vac = out == FusionOutcome::Vacuum;
        self.transcript.push(format!(
            "fuse {what} -> {} p={p:.12}",
            if vac { "vacuum" } else { "residual" }
        ));
        Ok(vac)
    }

    /// Probe test that the product of the listed fluxes is trivial.
    pub fn probe_noted(&mut self, word: &[(u32, bool)], reps: usize, what: &str) -> Result<bool, GateError> {
        let rep = self.probe_rep.clone();
        let (ok, used) = self.sys.loop_is_trivial(word, reps, &rep)?;
        self.transcript.push(format!(
            "probe {what} -> {} after {used}",
            if ok { "trivial" } else { "nontrivial" }
        ));
        Ok(ok)
    }

    /// Encodes `|n>`: a `|0>` ancilla followed by `n` X gates.
    pub fn encode(&mut self, n: u32) -> Result<QuditId, GateError> {
        let d = self.ctx.params().d;
        if n >= d {
            return Err(GateError::DigitOutOfRange(n, d));
        }
        let p = self.basis_ancilla(0)?;
        for _ in 0..n {
            self.x_pair(p, false)?;
        }
        Ok(self.adopt(p))
    }

    /// Qudit in the ensemble of any logical flux `y`.
    pub fn prepare_rho(&mut self, y: ElemId) -> Result<QuditId, GateError> {
        let p = self.rho_ancilla(y)?;
        Ok(self.adopt(p))
    }

    /// Injects `k` qudits in the given joint state, digits of qudit 0
    /// most significant. Pure mode only; used to set up test inputs.
    pub fn inject(&mut self, k: usize, amps: &[Complex64]) -> Result<Vec<QuditId>, GateError> {
        if self.ctx.is_coset() {
            return Err(GateError::Unsupported("state injection in coset mode".into()));
        }
        let d = self.d();
        if amps.len() != d.pow(k as u32) {
            return Err(GateError::Unsupported("amplitude count".into()));
        }
        let mut terms = Vec::new();
        for (idx, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut xs = vec![0; k];
            let mut r = idx;
            for slot in xs.iter_mut().rev() {
                *slot = self.ctx.basis_flux((r % d) as u32);
                r /= d;
            }
            terms.push((xs, a));
        }
        let ps = self.sys.create_pairs_entangled(&terms)?;
        Ok(ps.into_iter().map(|p| self.adopt(p)).collect())
    }

    fn distinct(qs: &[QuditId]) -> Result<(), GateError> {
        for i in 0..qs.len() {
            if qs[i + 1..].contains(&qs[i]) {
                return Err(GateError::SameQudit);
            }
        }
        Ok(())
    }

    fn conjugate(&mut self, which: Which, controls: &[PairId], target: PairId, inverse: bool) -> Result<(), GateError> {
        let f = match which {
            Which::Toffoli => &self.toffoli,
            Which::CsumExt => &self.csum_ext,
            Which::Shift => &self.shift,
            Which::Phase(k) => &self.phase_fns[&k],
        };
        run_conjugation(&mut self.sys, self.opts.mode, f, controls, target, inverse)
    }

    pub(crate) fn ensure_phase_fn(&mut self, k: u32) -> Result<(), GateError> {
        if self.phase_fns.contains_key(&k) {
            return Ok(());
        }
        let q = self.ctx.logical_group().clone();
        let p = *self.ctx.params();
        let d = p.d;
        let basis = p.basis(&q);
        // f(x_m) = a^(k m (m-1) / 2).
        let table = |xs: &[ElemId]| -> Option<ElemId> {
            let m = p.digit_of(&q, xs[0])? as u64;
            let e = (k as u64 * (m * m.saturating_sub(1) / 2)) % d as u64;
            Some(q.pow(p.a, e as i64))
        };
        let prog = fluxword::synthesize_on(&q, &[basis], &table)?;
        let c = Compiled::new(&prog, &self.ctx, self.opts.braid_limit)?;
        self.phase_fns.insert(k, c);
        Ok(())
    }

    pub(crate) fn phase_pair(&mut self, control: PairId, target: PairId, k: u32, inverse: bool) -> Result<(), GateError> {
        self.ensure_phase_fn(k)?;
        self.conjugate(Which::Phase(k), &[control], target, inverse)
    }

    pub(crate) fn x_pair(&mut self, p: PairId, inverse: bool) -> Result<(), GateError> {
        self.conjugate(Which::Shift, &[], p, inverse)
    }

    pub(crate) fn toffoli_pairs(&mut self, c1: PairId, c2: PairId, t: PairId, inverse: bool) -> Result<(), GateError> {
        self.conjugate(Which::Toffoli, &[c1, c2], t, inverse)
    }

    /// Controlled-sum as a Toffoli with a `|1>` ancilla in the first slot.
    pub(crate) fn csum_pairs(&mut self, c: PairId, t: PairId, inverse: bool) -> Result<(), GateError> {
        let one = self.basis_ancilla(1)?;
        self.toffoli_pairs(one, c, t, inverse)?;
        self.sys.discard(&one.anyons())?;
        Ok(())
    }

    /// Conjugates `target` by `f(control)` for `f(a^i b a^-i) = a^i`, identity
    /// elsewhere. Defined on every flux, unlike the controlled-sum.
    pub fn conjugate_by_extension(&mut self, control: PairId, target: PairId, inverse: bool) -> Result<(), GateError> {
        self.conjugate(Which::CsumExt, &[control], target, inverse)
    }

    pub(crate) fn z_pair(&mut self, p: PairId, inverse: bool) -> Result<(), GateError> {
        let x1 = self.xone.ok_or(GateError::BootstrapRequired)?;
        self.csum_pairs(p, x1, inverse)
    }

    pub fn toffoli(&mut self, q1: QuditId, q2: QuditId, q3: QuditId) -> Result<(), GateError> {
        Self::distinct(&[q1, q2, q3])?;
        let [a, b, c] = [self.pair(q1)?, self.pair(q2)?, self.pair(q3)?];
        self.toffoli_pairs(a, b, c, false)
    }

    pub fn toffoli_inverse(&mut self, q1: QuditId, q2: QuditId, q3: QuditId) -> Result<(), GateError> {
        Self::distinct(&[q1, q2, q3])?;
        let [a, b, c] = [self.pair(q1)?, self.pair(q2)?, self.pair(q3)?];
        self.toffoli_pairs(a, b, c, true)
    }

    pub fn controlled_sum(&mut self, qc: QuditId, qt: QuditId) -> Result<(), GateError> {
        Self::distinct(&[qc, qt])?;
        let (c, t) = (self.pair(qc)?, self.pair(qt)?);
        self.csum_pairs(c, t, false)
    }

    /// `|m, n> -> |m, n - m>`.
    pub fn controlled_sum_inverse(&mut self, qc: QuditId, qt: QuditId) -> Result<(), GateError> {
        Self::distinct(&[qc, qt])?;
        let (c, t) = (self.pair(qc)?, self.pair(qt)?);
        self.csum_pairs(c, t, true)
    }

    pub fn gate_x(&mut self, q: QuditId) -> Result<(), GateError> {
        let p = self.pair(q)?;
        self.x_pair(p, false)
    }

    pub fn gate_x_inverse(&mut self, q: QuditId) -> Result<(), GateError> {
        let p = self.pair(q)?;
        self.x_pair(p, true)
    }

    /// `Z`, by a controlled-sum onto the `x~1` reference.
    pub fn gate_z(&mut self, q: QuditId) -> Result<(), GateError> {
        let p = self.pair(q)?;
        self.z_pair(p, false)
    }

    pub fn gate_z_inverse(&mut self, q: QuditId) -> Result<(), GateError> {
        let p = self.pair(q)?;
        self.z_pair(p, true)
    }

    /// Conjugates qudit `target` by a program over the logical group
    /// evaluated on the first fluxes of `controls`.
    pub fn conjugation_by_function(
        &mut self,
        program: &Program,
        controls: &[QuditId],
        target: QuditId,
    ) -> Result<(), GateError> {
        let mut all = controls.to_vec();
        all.push(target);
        Self::distinct(&all)?;
        let c = Compiled::new(program, &self.ctx, self.opts.braid_limit)?;
        let cs = self.pairs(controls)?;
        let t = self.pair(target)?;
        run_conjugation(&mut self.sys, self.opts.mode, &c, &cs, t, false)
    }

    /// Keeps one branch of the ensemble, drawn by weight.
    pub fn sample_world(&mut self) {
        self.sys.sample_branch();
    }
}

#[derive(Clone, Copy)]
enum Which {
    Toffoli,
    CsumExt,
    Shift,
    Phase(u32),
}

fn run_conjugation(
    sys: &mut AnyonSystem,
    mode: ConjugationMode,
    f: &Compiled,
    controls: &[PairId],
    target: PairId,
    inverse: bool,
) -> Result<(), GateError> {
    if f.arity != controls.len() {
        return Err(GateError::Unsupported("control count".into()));
    }
    let braid = match mode {
        ConjugationMode::Compiled => false,
        ConjugationMode::Braid if f.word.is_none() => {
            return Err(GateError::Unsupported("word too long to braid".into()));
        }
        ConjugationMode::Braid => true,
        ConjugationMode::Auto => f.word.is_some(),
    };
    let g = sys.group_arc().clone();
    if !braid {
        let firsts: Vec<u32> = controls.iter().map(|p| p.first).collect();
        let order = g.order();
        let mut h = |env: &[ElemId]| {
            let idx = env.iter().fold(0usize, |acc, &x| acc * order + x as usize);
            f.table[idx]
        };
        sys.conjugate_by_function(&firsts, target, inverse, &mut h)?;
        return Ok(());
    }
    let word = f.word.as_ref().expect("checked");
    // Conjugating by w1..wk applies wk first; the inverse applies w1^-1
    // first.
    let steps: Vec<(&Atom, bool)> = if inverse {
        word.iter().map(|a| (a, true)).collect()
    } else {
        word.iter().rev().map(|a| (a, false)).collect()
    };
    for (atom, inv) in steps {
        match atom {
            Atom::Input(i) => sys.conjugate_pair(controls[*i], target, if inv { -1 } else { 1 })?,
            Atom::InputInverse(i) => sys.conjugate_pair(controls[*i], target, if inv { 1 } else { -1 })?,
            Atom::Const(c) => {
                let mut e = g.index_of(c).ok_or(GateError::NotInQuotient)?;
                if inv {
                    e = g.inv(e);
                }
                let anc = sys.create_flux_ancilla(e);
                sys.conjugate_pair(anc, target, 1)?;
                sys.discard(&anc.anyons())?;
            }
        }
    }
    Ok(())
}
