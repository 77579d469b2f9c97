//! Protocol demos: each prints observed against analytic statistics and
//! fails when a bound does not hold.
//!
//! Trial `t` runs on `template.spawn(trial_rng(seed, t))`; the register
//! transcripts of all trials are concatenated in trial order.

use std::sync::Arc;

use fluxgate::{ConjugationMode, LogicalContext, QuditRegister, RegisterOptions};
use fluxgroup::builders::sl2_5;
use fluxgroup::FiniteGroup;
use fluxleak::{leakage_correct, leakage_correct_general, LeakOptions, Verdict};
use fluxoracle::{fidelity, DenseState, Gate};
use fluxsim::{
    distill_flux_bins, trial_rng, AnyonSystem, BinLabel, Charge, Complex64, DistillBudget, Representation,
    SectorModel,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::runner::try_trials;
use crate::setup::{
    coset_context, extract, in_subspace, logical_context, register_options, resolve_group, template,
    xone_index,
};
use crate::stats::RateCheck;
use crate::{CliError, Report, RunConfig};

pub const DEMOS: [&str; 8] = [
    "toffoli",
    "measure-z",
    "xzero",
    "bootstrap",
    "measure-x",
    "leakage",
    "coset",
    "distill",
];

/// Fidelity threshold for oracle comparisons.
pub const FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Clone, Debug)]
pub struct DemoOptions {
    pub d: u32,
    /// Override for the qudit parameter `a`, in cycle notation.
    pub a: Option<String>,
    /// Small distillation budget.
    pub small_budget: bool,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            d: 2,
            a: None,
            small_budget: false,
        }
    }
}

/// Report plus the concatenated register transcripts.
#[derive(Clone, Debug, Default)]
pub struct DemoRun {
    pub report: Report,
    pub transcript: Vec<String>,
}

pub fn random_amps(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3 {
            return v;
        }
    }
}

fn class_size(g: &FiniteGroup, x: fluxgroup::ElemId) -> usize {
    g.class_of(x).len()
}

/// `1/|C(b)|` in the logical group; exact for pure mode and trivial `N`.
fn analytic_b_rate(reg: &QuditRegister) -> Option<f64> {
    let ctx = reg.context();
    if ctx.is_coset() && ctx.sim_group().order() != ctx.logical_group().order() {
        return None;
    }
    Some(1.0 / class_size(ctx.logical_group(), ctx.params().b) as f64)
}

fn toffoli_options() -> RegisterOptions {
    RegisterOptions {
        mode: ConjugationMode::Auto,
        braid_limit: 1024,
        ..Default::default()
    }
}

/// Basis table and random superpositions through the Toffoli gate.
pub fn toffoli_demo(tpl: &QuditRegister, seed: u64, superpositions: usize) -> Result<DemoRun, CliError> {
    let d = tpl.d();
    let mut r = Report::new();
    r.line(format!(
        "toffoli d={d} mode={:?} word={}",
        tpl.options().mode,
        match tpl.toffoli_word_len() {
            Some(n) => format!("braided, {n} atoms"),
            None => "compiled".into(),
        }
    ));
    let basis = d * d * d;
    let runs = try_trials(basis + superpositions, |t| -> Result<(f64, Vec<String>), CliError> {
        let mut rng = trial_rng(seed, t);
        let t = t as usize;
        let (amps, want) = if t < basis {
            let digits = [t / (d * d), t / d % d, t % d];
            let want = DenseState::basis(d, &digits)?.apply(Gate::Toffoli, &[0, 1, 2])?;
            let mut amps = vec![Complex64::new(0.0, 0.0); basis];
            amps[t] = Complex64::new(1.0, 0.0);
            (amps, want)
        } else {
            let amps = random_amps(&mut rng, basis);
            let want = DenseState::from_amplitudes(d, 3, amps.clone())?.apply(Gate::Toffoli, &[0, 1, 2])?;
            (amps, want)
        };
        let mut reg = tpl.spawn(rng);
        let qs = if t < basis {
            let digits = [t / (d * d), t / d % d, t % d];
            digits
                .iter()
                .map(|&n| reg.encode(n as u32))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            reg.inject(3, &amps)?
        };
        reg.toffoli(qs[0], qs[1], qs[2])?;
        let f = fidelity(&extract(&reg, &qs)?, &want)?;
        if t < basis {
            let m = reg.measure_z(qs[2], None)?;
            reg.note(format!("toffoli basis {t} target -> {}", m.digit));
        }
        Ok((f, reg.take_transcript()))
    })?;
    let mut transcript = Vec::new();
    let mut agree = 0;
    let mut worst = 1.0f64;
    for (t, (f, tr)) in runs.into_iter().enumerate() {
        if t < basis {
            agree += usize::from(f >= FIDELITY);
        }
        worst = worst.min(f);
        transcript.extend(tr);
    }
    r.check(agree == basis, format!("basis agreements {agree}/{basis}"));
    if superpositions > 0 {
        r.check(
            worst >= FIDELITY,
            format!("superpositions {superpositions}, min fidelity {worst:.12}"),
        );
    }
    Ok(DemoRun { report: r, transcript })
}

/// Single-copy `measure_z` vacuum rate and default-copy readout.
pub fn measure_z_demo(tpl: &QuditRegister, seed: u64, trials: usize) -> Result<DemoRun, CliError> {
    let d = tpl.d();
    let mut r = Report::new();
    let runs = try_trials(trials, |t| -> Result<(Option<bool>, Vec<String>), CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, t));
        let n = (t as usize % d) as u32;
        let q = reg.encode(n)?;
        let out = match reg.measure_z(q, Some(1)) {
            Ok(o) => Some(o.digit == n),
            Err(fluxgate::GateError::Inconclusive(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Ok((out, reg.take_transcript()))
    })?;
    let hits = runs.iter().filter(|x| x.0.is_some()).count();
    let wrong = runs.iter().filter(|x| x.0 == Some(false)).count();
    match analytic_b_rate(tpl) {
        Some(p) => {
            let c = RateCheck::new("one-copy vacuum rate", hits, trials, p);
            r.check(c.pass(), c.summary());
        }
        None => r.line(format!("one-copy vacuum rate: observed {hits}/{trials}")),
    }
    r.check(wrong == 0, format!("conclusive but wrong digits {wrong}"));
    let full = 20.min(trials.max(1));
    let reads = try_trials(full, |t| -> Result<bool, CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, (trials + t as usize) as u64));
        let n = (t as usize % d) as u32;
        let q = reg.encode(n)?;
        Ok(reg.measure_z(q, None)?.digit == n)
    })?;
    let ok = reads.iter().filter(|&&b| b).count();
    r.check(
        ok == full,
        format!("default copies ({}) readout {ok}/{full}", tpl.default_z_copies()),
    );
    let transcript = runs.into_iter().flat_map(|x| x.1).collect();
    Ok(DemoRun { report: r, transcript })
}

/// `prepare_xzero` attempt rate, conditioned state fidelity, and `x~1`
/// fusions that must never reach the vacuum.
pub fn xzero_demo(tpl: &QuditRegister, seed: u64, attempts: usize, fusions: usize) -> Result<DemoRun, CliError> {
    let d = tpl.d();
    let mut r = Report::new();
    let want0 = DenseState::x_eigenstate(d, 0);
    let runs = try_trials(attempts, |t| -> Result<(Option<f64>, Vec<String>), CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, t));
        let f = match reg.xzero_single_attempt()? {
            Some(q) => Some(fidelity(&extract(&reg, &[q])?, &want0)?),
            None => None,
        };
        Ok((f, reg.take_transcript()))
    })?;
    let ok = runs.iter().filter(|x| x.0.is_some()).count();
    let worst = runs.iter().filter_map(|x| x.0).fold(1.0f64, f64::min);
    match analytic_b_rate(tpl) {
        Some(p) => {
            let c = RateCheck::new("attempt success rate", ok, attempts, d as f64 * p);
            r.check(c.pass(), c.summary());
        }
        None => r.line(format!("attempt success rate: observed {ok}/{attempts}")),
    }
    r.check(
        ok > 0 && worst >= FIDELITY,
        format!("conditioned x~0 states {ok}, min fidelity {worst:.12}"),
    );
    let mut transcript: Vec<String> = runs.into_iter().flat_map(|x| x.1).collect();
    let amps = DenseState::x_eigenstate(d, 1).amplitudes().to_vec();
    let fused = try_trials(fusions, |t| -> Result<(bool, Vec<String>), CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, (attempts + t as usize) as u64));
        let q = reg.inject(1, &amps)?[0];
        let p = reg.pair(q)?;
        let v = reg.fuse_noted(p.first, p.second, "x~1")?;
        Ok((v, reg.take_transcript()))
    })?;
    if fusions > 0 {
        let vac = fused.iter().filter(|x| x.0).count();
        let c = RateCheck::new("x~1 fusion vacuum rate", vac, fusions, 0.0);
        r.check(c.pass(), c.summary());
    }
    transcript.extend(fused.into_iter().flat_map(|x| x.1));
    Ok(DemoRun { report: r, transcript })
}

/// `x~1` bootstrap: a non-trivial root, faithful copies, `measure_x = 1`.
pub fn bootstrap_demo(tpl: &QuditRegister, seed: u64, trials: usize) -> Result<DemoRun, CliError> {
    let d = tpl.d();
    let mut r = Report::new();
    let runs = try_trials(trials, |t| -> Result<(usize, bool, Vec<String>), CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, t));
        reg.bootstrap_xone()?;
        let x = xone_index(&reg)?;
        let c = reg.copy_xone()?;
        let f = fidelity(&extract(&reg, &[c])?, &DenseState::x_eigenstate(d, x))?;
        let m = reg.measure_x(c, None)?.digit;
        Ok((x, x != 0 && f >= FIDELITY && m == 1, reg.take_transcript()))
    })?;
    let mut hist = vec![0usize; d];
    for x in &runs {
        hist[x.0] += 1;
    }
    let good = runs.iter().filter(|x| x.1).count();
    r.line(format!("root histogram (oracle x~r, r = 0..{}): {hist:?}", d - 1));
    r.check(hist[0] == 0, "trivial root never accepted");
    r.check(good == trials, format!("copy fidelity and measure_x = 1: {good}/{trials}"));
    let transcript = runs.into_iter().flat_map(|x| x.2).collect();
    Ok(DemoRun { report: r, transcript })
}

/// X eigenstates read back by `measure_x`; basis states give uniform digits.
pub fn measure_x_demo(tpl: &QuditRegister, seed: u64, trials: usize) -> Result<DemoRun, CliError> {
    let d = tpl.d();
    let mut r = Report::new();
    let runs = try_trials(trials, |t| -> Result<(bool, u32, Vec<String>), CliError> {
        let mut reg = tpl.spawn(trial_rng(seed, t));
        reg.bootstrap_xone()?;
        let ok = if reg.context().is_coset() {
            // No injection: x~0 from its protocol, x~1 from the reference.
            let (q, want) = if t % 2 == 0 {
                (reg.prepare_xzero()?, 0)
            } else {
                (reg.copy_xone()?, 1)
            };
            reg.measure_x(q, None)?.digit == want
        } else {
            let x = xone_index(&reg)?;
            let j = t as usize % d;
            let q = reg.inject(1, DenseState::x_eigenstate(d, j).amplitudes())?[0];
            reg.measure_x(q, None)?.digit as usize * x % d == j
        };
        let z = reg.encode(0)?;
        let u = reg.measure_x(z, None)?.digit;
        Ok((ok, u, reg.take_transcript()))
    })?;
    let good = runs.iter().filter(|x| x.0).count();
    r.check(good == trials, format!("eigenstate readout {good}/{trials}"));
    let zeros = runs.iter().filter(|x| x.1 == 0).count();
    let c = RateCheck::new("basis |0> reads x~0", zeros, trials, 1.0 / d as f64);
    r.check(c.pass(), c.summary());
    let transcript = runs.into_iter().flat_map(|x| x.2).collect();
    Ok(DemoRun { report: r, transcript })
}

pub const LEAK_CATEGORIES: [&str; 5] = ["clean", "net-flux", "wrong-flux", "foreign-flux", "charge"];

/// Outcome of one leakage trial.
#[derive(Clone, Debug)]
struct LeakTrial {
    in_subspace: bool,
    clean_ok: bool,
    replaced: bool,
}

fn leak_trial(tpl: &QuditRegister, seed: u64, cat: usize, t: u64) -> Result<LeakTrial, CliError> {
    let d = tpl.d();
    let mut rng = trial_rng(seed, t);
    let coset = tpl.context().is_coset();
    let digit = rng.gen_range(0..d);
    let amps = if coset {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[digit] = Complex64::new(1.0, 0.0);
        v
    } else {
        random_amps(&mut rng, d)
    };
    let g = tpl.context().sim_group().clone();
    let h = loop {
        let h = rng.gen_range(0..g.order()) as fluxgroup::ElemId;
        if h != g.identity() {
            break h;
        }
    };
    let mut reg = tpl.spawn(rng);
    let q = if coset {
        reg.encode(digit as u32)?
    } else {
        reg.inject(1, &amps)?[0]
    };
    let p = reg.pair(q)?;
    match LEAK_CATEGORIES[cat] {
        "clean" => {}
        "net-flux" => reg.system_mut().multiply_flux(p.second, h, false)?,
        "wrong-flux" => reg.system_mut().conjugate_by_function(&[], p, false, &mut |_| h)?,
        "foreign-flux" => {
            let old = reg.system_mut().create_flux_ancilla(h);
            let prev = reg.replace_pair(q, old)?;
            reg.system_mut().discard(&prev.anyons())?;
        }
        "charge" => reg
            .system_mut()
            .set_charge(p.first, Charge::Charged { partner: None })?,
        other => unreachable!("{other}"),
    }
    let opts = LeakOptions::default();
    let rep = if reg.context().is_coset() {
        leakage_correct_general(&mut reg, q, &opts)?
    } else {
        leakage_correct(&mut reg, q, &opts)?
    };
    let inside = in_subspace(&reg, q);
    let clean_ok = if cat == 0 {
        let want = DenseState::from_amplitudes(d, 1, amps)?;
        let rho = crate::setup::density(&reg, &[q])?;
        rep.verdict == Verdict::Clean && rho.fidelity_with(&want)? >= FIDELITY
    } else {
        true
    };
    Ok(LeakTrial {
        in_subspace: inside,
        clean_ok,
        replaced: rep.verdict == Verdict::Replaced,
    })
}

/// `n` trials per category; trial streams alternate over `templates`.
pub fn leakage_demo(templates: &[&QuditRegister], seed: u64, n: usize) -> Result<DemoRun, CliError> {
    let mut r = Report::new();
    for (cat, name) in LEAK_CATEGORIES.iter().enumerate() {
        let runs = try_trials(n, |t| {
            let tpl = templates[t as usize % templates.len()];
            leak_trial(tpl, seed, cat, (cat * n) as u64 + t)
        })?;
        let violations = runs.iter().filter(|x| !x.in_subspace).count();
        let replaced = runs.iter().filter(|x| x.replaced).count();
        r.check(
            violations == 0,
            format!("{name}: {n} inputs, subspace violations {violations}, replaced {replaced}"),
        );
        if cat == 0 {
            let good = runs.iter().filter(|x| x.clean_ok).count();
            r.check(good == n, format!("clean: verdict clean with fidelity >= 1-1e-9 {good}/{n}"));
        }
    }
    Ok(DemoRun {
        report: r,
        transcript: Vec::new(),
    })
}

/// Pure and coset registers over the same simple group, `N = 1`.
pub fn trivial_kernel_pair(g: &FiniteGroup, d: u32, seed: u64, opts: RegisterOptions) -> Result<(QuditRegister, QuditRegister), CliError> {
    let pure = logical_context(g.clone(), d, None)?;
    let coset = coset_context(g, d)?;
    Ok((template(pure, seed, opts.clone())?, template(coset, seed, opts)?))
}

/// `N = 1` transcripts of the first three demos match pure mode; the
/// SL(2,5) Toffoli has the right support on every basis tuple.
pub fn coset_demo(seed: u64, trials: usize) -> Result<DemoRun, CliError> {
    let mut r = Report::new();
    let a5 = resolve_group(Some("A5"))?;
    for d in [2u32, 3] {
        let (pure, coset) = trivial_kernel_pair(&a5, d, seed, toffoli_options())?;
        r.check(coset.context().is_coset(), format!("d={d}: coset register over P/N with |N| = 1"));
        for (i, name) in DEMOS[..3].iter().enumerate() {
            let go = |reg: &QuditRegister| match i {
                // Injection needs pure mode, so the superposition and x~1
                // parts are left out on both sides.
                0 => toffoli_demo(reg, seed, 0),
                1 => measure_z_demo(reg, seed, trials),
                _ => xzero_demo(reg, seed, trials, 0),
            };
            let a = go(&pure)?.transcript.join("\n");
            let b = go(&coset)?.transcript.join("\n");
            r.check(
                !a.is_empty() && a == b,
                format!("d={d} {name}: transcripts identical ({} bytes)", a.len()),
            );
        }
    }
    let g = sl2_5()?;
    let ctx = coset_context(&g, 2)?;
    let (n, q) = (ctx.sim_group().order() / ctx.logical_group().order(), ctx.logical_group().order());
    let tpl = template(ctx, seed, RegisterOptions::default())?;
    let rows = try_trials(8, |t| -> Result<bool, CliError> {
        let (l, m, k) = (t as u32 >> 2 & 1, t as u32 >> 1 & 1, t as u32 & 1);
        let mut reg = tpl.spawn(trial_rng(seed, t));
        let qs = [reg.encode(l)?, reg.encode(m)?, reg.encode(k)?];
        reg.toffoli(qs[0], qs[1], qs[2])?;
        let rho = crate::setup::density(&reg, &qs)?;
        let want = (l * 4 + m * 2 + (l * m + k) % 2) as usize;
        Ok(rho.support() == vec![want] && (rho.trace() - 1.0).abs() < 1e-9)
    })?;
    let ok = rows.iter().filter(|&&b| b).count();
    r.check(
        ok == 8,
        format!("SL(2,5), |N| = {n}, |P/N| = {q}: Toffoli density support {ok}/8"),
    );
    Ok(DemoRun {
        report: r,
        transcript: Vec::new(),
    })
}

/// Sorts vacuum pairs into flux bins with probes only.
pub fn distill_demo(g: FiniteGroup, cfg: &RunConfig, small: bool) -> Result<DemoRun, CliError> {
    let mut r = Report::new();
    let g = Arc::new(g);
    let rep = Arc::new(Representation::standard(&g)?);
    let mut sys = AnyonSystem::new(g.clone(), trial_rng(cfg.seed, 0));
    sys.set_recording(false);
    let model = SectorModel::uniform(&g, cfg.charged_weight);
    let budget = if small {
        DistillBudget {
            pairs: 30,
            probes: 300,
            reps: 6,
            guesses: 100,
        }
    } else {
        DistillBudget::default()
    };
    let report = distill_flux_bins(&mut sys, &model, budget, &rep)?;
    r.line(format!(
        "pairs {} bins {} probes used {}/{}",
        budget.pairs,
        report.bins.len(),
        report.probes_used,
        budget.probes
    ));
    if report.partial {
        r.line("warning: budget exhausted, bins are partial");
    }
    let mut pure = true;
    for (i, bin) in report.bins.iter().enumerate() {
        let fluxes: Vec<Vec<(fluxgroup::ElemId, f64)>> = bin
            .pairs
            .iter()
            .map(|p| sys.flux_distribution(p.first))
            .collect::<Result<_, _>>()?;
        let definite = fluxes.iter().all(|f| f.len() == 1);
        let same = definite && fluxes.iter().all(|f| f[0].0 == fluxes[0][0].0);
        pure &= same;
        let label = match bin.label {
            BinLabel::Element(x) => g.elem(x).to_string(),
            BinLabel::Unlabeled => "unlabeled".into(),
        };
        r.line(format!("bin {i}: {} pairs, label {label}", bin.pairs.len()));
    }
    r.check(pure, "every bin holds a single flux");
    Ok(DemoRun {
        report: r,
        transcript: Vec::new(),
    })
}

/// Runs a demo by name with the group, seed and trial count of `cfg`.
pub fn cmd_demo(name: &str, cfg: &RunConfig, opts: &DemoOptions) -> Result<DemoRun, CliError> {
    let group = || resolve_group(cfg.group.as_deref());
    let build = |reg_opts: Option<RegisterOptions>| -> Result<QuditRegister, CliError> {
        let ctx: LogicalContext = logical_context(group()?, opts.d, opts.a.as_deref())?;
        let mut o = register_options(cfg, &ctx)?;
        if let Some(x) = reg_opts {
            o.mode = x.mode;
            o.braid_limit = x.braid_limit;
        }
        template(ctx, cfg.seed, o)
    };
    // State injection needs pure mode.
    let injecting = |reg: &QuditRegister, n: usize| if reg.context().is_coset() { 0 } else { n };
    let mut run = match name {
        "toffoli" => {
            let reg = build(Some(toffoli_options()))?;
            toffoli_demo(&reg, cfg.seed, injecting(&reg, cfg.trials_or(20)))?
        }
        "measure-z" => measure_z_demo(&build(None)?, cfg.seed, cfg.trials_or(10_000))?,
        "xzero" => {
            let n = cfg.trials_or(10_000);
            let reg = build(None)?;
            xzero_demo(&reg, cfg.seed, n, injecting(&reg, n))?
        }
        "bootstrap" => bootstrap_demo(&build(None)?, cfg.seed, cfg.trials_or(100))?,
        "measure-x" => measure_x_demo(&build(None)?, cfg.seed, cfg.trials_or(100))?,
        "leakage" => leakage_demo(&[&build(None)?], cfg.seed, cfg.trials_or(100))?,
        "coset" => coset_demo(cfg.seed, cfg.trials_or(500))?,
        "distill" => distill_demo(group()?, cfg, opts.small_budget)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown demo '{other}' (expected one of {})",
                DEMOS.join(", ")
            )))
        }
    };
    run.report.lines.insert(0, format!("demo {name} seed {}", cfg.seed));
    Ok(run)
}
