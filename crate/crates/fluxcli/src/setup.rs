//! Groups, logical contexts and registers built from command-line input.

use std::sync::Arc;

use fluxgate::{LogicalContext, QuditId, QuditRegister, RegisterOptions};
use fluxgroup::builders::{alternating, cyclic, direct_product, sl2_5, symmetric};
use fluxgroup::{find_qudit_params, simple_perfect_quotient, FiniteGroup, QuditParams, QuditPreference};
use fluxoracle::{extract_density, extract_logical_state, DenseState, DensityMatrix, OracleError, PairCode};
use fluxsim::{trial_rng, SectorModel};

use crate::{CliError, RunConfig};

/// Named groups: `A<n>`, `S<n>`, `C<n>`, `SL(2,5)` and `A5xA5`.
pub fn named_group(name: &str) -> Option<Result<FiniteGroup, CliError>> {
    let n = name.trim();
    let upper = n.to_ascii_uppercase();
    let num = |s: &str| s.parse::<usize>().ok();
    let g = match upper.as_str() {
        "SL(2,5)" | "SL25" | "2I" => sl2_5(),
        "A5XA5" | "A5*A5" => alternating(5).and_then(|a| direct_product(&a, &a)),
        _ => {
            let (head, tail) = upper.split_at(1.min(upper.len()));
            match (head, num(tail)) {
                ("A", Some(k)) => alternating(k),
                ("S", Some(k)) => symmetric(k),
                ("C", Some(k)) | ("Z", Some(k)) => cyclic(k),
                _ => return None,
            }
        }
    };
    Some(g.map_err(CliError::from))
}

/// A group name, or generators in cycle notation separated by `;`.
pub fn resolve_group(spec: Option<&str>) -> Result<FiniteGroup, CliError> {
    let spec = spec.unwrap_or("A5");
    match named_group(spec) {
        Some(g) => g,
        None => Ok(FiniteGroup::parse(spec)?),
    }
}

/// Qudit parameters; `a` overrides the search. Without it, `d = 3` tries
/// `a = (1 2 3)` first so the A5 defaults are the usual ones.
pub fn qudit_params(g: &FiniteGroup, d: u32, a: Option<&str>) -> Result<QuditParams, CliError> {
    let mut pref = QuditPreference::with_d(d);
    if let Some(a) = a {
        pref.a = Some(g.parse_elem(a)?);
        return Ok(find_qudit_params(g, &pref)?);
    }
    if d == 3 {
        if let Ok(x) = g.parse_elem("(1 2 3)") {
            let mut p = pref;
            p.a = Some(x);
            if let Ok(params) = find_qudit_params(g, &p) {
                return Ok(params);
            }
        }
    }
    Ok(find_qudit_params(g, &pref)?)
}

/// Pure mode when `g` is simple and perfect, coset mode over its simple
/// perfect quotient otherwise.
pub fn logical_context(g: FiniteGroup, d: u32, a: Option<&str>) -> Result<LogicalContext, CliError> {
    if g.is_perfect() && g.is_simple() {
        let p = qudit_params(&g, d, a)?;
        return Ok(LogicalContext::pure(Arc::new(g), p)?);
    }
    coset_context(&g, d)
}

/// Coset mode even when `N` is trivial. Parameters are found on `P/N`,
/// then pushed through the epimorphism when `P/N` is `G` itself.
pub fn coset_context(g: &FiniteGroup, d: u32) -> Result<LogicalContext, CliError> {
    let cc = simple_perfect_quotient(g)?;
    let qp = if cc.n.order() == 1 && cc.p.order() == g.order() {
        let p = qudit_params(g, d, None)?;
        QuditParams {
            a: cc.epi(p.a).expect("P = G"),
            b: cc.epi(p.b).expect("P = G"),
            d,
        }
    } else {
        find_qudit_params(&cc.quotient, &QuditPreference::with_d(d))?
    };
    Ok(LogicalContext::coset(&cc, qp)?)
}

/// Default options, with the charged weight applied to vacuum pairs drawn
/// from the class of `b`.
pub fn register_options(cfg: &RunConfig, ctx: &LogicalContext) -> Result<RegisterOptions, CliError> {
    let w = cfg.charged_weight;
    if !(0.0..=1.0).contains(&w) {
        return Err(CliError::Usage(format!("charged weight {w} outside [0, 1]")));
    }
    let mut opts = RegisterOptions::default();
    if w > 0.0 {
        opts.sector = Some(SectorModel {
            magnetic: vec![(ctx.basis_flux(0), 1.0 - w)],
            charged: w,
        });
    }
    Ok(opts)
}

/// Register over `ctx` seeded with trial 0; trials use [`QuditRegister::spawn`].
pub fn template(ctx: LogicalContext, seed: u64, opts: RegisterOptions) -> Result<QuditRegister, CliError> {
    Ok(QuditRegister::new(ctx, trial_rng(seed, 0), opts)?)
}

fn with_code<T>(reg: &QuditRegister, f: impl FnOnce(&PairCode) -> T) -> T {
    let ctx = reg.context();
    let decode = |x| ctx.classify(x).map(|(n, t)| (n, t as usize));
    let code = PairCode {
        d: reg.d(),
        decode: &decode,
    };
    f(&code)
}

pub fn extract(reg: &QuditRegister, qs: &[QuditId]) -> Result<DenseState, CliError> {
    let pairs = reg.pairs(qs)?;
    Ok(with_code(reg, |c| extract_logical_state(reg.system(), &pairs, c))?)
}

pub fn density(reg: &QuditRegister, qs: &[QuditId]) -> Result<DensityMatrix, OracleError> {
    let pairs = reg.pairs(qs).map_err(|_| OracleError::DimensionMismatch)?;
    with_code(reg, |c| extract_density(reg.system(), &pairs, c))
}

/// Whether `q` lies in the computational subspace with unit trace.
pub fn in_subspace(reg: &QuditRegister, q: QuditId) -> bool {
    density(reg, &[q])
        .map(|r| (r.trace() - 1.0).abs() < 1e-9)
        .unwrap_or(false)
}

/// The `r` with the register's `x~1` reference equal to the oracle's `x~r`.
pub fn xone_index(reg: &QuditRegister) -> Result<usize, CliError> {
    let pair = reg
        .xone_pair()
        .ok_or(CliError::Gate(fluxgate::GateError::BootstrapRequired))?;
    let s = with_code(reg, |c| extract_logical_state(reg.system(), &[pair], c))?;
    let d = reg.d();
    for r in 0..d {
        if fluxoracle::fidelity(&s, &DenseState::x_eigenstate(d, r))? > 1.0 - 1e-9 {
            return Ok(r);
        }
    }
    Err(CliError::Usage("x~1 reference is not an X eigenstate".into()))
}
