//! `simulate`: runs a braid file over seeded trials.
//!
//! Prints the transcript of trial 0, then for each fusion event (in
//! program order) the vacuum frequency across trials against the mean
//! predicted probability.

use std::sync::Arc;

use fluxgroup::FiniteGroup;
use fluxsim::{parse_braid_program, run_braid_program_with, trial_rng, AnyonSystem, SimError};

use crate::runner::run_trials;
use crate::stats::RateCheck;
use crate::{CliError, Report, RunConfig};

/// `(vacuum, p_vac)` parsed from a fusion transcript line.
fn fusion_event(line: &str) -> Option<(bool, f64)> {
    if !(line.starts_with("fuse ") || line.starts_with("probe-fuse ")) {
        return None;
    }
    let (_, tail) = line.split_once("-> ")?;
    let mut words = tail.split_whitespace();
    let vacuum = words.next()? == "vacuum";
    let p = words.next()?.strip_prefix("p_vac=")?.parse().ok()?;
    Some((vacuum, p))
}

pub fn cmd_simulate(text: &str, g: FiniteGroup, cfg: &RunConfig) -> Result<Report, CliError> {
    let w = cfg.charged_weight;
    if !(0.0..=1.0).contains(&w) {
        return Err(CliError::Usage(format!("charged weight {w} outside [0, 1]")));
    }
    let ops = parse_braid_program(text, &g)?;
    let g = Arc::new(g);
    let trials = cfg.trials_or(1).max(1);
    let runs: Vec<Result<Vec<String>, SimError>> = run_trials(trials, |t| {
        let mut sys = AnyonSystem::new(g.clone(), trial_rng(cfg.seed, t));
        run_braid_program_with(&mut sys, &ops, w)?;
        Ok(sys.take_transcript())
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut r = Report::new();
    r.line(format!("# trial 0 of {trials}, seed {}", cfg.seed));
    r.lines.extend(runs[0].iter().cloned());
    if trials > 1 {
        let events: Vec<Vec<(bool, f64)>> = runs
            .iter()
            .map(|t| t.iter().filter_map(|l| fusion_event(l)).collect())
            .collect();
        let k = events.iter().map(|e| e.len()).max().unwrap_or(0);
        for i in 0..k {
            let here: Vec<(bool, f64)> = events.iter().filter_map(|e| e.get(i).copied()).collect();
            let hits = here.iter().filter(|e| e.0).count();
            let p = here.iter().map(|e| e.1).sum::<f64>() / here.len() as f64;
            let c = RateCheck::new(format!("fusion {i} vacuum"), hits, here.len(), p);
            r.line(c.line());
        }
    }
    Ok(r)
}
