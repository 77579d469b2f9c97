//! Command-line front end over the flux-anyon crates.
//!
//! Every command returns a [`Report`]; the binary prints it and maps
//! `pass` to the exit code. All randomness comes from [`RunConfig::seed`],
//! with trial `t` drawing from `trial_rng(seed, t)`.

pub mod accept;
pub mod demos;
pub mod groups;
pub mod runner;
pub mod setup;
pub mod simulate;
pub mod stats;
pub mod synth;

use fluxgate::GateError;
use fluxgroup::GroupError;
use fluxleak::LeakError;
use fluxoracle::OracleError;
use fluxsim::SimError;
use fluxword::WordError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Leak(#[from] LeakError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// `None` picks each command's default.
    pub trials: Option<usize>,
    /// Group spec or name; `None` means A5.
    pub group: Option<String>,
    /// Weight of the charged sector for vacuum pairs.
    pub charged_weight: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            trials: None,
            group: None,
            charged_weight: 0.0,
        }
    }
}

impl RunConfig {
    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

/// Text output of a command and whether its checks held.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new() -> Report {
        Report {
            lines: Vec::new(),
            pass: true,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Records a check; a failed one fails the report.
    pub fn check(&mut self, ok: bool, s: impl Into<String>) {
        let s = s.into();
        self.lines.push(format!("{s} [{}]", if ok { "ok" } else { "FAIL" }));
        self.pass &= ok;
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}
