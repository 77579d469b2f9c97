use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluxcli::demos::{cmd_demo, DemoOptions, DEMOS};
use fluxcli::setup::{logical_context, qudit_params, register_options, resolve_group, template};
use fluxcli::synth::{cmd_synth, SynthSource};
use fluxcli::{accept, groups, simulate, CliError, Report, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "fluxcli", version, about = "Flux-anyon quantum computation toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Trial count; each command has its own default.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Group name (A5, S5, SL(2,5), A5xA5, ...) or generators like "(1 2 3 4 5);(1 2 3)".
    #[arg(long, global = true)]
    group: Option<String>,
    /// Weight of the charged sector for vacuum pairs.
    #[arg(long, global = true, default_value_t = 0.0)]
    sector_charged_weight: f64,
    /// Write the command's artifact (word file, transcript, report) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Budget {
    Small,
    Default,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Order, classes, derived series and simple perfect quotient.
    Group {
        /// Group name or generators; defaults to --group.
        spec: Option<String>,
    },
    /// Synthesizes a product-form program.
    Synth {
        /// The Toffoli conjugating function.
        #[arg(long, conflicts_with_all = ["table", "random"])]
        toffoli: bool,
        /// Table file with lines "x1 ; x2 -> y".
        #[arg(long, conflicts_with = "random")]
        table: Option<PathBuf>,
        /// A random table of the given arity.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Qudit parameter a in cycle notation.
        #[arg(long)]
        a: Option<String>,
    },
    /// Runs a braid file over seeded trials.
    Simulate { file: PathBuf },
    /// Runs a logical circuit file.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        a: Option<String>,
    },
    /// Protocol demos with observed and analytic statistics.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(DEMOS))]
        name: String,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        a: Option<String>,
        #[arg(long, value_enum, default_value_t = Budget::Default)]
        budget: Budget,
    },
    /// Runs the acceptance criteria.
    Accept {
        /// Criteria to run (1-9); all by default.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        only: Vec<u8>,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Stdout text and the artifact for --out.
fn execute(cli: Cli) -> Result<(Report, Option<String>), CliError> {
    let g = &cli.global;
    let cfg = RunConfig {
        seed: g.seed,
        trials: g.trials,
        group: g.group.clone(),
        charged_weight: g.sector_charged_weight,
    };
    match cli.cmd {
        Cmd::Group { spec } => {
            let spec = spec.or(cfg.group.clone()).unwrap_or_else(|| "A5".into());
            let r = groups::cmd_group(&spec)?;
            let text = r.text();
            Ok((r, Some(text)))
        }
        Cmd::Synth {
            toffoli,
            table,
            random,
            arity,
            d,
            a,
        } => {
            let grp = resolve_group(cfg.group.as_deref())?;
            let text;
            let params;
            let src = if toffoli {
                params = qudit_params(&grp, d, a.as_deref())?;
                SynthSource::Toffoli(&params)
            } else if let Some(path) = &table {
                text = read(path)?;
                SynthSource::Table(&text)
            } else if random {
                SynthSource::Random { arity, seed: cfg.seed }
            } else {
                return Err(CliError::Usage("synth needs --toffoli, --table or --random".into()));
            };
            let (word, mut r) = cmd_synth(&grp, src)?;
            if g.out.is_none() {
                let summary = std::mem::take(&mut r.lines);
                r.lines = word.lines().map(String::from).collect();
                r.lines.extend(summary.into_iter().map(|l| format!("# {l}")));
            }
            Ok((r, Some(word)))
        }
        Cmd::Simulate { file } => {
            let grp = resolve_group(cfg.group.as_deref())?;
            let r = simulate::cmd_simulate(&read(&file)?, grp, &cfg)?;
            let text = r.text();
            Ok((r, Some(text)))
        }
        Cmd::Run { file, d, a } => {
            let text = read(&file)?;
            let ops = fluxgate::parse_circuit(&text)?;
            let ctx = logical_context(resolve_group(cfg.group.as_deref())?, d, a.as_deref())?;
            let opts = register_options(&cfg, &ctx)?;
            let mut reg = template(ctx, cfg.seed, opts)?;
            let mut r = Report::new();
            r.lines = fluxgate::run_circuit(&mut reg, &ops)?;
            let transcript = reg.transcript().join("\n") + "\n";
            Ok((r, Some(transcript)))
        }
        Cmd::Demo { name, d, a, budget } => {
            let opts = DemoOptions {
                d,
                a,
                small_budget: matches!(budget, Budget::Small),
            };
            let run = cmd_demo(&name, &cfg, &opts)?;
            let transcript = run.transcript.join("\n") + "\n";
            Ok((run.report, Some(transcript)))
        }
        Cmd::Accept { only } => {
            let ids: Vec<usize> = if only.is_empty() {
                (1..=9).collect()
            } else {
                only.into_iter().map(usize::from).collect()
            };
            let mut r = Report::new();
            for id in ids {
                let c = accept::run_criterion(id, cfg.seed);
                r.pass &= c.pass;
                r.line(c.line());
                r.lines.extend(c.detail.iter().map(|l| format!("  {l}")));
            }
            let text = r.text();
            Ok((r, Some(text)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = cli.global.out.clone();
    match execute(cli) {
        Ok((report, artifact)) => {
            print!("{}", report.text());
            if let (Some(path), Some(text)) = (out, artifact) {
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
