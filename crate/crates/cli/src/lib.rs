//! Command-line front end for the `qdkd` simulator.
//!
//! Exit statuses: 0 success, 1 I/O failure, 2 usage or invalid parameters,
//! 3 verification failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
mod error;
pub mod report;
pub mod spec;
pub mod verify;

pub use error::{CliError, CliResult};

use commands::{Scheme, SweepSpec};
use spec::{AttackName, OutputFormat, PartialSpec, RunSpec};
use verify::VerifyOptions;

#[derive(Debug, Parser)]
#[command(
    name = "qdkd",
    version,
    about = "Quantum dense key distribution attack simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one Monte-Carlo experiment and report statistics and predictions.
    Run(RunArgs),
    /// Evaluate the closed-form report over a (p, ε) grid.
    Sweep(SweepArgs),
    /// Compare the true and claimed correlated-result probabilities.
    Counterexample(CounterexampleArgs),
    /// Run the invariant suite and print a pass/fail table.
    Verify(VerifyArgs),
}

/// Flags shared by `run` and `sweep`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub attack: Option<AttackName>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Probability that Bob chooses control mode [default: 0.5].
    #[arg(long = "cm-prob")]
    pub cm_prob: Option<f64>,
    /// Channel transmission P [default: 1.0].
    #[arg(long)]
    pub loss: Option<f64>,
    /// Transmission P′ of Eve's substitute channel.
    #[arg(long = "loss-prime")]
    pub loss_prime: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: json]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with run-spec fields; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    fn partial(&self) -> PartialSpec {
        PartialSpec {
            attack: self.attack,
            rounds: self.rounds,
            cm_probability: self.cm_prob,
            channel_transmission: self.loss,
            channel_prime: self.loss_prime,
            seed: self.seed,
            output_format: self.format,
            output_path: self.out.clone(),
            ..Default::default()
        }
    }

    fn merged(&self, flags: PartialSpec) -> CliResult<PartialSpec> {
        let config = match &self.config {
            Some(path) => PartialSpec::load(path)?,
            None => PartialSpec::default(),
        };
        Ok(flags.over(config))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Eavesdropping-branch probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Error-tuning bias ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Write the per-round log (the CSV then holds only the rounds).
    #[arg(long)]
    pub emit_rounds: bool,
}

impl RunArgs {
    pub fn spec(&self) -> CliResult<RunSpec> {
        let flags = PartialSpec {
            p: self.p,
            epsilon: self.epsilon,
            emit_rounds: self.emit_rounds.then_some(true),
            ..self.common.partial()
        };
        Ok(self.common.merged(flags)?.resolve())
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid: `start:stop:step`, `a,b,c`, or a single value.
    #[arg(long)]
    pub p: Option<String>,
    /// Grid: `start:stop:step`, `a,b,c`, or a single value.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Monte-Carlo rounds per grid point (0 = analytic only).
    #[arg(long = "mc-rounds", default_value_t = 0)]
    pub mc_rounds: usize,
}

impl SweepArgs {
    pub fn sweep(&self) -> CliResult<SweepSpec> {
        let base = self.common.merged(self.common.partial())?.resolve();
        let grid =
            |field: &str, text: &Option<String>, fallback: Option<f64>| match (text, fallback) {
                (Some(t), _) => commands::parse_grid(field, t),
                (None, Some(x)) => Ok(vec![x]),
                (None, None) if field == "p" && base.attack == AttackName::Tuning => Ok(vec![0.0]),
                (None, None) => Err(CliError::field(field, "a grid is required")),
            };
        Ok(SweepSpec {
            p_grid: grid("p", &self.p, base.p)?,
            epsilon_grid: grid("epsilon", &self.epsilon, base.epsilon)?,
            mc_rounds: self.mc_rounds,
            base,
        })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CounterexampleArgs {
    /// Only this scheme [default: swap, then honest].
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Rounds per Monte-Carlo check.
    #[arg(long, default_value_t = 100_000)]
    pub rounds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Scale Eve's V gate by 1 + δ (negative control).
    #[arg(long = "perturb-v")]
    pub perturb_v: Option<f64>,
}

/// Sizes the global rayon pool from `QDKD_THREADS` (0 or unset: default).
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("QDKD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "QDKD_THREADS must be a non-negative integer, got `{raw}`"
        ))
    })?;
    if n > 0 {
        // fails only if a pool already exists, which then stays in use
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Run(args) => commands::cmd_run(&args.spec()?),
        Command::Sweep(args) => commands::cmd_sweep(&args.sweep()?),
        Command::Counterexample(args) => commands::cmd_counterexample(args.scheme),
        Command::Verify(args) => {
            if args.rounds == 0 {
                return Err(CliError::field("rounds", "must be at least 1"));
            }
            let checks = verify::run_suite(&VerifyOptions {
                rounds: args.rounds,
                seed: args.seed,
                perturb_v: args.perturb_v,
            });
            print!("{}", verify::table(&checks));
            let failed: Vec<String> = checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.to_string())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(failed))
            }
        }
    }
}
