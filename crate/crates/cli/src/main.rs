mod experiment;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use xhsp_core::hsp::{HidingPath, SamplingBackend};
use xhsp_core::xgroup::GroupSpec;

use experiment::ExperimentConfig;

#[derive(Parser)]
#[command(name = "xhsp", version, about = "Hidden subgroup experiments on extraspecial p-groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plant subgroups, run the solver and check the recovered subgroups.
    Solve(ExperimentArgs),
    /// Run one of the built-in invariant suites.
    Verify(VerifyArgs),
    /// Measure resampling and retry counts of the hiding procedures.
    Bench(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Auto,
    Theorem3,
    ConstantExp,
}

impl From<PathArg> for HidingPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Auto => HidingPath::Auto,
            PathArg::Theorem3 => HidingPath::Triples,
            PathArg::ConstantExp => HidingPath::ZeroPhase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Structured,
    Dense,
}

impl From<BackendArg> for SamplingBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Structured => SamplingBackend::Structured,
            BackendArg::Dense => SamplingBackend::Dense,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Group, e.g. `p=11,k=1,exp=p` or `p=2,k=1,type=q`.
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    path: PathArg,
    /// `dense` is only available for p=3, k=1.
    #[arg(long, value_enum, default_value_t = BackendArg::Structured)]
    backend: BackendArg,
    /// JSON array of generator coordinate vectors, used for every trial.
    #[arg(long)]
    planted: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One trial per subgroup of the group; replaces `--trials`.
    #[arg(long)]
    enumerate_subgroups: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: verify::Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random subgroups or triples per group.
    #[arg(long, default_value_t = 5)]
    trials: usize,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let spec: GroupSpec = self.group.parse().with_context(|| format!("invalid group `{}`", self.group))?;
        if self.backend == BackendArg::Dense && spec.order() != 27 {
            bail!("the dense backend is only available for p=3, k=1");
        }
        let planted = match &self.planted {
            None => None,
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let gens: Vec<Vec<u32>> = serde_json::from_str(&text).context("planted generators must be a JSON array of coordinate vectors")?;
                Some(gens)
            }
        };
        if planted.is_some() && self.enumerate_subgroups {
            bail!("--planted and --enumerate-subgroups are exclusive");
        }
        Ok(ExperimentConfig {
            group: spec.to_string(),
            trials: self.trials,
            seed: self.seed,
            path: self.path.into(),
            backend: self.backend.into(),
            planted,
            enumerate_subgroups: self.enumerate_subgroups,
            out: self.out.clone(),
        })
    }
}

fn emit(value: &impl serde::Serialize, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = args.config()?;
            let report = experiment::cmd_solve(&cfg)?;
            let a = &report.aggregates;
            eprintln!(
                "{}: {}/{} recovered, mean queries {:.1}, mean lemma-4 runs {:.1}",
                cfg.group, a.successes, a.trials, a.mean_queries, a.mean_lemma4_runs
            );
            emit(&report, cfg.out.as_ref())?;
            Ok(a.successes == a.trials)
        }
        Command::Bench(args) => {
            let cfg = args.config()?;
            let report = experiment::cmd_bench(&cfg)?;
            for line in report.summary() {
                eprintln!("{line}");
            }
            emit(&report, cfg.out.as_ref())?;
            Ok(report.pass)
        }
        Command::Verify(args) => Ok(verify::run(args.suite, args.seed, args.trials)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
