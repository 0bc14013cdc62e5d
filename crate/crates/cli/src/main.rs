//! Command-line front end for the water footprint engine.

mod bundle;
mod cmd;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::report::{CliResult, Ctx, WsiMode};

#[derive(Debug, Parser)]
#[command(name = "hpcwater", version, about = "Water footprint of HPC systems")]
struct Cli {
    /// Parameter database (TOML or JSON). Defaults to the built-in one.
    #[arg(long, global = true, env = "THIRSTY_PARAMS")]
    params: Option<PathBuf>,
    /// Directory for the JSON report and CSV sidecars.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add gallon renderings next to liter values.
    #[arg(long, global = true)]
    gallons: bool,
    /// Scarcity adjustment.
    #[arg(long, global = true, value_enum, default_value = "none")]
    wsi: WsiMode,
    /// Omit the wall-clock timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embodied water of a hardware inventory.
    Embodied(cmd::embodied::EmbodiedArgs),
    /// Operational water and carbon over a power trace or job log.
    Operate(cmd::operate::OperateArgs),
    /// Energy-mix what-if scenarios against the baseline.
    Scenario(cmd::scenario::ScenarioArgs),
    /// Rank candidate job start times by water and by carbon.
    Rank(cmd::rank::RankArgs),
    /// Withdrawal accounting for a consumption figure.
    Withdraw(cmd::withdraw::WithdrawArgs),
    /// Embodied-to-operational ratio over two scarcity axes.
    RatioMap(cmd::ratio_map::RatioMapArgs),
    /// Check parameters and input files without computing anything.
    Validate(cmd::validate::ValidateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Embodied(_) => "embodied",
            Command::Operate(_) => "operate",
            Command::Scenario(_) => "scenario",
            Command::Rank(_) => "rank",
            Command::Withdraw(_) => "withdraw",
            Command::RatioMap(_) => "ratio-map",
            Command::Validate(_) => "validate",
        }
    }
}

fn dispatch(cli: Cli, args: Vec<String>) -> CliResult {
    let mut ctx = Ctx::new(
        cli.command.name(),
        args,
        cli.params,
        cli.out,
        cli.gallons,
        cli.wsi,
        cli.reproducible,
    );
    match &cli.command {
        Command::Embodied(a) => cmd::embodied::run(&mut ctx, a),
        Command::Operate(a) => cmd::operate::run(&mut ctx, a),
        Command::Scenario(a) => cmd::scenario::run(&mut ctx, a),
        Command::Rank(a) => cmd::rank::run(&mut ctx, a),
        Command::Withdraw(a) => cmd::withdraw::run(&mut ctx, a),
        Command::RatioMap(a) => cmd::ratio_map::run(&mut ctx, a),
        Command::Validate(a) => cmd::validate::run(&mut ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let args = std::env::args().skip(1).collect();
    match dispatch(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
