//! Command-line driver: reads a config file and flags, runs one simulation
//! or sweep, and writes a CSV or JSON table.

pub mod commands;
pub mod config;
pub mod output;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use commands::{
    BlindnessArgs, BoundsArgs, Command, GadgetSimArgs, PhysicsOptArgs, PhysicsSweepArgs, RspSimArgs, SdqcSimArgs,
    UbqcSimArgs,
};
use config::{overlay, ConfigFile, Format};
use output::Table;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "scdqc", version, about = "Delegated quantum computation with emitter-driven clients")]
pub struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for all random streams [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Correctness and security bounds of the threshold gadget
    Bounds(BoundsArgs),
    /// Monte Carlo runs of the blind-extender gadgets
    GadgetSim(GadgetSimArgs),
    /// Fidelity of emitter-prepared blind graph states
    RspSim(RspSimArgs),
    /// Blind delegated computation on a small graph
    UbqcSim(UbqcSimArgs),
    /// Verifiable delegated computation with test rounds
    SdqcSim(SdqcSimArgs),
    /// Exact blindness and simulator checks for the gadgets
    BlindnessVerify(BlindnessArgs),
    /// Optimal emission probability and security gap over intensities
    PhysicsSweep(PhysicsSweepArgs),
    /// Optimal pulse area at given intensities
    PhysicsOpt(PhysicsOptArgs),
}

/// Everything needed to run one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub command: Command,
}

/// Merges the config file named by `--config` (if any) with the flags and
/// validates the result.
pub fn parse_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let command = match &cli.command {
        CliCommand::Bounds(a) => Command::Bounds(overlay(file.bounds.as_ref(), a)?.resolve()?),
        CliCommand::GadgetSim(a) => Command::GadgetSim(overlay(file.gadget_sim.as_ref(), a)?.resolve()?),
        CliCommand::RspSim(a) => Command::RspSim(overlay(file.rsp_sim.as_ref(), a)?.resolve()?),
        CliCommand::UbqcSim(a) => Command::UbqcSim(overlay(file.ubqc_sim.as_ref(), a)?.resolve()?),
        CliCommand::SdqcSim(a) => Command::SdqcSim(overlay(file.sdqc_sim.as_ref(), a)?.resolve()?),
        CliCommand::BlindnessVerify(a) => {
            Command::BlindnessVerify(overlay(file.blindness_verify.as_ref(), a)?.resolve()?)
        }
        CliCommand::PhysicsSweep(a) => Command::PhysicsSweep(overlay(file.physics_sweep.as_ref(), a)?.resolve()?),
        CliCommand::PhysicsOpt(a) => Command::PhysicsOpt(overlay(file.physics_opt.as_ref(), a)?.resolve()?),
    };
    Ok(RunConfig {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.clone().or(file.out),
        format: cli.format.or(file.format).unwrap_or_default(),
        command,
    })
}

pub fn execute_command(config: &RunConfig) -> Result<Table> {
    config.command.execute(config.seed)
}

/// Parses, runs and returns the rendered output without writing it.
pub fn render<I, T>(args: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let config = parse_config(&cli)?;
    execute_command(&config)?.render(config.format)
}

/// Runs the command and writes its table to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let config = parse_config(cli)?;
    let bytes = execute_command(&config)?.render(config.format)?;
    match &config.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
