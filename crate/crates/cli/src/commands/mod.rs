mod adversary;
mod bounds;
mod delegation;
mod gadget;
mod physics;

pub use adversary::{BlindnessArgs, BlindnessParams, BLINDNESS_COLUMNS};
pub use bounds::{BoundsArgs, BoundsParams, BOUNDS_COLUMNS};
pub use delegation::{
    is_builtin_graph, load_graph, parse_deviation, EmitterChoice, ExtenderChoice, GraphSource, PrepArgs, Preparation, RspSimArgs,
    RspSimParams, SdqcSimArgs, SdqcSimParams, SourceChoice, UbqcSimArgs, UbqcSimParams, RSP_COLUMNS, SDQC_COLUMNS,
    UBQC_COLUMNS,
};
pub use gadget::{GadgetProtocol, GadgetSimArgs, GadgetSimParams, GADGET_COLUMNS};
pub use physics::{
    ModelChoice, PhysicsOptArgs, PhysicsOptParams, PhysicsSweepArgs, PhysicsSweepParams, Spacing, OPT_COLUMNS,
    SWEEP_COLUMNS,
};

use crate::output::Table;
use anyhow::Result;
use rand::RngCore;
use scdqc::sampling::trial_rng;

/// Seed for an independent sub-experiment `tag` of a run seeded with `seed`.
/// Trial streams count up from 0, so tags are taken from the top.
pub(crate) fn sub_seed(seed: u64, tag: u64) -> u64 {
    trial_rng(seed, u64::MAX - tag).next_u64()
}

/// A command with its parameters validated and defaults filled in.
#[derive(Clone, Debug)]
pub enum Command {
    Bounds(BoundsParams),
    GadgetSim(GadgetSimParams),
    RspSim(RspSimParams),
    UbqcSim(UbqcSimParams),
    SdqcSim(SdqcSimParams),
    BlindnessVerify(BlindnessParams),
    PhysicsSweep(PhysicsSweepParams),
    PhysicsOpt(PhysicsOptParams),
}

impl Command {
    pub fn execute(&self, seed: u64) -> Result<Table> {
        match self {
            Command::Bounds(p) => bounds::run(p),
            Command::GadgetSim(p) => gadget::run(p, seed),
            Command::RspSim(p) => delegation::run_rsp(p, seed),
            Command::UbqcSim(p) => delegation::run_ubqc(p, seed),
            Command::SdqcSim(p) => delegation::run_sdqc(p, seed),
            Command::BlindnessVerify(p) => adversary::run(p),
            Command::PhysicsSweep(p) => physics::run_sweep(p),
            Command::PhysicsOpt(p) => physics::run_opt(p),
        }
    }
}
