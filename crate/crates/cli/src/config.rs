//! Configuration documents and their merge with command-line flags.
//!
//! A config file is a TOML document with optional top-level `seed`, `out` and
//! `format` keys and one table per command, named like the subcommand:
//!
//! ```toml
//! seed = 7
//! format = "csv"
//!
//! [gadget-sim]
//! alpha_sq = 0.5
//! n = [50, 100]
//! eta1 = 0.9
//!
//! [sdqc-sim.preparation]
//! extender = "gadget"
//! ```
//!
//! Keys inside a command table are the long flag names with `_` in place of
//! `-`. A flag given on the command line overrides the file value. Relative
//! graph file paths in a config file are taken relative to that file.

use crate::commands::{
    is_builtin_graph, BlindnessArgs, BoundsArgs, GadgetSimArgs, PhysicsOptArgs, PhysicsSweepArgs, RspSimArgs, SdqcSimArgs,
    UbqcSimArgs,
};
use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub bounds: Option<BoundsArgs>,
    #[serde(rename = "gadget-sim")]
    pub gadget_sim: Option<GadgetSimArgs>,
    #[serde(rename = "rsp-sim")]
    pub rsp_sim: Option<RspSimArgs>,
    #[serde(rename = "ubqc-sim")]
    pub ubqc_sim: Option<UbqcSimArgs>,
    #[serde(rename = "sdqc-sim")]
    pub sdqc_sim: Option<SdqcSimArgs>,
    #[serde(rename = "blindness-verify")]
    pub blindness_verify: Option<BlindnessArgs>,
    #[serde(rename = "physics-sweep")]
    pub physics_sweep: Option<PhysicsSweepArgs>,
    #[serde(rename = "physics-opt")]
    pub physics_opt: Option<PhysicsOptArgs>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("config parse error: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let graphs = [
            cfg.rsp_sim.as_mut().and_then(|a| a.graph.as_mut()),
            cfg.ubqc_sim.as_mut().and_then(|a| a.graph.as_mut()),
            cfg.sdqc_sim.as_mut().and_then(|a| a.graph.as_mut()),
        ];
        for spec in graphs.into_iter().flatten() {
            if !is_builtin_graph(spec) && Path::new(spec.as_str()).is_relative() {
                *spec = base.join(spec.as_str()).to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }
}

fn overlay_value(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => overlay_value(slot, v),
                    _ if v.is_null() => {}
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) if !t.is_null() => *b = t,
        _ => {}
    }
}

/// Flag values win over file values; unset flags leave the file value.
pub fn overlay<T: Serialize + DeserializeOwned>(file: Option<&T>, flags: &T) -> Result<T> {
    let mut base = match file {
        Some(f) => serde_json::to_value(f)?,
        None => Value::Object(Default::default()),
    };
    overlay_value(&mut base, serde_json::to_value(flags)?);
    Ok(serde_json::from_value(base)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

/// Accepts `key = x` as well as `key = [x, y]`.
pub fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

pub fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        bail!("invalid parameter {name}: must be > 0, got {x}");
    }
    Ok(())
}

pub fn check_prob(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        bail!("invalid parameter {name}: must lie in [0, 1], got {x}");
    }
    Ok(())
}

pub fn check_at_least<T: PartialOrd + std::fmt::Display>(name: &str, x: T, min: T) -> Result<()> {
    if x < min {
        bail!("invalid parameter {name}: must be at least {min}, got {x}");
    }
    Ok(())
}

pub fn non_empty<T>(name: &str, xs: Vec<T>) -> Result<Vec<T>> {
    if xs.is_empty() {
        bail!("invalid parameter {name}: list must not be empty");
    }
    Ok(xs)
}
