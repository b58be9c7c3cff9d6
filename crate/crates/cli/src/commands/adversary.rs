use crate::config::check_at_least;
use crate::output::{joined, Cell, Table};
use anyhow::{bail, Result};
use clap::Args;
use scdqc::adversary::{blindness_table, simulator2_table, simulator3_table, MAX_ENUMERATED_PULSES};
use serde::{Deserialize, Serialize};

pub const BLINDNESS_COLUMNS: &[&str] = &["check", "counts", "reported", "single_in_s", "error", "value"];

/// Exact checks over every photon-number pattern of n pulses: blindness of
/// the classical view (value = max TV over θ) and equivalence of the two
/// gadget simulators with the real protocol (value = max trace distance).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlindnessArgs {
    /// Pulses per gadget [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlindnessParams {
    pub n: usize,
}

impl BlindnessArgs {
    pub fn resolve(self) -> Result<BlindnessParams> {
        let n = self.n.unwrap_or(2);
        check_at_least("n", n, 1)?;
        if n > MAX_ENUMERATED_PULSES {
            bail!("invalid parameter n: exact enumeration supports at most {MAX_ENUMERATED_PULSES} pulses, got {n}");
        }
        Ok(BlindnessParams { n })
    }
}

fn single_in(counts: &[u64], reported: &[usize]) -> bool {
    reported.iter().any(|&i| counts[i - 1] == 1)
}

pub fn run(p: &BlindnessParams) -> Result<Table> {
    let mut table = Table::new(BLINDNESS_COLUMNS);
    for r in blindness_table(p.n)? {
        table.push(vec![
            "blindness".into(),
            joined(&r.counts).into(),
            joined(&r.reported).into(),
            single_in(&r.counts, &r.reported).into(),
            Cell::Missing,
            r.max_tv.into(),
        ]);
    }
    for (name, rows) in [("simulator2", simulator2_table(p.n)?), ("simulator3", simulator3_table(p.n)?)] {
        for r in rows {
            table.push(vec![
                name.into(),
                joined(&r.counts).into(),
                joined(&r.reported).into(),
                single_in(&r.counts, &r.reported).into(),
                r.error.into(),
                if r.error { Cell::Missing } else { r.max_trace_distance.into() },
            ]);
        }
    }
    Ok(table)
}
