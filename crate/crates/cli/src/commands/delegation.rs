//! Graph-state preparation and the delegation protocols on small graphs.

use crate::config::{check_at_least, check_positive, check_prob};
use crate::output::{bitstring, Cell, Table};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use scdqc::graphs::{build_blind_graph_state, load_graph_file, run_mbqc, vertex_label, Graph, GraphDocument};
use scdqc::graphs::MeasurementPattern;
use scdqc::protocols::{
    protocol2_blind_rsp, sdqc_run, ubqc_run, DelegationSettings, Deviation, DeviatingServer, EmitterAssignment,
    ExtenderKind, GadgetParams, HonestServer, RspOptions, RspOutcome, SdqcConfig, SdqcOutcome, StateSource,
};
use scdqc::pulses::multiphoton_prob;
use scdqc::qstate::{fidelity_up_to_phase, Angle8, Gate};
use scdqc::sampling::{enumerate_branches, run_trials, Chooser};
use scdqc::secbounds::equilibrium_threshold;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const RSP_COLUMNS: &[&str] = &[
    "graph",
    "vertices",
    "emitters",
    "extender",
    "trials",
    "aborts",
    "abort_rate",
    "successes",
    "mean_fidelity",
    "min_fidelity",
];
pub const UBQC_COLUMNS: &[&str] = &["output", "count", "frequency", "mbqc_probability"];
pub const SDQC_COLUMNS: &[&str] = &[
    "run",
    "outcome",
    "output",
    "failed_tests",
    "threshold",
    "test_rounds",
    "computation_rounds",
];

/// A graph given as `path:N`, `grid:RxC` or the path of a graph file.
#[derive(Clone, Debug)]
pub struct GraphSource {
    pub name: String,
    pub doc: GraphDocument,
    pub grid: Option<(usize, usize)>,
}

impl GraphSource {
    pub fn graph(&self) -> &Graph {
        &self.doc.graph
    }
}

fn builtin(doc_graph: Graph, name: &str, grid: Option<(usize, usize)>) -> GraphSource {
    let n = doc_graph.len();
    GraphSource {
        name: name.to_string(),
        doc: GraphDocument {
            graph: doc_graph,
            angles: vec![Angle8::ZERO; n],
            emitters: None,
            extra: None,
        },
        grid,
    }
}

pub fn is_builtin_graph(spec: &str) -> bool {
    spec.starts_with("path:") || spec.starts_with("grid:")
}

pub fn load_graph(spec: &str) -> Result<GraphSource> {
    let size = |s: &str| -> Result<usize> {
        let k: usize = s.parse().with_context(|| format!("invalid parameter graph: bad size in {spec:?}"))?;
        check_at_least("graph size", k, 1)?;
        Ok(k)
    };
    if let Some(n) = spec.strip_prefix("path:") {
        return Ok(builtin(Graph::path(size(n)?), spec, None));
    }
    if let Some(dims) = spec.strip_prefix("grid:") {
        let Some((r, c)) = dims.split_once('x') else {
            bail!("invalid parameter graph: expected grid:RxC, got {spec:?}");
        };
        let (r, c) = (size(r)?, size(c)?);
        return Ok(builtin(Graph::grid(r, c), spec, Some((r, c))));
    }
    let doc = load_graph_file(Path::new(spec))?;
    Ok(GraphSource {
        name: spec.to_string(),
        doc,
        grid: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum EmitterChoice {
    /// Chains listed in the graph file
    File,
    /// One emitter per vertex
    PerVertex,
    /// One emitter walking the whole graph in order
    Single,
    /// One emitter per row of a grid:RxC graph
    Rows,
}

impl EmitterChoice {
    fn name(self) -> &'static str {
        match self {
            EmitterChoice::File => "file",
            EmitterChoice::PerVertex => "per_vertex",
            EmitterChoice::Single => "single",
            EmitterChoice::Rows => "rows",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExtenderChoice {
    /// The ideal blind extender resource
    Ideal,
    /// Threshold gadget driven by weak coherent pulses
    Gadget,
    /// Post-selected gadget
    Postselected,
}

impl ExtenderChoice {
    fn name(self) -> &'static str {
        match self {
            ExtenderChoice::Ideal => "ideal",
            ExtenderChoice::Gadget => "gadget",
            ExtenderChoice::Postselected => "postselected",
        }
    }
}

/// How emitters prepare the graph state. In a config file these keys go in
/// a `preparation` sub-table of the command.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepArgs {
    /// Emitter chains [default: file if the graph file lists them, else per_vertex]
    #[arg(long, value_enum)]
    pub emitters: Option<EmitterChoice>,
    /// Blind extender used at each vertex [default: ideal]
    #[arg(long, value_enum)]
    pub extender: Option<ExtenderChoice>,
    /// Mean photon number per pulse for the gadgets [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_sq: Option<f64>,
    /// Single-photon emission probability for the gadgets [default: 0.9]
    #[arg(long, allow_negative_numbers = true)]
    pub eta1: Option<f64>,
    /// Pulses per gadget [default: 20]
    #[arg(long)]
    pub pulses: Option<usize>,
    /// Gadget abort threshold [default: equilibrium threshold]
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Keep gadget corrections for the measurement stage [default: false]
    #[arg(long)]
    pub defer: Option<bool>,
}

impl PrepArgs {
    fn is_empty(&self) -> bool {
        self.emitters.is_none()
            && self.extender.is_none()
            && self.alpha_sq.is_none()
            && self.eta1.is_none()
            && self.pulses.is_none()
            && self.t.is_none()
            && self.defer.is_none()
    }

    fn resolve(self, g: &GraphSource) -> Result<Preparation> {
        let graph = g.graph();
        let emitters = self.emitters.unwrap_or(if g.doc.emitters.is_some() {
            EmitterChoice::File
        } else {
            EmitterChoice::PerVertex
        });
        let assignment = match emitters {
            EmitterChoice::File => match &g.doc.emitters {
                Some(chains) => EmitterAssignment::new(chains.clone(), g.doc.extra.clone()),
                None => bail!("invalid parameter emitters: graph {} lists no emitter chains", g.name),
            },
            EmitterChoice::PerVertex => EmitterAssignment::per_vertex(graph),
            EmitterChoice::Single => EmitterAssignment::single(graph),
            EmitterChoice::Rows => match g.grid {
                Some((r, c)) => EmitterAssignment::grid_rows(r, c),
                None => bail!("invalid parameter emitters: rows needs a grid:RxC graph"),
            },
        };
        assignment.validate(graph)?;
        let extender = self.extender.unwrap_or(ExtenderChoice::Ideal);
        let alpha_sq = self.alpha_sq.unwrap_or(0.5);
        let eta1 = self.eta1.unwrap_or(0.9);
        let pulses = self.pulses.unwrap_or(20);
        check_positive("alpha_sq", alpha_sq)?;
        check_prob("eta1", eta1)?;
        check_at_least("pulses", pulses, 1)?;
        let kind = match extender {
            ExtenderChoice::Ideal => ExtenderKind::Ideal,
            ExtenderChoice::Gadget => {
                let t = match self.t {
                    Some(t) => t,
                    None => equilibrium_threshold(eta1, multiphoton_prob(alpha_sq)?, pulses as u64),
                };
                ExtenderKind::Gadget(GadgetParams::new(alpha_sq, pulses, t, eta1)?)
            }
            ExtenderChoice::Postselected => {
                if self.t.is_some() {
                    bail!("invalid parameter t: the post-selected gadget has no threshold");
                }
                ExtenderKind::PostSelected {
                    alpha_sq,
                    n: pulses,
                    eta1,
                }
            }
        };
        Ok(Preparation {
            emitters,
            extender,
            assignment,
            options: RspOptions {
                extender: kind,
                defer_corrections: self.defer.unwrap_or(false),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    pub emitters: EmitterChoice,
    pub extender: ExtenderChoice,
    pub assignment: EmitterAssignment,
    pub options: RspOptions,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SourceChoice {
    /// The server receives the blind graph state directly
    #[default]
    Ideal,
    /// The graph state is prepared by emitters
    Rsp,
}

fn delegation(
    graph: &GraphSource,
    source: Option<SourceChoice>,
    encrypt: Option<bool>,
    prep: PrepArgs,
) -> Result<DelegationSettings> {
    let source = match source.unwrap_or_default() {
        SourceChoice::Ideal if !prep.is_empty() => {
            bail!("invalid parameter source: preparation settings need source = rsp")
        }
        SourceChoice::Ideal => StateSource::Ideal,
        SourceChoice::Rsp => {
            let p = prep.resolve(graph)?;
            StateSource::Rsp {
                assignment: p.assignment,
                options: p.options,
            }
        }
    };
    Ok(DelegationSettings {
        source,
        encrypt: encrypt.unwrap_or(true),
    })
}

fn pattern(graph: &GraphSource, angles: Option<Vec<i64>>) -> Result<MeasurementPattern> {
    let angles = match angles {
        Some(a) => a.into_iter().map(Angle8::new).collect(),
        None => graph.doc.angles.clone(),
    };
    Ok(MeasurementPattern::new(graph.graph(), angles)?)
}

fn input_bits(graph: &GraphSource, input: Option<String>) -> Result<Vec<bool>> {
    let k = graph.graph().inputs().len();
    let Some(s) = input else {
        return Ok(vec![false; k]);
    };
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("invalid parameter input: expected a string of 0 and 1, got {s:?}"),
        })
        .collect::<Result<Vec<_>>>()?;
    if bits.len() != k {
        bail!("invalid parameter input: graph has {k} inputs, got {} bits", bits.len());
    }
    Ok(bits)
}

fn fidelity_stats(fids: &[f64]) -> (Cell, Cell) {
    let mean = (!fids.is_empty()).then(|| fids.iter().sum::<f64>() / fids.len() as f64);
    (Cell::opt_real(mean), Cell::opt_real(fids.iter().copied().reduce(f64::min)))
}

/// Fidelity of emitter-prepared graph states with the ideal blind graph
/// state, for uniformly random vertex angles.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RspSimArgs {
    /// path:N, grid:RxC or a graph file [default: grid:2x2]
    #[arg(long)]
    pub graph: Option<String>,
    /// Preparations [default: 1000]
    #[arg(long)]
    pub trials: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub preparation: PrepArgs,
}

#[derive(Clone, Debug)]
pub struct RspSimParams {
    pub graph: GraphSource,
    pub preparation: Preparation,
    pub trials: usize,
}

impl RspSimArgs {
    pub fn resolve(self) -> Result<RspSimParams> {
        let graph = load_graph(self.graph.as_deref().unwrap_or("grid:2x2"))?;
        let preparation = self.preparation.resolve(&graph)?;
        let trials = self.trials.unwrap_or(1000);
        check_at_least("trials", trials, 1)?;
        Ok(RspSimParams {
            graph,
            preparation,
            trials,
        })
    }
}

pub fn run_rsp(p: &RspSimParams, seed: u64) -> Result<Table> {
    let g = p.graph.graph();
    let prep = &p.preparation;
    let results = run_trials(seed, p.trials, |rng, _| -> scdqc::Result<Option<f64>> {
        let thetas: Vec<Angle8> = (0..g.len()).map(|_| rng.angle()).collect();
        let out = protocol2_blind_rsp(g, &thetas, &prep.assignment, &prep.options, &mut HonestServer, rng)?;
        let RspOutcome::Prepared(mut s) = out else {
            return Ok(None);
        };
        for (v, d) in s.deferred.iter().enumerate() {
            if d.total() != Angle8::ZERO {
                s.state.apply1(Gate::Phase(d.total()), vertex_label(v))?;
            }
        }
        let target = build_blind_graph_state(g, &thetas)?;
        Ok(Some(fidelity_up_to_phase(&s.state, &target)?))
    })
    .into_iter()
    .collect::<scdqc::Result<Vec<_>>>()?;
    let fids: Vec<f64> = results.iter().flatten().copied().collect();
    let aborts = p.trials - fids.len();
    let (mean, min) = fidelity_stats(&fids);
    let mut table = Table::new(RSP_COLUMNS);
    table.push(vec![
        p.graph.name.as_str().into(),
        g.len().into(),
        prep.emitters.name().into(),
        prep.extender.name().into(),
        p.trials.into(),
        aborts.into(),
        (aborts as f64 / p.trials as f64).into(),
        fids.len().into(),
        mean,
        min,
    ]);
    Ok(table)
}

/// Output distribution of blind delegated runs next to the exact
/// distribution of the plain measurement pattern.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UbqcSimArgs {
    /// path:N, grid:RxC or a graph file [default: grid:2x2]
    #[arg(long)]
    pub graph: Option<String>,
    /// Measurement angles in units of π/4, one per vertex [default: from the graph]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub angles: Option<Vec<i64>>,
    /// Input bits, one character per input vertex [default: all 0]
    #[arg(long)]
    pub input: Option<String>,
    /// Where the server's graph state comes from [default: ideal]
    #[arg(long, value_enum)]
    pub source: Option<SourceChoice>,
    /// One-time pad the outcomes and hide the angles [default: true]
    #[arg(long)]
    pub encrypt: Option<bool>,
    /// Delegated runs [default: 1000]
    #[arg(long)]
    pub trials: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub preparation: PrepArgs,
}

#[derive(Clone, Debug)]
pub struct UbqcSimParams {
    pub graph: GraphSource,
    pub pattern: MeasurementPattern,
    pub input: Vec<bool>,
    pub settings: DelegationSettings,
    pub trials: usize,
}

impl UbqcSimArgs {
    pub fn resolve(self) -> Result<UbqcSimParams> {
        let graph = load_graph(self.graph.as_deref().unwrap_or("grid:2x2"))?;
        let pattern = pattern(&graph, self.angles)?;
        let input = input_bits(&graph, self.input)?;
        let settings = delegation(&graph, self.source, self.encrypt, self.preparation)?;
        let trials = self.trials.unwrap_or(1000);
        check_at_least("trials", trials, 1)?;
        Ok(UbqcSimParams {
            graph,
            pattern,
            input,
            settings,
            trials,
        })
    }
}

pub fn run_ubqc(p: &UbqcSimParams, seed: u64) -> Result<Table> {
    let g = p.graph.graph();
    let outputs = run_trials(seed, p.trials, |rng, _| {
        ubqc_run(g, &p.pattern, &p.input, &p.settings, &mut HonestServer, rng).map(|r| r.output)
    })
    .into_iter()
    .collect::<scdqc::Result<Vec<_>>>()?;
    let plain = build_blind_graph_state(g, &vec![Angle8::ZERO; g.len()])?;
    let exact = enumerate_branches(|c| run_mbqc(g, &p.pattern, &p.input, plain.clone(), c));

    // key → (count, exact probability)
    let mut rows: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for (prob, out) in exact {
        rows.entry(bitstring(&out?)).or_default().1 += prob;
    }
    for out in &outputs {
        let key = out.as_deref().map_or_else(|| "abort".to_string(), bitstring);
        rows.entry(key).or_default().0 += 1;
    }
    let mut table = Table::new(UBQC_COLUMNS);
    for (key, (count, prob)) in rows {
        table.push(vec![
            key.into(),
            count.into(),
            (count as f64 / p.trials as f64).into(),
            prob.into(),
        ]);
    }
    Ok(table)
}

/// Parses `x:v`, `y:v`, `z:v`, `h:v` (gate on vertex v), `flip:v` (report
/// the opposite outcome), `drop:k` (drop k indices from S) and `add:i+j`
/// (claim extra pulses in S).
pub fn parse_deviation(s: &str) -> Result<Deviation> {
    let bad = || anyhow::anyhow!("invalid parameter deviation: cannot parse {s:?}");
    let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
    let num = |a: &str| a.trim().parse::<usize>().map_err(|_| bad());
    let gate = |gate| -> Result<Deviation> { Ok(Deviation::Gate { gate, vertex: num(arg)? }) };
    match kind.trim().to_ascii_lowercase().as_str() {
        "x" => gate(Gate::X),
        "y" => gate(Gate::Y),
        "z" => gate(Gate::Z),
        "h" => gate(Gate::H),
        "flip" => Ok(Deviation::FlipOutcome { vertex: num(arg)? }),
        "drop" => Ok(Deviation::DropFromSet { count: num(arg)? }),
        "add" => Ok(Deviation::AddToSet {
            indices: arg.split('+').map(num).collect::<Result<_>>()?,
        }),
        _ => Err(bad()),
    }
}

/// Repeated verifiable delegation runs against an honest or deviating
/// server.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdqcSimArgs {
    /// path:N, grid:RxC or a graph file [default: grid:2x2]
    #[arg(long)]
    pub graph: Option<String>,
    /// Measurement angles in units of π/4, one per vertex [default: from the graph]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub angles: Option<Vec<i64>>,
    /// Input bits, one character per input vertex [default: all 0]
    #[arg(long)]
    pub input: Option<String>,
    /// Where the server's graph states come from [default: ideal]
    #[arg(long, value_enum)]
    pub source: Option<SourceChoice>,
    /// One-time pad the outcomes and hide the angles [default: true]
    #[arg(long)]
    pub encrypt: Option<bool>,
    /// Rounds N per run [default: 20]
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Fraction of rounds used as tests [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    pub test_fraction: Option<f64>,
    /// Tolerated failed tests [default: a tenth of the test rounds]
    #[arg(long)]
    pub max_failures: Option<usize>,
    /// Server deviations such as z:0, flip:3, drop:1 or add:2+5
    #[arg(long, value_delimiter = ',')]
    pub deviation: Option<Vec<String>>,
    /// Restrict gate and flip deviations to these rounds
    #[arg(long, value_delimiter = ',')]
    pub deviate_rounds: Option<Vec<usize>>,
    /// Independent protocol runs [default: 100]
    #[arg(long)]
    pub runs: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub preparation: PrepArgs,
}

#[derive(Clone, Debug)]
pub struct SdqcSimParams {
    pub graph: GraphSource,
    pub pattern: MeasurementPattern,
    pub input: Vec<bool>,
    pub config: SdqcConfig,
    pub deviations: Vec<Deviation>,
    pub deviate_rounds: Option<Vec<usize>>,
    pub runs: usize,
}

impl SdqcSimArgs {
    pub fn resolve(self) -> Result<SdqcSimParams> {
        let graph = load_graph(self.graph.as_deref().unwrap_or("grid:2x2"))?;
        let pattern = pattern(&graph, self.angles)?;
        let input = input_bits(&graph, self.input)?;
        let config = SdqcConfig {
            repetitions: self.repetitions.unwrap_or(20),
            test_fraction: self.test_fraction.unwrap_or(0.5),
            max_failures: self.max_failures,
            delegation: delegation(&graph, self.source, self.encrypt, self.preparation)?,
        };
        config.validate()?;
        let deviations = self
            .deviation
            .unwrap_or_default()
            .iter()
            .map(|s| parse_deviation(s))
            .collect::<Result<Vec<_>>>()?;
        let runs = self.runs.unwrap_or(100);
        check_at_least("runs", runs, 1)?;
        Ok(SdqcSimParams {
            graph,
            pattern,
            input,
            config,
            deviations,
            deviate_rounds: self.deviate_rounds,
            runs,
        })
    }
}

pub fn run_sdqc(p: &SdqcSimParams, seed: u64) -> Result<Table> {
    let g = p.graph.graph();
    let reports = run_trials(seed, p.runs, |rng, _| {
        let mut server = DeviatingServer::new(p.deviations.clone());
        if let Some(r) = &p.deviate_rounds {
            server = server.only_rounds(r.iter().copied());
        }
        sdqc_run(g, &p.pattern, &p.input, &p.config, &mut server, rng)
    })
    .into_iter()
    .collect::<scdqc::Result<Vec<_>>>()?;
    let mut table = Table::new(SDQC_COLUMNS);
    for (i, r) in reports.iter().enumerate() {
        let (kind, output) = match &r.outcome {
            SdqcOutcome::Output { bits } => ("output", Cell::Text(bitstring(bits))),
            SdqcOutcome::TestAbort { .. } => ("test_abort", Cell::Missing),
            SdqcOutcome::PreparationAbort { .. } => ("preparation_abort", Cell::Missing),
        };
        table.push(vec![
            i.into(),
            kind.into(),
            output,
            r.failed_tests.into(),
            r.threshold.into(),
            r.test_parities.len().into(),
            r.computation_outputs.len().into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_strings() {
        assert_eq!(parse_deviation("z:0").unwrap(), Deviation::Gate { gate: Gate::Z, vertex: 0 });
        assert_eq!(parse_deviation("flip:3").unwrap(), Deviation::FlipOutcome { vertex: 3 });
        assert_eq!(parse_deviation("drop:2").unwrap(), Deviation::DropFromSet { count: 2 });
        assert_eq!(
            parse_deviation("add:1+4").unwrap(),
            Deviation::AddToSet { indices: vec![1, 4] }
        );
        for bad in ["z", "q:1", "x:-1", "add:1+", ""] {
            assert!(parse_deviation(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn builtin_graphs() {
        let g = load_graph("grid:2x3").unwrap();
        assert_eq!(g.graph().len(), 6);
        assert_eq!(g.grid, Some((2, 3)));
        assert_eq!(load_graph("path:4").unwrap().graph().len(), 4);
        assert!(load_graph("grid:2").is_err());
        assert!(load_graph("path:0").is_err());
        assert!(load_graph("/nonexistent/graph.toml").is_err());
    }

    #[test]
    fn input_length_checked() {
        let g = load_graph("grid:2x2").unwrap();
        assert_eq!(input_bits(&g, None).unwrap(), vec![false, false]);
        assert_eq!(input_bits(&g, Some("10".into())).unwrap(), vec![true, false]);
        assert!(input_bits(&g, Some("1".into())).is_err());
        assert!(input_bits(&g, Some("12".into())).is_err());
    }

    #[test]
    fn ideal_source_rejects_preparation_settings() {
        let g = load_graph("path:2").unwrap();
        let prep = PrepArgs {
            extender: Some(ExtenderChoice::Gadget),
            ..Default::default()
        };
        assert!(delegation(&g, None, None, prep).is_err());
    }

    #[test]
    fn rows_need_a_grid() {
        let g = load_graph("path:3").unwrap();
        let prep = PrepArgs {
            emitters: Some(EmitterChoice::Rows),
            ..Default::default()
        };
        assert!(prep.resolve(&g).is_err());
    }
}
