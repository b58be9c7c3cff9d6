//! Exit gate: one PASS/FAIL line per primary criterion. Runs as a plain
//! binary (harness = false) and exits non-zero if any criterion fails.

use num_complex::Complex64;
use rand::Rng;
use scdqc::adversary::{blindness_table, simulator2_error_rate, simulator2_table, simulator3_table};
use scdqc::graphs::{build_blind_graph_state, run_mbqc, Graph, MeasurementPattern};
use scdqc::physics::{find_crossing, formula_discrepancy, maximize_eta1};
use scdqc::protocols::{
    extender_target, gadget_abort_rate, postselected_abort_rate, protocol2_blind_rsp, protocol3_gadget, sdqc_run,
    ubqc_run, CorrectionMode, DelegationSettings, Deviation, DeviatingServer, EmitterAssignment, GadgetOutcome,
    GadgetParams, HonestServer, RspOptions, RspOutcome, SdqcConfig, SdqcOutcome, StateSource,
};
use scdqc::pulses::multiphoton_prob;
use scdqc::qstate::{fidelity_up_to_phase, Angle8, Gate, Label, PureState};
use scdqc::sampling::{enumerate_branches, trial_rng};
use scdqc::secbounds::{gadget_bounds, postselect_bounds};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gadget_correctness() -> Check {
    let input = PureState::qubit(Label(0), Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for n in 1..=6 {
        let params = GadgetParams::new(0.5, n, 0.0, 1.0).map_err(err)?;
        for theta in Angle8::all() {
            let mut rng = trial_rng(n as u64, theta.value() as u64);
            for _ in 0..100 {
                let run = protocol3_gadget(
                    theta,
                    &params,
                    input.clone(),
                    Label(0),
                    &mut HonestServer,
                    CorrectionMode::Immediate,
                    &mut rng,
                )
                .map_err(err)?;
                let GadgetOutcome::Success(s) = run.outcome else {
                    return Err(format!("abort with eta1 = 1 at n = {n}"));
                };
                let target = extender_target(&input, Label(0), theta, s.m_x, s.photon).map_err(err)?;
                worst = worst.max((1.0 - fidelity_up_to_phase(&s.state, &target).map_err(err)?).abs());
                runs += 1;
            }
        }
    }
    ensure(worst < 1e-10, format!("max |1 - F| = {worst:.2e}"))?;
    Ok(format!("{runs} runs, max |1 - F| = {worst:.1e}"))
}

fn protocol2_exactness() -> Check {
    let cases = [
        (Graph::path(2), None),
        (Graph::path(3), None),
        (Graph::grid(2, 2), Some((2, 2))),
        (Graph::grid(3, 2), Some((3, 2))),
    ];
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for (i, (g, grid)) in cases.iter().enumerate() {
        let mut assignments = vec![EmitterAssignment::per_vertex(g)];
        assignments.push(match *grid {
            Some((rows, cols)) => EmitterAssignment::grid_rows(rows, cols),
            None => EmitterAssignment::single(g),
        });
        for (j, a) in assignments.iter().enumerate() {
            let mut rng = trial_rng(100 + i as u64, j as u64);
            for _ in 0..20 {
                let thetas: Vec<Angle8> = (0..g.len()).map(|_| Angle8::new(rng.random_range(0..8))).collect();
                let out = protocol2_blind_rsp(g, &thetas, a, &RspOptions::default(), &mut HonestServer, &mut rng)
                    .map_err(err)?;
                let RspOutcome::Prepared(p) = out else {
                    return Err("ideal extender aborted".into());
                };
                let target = build_blind_graph_state(g, &thetas).map_err(err)?;
                worst = worst.max((1.0 - fidelity_up_to_phase(&p.state, &target).map_err(err)?).abs());
                runs += 1;
            }
        }
    }
    ensure(worst < 1e-10, format!("max |1 - F| = {worst:.2e}"))?;
    Ok(format!("{runs} preparations, max |1 - F| = {worst:.1e}"))
}

fn blindness() -> Check {
    let table = blindness_table(2).map_err(err)?;
    let mut hidden = 0;
    for r in &table {
        if r.reported.iter().any(|&i| r.counts[i - 1] == 1) {
            ensure(r.max_tv == 0.0, format!("k = {:?}, S = {:?}: TV = {}", r.counts, r.reported, r.max_tv))?;
            hidden += 1;
        }
    }
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for r in simulator2_table(2).map_err(err)?.into_iter().chain(simulator3_table(2).map_err(err)?) {
        if !r.error {
            worst = worst.max(r.max_trace_distance);
            compared += 1;
        }
    }
    ensure(worst < 1e-12, format!("simulator trace distance {worst:.2e}"))?;
    Ok(format!(
        "{hidden} cases with a single-photon pulse in S at TV 0; {compared} simulator cases, max trace distance {worst:.1e}"
    ))
}

fn bound_dominance() -> Check {
    let n = 100u64;
    let trials = 100_000;
    let mut lines = Vec::new();
    for (i, eta1) in [0.7, 0.8, 0.9].into_iter().enumerate() {
        for (j, alpha_sq) in [0.2, 0.5, 1.0].into_iter().enumerate() {
            let b = gadget_bounds(eta1, alpha_sq, n, None).map_err(err)?;
            let params = GadgetParams::new(alpha_sq, n as usize, b.t, eta1).map_err(err)?;
            let seed = 1000 + 10 * i as u64 + j as u64;
            let abort = gadget_abort_rate(&params, trials, seed).map_err(err)?;
            let error = simulator2_error_rate(n as usize, alpha_sq, b.t, trials, seed + 500).map_err(err)?;
            ensure(
                abort.below(b.eps_cor, 4.0),
                format!("eta1 {eta1} alpha^2 {alpha_sq}: abort {} > eps_cor {:.3e}", abort.rate, b.eps_cor),
            )?;
            ensure(
                error.below(b.eps_sec, 4.0),
                format!("eta1 {eta1} alpha^2 {alpha_sq}: error {} > eps_sec {:.3e}", error.rate, b.eps_sec),
            )?;
            lines.push(format!("{}/{}", abort.events, error.events));
        }
    }
    Ok(format!("abort/error counts per grid point: {}", lines.join(" ")))
}

fn postselected_abort() -> Check {
    let (eta1, n, alpha_sq) = (0.9, 10usize, 0.5);
    let est = postselected_abort_rate(alpha_sq, n, eta1, 100_000, 7).map_err(err)?;
    let p = 1.0 - 0.9f64.powi(10);
    ensure(est.near(p, 4.0), format!("abort rate {} vs {p:.5}", est.rate))?;
    let eps = postselect_bounds(eta1, alpha_sq, n as u64).map_err(err)?;
    let p2 = 1.0 - (-alpha_sq).exp() * (1.0 + alpha_sq);
    let direct = (1.0 - eta1.powi(10)).max(p2.powi(10));
    ensure(
        (eps - direct).abs() <= 4.0 * f64::EPSILON * direct,
        format!("eps' {eps} vs {direct}"),
    )?;
    Ok(format!("abort rate {:.5} (expected {p:.5}), eps' = {eps:.5}", est.rate))
}

fn physics_endpoint_1() -> Check {
    let m = maximize_eta1(1.0).map_err(err)?;
    let th = m.theta / PI;
    ensure((m.eta1 - 0.48).abs() <= 0.01, format!("eta1 {}", m.eta1))?;
    ensure((th - 0.78).abs() <= 0.02, format!("Theta {th} pi"))?;
    Ok(format!("eta1 = {:.4}, Theta = {th:.4} pi", m.eta1))
}

fn physics_endpoint_2() -> Check {
    let c = find_crossing(0.1, 10.0).map_err(err)?;
    let th = c.theta / PI;
    ensure((c.alpha_sq - 2.5).abs() <= 0.1, format!("alpha^2 {}", c.alpha_sq))?;
    ensure((c.eta1 - 0.71).abs() <= 0.01, format!("eta1 {}", c.eta1))?;
    ensure((th - 0.91).abs() <= 0.02, format!("Theta {th} pi"))?;
    ensure((c.tau - 0.82).abs() <= 0.02, format!("tau {}", c.tau))?;
    let p2 = multiphoton_prob(c.alpha_sq).map_err(err)?;
    Ok(format!(
        "alpha^2 = {:.4}, eta1 = {:.4} (p2 = {p2:.4}), Theta = {th:.4} pi, tau = {:.4}",
        c.alpha_sq, c.eta1, c.tau
    ))
}

fn analytic_vs_ode() -> Check {
    let alphas: Vec<f64> = (0..20).map(|i| 0.1 + i as f64 * (10.0 - 0.1) / 19.0).collect();
    let thetas: Vec<f64> = (1..=20).map(|i| i as f64 * 2.0 * PI / 20.0).collect();
    let r = formula_discrepancy(&alphas, &thetas).map_err(err)?;
    ensure(r.max_err_analytic < 1e-6, format!("max |analytic - ode| = {:.2e}", r.max_err_analytic))?;
    Ok(format!(
        "400 points, max |analytic - ode| = {:.1e}; printed closed form deviates by up to {:.3}",
        r.max_err_analytic, r.max_err_printed
    ))
}

fn sdqc_detection() -> Check {
    let g = Graph::grid(2, 2);
    let p = MeasurementPattern::new(&g, [0, 1, 7, 0].map(Angle8::new).to_vec()).map_err(err)?;
    let cfg = SdqcConfig::new(40, 0.5).map_err(err)?;
    let runs = 200;
    let mut aborts = 0;
    for i in 0..runs {
        let mut srv = DeviatingServer::new(vec![Deviation::Gate { gate: Gate::Z, vertex: 0 }]);
        let r = sdqc_run(&g, &p, &[false, false], &cfg, &mut srv, &mut trial_rng(77, i)).map_err(err)?;
        aborts += r.aborted() as usize;
    }
    let rate = aborts as f64 / runs as f64;
    ensure(rate >= 0.95, format!("attack abort rate {rate}"))?;
    for i in 0..runs {
        let r = sdqc_run(&g, &p, &[false, false], &cfg, &mut HonestServer, &mut trial_rng(78, i)).map_err(err)?;
        ensure(
            matches!(r.outcome, SdqcOutcome::Output { .. }),
            format!("honest run {i} aborted"),
        )?;
        ensure(r.test_parities.iter().all(|&b| !b), format!("honest run {i} failed a test"))?;
    }
    Ok(format!("attack abort rate {rate:.3}, honest aborts 0/{runs}"))
}

fn ubqc_end_to_end() -> Check {
    let g = Graph::grid(2, 2);
    let p = MeasurementPattern::new(&g, [0, 1, 7, 0].map(Angle8::new).to_vec()).map_err(err)?;
    let x = [false, false];
    let state = build_blind_graph_state(&g, &[Angle8::ZERO; 4]).map_err(err)?;
    let direct = enumerate_branches(|c| run_mbqc(&g, &p, &x, state.clone(), c));
    let first = direct[0].1.clone().map_err(err)?;
    for (_, out) in &direct {
        ensure(out.as_ref().map_err(err)? == &first, "pattern is not deterministic")?;
    }
    let sources = [
        StateSource::Ideal,
        StateSource::Rsp {
            assignment: EmitterAssignment::grid_rows(2, 2),
            options: RspOptions::default(),
        },
    ];
    for (i, source) in sources.into_iter().enumerate() {
        let settings = DelegationSettings { source, encrypt: true };
        let mut rng = trial_rng(90, i as u64);
        for _ in 0..1000 {
            let run = ubqc_run(&g, &p, &x, &settings, &mut HonestServer, &mut rng).map_err(err)?;
            ensure(run.output.as_ref() == Some(&first), format!("output {:?} vs {first:?}", run.output))?;
        }
    }
    Ok(format!("output {first:?} in 2000/2000 delegated runs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("gadget correctness", Duration::from_secs(10), gadget_correctness),
        ("protocol 2 exactness", Duration::from_secs(30), protocol2_exactness),
        ("blindness and simulator equivalence", Duration::from_secs(60), blindness),
        ("bound dominance", Duration::from_secs(300), bound_dominance),
        ("post-selected abort rate", Duration::from_secs(300), postselected_abort),
        ("physics endpoint: maximum at unit intensity", Duration::from_secs(5), physics_endpoint_1),
        ("physics endpoint: crossing with p2", Duration::from_secs(30), physics_endpoint_2),
        ("analytic/ODE agreement", Duration::from_secs(300), analytic_vs_ode),
        ("SDQC detection", Duration::from_secs(300), sdqc_detection),
        ("UBQC end-to-end", Duration::from_secs(300), ubqc_end_to_end),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
