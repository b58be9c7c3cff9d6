use super::graph::{vertex_label, Graph, Vertex};
use crate::error::{Error, Result};
use crate::qstate::{Angle8, Basis, PureState};
use crate::sampling::Chooser;

/// Base angles plus the X/Z dependency sets induced by the flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPattern {
    angles: Vec<Angle8>,
    x_deps: Vec<Vec<Vertex>>,
    z_deps: Vec<Vec<Vertex>>,
}

/// φ′ = (−1)^{sX}·φ + sZ·π
pub fn flow_update(phi: Angle8, s_x: bool, s_z: bool) -> Angle8 {
    phi.flipped_if(s_x) + Angle8::pi_if(s_z)
}

impl MeasurementPattern {
    /// X-dependencies of v: {u : f(u) = v}. Z-dependencies of v:
    /// {u ≠ v : v is a neighbour of f(u)}.
    pub fn new(graph: &Graph, angles: Vec<Angle8>) -> Result<Self> {
        let n = graph.len();
        if angles.len() != n {
            return Err(Error::PatternMismatch(format!(
                "{} angles for {} vertices",
                angles.len(),
                n
            )));
        }
        let mut x_deps = vec![Vec::new(); n];
        let mut z_deps = vec![Vec::new(); n];
        for u in 0..n {
            if let Some(fu) = graph.flow(u) {
                x_deps[fu].push(u);
                for &v in graph.neighbors(fu) {
                    if v != u {
                        z_deps[v].push(u);
                    }
                }
            }
        }
        for v in 0..n {
            for &u in x_deps[v].iter().chain(&z_deps[v]) {
                if !graph.precedes(u, v) {
                    return Err(Error::PatternMismatch(format!(
                        "vertex {v} depends on later vertex {u}"
                    )));
                }
            }
        }
        Ok(Self {
            angles,
            x_deps,
            z_deps,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[Angle8] {
        &self.angles
    }

    pub fn x_deps(&self, v: Vertex) -> &[Vertex] {
        &self.x_deps[v]
    }

    pub fn z_deps(&self, v: Vertex) -> &[Vertex] {
        &self.z_deps[v]
    }

    /// φ′_v given the outcomes of earlier vertices.
    pub fn corrected_angle(&self, v: Vertex, outcomes: &[Option<bool>]) -> Result<Angle8> {
        let parity = |deps: &[Vertex]| -> Result<bool> {
            deps.iter().try_fold(false, |acc, &u| match outcomes[u] {
                Some(b) => Ok(acc ^ b),
                None => Err(Error::PatternMismatch(format!(
                    "outcome of {u} needed before measuring {v}"
                ))),
            })
        };
        Ok(flow_update(
            self.angles[v],
            parity(&self.x_deps[v])?,
            parity(&self.z_deps[v])?,
        ))
    }
}

/// Maps classical input bits (one per input vertex) to a per-vertex bit.
pub(crate) fn input_bit_map(graph: &Graph, input_bits: &[bool]) -> Result<Vec<bool>> {
    if input_bits.len() != graph.inputs().len() {
        return Err(Error::PatternMismatch(format!(
            "{} input bits for {} inputs",
            input_bits.len(),
            graph.inputs().len()
        )));
    }
    let mut x = vec![false; graph.len()];
    for (&v, &b) in graph.inputs().iter().zip(input_bits) {
        x[v] = b;
    }
    Ok(x)
}

/// Measures every vertex of `state` in graph order at φ′_v + x_v·π and
/// returns the outcomes on the output vertices.
pub fn run_mbqc<C: Chooser + ?Sized>(
    graph: &Graph,
    pattern: &MeasurementPattern,
    input_bits: &[bool],
    mut state: PureState,
    rng: &mut C,
) -> Result<Vec<bool>> {
    if pattern.len() != graph.len() {
        return Err(Error::PatternMismatch("pattern size differs from graph".into()));
    }
    if state.num_qubits() != graph.len()
        || (0..graph.len()).any(|v| !state.contains(vertex_label(v)))
    {
        return Err(Error::PatternMismatch("state does not match graph vertices".into()));
    }
    let x = input_bit_map(graph, input_bits)?;
    let mut s = vec![None; graph.len()];
    for &v in graph.order() {
        let angle = pattern.corrected_angle(v, &s)? + Angle8::pi_if(x[v]);
        s[v] = Some(state.measure(vertex_label(v), Basis::Rotated(angle), rng)?);
    }
    Ok(graph.outputs().iter().map(|&v| s[v].expect("all measured")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_blind_graph_state;
    use crate::sampling::enumerate_branches;
    use std::collections::BTreeMap;

    fn exact_output(g: &Graph, p: &MeasurementPattern, x: &[bool]) -> BTreeMap<Vec<bool>, f64> {
        let state = build_blind_graph_state(g, &vec![Angle8::ZERO; g.len()]).unwrap();
        let mut dist = BTreeMap::new();
        for (pr, out) in enumerate_branches(|c| run_mbqc(g, p, x, state.clone(), c).unwrap()) {
            *dist.entry(out).or_insert(0.0) += pr;
        }
        dist
    }

    #[test]
    fn flow_update_examples() {
        assert_eq!(flow_update(Angle8::PI_4, false, false), Angle8::PI_4);
        assert_eq!(flow_update(Angle8::PI_4, true, false), Angle8::new(7));
        assert_eq!(flow_update(Angle8::PI_4, false, true), Angle8::new(5));
    }

    #[test]
    fn dependency_sets_on_grid() {
        let g = Graph::grid(2, 2);
        let p = MeasurementPattern::new(&g, vec![Angle8::ZERO; 4]).unwrap();
        assert_eq!(p.x_deps(1), &[0]);
        assert_eq!(p.z_deps(1), &[2]);
        assert_eq!(p.z_deps(3), &[0]);
        assert!(p.z_deps(0).is_empty());
    }

    #[test]
    fn single_vertex_plus_gives_zero() {
        let g = Graph::new(1, &[]).unwrap();
        let p = MeasurementPattern::new(&g, vec![Angle8::ZERO]).unwrap();
        let d = exact_output(&g, &p, &[]);
        assert!((d[&vec![false]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path3_identity_is_deterministic() {
        let g = Graph::path(3);
        let p = MeasurementPattern::new(&g, vec![Angle8::ZERO; 3]).unwrap();
        for x in [false, true] {
            let d = exact_output(&g, &p, &[x]);
            assert!((d[&vec![x]] - 1.0).abs() < 1e-10, "{d:?}");
        }
    }

    #[test]
    fn path2_teleport_matches_direct_computation() {
        // Input |+⟩ through J(0) = H gives |0⟩, then measuring at angle 0
        // is uniform.
        let g = Graph::path(2);
        for phi in Angle8::all() {
            let p = MeasurementPattern::new(&g, vec![phi, Angle8::ZERO]).unwrap();
            let d = exact_output(&g, &p, &[false]);
            // direct: H RZ(−φ)|+⟩ measured in X
            let mut s = PureState::plus_theta(vertex_label(0), -phi);
            s.apply1(crate::qstate::Gate::H, vertex_label(0)).unwrap();
            let p0 = s.probability(vertex_label(0), Basis::X, false).unwrap();
            assert!((d.get(&vec![false]).copied().unwrap_or(0.0) - p0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid2x2_has_deterministic_patterns() {
        let g = Graph::grid(2, 2);
        let mut found = 0;
        for code in 0..8u32.pow(4) {
            let angles: Vec<Angle8> = (0..4).map(|i| Angle8::new(((code >> (3 * i)) & 7) as i64)).collect();
            let p = MeasurementPattern::new(&g, angles).unwrap();
            let d = exact_output(&g, &p, &[false, false]);
            if d.values().any(|&pr| pr > 1.0 - 1e-10) {
                found += 1;
            }
        }
        assert_eq!(found, 112);
    }

    #[test]
    fn mismatches_are_errors() {
        let g = Graph::path(2);
        assert!(MeasurementPattern::new(&g, vec![Angle8::ZERO]).is_err());
        let p = MeasurementPattern::new(&g, vec![Angle8::ZERO; 2]).unwrap();
        let s = PureState::plus_theta(vertex_label(0), Angle8::ZERO);
        let mut rng = crate::sampling::trial_rng(0, 0);
        assert!(run_mbqc(&g, &p, &[false], s, &mut rng).is_err());
        let s = build_blind_graph_state(&g, &[Angle8::ZERO; 2]).unwrap();
        assert!(run_mbqc(&g, &p, &[], s, &mut rng).is_err());
    }
}
