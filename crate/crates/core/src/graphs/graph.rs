use crate::error::{Error, Result};
use crate::qstate::{Angle8, Gate, Label, PureState, MAX_QUBITS};

pub type Vertex = usize;

/// Label of the qubit that carries vertex `v`.
pub fn vertex_label(v: Vertex) -> Label {
    Label(v as u32)
}

/// Raw description of a graph with inputs, outputs, order and flow.
#[derive(Clone, Debug, Default)]
pub struct GraphParts {
    pub vertices: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub inputs: Vec<Vertex>,
    pub outputs: Vec<Vertex>,
    /// Measurement order; identity when `None`.
    pub order: Option<Vec<Vertex>>,
    /// Flow pairs (v, f(v)).
    pub flow: Vec<(Vertex, Vertex)>,
}

/// Open graph (V, E, I, O) with a total measurement order and a causal flow
/// f : V∖O → V∖I compatible with that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    inputs: Vec<Vertex>,
    outputs: Vec<Vertex>,
    order: Vec<Vertex>,
    rank: Vec<usize>,
    flow: Vec<Option<Vertex>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidGraph(msg.into())
}

fn check_set(name: &str, set: &[Vertex], n: usize) -> Result<()> {
    for (i, &v) in set.iter().enumerate() {
        if v >= n {
            return Err(bad(format!("{name} vertex {v} out of range")));
        }
        if set[..i].contains(&v) {
            return Err(bad(format!("{name} lists vertex {v} twice")));
        }
    }
    Ok(())
}

impl Graph {
    /// Validates `parts` and builds the graph.
    pub fn from_parts(parts: GraphParts) -> Result<Self> {
        let n = parts.vertices;
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &parts.edges {
            if a >= n || b >= n {
                return Err(bad(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(bad(format!("self-loop on {a}")));
            }
            let e = (a.min(b), a.max(b));
            if edges.contains(&e) {
                return Err(bad(format!("duplicate edge ({a}, {b})")));
            }
            edges.push(e);
            adj[a].push(b);
            adj[b].push(a);
        }
        edges.sort_unstable();
        adj.iter_mut().for_each(|l| l.sort_unstable());
        check_set("inputs", &parts.inputs, n)?;
        check_set("outputs", &parts.outputs, n)?;
        let order = parts.order.unwrap_or_else(|| (0..n).collect());
        check_set("order", &order, n)?;
        if order.len() != n {
            return Err(bad("order must list every vertex"));
        }
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut flow = vec![None; n];
        for &(v, w) in &parts.flow {
            if v >= n || w >= n {
                return Err(bad(format!("flow pair ({v}, {w}) out of range")));
            }
            if flow[v].is_some() {
                return Err(bad(format!("flow defined twice on {v}")));
            }
            flow[v] = Some(w);
        }
        let g = Graph {
            n,
            edges,
            adj,
            inputs: parts.inputs,
            outputs: parts.outputs,
            order,
            rank,
            flow,
        };
        g.check_flow()?;
        Ok(g)
    }

    fn check_flow(&self) -> Result<()> {
        for v in 0..self.n {
            let is_out = self.outputs.contains(&v);
            match (self.flow[v], is_out) {
                (Some(_), true) => return Err(bad(format!("flow defined on output {v}"))),
                (None, false) => return Err(bad(format!("no flow on non-output {v}"))),
                (None, true) => {}
                (Some(w), false) => {
                    if self.inputs.contains(&w) {
                        return Err(bad(format!("flow of {v} maps to input {w}")));
                    }
                    if !self.has_edge(v, w) {
                        return Err(bad(format!("flow pair ({v}, {w}) is not an edge")));
                    }
                    if !self.precedes(v, w) {
                        return Err(bad(format!("{v} must precede its flow image {w}")));
                    }
                    for &u in &self.adj[w] {
                        if u != v && !self.precedes(v, u) {
                            return Err(bad(format!(
                                "neighbour {u} of f({v}) = {w} is measured before {v}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Graph with no inputs, every vertex an output and identity order.
    pub fn new(vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::from_parts(GraphParts {
            vertices,
            edges: edges.to_vec(),
            outputs: (0..vertices).collect(),
            ..Default::default()
        })
    }

    /// Path 0–1–…–(n−1) with input 0, output n−1 and flow i ↦ i+1.
    pub fn path(n: usize) -> Self {
        assert!(n > 0);
        Self::from_parts(GraphParts {
            vertices: n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
            inputs: vec![0],
            outputs: vec![n - 1],
            order: None,
            flow: (1..n).map(|i| (i - 1, i)).collect(),
        })
        .expect("path graph is valid")
    }

    /// `rows × cols` grid, vertex r·cols + c. Inputs are column 0, outputs the
    /// last column, flow runs along rows and the order is column-major.
    pub fn grid(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        let mut flow = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                    flow.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let order = (0..cols).flat_map(|c| (0..rows).map(move |r| id(r, c))).collect();
        Self::from_parts(GraphParts {
            vertices: rows * cols,
            edges,
            inputs: (0..rows).map(|r| id(r, 0)).collect(),
            outputs: (0..rows).map(|r| id(r, cols - 1)).collect(),
            order: Some(order),
            flow,
        })
        .expect("grid graph is valid")
    }

    /// Complete graph on `n` vertices (all outputs, no flow).
    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::new(n, &edges).expect("complete graph is valid")
    }

    /// Cycle on `n ≥ 3` vertices (all outputs, no flow).
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle graph is valid")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn inputs(&self) -> &[Vertex] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vertex] {
        &self.outputs
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    /// Strict order comparison: `a` is measured before `b`.
    pub fn precedes(&self, a: Vertex, b: Vertex) -> bool {
        self.rank[a] < self.rank[b]
    }

    pub fn flow(&self, v: Vertex) -> Option<Vertex> {
        self.flow[v]
    }

    /// Same vertices and edges with a different measurement order.
    pub fn with_order(&self, order: Vec<Vertex>) -> Result<Self> {
        Self::from_parts(GraphParts {
            vertices: self.n,
            edges: self.edges.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            order: Some(order),
            flow: (0..self.n).filter_map(|v| self.flow[v].map(|w| (v, w))).collect(),
        })
    }
}

/// |G(θ)⟩ = ∏ CZ · ⊗ RZ(θ_v)|+⟩, vertex v on [`vertex_label`]`(v)`.
pub fn build_blind_graph_state(graph: &Graph, thetas: &[Angle8]) -> Result<PureState> {
    if graph.len() > MAX_QUBITS {
        return Err(Error::GraphTooLarge {
            vertices: graph.len(),
            cap: MAX_QUBITS,
        });
    }
    if thetas.len() != graph.len() {
        return Err(Error::PatternMismatch(format!(
            "{} angles for {} vertices",
            thetas.len(),
            graph.len()
        )));
    }
    let mut s = PureState::new();
    for (v, &t) in thetas.iter().enumerate() {
        s = s.tensor(&PureState::plus_theta(vertex_label(v), t))?;
    }
    for &(a, b) in graph.edges() {
        s.apply2(Gate::Cz, vertex_label(a), vertex_label(b))?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::fidelity_up_to_phase;

    #[test]
    fn standard_graphs_validate() {
        let g = Graph::grid(3, 2);
        assert_eq!(g.len(), 6);
        assert_eq!(g.edges().len(), 7);
        assert_eq!(g.order(), &[0, 2, 4, 1, 3, 5]);
        assert_eq!(g.flow(2), Some(3));
        assert_eq!(Graph::path(3).flow(2), None);
        assert_eq!(Graph::complete(3).edges().len(), 3);
    }

    #[test]
    fn flow_violations_rejected() {
        let base = GraphParts {
            vertices: 3,
            edges: vec![(0, 1), (1, 2)],
            inputs: vec![0],
            outputs: vec![2],
            order: None,
            flow: vec![(0, 1), (1, 2)],
        };
        assert!(Graph::from_parts(base.clone()).is_ok());
        let mut p = base.clone();
        p.order = Some(vec![1, 0, 2]);
        assert!(matches!(Graph::from_parts(p), Err(Error::InvalidGraph(_))));
        let mut p = base.clone();
        p.flow = vec![(0, 2), (1, 2)];
        assert!(Graph::from_parts(p).is_err());
        let mut p = base.clone();
        p.flow.pop();
        assert!(Graph::from_parts(p).is_err());
        let mut p = base;
        p.edges.push((1, 1));
        assert!(Graph::from_parts(p).is_err());
    }

    #[test]
    fn blind_state_examples() {
        let g = Graph::new(1, &[]).unwrap();
        let s = build_blind_graph_state(&g, &[Angle8::PI_4]).unwrap();
        let t = PureState::plus_theta(Label(0), Angle8::PI_4);
        assert!((fidelity_up_to_phase(&s, &t).unwrap() - 1.0).abs() < 1e-14);

        let p = Graph::path(2);
        let s = build_blind_graph_state(&p, &[Angle8::ZERO; 2]).unwrap();
        let a = s.amplitudes();
        assert!((a[3].re + 0.5).abs() < 1e-15 && (a[0].re - 0.5).abs() < 1e-15);

        assert!(matches!(
            build_blind_graph_state(&p, &[Angle8::ZERO]),
            Err(Error::PatternMismatch(_))
        ));
        let big = Graph::new(21, &[]).unwrap();
        assert!(matches!(
            build_blind_graph_state(&big, &[Angle8::ZERO; 21]),
            Err(Error::GraphTooLarge { .. })
        ));
    }

    #[test]
    fn rz_commutes_with_cz_on_path3() {
        let g = Graph::path(3);
        let th = [Angle8::new(1), Angle8::new(2), Angle8::new(3)];
        let a = build_blind_graph_state(&g, &th).unwrap();
        let mut b = build_blind_graph_state(&g, &[Angle8::ZERO; 3]).unwrap();
        for (v, t) in th.iter().enumerate() {
            b.apply1(Gate::Rz(t.radians()), vertex_label(v)).unwrap();
        }
        assert!((fidelity_up_to_phase(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }
}
