//! The defining graph Γ and the combinatorial invariants the dimension bounds
//! are built from: eligibility, the domination order on links, the subgraph
//! Γ₀ of maximal representatives, and the decomposition into pieces
//! (maximal 2-connected subgraphs).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::anomaly::Anomaly;

/// Index of a node in its [`DefiningGraph`] (first-appearance order).
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid node name `{0}`")]
    InvalidName(String),
    #[error("graph has no nodes")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("expected {expected} argument(s) after `{directive}`")]
    Arity { directive: String, expected: usize },
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite simple graph with named nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DefiningGraph {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<BTreeSet<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl DefiningGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from explicit node and edge lists. Nodes mentioned only
    /// by edges are appended in order of appearance.
    pub fn from_edges(nodes: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for n in nodes {
            g.add_node(n)?;
        }
        for (a, b) in edges {
            let a = g.add_node(a)?;
            let b = g.add_node(b)?;
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Inserts a node if it is not present yet and returns its id.
    pub fn add_node(&mut self, name: &str) -> Result<NodeId, GraphError> {
        if let Some(&id) = self.index.get(name) {
            return Ok(id);
        }
        if !valid_name(name) {
            return Err(GraphError::InvalidName(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.adjacency.push(BTreeSet::new());
        Ok(id)
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<(), GraphError> {
        if a >= self.names.len() {
            return Err(GraphError::UnknownNode(a.to_string()));
        }
        if b >= self.names.len() {
            return Err(GraphError::UnknownNode(b.to_string()));
        }
        if a == b {
            return Err(GraphError::SelfLoop(self.names[a].clone()));
        }
        if self.adjacency[a].contains(&b) {
            return Err(GraphError::DuplicateEdge(
                self.names[a].clone(),
                self.names[b].clone(),
            ));
        }
        self.adjacency[a].insert(b);
        self.adjacency[b].insert(a);
        self.edges.push((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.names.len()
    }

    /// Edges as `(min id, max id)` pairs in insertion order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    /// The link lk(v).
    pub fn neighbors(&self, v: NodeId) -> &BTreeSet<NodeId> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.degree(v) == 1
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.is_leaf(v)).collect()
    }

    /// χ(Γ) = ν − e.
    pub fn euler_characteristic(&self) -> i64 {
        self.node_count() as i64 - self.edge_count() as i64
    }

    pub fn is_tree(&self) -> bool {
        self.node_count() > 0 && self.edge_count() + 1 == self.node_count() && self.is_connected()
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components_without(None).len() == 1
    }

    /// Compares node names by code point; node ids are only first-appearance order.
    pub fn name_cmp(&self, a: NodeId, b: NodeId) -> std::cmp::Ordering {
        self.names[a].cmp(&self.names[b])
    }

    /// Node ids sorted by name.
    pub fn nodes_by_name(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.nodes().collect();
        v.sort_by(|&a, &b| self.name_cmp(a, b));
        v
    }

    /// Connected components of Γ − {removed} (or of Γ itself), each sorted by
    /// id, listed in order of their least id.
    pub fn components_without(&self, removed: Option<NodeId>) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        if let Some(r) = removed {
            seen[r] = true;
        }
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether the subgraph induced on `subset` is connected (false when empty).
    pub fn induced_connected(&self, subset: &BTreeSet<NodeId>) -> bool {
        let Some(&start) = subset.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if subset.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == subset.len()
    }

    /// Copy of the graph with node `v` renamed to `names[v]`.
    pub fn renamed(&self, names: &[String]) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for name in names {
            if g.node(name).is_some() {
                return Err(GraphError::InvalidName(name.clone()));
            }
            g.add_node(name)?;
        }
        for &(a, b) in &self.edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Renders the graph in the line-oriented file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for name in &self.names {
            s.push_str("node ");
            s.push_str(name);
            s.push('\n');
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("edge {} {}\n", self.names[a], self.names[b]));
        }
        s
    }
}

impl fmt::Display for DefiningGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| format!("{}-{}", self.names[a], self.names[b]))
            .collect();
        write!(f, "[{}]", edges.join(", "))
    }
}

/// Parses the graph file format: `# comment`, `node <name>`, `edge <a> <b>`.
pub fn parse_graph(text: &str) -> Result<DefiningGraph, ParseError> {
    let mut g = DefiningGraph::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind: ParseErrorKind| ParseError { line, kind };
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        let expect = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(ParseErrorKind::Arity {
                    directive: directive.to_string(),
                    expected: n,
                }))
            }
        };
        for a in &args {
            if !valid_name(a) {
                return Err(err(ParseErrorKind::UnknownToken(a.to_string())));
            }
        }
        match directive {
            "node" => {
                expect(1)?;
                g.add_node(args[0]).map_err(|e| err(e.into()))?;
            }
            "edge" => {
                expect(2)?;
                let a = g.add_node(args[0]).map_err(|e| err(e.into()))?;
                let b = g.add_node(args[1]).map_err(|e| err(e.into()))?;
                g.add_edge(a, b).map_err(|e| err(e.into()))?;
            }
            other => return Err(err(ParseErrorKind::UnknownToken(other.to_string()))),
        }
    }
    if g.node_count() == 0 {
        return Err(ParseError {
            line: last_line.max(1),
            kind: GraphError::Empty.into(),
        });
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_connected: bool,
    pub triangle_free: bool,
    /// Informational only.
    pub square_free: bool,
    pub is_star: bool,
    pub eligible: bool,
}

pub fn validate(g: &DefiningGraph) -> ValidationReport {
    let is_connected = g.is_connected();
    let triangle_free = g
        .edges()
        .iter()
        .all(|&(a, b)| g.neighbors(a).is_disjoint(g.neighbors(b)));
    // Two distinct nodes with two common neighbours span a 4-cycle.
    let square_free = g.nodes().all(|a| {
        ((a + 1)..g.node_count())
            .all(|b| g.neighbors(a).intersection(g.neighbors(b)).count() < 2)
    });
    let n = g.node_count();
    let is_star = g.nodes().any(|c| {
        g.degree(c) + 1 == n && g.edges().iter().all(|&(a, b)| a == c || b == c)
    });
    ValidationReport {
        is_connected,
        triangle_free,
        square_free,
        is_star,
        eligible: is_connected && triangle_free && !is_star,
    }
}

/// The preorder v ≤ w ⇔ lk(v) ⊆ lk(w), with its equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationOrder {
    leq: Vec<Vec<bool>>,
    /// Classes of equal links; members sorted by name, classes ordered by
    /// their least member's name.
    pub classes: Vec<Vec<NodeId>>,
    pub class_of: Vec<usize>,
    /// Indices into `classes`.
    pub maximal_classes: Vec<usize>,
}

impl DominationOrder {
    pub fn leq(&self, v: NodeId, w: NodeId) -> bool {
        self.leq[v][w]
    }

    pub fn equivalent(&self, v: NodeId, w: NodeId) -> bool {
        self.class_of[v] == self.class_of[w]
    }

    pub fn is_maximal(&self, v: NodeId) -> bool {
        self.maximal_classes.contains(&self.class_of[v])
    }

    /// Maximal and alone in its class.
    pub fn is_unique_maximal(&self, v: NodeId) -> bool {
        self.is_maximal(v) && self.classes[self.class_of[v]].len() == 1
    }
}

pub fn domination_order(g: &DefiningGraph) -> DominationOrder {
    let n = g.node_count();
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|v| (0..n).map(|w| g.neighbors(v).is_subset(g.neighbors(w))).collect())
        .collect();
    let mut classes: Vec<Vec<NodeId>> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    for v in g.nodes_by_name() {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<NodeId> = g
            .nodes_by_name()
            .into_iter()
            .filter(|&w| leq[v][w] && leq[w][v])
            .collect();
        for &w in &members {
            class_of[w] = id;
        }
        classes.push(members);
    }
    let maximal_classes = (0..classes.len())
        .filter(|&c| {
            let v = classes[c][0];
            (0..n).all(|w| !leq[v][w] || leq[w][v])
        })
        .collect();
    DominationOrder {
        leq,
        classes,
        class_of,
        maximal_classes,
    }
}

/// How the representative of each maximal class is chosen for Γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepresentativePolicy {
    /// Least node name by code point.
    #[default]
    LexLeast,
    /// Earliest node in file order.
    FirstAppearance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeStats {
    /// |v|
    pub valence: usize,
    /// |v|₀, valence inside Γ₀ (zero for nodes outside Γ₀).
    pub valence_gamma0: usize,
    /// |v|_U = |L_v ∩ U|
    pub valence_u: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaZero {
    /// V₀, sorted by name.
    pub nodes: Vec<NodeId>,
    pub in_gamma0: Vec<bool>,
    /// E₀, edges of Γ induced on V₀.
    pub edges: Vec<(NodeId, NodeId)>,
    pub u: BTreeSet<NodeId>,
    pub stats: Vec<NodeStats>,
    /// Γ₀ is Γ with its leaves removed.
    pub pruned_leaves_flag: bool,
    pub connected: bool,
}

impl GammaZero {
    pub fn contains(&self, v: NodeId) -> bool {
        self.in_gamma0[v]
    }
}

pub fn gamma_zero(
    g: &DefiningGraph,
    order: &DominationOrder,
    policy: RepresentativePolicy,
) -> GammaZero {
    let mut nodes: Vec<NodeId> = order
        .maximal_classes
        .iter()
        .map(|&c| {
            let members = &order.classes[c];
            match policy {
                RepresentativePolicy::LexLeast => members[0],
                RepresentativePolicy::FirstAppearance => *members.iter().min().unwrap(),
            }
        })
        .collect();
    nodes.sort_by(|&a, &b| g.name_cmp(a, b));
    let mut in_gamma0 = vec![false; g.node_count()];
    for &v in &nodes {
        in_gamma0[v] = true;
    }
    let edges: Vec<(NodeId, NodeId)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| in_gamma0[a] && in_gamma0[b])
        .collect();
    let u: BTreeSet<NodeId> = g.nodes().filter(|&v| order.is_unique_maximal(v)).collect();
    let stats = g
        .nodes()
        .map(|v| NodeStats {
            valence: g.degree(v),
            valence_gamma0: if in_gamma0[v] {
                g.neighbors(v).iter().filter(|&&w| in_gamma0[w]).count()
            } else {
                0
            },
            valence_u: g.neighbors(v).intersection(&u).count(),
        })
        .collect();
    let pruned_leaves_flag = g.nodes().all(|v| in_gamma0[v] == !g.is_leaf(v));
    let connected = g.induced_connected(&nodes.iter().copied().collect());
    GammaZero {
        nodes,
        in_gamma0,
        edges,
        u,
        stats,
        pruned_leaves_flag,
        connected,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub edges: Vec<(NodeId, NodeId)>,
    pub nodes: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubData {
    /// Δ(v): nodes of the union of pieces containing v.
    pub delta: BTreeSet<NodeId>,
    pub is_hub: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceDecomposition {
    pub pieces: Vec<Piece>,
    /// Number of components of Γ − {v}.
    pub delta_c: Vec<usize>,
    /// Number of pieces containing v.
    pub piece_count_at: Vec<usize>,
    pub hub_data: Vec<HubData>,
}

impl PieceDecomposition {
    /// π
    pub fn count(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_hub(&self, v: NodeId) -> bool {
        self.hub_data[v].is_hub
    }

    /// Structural checks that must hold for any decomposition: edges
    /// partitioned, pairwise intersections of at most one node, and the two
    /// counts of δ_C agreeing.
    pub fn self_check(&self, g: &DefiningGraph) -> Vec<Anomaly> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for p in &self.pieces {
            for &e in &p.edges {
                if !seen.insert(e) {
                    out.push(Anomaly::PiecesNotPartition);
                }
            }
        }
        if seen.len() != g.edge_count() {
            out.push(Anomaly::PiecesNotPartition);
        }
        for (i, p) in self.pieces.iter().enumerate() {
            for q in &self.pieces[i + 1..] {
                if p.nodes.intersection(&q.nodes).count() > 1 {
                    out.push(Anomaly::PiecesOverlap);
                }
            }
        }
        for v in g.nodes() {
            if self.delta_c[v] != self.piece_count_at[v] {
                out.push(Anomaly::DeltaMismatch {
                    node: g.name(v).to_string(),
                    components: self.delta_c[v],
                    pieces: self.piece_count_at[v],
                });
            }
        }
        out
    }
}

/// Biconnected components by the Hopcroft–Tarjan edge-stack DFS.
struct Bcc<'a> {
    g: &'a DefiningGraph,
    depth: Vec<usize>,
    low: Vec<usize>,
    stack: Vec<(NodeId, NodeId)>,
    out: Vec<Vec<(NodeId, NodeId)>>,
}

impl Bcc<'_> {
    fn visit(&mut self, v: NodeId, parent: Option<NodeId>, d: usize) {
        self.depth[v] = d;
        self.low[v] = d;
        for &w in self.g.neighbors(v) {
            if Some(w) == parent {
                continue;
            }
            if self.depth[w] == usize::MAX {
                self.stack.push((v, w));
                self.visit(w, Some(v), d + 1);
                self.low[v] = self.low[v].min(self.low[w]);
                if self.low[w] >= d {
                    let mut comp = Vec::new();
                    while let Some(e) = self.stack.pop() {
                        comp.push((e.0.min(e.1), e.0.max(e.1)));
                        if e == (v, w) {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    self.out.push(comp);
                }
            } else if self.depth[w] < d {
                self.stack.push((v, w));
                self.low[v] = self.low[v].min(self.depth[w]);
            }
        }
    }
}

pub fn pieces(g: &DefiningGraph, order: &DominationOrder) -> PieceDecomposition {
    let n = g.node_count();
    let mut bcc = Bcc {
        g,
        depth: vec![usize::MAX; n],
        low: vec![0; n],
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in g.nodes() {
        if bcc.depth[v] == usize::MAX {
            bcc.visit(v, None, 0);
        }
    }
    let mut raw = bcc.out;
    raw.sort();
    let pieces: Vec<Piece> = raw
        .into_iter()
        .map(|edges| Piece {
            nodes: edges.iter().flat_map(|&(a, b)| [a, b]).collect(),
            edges,
        })
        .collect();
    let delta_c = g
        .nodes()
        .map(|v| g.components_without(Some(v)).len())
        .collect();
    let piece_count_at = g
        .nodes()
        .map(|v| pieces.iter().filter(|p| p.nodes.contains(&v)).count())
        .collect();
    let hub_data = g
        .nodes()
        .map(|v| {
            let delta: BTreeSet<NodeId> = pieces
                .iter()
                .filter(|p| p.nodes.contains(&v))
                .flat_map(|p| p.nodes.iter().copied())
                .collect();
            let is_hub = delta
                .iter()
                .all(|&w| w == v || g.adjacent(v, w) || order.leq(w, v));
            HubData { delta, is_hub }
        })
        .collect();
    PieceDecomposition {
        pieces,
        delta_c,
        piece_count_at,
        hub_data,
    }
}

/// Everything derived from an eligible graph, plus structural anomalies.
#[derive(Debug, Clone)]
pub struct Structure {
    pub validation: ValidationReport,
    pub order: DominationOrder,
    pub gamma0: GammaZero,
    pub pieces: PieceDecomposition,
    pub anomalies: Vec<Anomaly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph is not eligible (connected, triangle-free, not a star): {0:?}")]
pub struct Ineligible(pub ValidationReport);

impl Structure {
    pub fn analyze(g: &DefiningGraph) -> Result<Self, Ineligible> {
        Self::analyze_with(g, RepresentativePolicy::default())
    }

    pub fn analyze_with(g: &DefiningGraph, policy: RepresentativePolicy) -> Result<Self, Ineligible> {
        let validation = validate(g);
        if !validation.eligible {
            return Err(Ineligible(validation));
        }
        let order = domination_order(g);
        let gamma0 = gamma_zero(g, &order, policy);
        let pieces = pieces(g, &order);
        let mut anomalies = pieces.self_check(g);
        if !gamma0.connected {
            anomalies.push(Anomaly::GammaZeroDisconnected);
        }
        for v in g.leaves() {
            if gamma0.contains(v) {
                anomalies.push(Anomaly::LeafInGammaZero(g.name(v).to_string()));
            }
            let w = *g.neighbors(v).iter().next().unwrap();
            if !gamma0.u.contains(&w) {
                anomalies.push(Anomaly::LeafNeighborOutsideU(g.name(v).to_string()));
            }
        }
        let kernel: usize = gamma0.nodes.iter().map(|&v| pieces.delta_c[v] - 1).sum();
        if kernel + 1 != pieces.count() {
            anomalies.push(Anomaly::KernelRankMismatch {
                sum: kernel,
                pieces: pieces.count(),
            });
        }
        Ok(Self {
            validation,
            order,
            gamma0,
            pieces,
            anomalies,
        })
    }
}
