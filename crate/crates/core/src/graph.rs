//! Weighted plumbing trees, their textual format, and the chain/satellite
//! arrangement that the open book construction is built on.
//!
//! A [`ResolutionGraph`] is a tree whose vertices carry negative weights (the
//! self-intersections of the exceptional curves). An [`Arrangement`] picks a
//! chain `E_1, ..., E_k` starting at a leaf and assigns every other vertex to
//! the unique chain vertex its branch hangs off; the branch hanging off `E_j`
//! is the satellite set `R_j` and must have depth at most `j - 1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex id 0 is not allowed")]
    ZeroId,
    #[error("vertex {0} has non-negative weight {1}")]
    NonNegativeWeight(VertexId, i32),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} is not in the graph")]
    UnknownEdge(VertexId, VertexId),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("chain has {0} vertex(es); at least 2 are required")]
    ChainTooShort(usize),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate vertex {id}")]
    DuplicateVertex { line: usize, id: VertexId },
    #[error("line {line}: duplicate edge {a} {b}")]
    DuplicateEdge { line: usize, a: VertexId, b: VertexId },
    #[error("line {line}: unknown vertex {id}")]
    UnknownVertex { line: usize, id: VertexId },
    #[error("line {line}: weight {weight} of vertex {id} is not negative")]
    NonNegativeWeight { line: usize, id: VertexId, weight: i32 },
    #[error("line {line}: self-loop at vertex {id}")]
    SelfLoop { line: usize, id: VertexId },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A weighted tree. Weights are the self-intersection numbers `E·E`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResolutionGraph {
    weights: BTreeMap<VertexId, i32>,
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl ResolutionGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, i32)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut weights = BTreeMap::new();
        for (id, w) in vertices {
            if id == 0 {
                return Err(GraphError::ZeroId);
            }
            if w >= 0 {
                return Err(GraphError::NonNegativeWeight(id, w));
            }
            if weights.insert(id, w).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        let mut adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> =
            weights.keys().map(|&v| (v, BTreeSet::new())).collect();
        let mut edge_count = 0usize;
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if !weights.contains_key(&v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            if !adjacency.get_mut(&a).unwrap().insert(b) {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            adjacency.get_mut(&b).unwrap().insert(a);
            edge_count += 1;
        }
        let g = ResolutionGraph { weights, adjacency };
        g.check_tree(edge_count)?;
        Ok(g)
    }

    pub fn single(id: VertexId, weight: i32) -> Result<Self, GraphError> {
        Self::new([(id, weight)], [])
    }

    /// Path graph with vertex ids `1..=n` carrying the given weights in order.
    pub fn path(weights: &[i32]) -> Result<Self, GraphError> {
        let n = weights.len() as VertexId;
        Self::new(
            (1..=n).zip(weights.iter().copied()),
            (1..n).map(|i| (i, i + 1)),
        )
    }

    fn check_tree(&self, edge_count: usize) -> Result<(), GraphError> {
        let n = self.weights.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if edge_count != n - 1 {
            return Err(GraphError::NotATree(format!(
                "{n} vertices but {edge_count} edges"
            )));
        }
        let start = *self.weights.keys().next().unwrap();
        let reached = self.distances_from(start).len();
        if reached != n {
            return Err(GraphError::NotATree(format!(
                "disconnected: {reached} of {n} vertices reachable from {start}"
            )));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.weights.keys().copied()
    }

    pub fn weights(&self) -> impl Iterator<Item = (VertexId, i32)> + '_ {
        self.weights.iter().map(|(&v, &w)| (v, w))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.weights.contains_key(&v)
    }

    pub fn weight(&self, v: VertexId) -> Option<i32> {
        self.weights.get(&v).copied()
    }

    /// Valency `a(E)`.
    pub fn valency(&self, v: VertexId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Edges as `(smaller, larger)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.adjacency
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    /// `-E·E - a(E)`: the number of boundary circles vertex `v` contributes to
    /// the page. Negative exactly when `v` is a bad vertex.
    pub fn boundary_count(&self, v: VertexId) -> i64 {
        -(self.weights[&v] as i64) - self.valency(v) as i64
    }

    pub fn distances_from(&self, v: VertexId) -> BTreeMap<VertexId, usize> {
        self.distances_avoiding(v, &BTreeSet::new())
    }

    /// Breadth-first distances from `v` in the graph with `blocked` removed.
    pub fn distances_avoiding(
        &self,
        v: VertexId,
        blocked: &BTreeSet<VertexId>,
    ) -> BTreeMap<VertexId, usize> {
        let mut dist = BTreeMap::new();
        if !self.contains(v) || blocked.contains(&v) {
            return dist;
        }
        dist.insert(v, 0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for w in self.neighbors(u) {
                if !blocked.contains(&w) && !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: VertexId, b: VertexId) -> Option<usize> {
        self.distances_from(a).get(&b).copied()
    }

    /// The unique simple path from `a` to `b`, both endpoints included.
    pub fn path_between(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        let mut parent = BTreeMap::from([(a, a)]);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for w in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                    e.insert(u);
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Vertices reachable from `start` without entering `blocked`.
    pub fn component_avoiding(
        &self,
        start: VertexId,
        blocked: &BTreeSet<VertexId>,
    ) -> BTreeSet<VertexId> {
        self.distances_avoiding(start, blocked).into_keys().collect()
    }

    /// Deletes the given vertices and their edges; the result must still be a tree.
    pub fn without_vertices(&self, removed: &BTreeSet<VertexId>) -> Result<Self, GraphError> {
        let vertices: Vec<_> = self
            .weights()
            .filter(|(v, _)| !removed.contains(v))
            .collect();
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|(a, b)| !removed.contains(a) && !removed.contains(b))
            .collect();
        Self::new(vertices, edges)
    }

    pub fn with_weight(&self, v: VertexId, weight: i32) -> Result<Self, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if weight >= 0 {
            return Err(GraphError::NonNegativeWeight(v, weight));
        }
        let mut g = self.clone();
        g.weights.insert(v, weight);
        Ok(g)
    }
}

impl fmt::Display for ResolutionGraph {
    /// Writes the line-oriented graph format accepted by [`parse_graph`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, w) in self.weights() {
            writeln!(f, "vertex {v} {w}")?;
        }
        for (a, b) in self.edges() {
            writeln!(f, "edge {a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for ResolutionGraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # comment
/// vertex <id> <weight>
/// edge <id> <id>
/// ```
///
/// Ids are positive integers, weights negative integers. Line order is
/// irrelevant; each vertex and edge is declared once.
pub fn parse_graph(text: &str) -> Result<ResolutionGraph, ParseError> {
    let mut vertices: BTreeMap<VertexId, (usize, i32)> = BTreeMap::new();
    let mut edges: Vec<(usize, VertexId, VertexId)> = Vec::new();
    let mut seen_edges = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| ParseError::Syntax { line, message };
        match fields.as_slice() {
            ["vertex", id, weight] => {
                let id = parse_id(id).map_err(syntax)?;
                let weight: i32 = weight
                    .parse()
                    .map_err(|_| syntax(format!("invalid weight `{weight}`")))?;
                if weight >= 0 {
                    return Err(ParseError::NonNegativeWeight { line, id, weight });
                }
                if vertices.insert(id, (line, weight)).is_some() {
                    return Err(ParseError::DuplicateVertex { line, id });
                }
            }
            ["edge", a, b] => {
                let a = parse_id(a).map_err(syntax)?;
                let b = parse_id(b).map_err(syntax)?;
                if a == b {
                    return Err(ParseError::SelfLoop { line, id: a });
                }
                if !seen_edges.insert((a.min(b), a.max(b))) {
                    return Err(ParseError::DuplicateEdge { line, a, b });
                }
                edges.push((line, a, b));
            }
            [keyword, ..] if *keyword == "vertex" || *keyword == "edge" => {
                return Err(syntax(format!(
                    "`{keyword}` expects exactly two arguments"
                )));
            }
            [keyword, ..] => return Err(syntax(format!("unknown keyword `{keyword}`"))),
            [] => unreachable!(),
        }
    }

    for &(line, a, b) in &edges {
        for id in [a, b] {
            if !vertices.contains_key(&id) {
                return Err(ParseError::UnknownVertex { line, id });
            }
        }
    }

    Ok(ResolutionGraph::new(
        vertices.iter().map(|(&id, &(_, w))| (id, w)),
        edges.iter().map(|&(_, a, b)| (a, b)),
    )?)
}

fn parse_id(s: &str) -> Result<VertexId, String> {
    match s.parse::<VertexId>() {
        Ok(0) | Err(_) => Err(format!("invalid vertex id `{s}` (expected a positive integer)")),
        Ok(id) => Ok(id),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisMode {
    /// Every weight at most -5.
    Strict,
    /// Every weight at most -5, except the last chain vertex which may be -4.
    RelaxedLast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub offending: Vec<VertexId>,
}

impl ValidationReport {
    fn from_offending(offending: Vec<VertexId>) -> Self {
        ValidationReport {
            passed: offending.is_empty(),
            offending,
        }
    }
}

/// Checks `a(E) <= -E·E` at every vertex.
pub fn validate_no_bad_vertices(g: &ResolutionGraph) -> ValidationReport {
    ValidationReport::from_offending(
        g.vertices()
            .filter(|&v| g.boundary_count(v) < 0)
            .collect(),
    )
}

/// Weight bounds of the uniqueness statement. In relaxed-last mode the last
/// chain vertex of the canonical arrangement may have weight -4.
pub fn validate_theorem_hypotheses(g: &ResolutionGraph, mode: HypothesisMode) -> ValidationReport {
    let last = match mode {
        HypothesisMode::Strict => None,
        HypothesisMode::RelaxedLast => Some(arrange_conveniently(g).last()),
    };
    ValidationReport::from_offending(
        g.weights()
            .filter(|&(v, w)| {
                let limit = if Some(v) == last { -4 } else { -5 };
                w > limit
            })
            .map(|(v, _)| v)
            .collect(),
    )
}

/// A maximum-length simple path. Among all longest paths the one whose
/// endpoint pair `(smaller id, larger id)` is lexicographically least is
/// returned, oriented from the smaller endpoint.
pub fn longest_chain(g: &ResolutionGraph) -> Vec<VertexId> {
    let mut best: Option<(usize, VertexId, VertexId)> = None;
    for a in g.vertices() {
        for (&b, &d) in g.distances_from(a).iter().filter(|(&b, _)| b >= a) {
            let better = match best {
                None => true,
                Some((bd, ba, bb)) => d > bd || (d == bd && (a, b) < (ba, bb)),
            };
            if better {
                best = Some((d, a, b));
            }
        }
    }
    let (_, a, b) = best.expect("graph is nonempty");
    g.path_between(a, b).expect("tree is connected")
}

/// Chain `E_1..E_k` plus satellite sets `R_2..R_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Arrangement {
    chain: Vec<VertexId>,
    satellites: BTreeMap<usize, BTreeSet<VertexId>>,
}

impl Arrangement {
    /// Builds the arrangement with the given chain, deriving each `R_j` as the
    /// vertices whose path to the chain first meets it at `E_j`, and checks
    /// every arrangement invariant.
    pub fn from_chain(g: &ResolutionGraph, chain: Vec<VertexId>) -> Result<Self, GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidArrangement(msg));
        if chain.is_empty() {
            return bad("empty chain".into());
        }
        let on_chain: BTreeSet<VertexId> = chain.iter().copied().collect();
        if on_chain.len() != chain.len() {
            return bad("chain repeats a vertex".into());
        }
        for &v in &chain {
            if !g.contains(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        for pair in chain.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                return bad(format!("chain vertices {} and {} are not adjacent", pair[0], pair[1]));
            }
        }
        let k = chain.len();
        if k == 1 && g.vertex_count() != 1 {
            return bad("a one-vertex chain requires a one-vertex graph".into());
        }
        if k >= 2 && g.valency(chain[0]) != 1 {
            return bad(format!("E_1 = {} is not a leaf", chain[0]));
        }

        let mut satellites: BTreeMap<usize, BTreeSet<VertexId>> =
            (2..=k).map(|j| (j, BTreeSet::new())).collect();
        for (i, &e) in chain.iter().enumerate() {
            let j = i + 1;
            let mut blocked = on_chain.clone();
            blocked.remove(&e);
            for (v, depth) in g.distances_avoiding(e, &blocked) {
                if v == e {
                    continue;
                }
                if j == 1 {
                    return bad(format!("vertex {v} hangs off E_1"));
                }
                if depth > j - 1 {
                    return bad(format!(
                        "vertex {v} is at distance {depth} from E_{j} = {e}, more than {}",
                        j - 1
                    ));
                }
                satellites.get_mut(&j).unwrap().insert(v);
            }
        }
        Ok(Arrangement { chain, satellites })
    }

    pub fn chain(&self) -> &[VertexId] {
        &self.chain
    }

    /// Length `k` of the chain.
    pub fn k(&self) -> usize {
        self.chain.len()
    }

    pub fn first(&self) -> VertexId {
        self.chain[0]
    }

    pub fn last(&self) -> VertexId {
        self.chain[self.chain.len() - 1]
    }

    /// `E_j`, 1-based.
    pub fn chain_vertex(&self, j: usize) -> VertexId {
        self.chain[j - 1]
    }

    /// `R_j` (empty for `j = 1` or out of range).
    pub fn satellites(&self, j: usize) -> &BTreeSet<VertexId> {
        static EMPTY: BTreeSet<VertexId> = BTreeSet::new();
        self.satellites.get(&j).unwrap_or(&EMPTY)
    }

    pub fn satellite_sets(&self) -> &BTreeMap<usize, BTreeSet<VertexId>> {
        &self.satellites
    }

    /// The index `j` with `v ∈ {E_j} ∪ R_j`.
    pub fn domain_of(&self, v: VertexId) -> Option<usize> {
        if let Some(i) = self.chain.iter().position(|&e| e == v) {
            return Some(i + 1);
        }
        self.satellites
            .iter()
            .find(|(_, set)| set.contains(&v))
            .map(|(&j, _)| j)
    }

    /// `{E_j} ∪ R_j` with `E_j` first, satellites by ascending id.
    pub fn domain_vertices(&self, j: usize) -> Vec<VertexId> {
        std::iter::once(self.chain_vertex(j))
            .chain(self.satellites(j).iter().copied())
            .collect()
    }

    /// The branches of `R_j`: for each neighbor of `E_j` inside `R_j` (by
    /// ascending id), the root and the vertex set of its subtree.
    pub fn branches(&self, g: &ResolutionGraph, j: usize) -> Vec<(VertexId, BTreeSet<VertexId>)> {
        let e = self.chain_vertex(j);
        let blocked = BTreeSet::from([e]);
        g.neighbors(e)
            .filter(|r| self.satellites(j).contains(r))
            .map(|r| (r, g.component_avoiding(r, &blocked)))
            .collect()
    }

    /// The arrangement restricted to `E_1..E_{k-1}` on the capped graph.
    pub fn truncated(&self, reduced: &ResolutionGraph) -> Result<Self, GraphError> {
        if self.k() < 2 {
            return Err(GraphError::ChainTooShort(self.k()));
        }
        Arrangement::from_chain(reduced, self.chain[..self.k() - 1].to_vec())
    }
}

/// Canonical convenient arrangement. `E_1` is the first vertex of
/// [`longest_chain`]; the chain then follows that path and stops at the first
/// `E_j` such that every vertex not yet assigned lies within distance `j - 1`
/// of `E_j`.
pub fn arrange_conveniently(g: &ResolutionGraph) -> Arrangement {
    let path = longest_chain(g);
    let mut chain = vec![path[0]];
    let mut earlier = BTreeSet::new();
    loop {
        let j = chain.len();
        let e = chain[j - 1];
        let reach = g.distances_avoiding(e, &earlier);
        if reach.values().all(|&d| d < j) {
            break;
        }
        earlier.insert(e);
        chain.push(path[j]);
    }
    Arrangement::from_chain(g, chain).expect("the peeling procedure yields a convenient arrangement")
}

/// Re-arranges `g - E_1`. Scans `j = 2..=k` for a satellite set `R_j` that
/// holds a vertex at the maximal depth `j - 1`; the first such path is flipped
/// onto the head of the chain (`E_j..E_k` stay in place). When none exists
/// the chain shifts down by one.
pub fn rearrange_after_removal(g: &ResolutionGraph, arr: &Arrangement) -> Result<Arrangement, GraphError> {
    if arr.k() < 2 {
        return Err(GraphError::ChainTooShort(arr.k()));
    }
    let reduced = g.without_vertices(&BTreeSet::from([arr.first()]))?;
    for j in 2..=arr.k() {
        let e = arr.chain_vertex(j);
        let dist = reduced.distances_from(e);
        let deepest = arr
            .satellites(j)
            .iter()
            .copied()
            .find(|v| dist.get(v) == Some(&(j - 1)));
        if let Some(tip) = deepest {
            let mut chain = reduced.path_between(tip, e).expect("tree is connected");
            chain.extend_from_slice(&arr.chain()[j..]);
            return Arrangement::from_chain(&reduced, chain);
        }
    }
    Arrangement::from_chain(&reduced, arr.chain()[1..].to_vec())
}

/// `G'`: drops `E_k ∪ R_k` and raises the weight of `E_{k-1}` by one.
pub fn reduce_for_capping(g: &ResolutionGraph, arr: &Arrangement) -> Result<ResolutionGraph, GraphError> {
    let k = arr.k();
    if k < 2 {
        return Err(GraphError::ChainTooShort(k));
    }
    let mut dropped = arr.satellites(k).clone();
    dropped.insert(arr.last());
    let reduced = g.without_vertices(&dropped)?;
    let prev = arr.chain_vertex(k - 1);
    let w = reduced.weight(prev).expect("E_{k-1} survives");
    reduced.with_weight(prev, w + 1)
}

/// DOT rendering. Node labels are weights (ids as `xlabel`); with an
/// arrangement, the chain is ranked on one row and each `R_j` is a cluster.
pub fn export_dot(g: &ResolutionGraph, arr: Option<&Arrangement>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("graph resolution {\n");
    out.push_str("  node [shape=circle];\n");
    for (v, w) in g.weights() {
        let _ = writeln!(out, "  v{v} [label=\"{w}\", xlabel=\"{v}\"];");
    }
    if let Some(arr) = arr {
        out.push_str("  { rank=same;");
        for v in arr.chain() {
            let _ = write!(out, " v{v};");
        }
        out.push_str(" }\n");
        for (j, set) in arr.satellite_sets() {
            if set.is_empty() {
                continue;
            }
            let _ = writeln!(out, "  subgraph cluster_r{j} {{");
            let _ = writeln!(out, "    label=\"R_{j}\";");
            for v in set {
                let _ = writeln!(out, "    v{v};");
            }
            out.push_str("  }\n");
        }
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  v{a} -- v{b};");
    }
    out.push_str("}\n");
    out
}
