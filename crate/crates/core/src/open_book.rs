//! The planar page built from an arranged tree and the standard positive
//! factorization of its monodromy, modeled on homology.
//!
//! Every vertex `E` becomes a sphere with `-E·E` boundary circles, `a(E)` of
//! which are glued to neighboring spheres along necks. The rest are holes of
//! the page. One hole of `E_1` is taken as the outer boundary of the disk, so
//! a simple closed curve is recorded by the set of holes it encloses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{self, Arrangement, GraphError, ResolutionGraph, VertexId};

pub type HoleId = u32;

/// Id reserved for the outer boundary; disk holes are numbered from 1.
pub const OUTER_HOLE: HoleId = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpenBookError {
    #[error("vertex {vertex} is bad: -E·E - a(E) = {count}")]
    BadVertex { vertex: VertexId, count: i64 },
    #[error("E_1 = {0} has no boundary circle left to serve as the outer boundary")]
    NoOuterHole(VertexId),
    #[error("curve class must enclose at least one hole")]
    EmptyClass,
    #[error("edge {0}-{1} is not in the graph")]
    UnknownEdge(VertexId, VertexId),
    #[error("domain V_{domain} has {available} eligible hole(s) for marking, 3 are needed")]
    TooFewEligibleHoles { domain: usize, available: usize },
    #[error("hole {0} is not a disk hole of the page")]
    UnknownHole(HoleId),
    #[error("the outer boundary cannot be capped")]
    CapsOuter,
    #[error("last chain vertex {vertex} has weight {weight}; the lantern replacement needs -4")]
    NotMinusFour { vertex: VertexId, weight: i32 },
    #[error("class {0} is not present in the factorization")]
    MissingClass(CurveClass),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Hole {
    pub id: HoleId,
    pub owner: VertexId,
    pub local_index: u32,
}

/// Homology class of a simple closed curve: the nonempty set of enclosed holes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(Vec<HoleId>);

impl CurveClass {
    pub fn new(holes: impl IntoIterator<Item = HoleId>) -> Result<Self, OpenBookError> {
        let set: BTreeSet<HoleId> = holes.into_iter().collect();
        if set.is_empty() {
            return Err(OpenBookError::EmptyClass);
        }
        Ok(CurveClass(set.into_iter().collect()))
    }

    pub fn singleton(h: HoleId) -> Self {
        CurveClass(vec![h])
    }

    pub fn holes(&self) -> &[HoleId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, h: HoleId) -> bool {
        self.0.binary_search(&h).is_ok()
    }

    pub fn is_subset(&self, other: &CurveClass) -> bool {
        self.0.iter().all(|&h| other.contains(h))
    }

    pub fn is_disjoint(&self, other: &CurveClass) -> bool {
        self.0.iter().all(|&h| !other.contains(h))
    }

    pub fn union(&self, other: &CurveClass) -> CurveClass {
        CurveClass::new(self.0.iter().chain(&other.0).copied()).expect("union of nonempty sets")
    }

    /// `None` when the intersection is empty.
    pub fn intersection(&self, other: &CurveClass) -> Option<CurveClass> {
        CurveClass::new(self.0.iter().copied().filter(|&h| other.contains(h))).ok()
    }

    /// Nested (either way) or disjoint.
    pub fn is_compatible(&self, other: &CurveClass) -> bool {
        self.is_subset(other) || other.is_subset(self) || self.is_disjoint(other)
    }

    /// Drops the given holes; `None` when nothing is left.
    pub fn without(&self, removed: &BTreeSet<HoleId>) -> Option<CurveClass> {
        CurveClass::new(self.0.iter().copied().filter(|h| !removed.contains(h))).ok()
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

/// A positive factorization recorded as a multiset of curve classes. The
/// twists are kept sorted, so two factorizations compare equal exactly when
/// they are the same multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Factorization {
    twists: Vec<CurveClass>,
}

/// Search results use the same canonical representation.
pub type CandidateFactorization = Factorization;

impl Factorization {
    pub fn new(twists: impl IntoIterator<Item = CurveClass>) -> Self {
        let mut twists: Vec<CurveClass> = twists.into_iter().collect();
        twists.sort();
        Factorization { twists }
    }

    /// Convenience constructor from hole lists; panics on an empty class.
    pub fn from_sets<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = HoleId>,
    {
        Self::new(sets.into_iter().map(|s| CurveClass::new(s).expect("nonempty class")))
    }

    pub fn twists(&self) -> &[CurveClass] {
        &self.twists
    }

    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }

    pub fn count(&self, class: &CurveClass) -> usize {
        self.twists.iter().filter(|c| *c == class).count()
    }

    pub fn contains(&self, class: &CurveClass) -> bool {
        self.twists.binary_search(class).is_ok()
    }

    /// Distinct classes with their multiplicities, in canonical order.
    pub fn distinct(&self) -> Vec<(&CurveClass, usize)> {
        let mut out: Vec<(&CurveClass, usize)> = Vec::new();
        for c in &self.twists {
            match out.last_mut() {
                Some((last, n)) if *last == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// Removes one copy of each of `removed` and adds `added`.
    pub fn replace(&self, removed: &[CurveClass], added: &[CurveClass]) -> Result<Self, OpenBookError> {
        let mut twists = self.twists.clone();
        for class in removed {
            let pos = twists
                .iter()
                .position(|c| c == class)
                .ok_or_else(|| OpenBookError::MissingClass(class.clone()))?;
            twists.remove(pos);
        }
        twists.extend(added.iter().cloned());
        Ok(Factorization::new(twists))
    }

    pub fn to_vecs(&self) -> Vec<Vec<HoleId>> {
        self.twists.iter().map(|c| c.0.clone()).collect()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.twists.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// The genus-zero page: disk holes labeled by their owning vertex, the outer
/// boundary, and the annular domain `V_j` of every hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarPage {
    graph: ResolutionGraph,
    arrangement: Arrangement,
    outer: Hole,
    holes: Vec<Hole>,
    domains: BTreeMap<HoleId, usize>,
}

impl PlanarPage {
    pub fn graph(&self) -> &ResolutionGraph {
        &self.graph
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn outer(&self) -> Hole {
        self.outer
    }

    /// Disk holes (the outer boundary excluded), ascending by id.
    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn hole_ids(&self) -> Vec<HoleId> {
        self.holes.iter().map(|h| h.id).collect()
    }

    pub fn hole(&self, id: HoleId) -> Option<&Hole> {
        self.holes
            .binary_search_by_key(&id, |h| h.id)
            .ok()
            .map(|i| &self.holes[i])
    }

    pub fn owner(&self, id: HoleId) -> Option<VertexId> {
        self.hole(id).map(|h| h.owner)
    }

    pub fn domain_of(&self, id: HoleId) -> Option<usize> {
        self.domains.get(&id).copied()
    }

    pub fn holes_in_domain(&self, j: usize) -> Vec<HoleId> {
        self.domains
            .iter()
            .filter(|(_, &d)| d == j)
            .map(|(&h, _)| h)
            .collect()
    }

    pub fn holes_of_vertex(&self, v: VertexId) -> Vec<HoleId> {
        self.holes.iter().filter(|h| h.owner == v).map(|h| h.id).collect()
    }

    fn holes_of_vertices(&self, vs: &BTreeSet<VertexId>) -> Vec<HoleId> {
        self.holes
            .iter()
            .filter(|h| vs.contains(&h.owner))
            .map(|h| h.id)
            .collect()
    }

    /// The class of the outer boundary: every disk hole.
    pub fn outer_class(&self) -> Option<CurveClass> {
        CurveClass::new(self.hole_ids()).ok()
    }

    /// Vertices on the far side of edge `a-b`, i.e. in the component of
    /// `G - e` not containing `E_1`.
    pub fn far_side(&self, a: VertexId, b: VertexId) -> Result<BTreeSet<VertexId>, OpenBookError> {
        if !self.graph.has_edge(a, b) {
            return Err(OpenBookError::UnknownEdge(a, b));
        }
        let side_b = self.graph.component_avoiding(b, &BTreeSet::from([a]));
        if side_b.contains(&self.arrangement.first()) {
            Ok(self.graph.component_avoiding(a, &BTreeSet::from([b])))
        } else {
            Ok(side_b)
        }
    }
}

/// Creates `-E·E - a(E)` boundary circles per vertex. Hole ids run
/// consecutively through `V_1, V_2, ...`; inside `V_j` the holes of `E_j` come
/// first, then those of `R_j` by ascending vertex id. `E_1`'s circle with local
/// index 0 is the outer boundary.
pub fn build_page(g: &ResolutionGraph, arr: &Arrangement) -> Result<PlanarPage, OpenBookError> {
    for v in g.vertices() {
        let count = g.boundary_count(v);
        if count < 0 {
            return Err(OpenBookError::BadVertex { vertex: v, count });
        }
    }
    let e1 = arr.first();
    if g.boundary_count(e1) == 0 {
        return Err(OpenBookError::NoOuterHole(e1));
    }
    let outer = Hole {
        id: OUTER_HOLE,
        owner: e1,
        local_index: 0,
    };
    let mut holes = Vec::new();
    let mut domains = BTreeMap::new();
    let mut next: HoleId = 1;
    for j in 1..=arr.k() {
        for v in arr.domain_vertices(j) {
            let first = if v == e1 { 1 } else { 0 };
            for local_index in first..g.boundary_count(v) as u32 {
                holes.push(Hole {
                    id: next,
                    owner: v,
                    local_index,
                });
                domains.insert(next, j);
                next += 1;
            }
        }
    }
    Ok(PlanarPage {
        graph: g.clone(),
        arrangement: arr.clone(),
        outer,
        holes,
        domains,
    })
}

/// Class of the meridian of the neck for edge `a-b`: the holes owned by the
/// far side. `None` when the far side owns no holes (the curve bounds a disk).
pub fn neck_class(page: &PlanarPage, a: VertexId, b: VertexId) -> Result<Option<CurveClass>, OpenBookError> {
    let far = page.far_side(a, b)?;
    Ok(CurveClass::new(page.holes_of_vertices(&far)).ok())
}

/// Outer twist, one twist around each disk hole, and one around each neck.
pub fn standard_factorization(page: &PlanarPage) -> Factorization {
    let mut twists: Vec<CurveClass> = Vec::new();
    twists.extend(page.outer_class());
    twists.extend(page.hole_ids().into_iter().map(CurveClass::singleton));
    for (a, b) in page.graph.edges() {
        if let Some(c) = neck_class(page, a, b).expect("edge of the page graph") {
            twists.push(c);
        }
    }
    Factorization::new(twists)
}

/// The labeled holes `v_j^s` (`j = 1..k`, `s = 1..3`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MarkedHoles {
    marks: Vec<[HoleId; 3]>,
}

impl MarkedHoles {
    pub fn new(marks: Vec<[HoleId; 3]>) -> Self {
        MarkedHoles { marks }
    }

    pub fn k(&self) -> usize {
        self.marks.len()
    }

    /// `v_j^s`, both indices 1-based.
    pub fn mark(&self, j: usize, s: usize) -> HoleId {
        self.marks[j - 1][s - 1]
    }

    pub fn domain(&self, j: usize) -> [HoleId; 3] {
        self.marks[j - 1]
    }

    /// All `(j, s, hole)` triples in order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, HoleId)> + '_ {
        self.marks
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.iter().enumerate().map(move |(r, &h)| (i + 1, r + 1, h)))
    }

    /// Marks with domain index at least `j`.
    pub fn from_index(&self, j: usize) -> Vec<HoleId> {
        self.marks[j.saturating_sub(1)..].iter().flatten().copied().collect()
    }
}

/// Picks three holes in every `V_j`, never two in the same branch of `R_j`:
/// holes of `E_j` first (lowest ids), then one per branch taken by ascending
/// root id, using the lowest-id hole among the deepest hole-carrying vertices
/// of that branch.
pub fn select_marked_holes(page: &PlanarPage) -> Result<MarkedHoles, OpenBookError> {
    let arr = page.arrangement();
    let g = page.graph();
    let mut marks = Vec::with_capacity(arr.k());
    for j in 1..=arr.k() {
        let e = arr.chain_vertex(j);
        let mut eligible = page.holes_of_vertex(e);
        let depth = g.distances_from(e);
        for (_, branch) in arr.branches(g, j) {
            let pick = page
                .holes
                .iter()
                .filter(|h| branch.contains(&h.owner))
                .max_by(|x, y| depth[&x.owner].cmp(&depth[&y.owner]).then(y.id.cmp(&x.id)));
            eligible.extend(pick.map(|h| h.id));
        }
        if eligible.len() < 3 {
            return Err(OpenBookError::TooFewEligibleHoles {
                domain: j,
                available: eligible.len(),
            });
        }
        marks.push([eligible[0], eligible[1], eligible[2]]);
    }
    Ok(MarkedHoles { marks })
}

/// Caps the given disk holes: they leave the page and every class, and classes
/// left empty disappear. Capping exactly the holes of `E_k ∪ R_k` (with `k >= 2`)
/// turns the page into the page of the reduced graph `G'` with the truncated
/// arrangement; any other set keeps graph and arrangement as they are.
pub fn cap_holes(
    page: &PlanarPage,
    f: &Factorization,
    capped: &BTreeSet<HoleId>,
) -> Result<(PlanarPage, Factorization), OpenBookError> {
    if capped.contains(&OUTER_HOLE) {
        return Err(OpenBookError::CapsOuter);
    }
    if let Some(&h) = capped.iter().find(|&&h| page.hole(h).is_none()) {
        return Err(OpenBookError::UnknownHole(h));
    }
    let arr = page.arrangement();
    let k = arr.k();
    let last_domain: BTreeSet<HoleId> = page.holes_in_domain(k).into_iter().collect();

    let mut next = page.clone();
    next.holes.retain(|h| !capped.contains(&h.id));
    next.domains.retain(|h, _| !capped.contains(h));
    if k >= 2 && !capped.is_empty() && *capped == last_domain {
        next.graph = graph::reduce_for_capping(page.graph(), arr)?;
        next.arrangement = arr.truncated(&next.graph)?;
    }
    let twists = f.twists.iter().filter_map(|c| c.without(capped));
    Ok((next, Factorization::new(twists)))
}

/// The holes of `E_k ∪ R_k`, which `cap_holes` removes in the reduction `G -> G'`.
pub fn last_domain_holes(page: &PlanarPage) -> BTreeSet<HoleId> {
    page.holes_in_domain(page.arrangement().k()).into_iter().collect()
}

/// The four boundary classes of the `E_k` sphere: `D_k` (the neck towards
/// `E_{k-1}`, or the outer class when `k = 1`) followed by the other circles.
pub fn last_sphere_classes(page: &PlanarPage) -> Result<(CurveClass, Vec<CurveClass>), OpenBookError> {
    let arr = page.arrangement();
    let k = arr.k();
    let e = arr.last();
    let d_k = if k == 1 {
        page.outer_class()
    } else {
        neck_class(page, arr.chain_vertex(k - 1), e)?
    }
    .ok_or(OpenBookError::EmptyClass)?;
    let mut others: Vec<CurveClass> = page
        .holes_of_vertex(e)
        .into_iter()
        .map(CurveClass::singleton)
        .collect();
    for (root, _) in arr.branches(page.graph(), k) {
        others.extend(neck_class(page, e, root)?);
    }
    Ok((d_k, others))
}

/// Lantern relation on the `E_k` sphere when `E_k·E_k = -4`: `D_k` and the three
/// other boundary twists `A, B, C` become `A∪B, A∪C, B∪C`.
pub fn lantern_replace_last(page: &PlanarPage, f: &Factorization) -> Result<Factorization, OpenBookError> {
    let e = page.arrangement().last();
    let weight = page.graph().weight(e).expect("chain vertex in graph");
    if weight != -4 {
        return Err(OpenBookError::NotMinusFour { vertex: e, weight });
    }
    let (d_k, others) = last_sphere_classes(page)?;
    let [a, b, c]: [CurveClass; 3] = others
        .try_into()
        .map_err(|_| OpenBookError::NotMinusFour { vertex: e, weight })?;
    let added = [a.union(&b), a.union(&c), b.union(&c)];
    f.replace(&[d_k, a, b, c], &added)
}
