#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fillings::graph::{arrange_conveniently, validate_no_bad_vertices, ResolutionGraph, VertexId};
use fillings::multiplicity::MultiplicityProfile;
use fillings::open_book::{Factorization, HoleId};
use fillings::solver::{enumerate_candidates, SolveStatus, SolverConfig};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Tree from a Prüfer sequence over `1..=n`.
pub fn prufer_tree(n: usize, seq: &[usize], weights: &[i32]) -> ResolutionGraph {
    assert_eq!(seq.len() + 2, n.max(2));
    let mut edges = Vec::new();
    if n == 2 {
        edges.push((1, 2));
    } else if n > 2 {
        let mut degree = vec![1usize; n + 1];
        for &s in seq {
            degree[s] += 1;
        }
        for &s in seq {
            let leaf = (1..=n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf as VertexId, s as VertexId));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0] as VertexId, rest[1] as VertexId));
    }
    ResolutionGraph::new((1..=n).map(|v| (v as VertexId, weights[v - 1])), edges).unwrap()
}

/// Every labeled tree on `n` vertices (`n^(n-2)` of them), all weights `w`.
pub fn all_trees(n: usize, w: i32) -> Vec<ResolutionGraph> {
    let weights = vec![w; n];
    if n <= 2 {
        let g = if n == 1 {
            ResolutionGraph::single(1, w).unwrap()
        } else {
            prufer_tree(2, &[], &weights)
        };
        return vec![g];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let s = code % n + 1;
                    code /= n;
                    s
                })
                .collect();
            prufer_tree(n, &seq, &weights)
        })
        .collect()
}

/// Random tree on `1..=n` with weights drawn from `lo..=hi`.
pub fn random_tree(rng: &mut impl Rng, n: usize, lo: i32, hi: i32) -> ResolutionGraph {
    let mut labels: Vec<VertexId> = (1..=n as VertexId).collect();
    labels.shuffle(rng);
    let edges: Vec<(VertexId, VertexId)> =
        (1..n).map(|i| (labels[rng.gen_range(0..i)], labels[i])).collect();
    ResolutionGraph::new(labels.iter().map(|&v| (v, rng.gen_range(lo..=hi))), edges).unwrap()
}

/// Random tree with at most `max_n` vertices, weights in `lo..=hi`, and no
/// bad vertex.
pub fn random_good_tree(rng: &mut impl Rng, max_n: usize, lo: i32, hi: i32) -> ResolutionGraph {
    loop {
        let n = rng.gen_range(1..=max_n);
        let g = random_tree(rng, n, lo, hi);
        if validate_no_bad_vertices(&g).passed {
            return g;
        }
    }
}

/// Same tree with the last chain vertex set to -4, if that keeps every
/// vertex good.
pub fn relaxed_variant(g: &ResolutionGraph) -> Option<ResolutionGraph> {
    let last = arrange_conveniently(g).last();
    let h = g.with_weight(last, -4).ok()?;
    validate_no_bad_vertices(&h).passed.then_some(h)
}

/// The corpus for the formula checks: 100 strict trees and, where possible,
/// their relaxed-last variants.
pub fn formula_corpus(seed: u64) -> Vec<ResolutionGraph> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..100 {
        let g = random_good_tree(&mut r, 8, -8, -5);
        if let Some(h) = relaxed_variant(&g) {
            out.push(h);
        }
        out.push(g);
    }
    out
}

/// All-pairs distances by Floyd–Warshall, indexed by vertex id.
pub struct Distances {
    ids: Vec<VertexId>,
    d: Vec<Vec<usize>>,
}

impl Distances {
    pub fn new(g: &ResolutionGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let n = ids.len();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        let pos: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for (a, b) in g.edges() {
            d[pos[&a]][pos[&b]] = 1;
            d[pos[&b]][pos[&a]] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        Distances { ids, d }
    }

    fn at(&self, v: VertexId) -> usize {
        self.ids.binary_search(&v).unwrap()
    }

    pub fn get(&self, a: VertexId, b: VertexId) -> usize {
        self.d[self.at(a)][self.at(b)]
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }
}

/// Independent recomputation of the canonical arrangement: lexicographically
/// least diametral pair, then the shortest prefix of its path after which
/// everything behind `E_j` is within `j - 1`.
pub fn arrangement_oracle(g: &ResolutionGraph) -> (Vec<VertexId>, BTreeMap<usize, BTreeSet<VertexId>>) {
    let dist = Distances::new(g);
    let ids = dist.ids().to_vec();
    let mut best = (0, ids[0], ids[0]);
    for &a in &ids {
        for &b in &ids {
            let d = dist.get(a, b);
            if a <= b && (d > best.0 || (d == best.0 && (a, b) < (best.1, best.2))) {
                best = (d, a, b);
            }
        }
    }
    let (diam, a, b) = best;
    let mut path: Vec<VertexId> = ids
        .iter()
        .copied()
        .filter(|&v| dist.get(a, v) + dist.get(v, b) == diam)
        .collect();
    path.sort_by_key(|&v| dist.get(a, v));

    let behind = |p: VertexId, v: VertexId| dist.get(a, v) == dist.get(a, p) + dist.get(p, v);
    let k = (1..=path.len())
        .find(|&j| {
            let p = path[j - 1];
            ids.iter().all(|&v| !behind(p, v) || dist.get(p, v) < j)
        })
        .unwrap();
    let chain = path[..k].to_vec();
    let mut satellites: BTreeMap<usize, BTreeSet<VertexId>> = (2..=k).map(|j| (j, BTreeSet::new())).collect();
    for &v in &ids {
        if chain.contains(&v) {
            continue;
        }
        let j = (1..=k).min_by_key(|&j| dist.get(chain[j - 1], v)).unwrap();
        assert!(j >= 2, "vertex {v} hangs off E_1");
        satellites.get_mut(&j).unwrap().insert(v);
    }
    (chain, satellites)
}

/// Direct incidence count: `m(v)` and `m(v, w)` of `f`.
pub fn count_profile(f: &Factorization, holes: &[HoleId]) -> (BTreeMap<HoleId, u32>, BTreeMap<(HoleId, HoleId), u32>) {
    let mut single: BTreeMap<HoleId, u32> = holes.iter().map(|&h| (h, 0)).collect();
    let mut joint = BTreeMap::new();
    for (i, &a) in holes.iter().enumerate() {
        for &b in &holes[i + 1..] {
            joint.insert((a, b), 0);
        }
    }
    for c in f.twists() {
        for &a in c.holes() {
            *single.get_mut(&a).unwrap() += 1;
            for &b in c.holes() {
                if a < b {
                    *joint.get_mut(&(a, b)).unwrap() += 1;
                }
            }
        }
    }
    (single, joint)
}

/// Naive enumeration of every multiset of nonempty subsets of `0..n` with
/// per-element incidence exactly `single`, bucketed by the joint counts.
/// Subsets are bitmasks; each multiset is a non-decreasing mask list.
pub fn brute_force_by_joint(n: usize, single: &[u32]) -> HashMap<Vec<u32>, Vec<Vec<u32>>> {
    fn rec(
        n: usize,
        next: u32,
        left: &mut Vec<u32>,
        current: &mut Vec<u32>,
        out: &mut HashMap<Vec<u32>, Vec<Vec<u32>>>,
    ) {
        if left.iter().all(|&x| x == 0) {
            let mut joint = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let both = (1 << a) | (1 << b);
                    joint.push(current.iter().filter(|&&m| m & both == both).count() as u32);
                }
            }
            out.entry(joint).or_default().push(current.clone());
            return;
        }
        for mask in next..(1u32 << n) {
            let fits = (0..n).all(|i| mask & (1 << i) == 0 || left[i] > 0);
            if !fits {
                continue;
            }
            for (i, l) in left.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *l -= 1;
                }
            }
            current.push(mask);
            rec(n, mask, left, current, out);
            current.pop();
            for (i, l) in left.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *l += 1;
                }
            }
        }
    }
    let mut out = HashMap::new();
    rec(n, 1, &mut single.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// A factorization over holes `1..=n` as sorted bitmasks of `0..n`.
pub fn as_masks(f: &Factorization) -> Vec<u32> {
    let mut m: Vec<u32> = f
        .twists()
        .iter()
        .map(|c| c.holes().iter().map(|&h| 1u32 << (h - 1)).sum())
        .collect();
    m.sort_unstable();
    m
}

pub const MAX_M: u32 = 4;

pub fn config() -> SolverConfig {
    SolverConfig {
        max_solutions: usize::MAX,
        node_budget: u64::MAX,
        report_partial: false,
    }
}

pub fn target(n: usize, single: &[u32], joint: &[u32]) -> MultiplicityProfile {
    let holes: Vec<HoleId> = (1..=n as HoleId).collect();
    let mut pairs = Vec::new();
    let mut it = joint.iter();
    for a in 1..=n as HoleId {
        for b in a + 1..=n as HoleId {
            pairs.push(((a, b), *it.next().unwrap()));
        }
    }
    MultiplicityProfile::from_counts(&holes, holes.iter().copied().zip(single.iter().copied()), pairs).unwrap()
}

pub fn solve_masks(n: usize, single: &[u32], joint: &[u32]) -> BTreeSet<Vec<u32>> {
    let p = target(n, single, joint);
    let sols = enumerate_candidates(&p.holes(), &p, &config()).unwrap();
    assert_eq!(sols.status, SolveStatus::Complete);
    let out: BTreeSet<Vec<u32>> = sols.solutions.iter().map(as_masks).collect();
    assert_eq!(out.len(), sols.solutions.len(), "duplicate solutions");
    let mut sorted = sols.solutions.clone();
    sorted.sort();
    assert_eq!(sorted, sols.solutions, "solutions not in canonical order");
    out
}

pub fn singles_vectors(n: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..(MAX_M + 1).pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % (MAX_M + 1);
                code /= MAX_M + 1;
                d
            })
            .collect()
    })
}

/// Every achievable profile over `n` holes with `m(v) <= 4`: the solver's
/// solution set equals the brute-force bucket. Returns (profiles, multisets).
pub fn check_all_achievable(n: usize) -> (usize, usize) {
    let (mut profiles, mut multisets) = (0, 0);
    for single in singles_vectors(n) {
        for (joint, bucket) in brute_force_by_joint(n, &single) {
            let expected: BTreeSet<Vec<u32>> = bucket.into_iter().collect();
            let got = solve_masks(n, &single, &joint);
            assert_eq!(got, expected, "single {single:?} joint {joint:?}");
            profiles += 1;
            multisets += expected.len();
        }
    }
    (profiles, multisets)
}

