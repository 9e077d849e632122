//! Exhaustive search for every multiset of hole sets with a prescribed
//! multiplicity profile, plus the lantern rewriting system on such multisets.
//!
//! The search fixes the lowest hole `v` that still has residual multiplicity
//! and places, in one go, every remaining class whose smallest hole is `v`.
//! Those classes are produced in non-increasing bitmask order, so each
//! multiset is reached along exactly one branch. A class `{v} ∪ S` is only
//! tried when every pair inside it still has residual joint multiplicity,
//! and a hole `w` whose residual `m(v, w)` equals the number of classes still
//! to place for `v` is forced into all of them.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::multiplicity::MultiplicityProfile;
use crate::open_book::{CurveClass, Factorization, HoleId, MarkedHoles, PlanarPage};

/// Classes are bitmasks over hole indices.
type Mask = u128;
pub const MAX_HOLES: usize = Mask::BITS as usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver config: {0}")]
    InvalidConfig(&'static str),
    #[error("target profile is infeasible: {0}")]
    Infeasible(String),
    #[error("{0} holes exceed the solver limit of {MAX_HOLES}")]
    TooManyHoles(usize),
    #[error("target profile is over a different hole universe")]
    UniverseMismatch,
    #[error("node budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub max_solutions: usize,
    pub node_budget: u64,
    /// Return what was found with a truncated status when the budget runs
    /// out; otherwise budget exhaustion is an error.
    pub report_partial: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_solutions: 64,
            node_budget: 100_000_000,
            report_partial: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.max_solutions == 0 {
            return Err(SolverError::InvalidConfig("max_solutions must be positive"));
        }
        if self.node_budget == 0 {
            return Err(SolverError::InvalidConfig("node_budget must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Complete,
    TruncatedBySolutions,
    TruncatedByBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub status: SolveStatus,
    pub nodes: u64,
    pub solutions: Vec<Factorization>,
}

impl SolutionSet {
    pub fn is_complete(&self) -> bool {
        self.status == SolveStatus::Complete
    }
}

struct Search<'a> {
    n: usize,
    single: Vec<u32>,
    pair: Vec<u32>,
    stack: Vec<Mask>,
    found: Vec<Vec<Mask>>,
    nodes: u64,
    cfg: &'a SolverConfig,
    halted: Option<SolveStatus>,
}

impl Search<'_> {
    fn pair(&self, a: usize, b: usize) -> u32 {
        self.pair[a * self.n + b]
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            self.halted = Some(SolveStatus::TruncatedByBudget);
        }
        self.halted.is_none()
    }

    fn next_hole(&mut self) {
        if !self.tick() {
            return;
        }
        match (0..self.n).find(|&v| self.single[v] > 0) {
            Some(v) => self.fill_group(v, Mask::MAX),
            None => {
                if self.pair.iter().any(|&m| m > 0) {
                    return;
                }
                if self.found.len() >= self.cfg.max_solutions {
                    self.halted = Some(SolveStatus::TruncatedBySolutions);
                    return;
                }
                self.found.push(self.stack.clone());
            }
        }
    }

    /// Places the remaining classes whose minimum is `v`, each at most `bound`.
    fn fill_group(&mut self, v: usize, bound: Mask) {
        if !self.tick() {
            return;
        }
        let slots = self.single[v];
        if slots == 0 {
            if (0..self.n).any(|w| self.pair(v, w) > 0) {
                return;
            }
            self.next_hole();
            return;
        }
        let mut forced: Mask = 0;
        let mut allowed = Vec::new();
        for w in (v + 1..self.n).rev() {
            let m = self.pair(v, w);
            if m > slots {
                return;
            }
            if m == slots {
                forced |= 1 << w;
            }
            if m > 0 {
                allowed.push(w);
            }
        }
        let tight = bound != Mask::MAX;
        self.extend_class(v, bound, forced, &allowed, 0, 0, tight, v + 1..self.n);
    }

    /// Depth-first over `allowed` (descending hole index): include before
    /// exclude, so classes come out in descending mask order. `tight` means the
    /// bits decided so far equal those of `bound`; `above` is the range of
    /// positions not yet compared against `bound`.
    #[allow(clippy::too_many_arguments)]
    fn extend_class(
        &mut self,
        v: usize,
        bound: Mask,
        forced: Mask,
        allowed: &[usize],
        idx: usize,
        mask: Mask,
        mut tight: bool,
        above: std::ops::Range<usize>,
    ) {
        if self.halted.is_some() {
            return;
        }
        let lower = allowed.get(idx).map_or(v, |&w| w);
        // skipped positions in (lower, above.end) are zero in `mask`
        if tight {
            let skipped = range_mask(lower + 1, above.end);
            if bound & skipped != 0 {
                tight = false;
            }
        }
        let Some(&w) = allowed.get(idx) else {
            let class = mask | (1 << v);
            if tight && bound & (1 << v) == 0 {
                return;
            }
            debug_assert!(class <= bound);
            self.place(v, class);
            return;
        };
        let bit: Mask = 1 << w;
        let bound_has = bound & bit != 0;

        let clique = {
            let mut rest = mask;
            let mut ok = self.single[w] > 0;
            while ok && rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                ok = self.pair(w, x) > 0;
            }
            ok
        };
        if clique && !(tight && !bound_has) {
            self.extend_class(v, bound, forced, allowed, idx + 1, mask | bit, tight, v..w);
        }
        if forced & bit == 0 {
            self.extend_class(v, bound, forced, allowed, idx + 1, mask, tight && !bound_has, v..w);
        }
    }

    /// Adds `delta` to the residual of every hole and pair inside `class`.
    fn adjust(&mut self, class: Mask, delta: i32) {
        let n = self.n;
        let mut rest = class;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.single[a] = self.single[a].wrapping_add_signed(delta);
            let mut later = rest;
            while later != 0 {
                let b = later.trailing_zeros() as usize;
                later &= later - 1;
                self.pair[a * n + b] = self.pair[a * n + b].wrapping_add_signed(delta);
                self.pair[b * n + a] = self.pair[b * n + a].wrapping_add_signed(delta);
            }
        }
    }

    fn place(&mut self, v: usize, class: Mask) {
        self.adjust(class, -1);
        let n = self.n;
        let mut rest = class;
        let mut consistent = true;
        while consistent && rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            consistent = self.pair[a * n..(a + 1) * n].iter().all(|&m| m <= self.single[a]);
        }
        if consistent {
            self.stack.push(class);
            self.fill_group(v, class);
            self.stack.pop();
        }
        self.adjust(class, 1);
    }
}

/// Dense incidence counts of a list of classes.
fn counts(n: usize, classes: &[Mask]) -> (Vec<u32>, Vec<u32>) {
    let mut single = vec![0u32; n];
    let mut pair = vec![0u32; n * n];
    for &c in classes {
        let members = bits(c);
        for (i, &a) in members.iter().enumerate() {
            single[a] += 1;
            for &b in &members[i + 1..] {
                pair[a * n + b] += 1;
                pair[b * n + a] += 1;
            }
        }
    }
    (single, pair)
}

fn range_mask(lo: usize, hi: usize) -> Mask {
    if lo >= hi {
        return 0;
    }
    let upto = |k: usize| if k >= MAX_HOLES { Mask::MAX } else { (1 << k) - 1 };
    upto(hi) & !upto(lo)
}

fn bits(mut m: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Every multiset of nonempty subsets of `holes` whose profile is `target`,
/// in canonical order.
pub fn enumerate_candidates(
    holes: &[HoleId],
    target: &MultiplicityProfile,
    cfg: &SolverConfig,
) -> Result<SolutionSet, SolverError> {
    cfg.validate()?;
    let mut ids: Vec<HoleId> = holes.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids != target.holes() {
        return Err(SolverError::UniverseMismatch);
    }
    let n = ids.len();
    if n > MAX_HOLES {
        return Err(SolverError::TooManyHoles(n));
    }
    if let Some((a, b)) = target.inconsistent_pair() {
        return Err(SolverError::Infeasible(format!(
            "m({a},{b}) = {} exceeds min(m({a}), m({b})) = {}",
            target.joint(a, b),
            target.single(a).min(target.single(b))
        )));
    }

    let mut pair = vec![0u32; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let m = target.joint(ids[i], ids[j]);
            pair[i * n + j] = m;
            pair[j * n + i] = m;
        }
    }
    let single: Vec<u32> = ids.iter().map(|&h| target.single(h)).collect();
    let expected = (single.clone(), pair.clone());
    let mut search = Search {
        n,
        single,
        pair,
        stack: Vec::new(),
        found: Vec::new(),
        nodes: 0,
        cfg,
        halted: None,
    };
    search.next_hole();

    let status = search.halted.unwrap_or(SolveStatus::Complete);
    if status == SolveStatus::TruncatedByBudget && !cfg.report_partial {
        return Err(SolverError::BudgetExceeded { nodes: search.nodes });
    }
    let mut solutions: Vec<Factorization> = search
        .found
        .iter()
        .map(|classes| {
            // soundness: re-count every emitted solution from scratch
            assert!(counts(n, classes) == expected, "solver emitted a solution with a different profile");
            Factorization::new(classes.iter().map(|&m| {
                CurveClass::new(bits(m).into_iter().map(|i| ids[i])).expect("classes contain their minimum")
            }))
        })
        .collect();
    solutions.sort();
    Ok(SolutionSet {
        status,
        nodes: search.nodes,
        solutions,
    })
}

/// Every two classes nested or disjoint.
pub fn is_laminar(f: &Factorization) -> bool {
    let t = f.twists();
    t.iter()
        .enumerate()
        .all(|(i, a)| t[i + 1..].iter().all(|b| a.is_compatible(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LanternDirection {
    /// `{A, B, C, A∪B∪C} -> {A∪B, A∪C, B∪C}`
    Forward,
    /// `{A∪B, A∪C, B∪C} -> {A, B, C, A∪B∪C}`
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanternMove {
    pub direction: LanternDirection,
    pub removed: Vec<CurveClass>,
    pub added: Vec<CurveClass>,
    pub result: Factorization,
}

/// All homological lantern rewrites of `f` in both directions, one per
/// distinct resulting factorization.
pub fn lantern_moves(f: &Factorization) -> Vec<LanternMove> {
    let distinct: Vec<&CurveClass> = f.distinct().into_iter().map(|(c, _)| c).collect();
    let mut moves: Vec<LanternMove> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |direction, removed: Vec<CurveClass>, added: Vec<CurveClass>| {
        let result = f.replace(&removed, &added).expect("removed classes are present");
        if seen.insert(result.clone()) {
            moves.push(LanternMove {
                direction,
                removed,
                added,
                result,
            });
        }
    };

    for &u in &distinct {
        let parts: Vec<&CurveClass> = distinct
            .iter()
            .copied()
            .filter(|c| c.len() < u.len() && c.is_subset(u))
            .collect();
        for (i, a) in parts.iter().enumerate() {
            for (j, b) in parts.iter().enumerate().skip(i + 1) {
                if !a.is_disjoint(b) {
                    continue;
                }
                for c in parts.iter().skip(j + 1) {
                    if a.is_disjoint(c) && b.is_disjoint(c) && a.len() + b.len() + c.len() == u.len() {
                        push(
                            LanternDirection::Forward,
                            vec![(*a).clone(), (*b).clone(), (*c).clone(), u.clone()],
                            vec![a.union(b), a.union(c), b.union(c)],
                        );
                    }
                }
            }
        }
    }

    for (i, x) in distinct.iter().enumerate() {
        for (j, y) in distinct.iter().enumerate().skip(i + 1) {
            let Some(a) = x.intersection(y) else { continue };
            for z in distinct.iter().skip(j + 1) {
                let (Some(b), Some(c)) = (x.intersection(z), y.intersection(z)) else {
                    continue;
                };
                let pairwise_disjoint = a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c);
                if pairwise_disjoint && a.union(&b) == **x && a.union(&c) == **y && b.union(&c) == **z {
                    let whole = a.union(&b).union(&c);
                    push(
                        LanternDirection::Backward,
                        vec![(*x).clone(), (*y).clone(), (*z).clone()],
                        vec![a.clone(), b, c, whole],
                    );
                }
            }
        }
    }
    moves
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub complete: bool,
    pub members: BTreeSet<Factorization>,
}

/// Breadth-first closure of `f` under [`lantern_moves`], stopping once
/// `node_cap` states have been collected.
pub fn lantern_orbit(f: &Factorization, node_cap: usize) -> Orbit {
    let mut members = BTreeSet::from([f.clone()]);
    let mut queue = VecDeque::from([f.clone()]);
    while let Some(state) = queue.pop_front() {
        for m in lantern_moves(&state) {
            if members.contains(&m.result) {
                continue;
            }
            if members.len() >= node_cap {
                return Orbit {
                    complete: false,
                    members,
                };
            }
            members.insert(m.result.clone());
            queue.push_back(m.result);
        }
    }
    Orbit {
        complete: true,
        members,
    }
}

fn covers(class: &CurveClass, holes: &[HoleId]) -> bool {
    holes.iter().all(|&h| class.contains(h))
}

/// A nested chain `D_1 ⊇ ... ⊇ D_len` of distinct twists of `f`, with
/// `D_1` the class of every hole of `universe` and `D_j` enclosing every mark
/// of index at least `j`.
fn has_marked_chain(f: &Factorization, marks: &MarkedHoles, universe: &[HoleId], len: usize) -> bool {
    if len == 0 {
        return true;
    }
    let distinct = f.distinct();
    let need: Vec<Vec<HoleId>> = (1..=len).map(|j| marks.from_index(j)).collect();
    // reachable[i][u]: some valid chain D_1..D_{i+1} ends with value u used `u.1` times
    let mut frontier: BTreeSet<(usize, usize)> = distinct
        .iter()
        .enumerate()
        .filter(|(_, (c, _))| c.holes() == universe && covers(c, &need[0]))
        .map(|(u, _)| (u, 1))
        .collect();
    for step in need.iter().skip(1) {
        let mut next = BTreeSet::new();
        for &(u, used) in &frontier {
            let (cu, mult) = distinct[u];
            if used < mult && covers(cu, step) {
                next.insert((u, used + 1));
            }
            for (w, (cw, _)) in distinct.iter().enumerate() {
                if w != u && cw.is_subset(cu) && covers(cw, step) {
                    next.insert((w, 1));
                }
            }
        }
        frontier = next;
    }
    !frontier.is_empty()
}

/// Twists `D_1 ⊇ ... ⊇ D_k` with `D_1` enclosing every hole and `D_j`
/// enclosing `v_i^s` for all `i >= j`.
pub fn has_property_f1(f: &Factorization, marks: &MarkedHoles, universe: &[HoleId]) -> bool {
    has_marked_chain(f, marks, universe, marks.k())
}

/// `D_1 ⊇ ... ⊇ D_{k-1}` as in F1, plus three twists where the `s`-th encloses
/// the two marks of `V_k` other than `v_k^s` and not `v_k^s` itself.
pub fn has_property_f2(f: &Factorization, marks: &MarkedHoles, universe: &[HoleId]) -> bool {
    let k = marks.k();
    if k == 0 || !has_marked_chain(f, marks, universe, k - 1) {
        return false;
    }
    let last = marks.domain(k);
    (0..3).all(|s| {
        f.twists().iter().any(|c| {
            !c.contains(last[s]) && (0..3).filter(|&r| r != s).all(|r| c.contains(last[r]))
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniqueStandard,
    StandardPlusLantern,
    Other,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionFlags {
    pub is_standard: bool,
    pub has_outer: bool,
    #[serde(rename = "F1")]
    pub f1: bool,
    #[serde(rename = "F2")]
    pub f2: bool,
    pub in_lantern_orbit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub solutions: Vec<SolutionFlags>,
    pub orbit_size: usize,
    pub orbit_complete: bool,
    pub verdict: Verdict,
}

/// Flags every solution against the standard factorization and decides:
/// only the standard one → unique-standard; the standard one plus members of
/// its lantern orbit → standard-plus-lantern; anything else → other. An
/// incomplete search is inconclusive. Without marks, F1/F2 are reported false.
pub fn classify_solutions(
    page: &PlanarPage,
    sols: &SolutionSet,
    standard: &Factorization,
    marks: Option<&MarkedHoles>,
    orbit_cap: usize,
) -> ClassificationReport {
    let universe = page.hole_ids();
    let outer = page.outer_class();
    let orbit = lantern_orbit(standard, orbit_cap);
    let solutions: Vec<SolutionFlags> = sols
        .solutions
        .iter()
        .map(|s| SolutionFlags {
            is_standard: s == standard,
            has_outer: outer.as_ref().is_some_and(|o| s.contains(o)),
            f1: marks.is_some_and(|m| has_property_f1(s, m, &universe)),
            f2: marks.is_some_and(|m| has_property_f2(s, m, &universe)),
            in_lantern_orbit: orbit.members.contains(s),
        })
        .collect();

    let verdict = if !sols.is_complete() {
        Verdict::Inconclusive
    } else if !solutions.iter().any(|s| s.is_standard) {
        Verdict::Other
    } else if solutions.len() == 1 {
        Verdict::UniqueStandard
    } else if solutions.iter().all(|s| s.in_lantern_orbit) {
        Verdict::StandardPlusLantern
    } else {
        Verdict::Other
    };
    ClassificationReport {
        solutions,
        orbit_size: orbit.members.len(),
        orbit_complete: orbit.complete,
        verdict,
    }
}
