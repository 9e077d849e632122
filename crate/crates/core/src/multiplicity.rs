//! Multiplicity fingerprints of a factorization: how many twists enclose each
//! hole, and each pair of holes. Lantern relations leave both counts unchanged,
//! so they are invariants of the monodromy rather than of one factorization.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::open_book::{Factorization, HoleId, MarkedHoles, PlanarPage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiplicityError {
    #[error("hole {0} is not in the hole universe")]
    UnknownHole(HoleId),
    #[error("profiles are over different hole universes")]
    UniverseMismatch,
}

/// `m(v)` for every hole and `m(v, w)` for every unordered pair of distinct
/// holes of a fixed universe, zeros included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplicityProfile {
    single: BTreeMap<HoleId, u32>,
    joint: BTreeMap<(HoleId, HoleId), u32>,
}

fn key(a: HoleId, b: HoleId) -> (HoleId, HoleId) {
    (a.min(b), a.max(b))
}

impl MultiplicityProfile {
    /// All-zero profile over `holes`.
    pub fn zero(holes: &[HoleId]) -> Self {
        let mut ids: Vec<HoleId> = holes.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let single = ids.iter().map(|&h| (h, 0)).collect();
        let mut joint = BTreeMap::new();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                joint.insert((a, b), 0);
            }
        }
        MultiplicityProfile { single, joint }
    }

    /// Builds a target profile from explicit counts; unspecified entries are 0.
    pub fn from_counts(
        holes: &[HoleId],
        single: impl IntoIterator<Item = (HoleId, u32)>,
        joint: impl IntoIterator<Item = ((HoleId, HoleId), u32)>,
    ) -> Result<Self, MultiplicityError> {
        let mut p = Self::zero(holes);
        for (h, m) in single {
            *p.single.get_mut(&h).ok_or(MultiplicityError::UnknownHole(h))? = m;
        }
        for ((a, b), m) in joint {
            p.set_joint(a, b, m)?;
        }
        Ok(p)
    }

    pub fn holes(&self) -> Vec<HoleId> {
        self.single.keys().copied().collect()
    }

    pub fn single(&self, h: HoleId) -> u32 {
        self.single.get(&h).copied().unwrap_or(0)
    }

    pub fn joint(&self, a: HoleId, b: HoleId) -> u32 {
        self.joint.get(&key(a, b)).copied().unwrap_or(0)
    }

    pub fn singles(&self) -> &BTreeMap<HoleId, u32> {
        &self.single
    }

    pub fn joints(&self) -> &BTreeMap<(HoleId, HoleId), u32> {
        &self.joint
    }

    pub fn set_joint(&mut self, a: HoleId, b: HoleId, m: u32) -> Result<(), MultiplicityError> {
        for h in [a, b] {
            if !self.single.contains_key(&h) {
                return Err(MultiplicityError::UnknownHole(h));
            }
        }
        if a == b {
            return Err(MultiplicityError::UnknownHole(a));
        }
        self.joint.insert(key(a, b), m);
        Ok(())
    }

    /// `Σ_v m(v)`; equals the sum of class sizes of a generating factorization.
    pub fn mass(&self) -> u64 {
        self.single.values().map(|&m| m as u64).sum()
    }

    /// First pair violating `m(v, w) <= min(m(v), m(w))`, if any.
    pub fn inconsistent_pair(&self) -> Option<(HoleId, HoleId)> {
        self.joint
            .iter()
            .find(|(&(a, b), &m)| m > self.single(a).min(self.single(b)))
            .map(|(&p, _)| p)
    }

    /// Restriction to a sub-universe.
    pub fn restricted(&self, holes: &[HoleId]) -> Result<Self, MultiplicityError> {
        let mut p = Self::zero(holes);
        for h in holes {
            let m = *self.single.get(h).ok_or(MultiplicityError::UnknownHole(*h))?;
            p.single.insert(*h, m);
        }
        for (k, m) in p.joint.iter_mut() {
            *m = self.joint[k];
        }
        Ok(p)
    }
}

impl Serialize for MultiplicityProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            single: Vec<(HoleId, u32)>,
            joint: Vec<(HoleId, HoleId, u32)>,
        }
        Doc {
            single: self.single.iter().map(|(&h, &m)| (h, m)).collect(),
            joint: self.joint.iter().map(|(&(a, b), &m)| (a, b, m)).collect(),
        }
        .serialize(s)
    }
}

/// Counts, over the given hole universe, how many classes of `f` contain each
/// hole and each pair.
pub fn profile(f: &Factorization, holes: &[HoleId]) -> Result<MultiplicityProfile, MultiplicityError> {
    let mut p = MultiplicityProfile::zero(holes);
    for class in f.twists() {
        let hs = class.holes();
        for (i, &a) in hs.iter().enumerate() {
            *p.single.get_mut(&a).ok_or(MultiplicityError::UnknownHole(a))? += 1;
            for &b in &hs[i + 1..] {
                *p.joint.get_mut(&(a, b)).ok_or(MultiplicityError::UnknownHole(b))? += 1;
            }
        }
    }
    Ok(p)
}

/// Profile of `f` over the disk holes of `page`.
pub fn page_profile(page: &PlanarPage, f: &Factorization) -> Result<MultiplicityProfile, MultiplicityError> {
    profile(f, &page.hole_ids())
}

pub fn profiles_equal(a: &MultiplicityProfile, b: &MultiplicityProfile) -> Result<bool, MultiplicityError> {
    if a.single.keys().ne(b.single.keys()) {
        return Err(MultiplicityError::UniverseMismatch);
    }
    Ok(a == b)
}

/// Depth of a hole's owner below `E_1`.
fn owner_depth(page: &PlanarPage, h: HoleId) -> usize {
    let e1 = page.arrangement().first();
    let owner = page.owner(h).expect("hole of the page");
    page.graph().distance(e1, owner).expect("tree is connected")
}

/// Standard-factorization value of `m(v)`: `2 + dist(E_1, owner(v))`.
pub fn closed_form_single(page: &PlanarPage, h: HoleId) -> u32 {
    2 + owner_depth(page, h) as u32
}

/// Standard-factorization value of `m(v, w)`: `1 + dist(E_1, meet)`, where
/// `meet` is the vertex where the root paths of the two owners part.
pub fn closed_form_joint(page: &PlanarPage, a: HoleId, b: HoleId) -> u32 {
    let g = page.graph();
    let (oa, ob) = (page.owner(a).unwrap(), page.owner(b).unwrap());
    let apart = g.distance(oa, ob).unwrap();
    let meet_depth = (owner_depth(page, a) + owner_depth(page, b) - apart) / 2;
    1 + meet_depth as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkRef {
    pub domain: usize,
    pub index: usize,
    pub hole: HoleId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub first: MarkRef,
    pub second: MarkRef,
    pub expected: u32,
    pub actual: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinFormulaReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub violations: Vec<PairViolation>,
}

/// Checks `m(v_i^r, v_j^s) = min(i, j)` over every pair of distinct marks.
pub fn check_min_formula(_page: &PlanarPage, marks: &MarkedHoles, p: &MultiplicityProfile) -> MinFormulaReport {
    let all: Vec<(usize, usize, HoleId)> = marks.iter().collect();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for (x, &(i, r, a)) in all.iter().enumerate() {
        for &(j, s, b) in &all[x + 1..] {
            pairs_checked += 1;
            let expected = i.min(j) as u32;
            let actual = p.joint(a, b);
            if actual != expected {
                violations.push(PairViolation {
                    first: MarkRef { domain: i, index: r, hole: a },
                    second: MarkRef { domain: j, index: s, hole: b },
                    expected,
                    actual,
                });
            }
        }
    }
    MinFormulaReport {
        passed: violations.is_empty(),
        pairs_checked,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BoundViolation {
    /// `m(w) > 2j` for a hole `w` in `V_j`.
    DomainBound { hole: HoleId, domain: usize, multiplicity: u32, limit: u32 },
    /// `m(v) != 2 + dist(E_1, owner(v))`.
    ClosedForm { hole: HoleId, multiplicity: u32, expected: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub passed: bool,
    pub violations: Vec<BoundViolation>,
}

/// Checks `m(w) <= 2j` on every `V_j` and the closed form of `m(v)`. For the
/// last domain `V_k` the first check is the bound `m(v) <= 2k` on the holes of
/// `E_k` and its satellites.
pub fn check_bounds(page: &PlanarPage, p: &MultiplicityProfile) -> BoundsReport {
    let mut violations = Vec::new();
    for hole in page.holes() {
        let h = hole.id;
        let j = page.domain_of(h).expect("every disk hole has a domain");
        let m = p.single(h);
        let limit = 2 * j as u32;
        if m > limit {
            violations.push(BoundViolation::DomainBound { hole: h, domain: j, multiplicity: m, limit });
        }
        let expected = closed_form_single(page, h);
        if m != expected {
            violations.push(BoundViolation::ClosedForm { hole: h, multiplicity: m, expected });
        }
    }
    BoundsReport {
        passed: violations.is_empty(),
        violations,
    }
}
