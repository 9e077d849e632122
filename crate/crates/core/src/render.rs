//! Output documents. Every JSON document is a struct, so keys come out in
//! declaration order. JSON is one compact line; every rendering ends with a
//! newline.

use std::fmt::Write as _;

use serde::Serialize;

use crate::graph::{Arrangement, ValidationReport, VertexId};
use crate::multiplicity::MultiplicityProfile;
use crate::open_book::{Factorization, HoleId, MarkedHoles, PlanarPage};
use crate::solver::{ClassificationReport, Orbit, SolutionSet, SolveStatus};
use crate::verify::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoleDoc {
    pub id: HoleId,
    pub owner: VertexId,
    pub domain: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationDoc {
    pub holes: Vec<HoleDoc>,
    pub outer: VertexId,
    pub twists: Vec<Vec<HoleId>>,
}

impl FactorizationDoc {
    pub fn new(page: &PlanarPage, f: &Factorization) -> Self {
        FactorizationDoc {
            holes: page
                .holes()
                .iter()
                .map(|h| HoleDoc {
                    id: h.id,
                    owner: h.owner,
                    domain: page.domain_of(h.id).expect("page hole has a domain"),
                })
                .collect(),
            outer: page.outer().owner,
            twists: f.to_vecs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpenBookDoc {
    #[serde(flatten)]
    pub standard: FactorizationDoc,
    pub marks: Option<MarkedHoles>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSetDoc {
    pub status: SolveStatus,
    pub count: usize,
    pub nodes: u64,
    pub solutions: Vec<Vec<Vec<HoleId>>>,
    pub classification: ClassificationReport,
}

impl SolutionSetDoc {
    pub fn new(sols: &SolutionSet, classification: ClassificationReport) -> Self {
        SolutionSetDoc {
            status: sols.status,
            count: sols.solutions.len(),
            nodes: sols.nodes,
            solutions: sols.solutions.iter().map(Factorization::to_vecs).collect(),
            classification,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDoc {
    pub complete: bool,
    pub size: usize,
    pub members: Vec<Vec<Vec<HoleId>>>,
}

impl From<&Orbit> for OrbitDoc {
    fn from(o: &Orbit) -> Self {
        OrbitDoc {
            complete: o.complete,
            size: o.members.len(),
            members: o.members.iter().map(Factorization::to_vecs).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidateDoc {
    pub no_bad_vertices: ValidationReport,
    pub hypotheses: ValidationReport,
    pub passed: bool,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn ids<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn twists_line(t: &[Vec<HoleId>]) -> String {
    let parts: Vec<String> = t.iter().map(|c| format!("{{{}}}", ids(c.iter()).replace(' ', ","))).collect();
    format!("[{}]", parts.join(" "))
}

pub fn validate_text(d: &ValidateDoc) -> String {
    let line = |name: &str, r: &ValidationReport| {
        if r.passed {
            format!("{name}: pass\n")
        } else {
            format!("{name}: FAIL (vertices {})\n", ids(&r.offending))
        }
    };
    let mut s = line("no bad vertices", &d.no_bad_vertices);
    s += &line("weight hypotheses", &d.hypotheses);
    s
}

pub fn arrangement_text(a: &Arrangement) -> String {
    let mut s = format!("chain: {}\n", ids(a.chain()));
    for j in 2..=a.k() {
        let r = a.satellites(j);
        let _ = writeln!(s, "R_{j}: {}", if r.is_empty() { "-".to_string() } else { ids(r) });
    }
    s
}

pub fn openbook_text(d: &OpenBookDoc) -> String {
    let f = &d.standard;
    let mut s = format!("outer boundary: vertex {}\nholes:\n", f.outer);
    for h in &f.holes {
        let _ = writeln!(s, "  {} owner {} domain {}", h.id, h.owner, h.domain);
    }
    let _ = writeln!(s, "standard ({} twists): {}", f.twists.len(), twists_line(&f.twists));
    match &d.marks {
        Some(m) => {
            for j in 1..=m.k() {
                let _ = writeln!(s, "marks V_{j}: {}", ids(m.domain(j)));
            }
        }
        None => s += "marks: unavailable\n",
    }
    s
}

pub fn profile_text(p: &MultiplicityProfile) -> String {
    let mut s = String::from("single:\n");
    for (h, m) in p.singles() {
        let _ = writeln!(s, "  m({h}) = {m}");
    }
    s += "joint:\n";
    for ((a, b), m) in p.joints() {
        if *m > 0 {
            let _ = writeln!(s, "  m({a},{b}) = {m}");
        }
    }
    s
}

fn status_str(st: SolveStatus) -> &'static str {
    match st {
        SolveStatus::Complete => "complete",
        SolveStatus::TruncatedBySolutions => "truncated-by-solutions",
        SolveStatus::TruncatedByBudget => "truncated-by-budget",
    }
}

pub fn solutions_text(d: &SolutionSetDoc) -> String {
    let mut s = format!(
        "status: {}\ncount: {}\nnodes: {}\n",
        status_str(d.status),
        d.count,
        d.nodes
    );
    for (sol, flags) in d.solutions.iter().zip(&d.classification.solutions) {
        let mut tags = Vec::new();
        for (on, tag) in [
            (flags.is_standard, "standard"),
            (flags.has_outer, "outer"),
            (flags.f1, "F1"),
            (flags.f2, "F2"),
            (flags.in_lantern_orbit, "orbit"),
        ] {
            if on {
                tags.push(tag);
            }
        }
        let _ = writeln!(s, "{} {}", twists_line(sol), tags.join(","));
    }
    let verdict = serde_json::to_value(d.classification.verdict).expect("verdict serializes");
    let _ = writeln!(s, "verdict: {}", verdict.as_str().unwrap_or_default());
    s
}

pub fn orbit_text(d: &OrbitDoc) -> String {
    let mut s = format!("size: {}\ncomplete: {}\n", d.size, d.complete);
    for m in &d.members {
        let _ = writeln!(s, "{}", twists_line(m));
    }
    s
}

pub fn report_text(r: &VerificationReport) -> String {
    let mut s = format!("input: {} vertices, {} edges, weights", r.input.vertices, r.input.edges);
    for (w, n) in &r.input.weights {
        let _ = write!(s, " {w}x{n}");
    }
    s.push('\n');
    let hyp = serde_json::to_value(r.hypotheses).expect("status serializes");
    let _ = write!(s, "hypotheses: {}", hyp.as_str().unwrap_or_default());
    if !r.offending.is_empty() {
        let _ = write!(s, " (vertices {})", ids(&r.offending));
    }
    s.push('\n');
    if let Some(a) = &r.arrangement {
        s += &arrangement_text(a);
    }
    if let Some(p) = &r.page {
        let _ = writeln!(
            s,
            "page: {} holes, per domain {}, {} standard twists",
            p.holes,
            ids(&p.holes_per_domain),
            p.standard_twists
        );
    }
    if let Some(d) = &r.profile_digest {
        let _ = writeln!(s, "profile sha256: {d}");
    }
    if let Some(c) = &r.checks {
        let min = match c.min_formula {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "n/a",
        };
        let _ = writeln!(s, "min formula: {min}, bounds: {}", if c.bounds { "pass" } else { "FAIL" });
    }
    if let Some(sv) = &r.solver {
        let _ = writeln!(s, "solver: {}, {} solution(s), {} nodes", status_str(sv.status), sv.count, sv.nodes);
    }
    let _ = writeln!(s, "verdict: {}", r.verdict.as_str());
    if r.alarm {
        s += "ALARM: a non-standard factorization exists under the strict hypotheses\n";
    }
    if let Some(t) = &r.timing {
        let _ = writeln!(
            s,
            "timing ms: validate {:.3}, page {:.3}, profile {:.3}, solve {:.3}, classify {:.3}",
            t.validate_ms, t.page_ms, t.profile_ms, t.solve_ms, t.classify_ms
        );
    }
    s
}
