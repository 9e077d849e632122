//! The whole pipeline on one graph: hypotheses, arrangement, page, standard
//! factorization, its multiplicity profile, the exhaustive search for other
//! factorizations with that profile, and the resulting verdict.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{
    arrange_conveniently, validate_no_bad_vertices, validate_theorem_hypotheses, Arrangement,
    HypothesisMode, ResolutionGraph, VertexId,
};
use crate::multiplicity::{check_bounds, check_min_formula, page_profile};
use crate::open_book::{build_page, select_marked_holes, standard_factorization};
use crate::solver::{
    classify_solutions, enumerate_candidates, ClassificationReport, SolveStatus, SolverConfig, SolverError,
    Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisStatus {
    Strict,
    RelaxedLast,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportVerdict {
    UniqueStandard,
    StandardPlusLantern,
    OtherFound,
    InconclusiveBudget,
    HypothesesNotMet,
}

impl ReportVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportVerdict::UniqueStandard => "unique-standard",
            ReportVerdict::StandardPlusLantern => "standard-plus-lantern",
            ReportVerdict::OtherFound => "other-found",
            ReportVerdict::InconclusiveBudget => "inconclusive-budget",
            ReportVerdict::HypothesesNotMet => "hypotheses-not-met",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSummary {
    pub vertices: usize,
    pub edges: usize,
    /// weight -> number of vertices carrying it
    pub weights: BTreeMap<i32, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageSummary {
    pub holes: usize,
    /// `holes_per_domain[j - 1]` holes lie in `V_j`.
    pub holes_per_domain: Vec<usize>,
    pub standard_twists: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub min_formula: Option<bool>,
    pub bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverSummary {
    pub status: SolveStatus,
    pub count: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Timing {
    pub validate_ms: f64,
    pub page_ms: f64,
    pub profile_ms: f64,
    pub solve_ms: f64,
    pub classify_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub input: InputSummary,
    pub mode: HypothesisMode,
    pub hypotheses: HypothesisStatus,
    pub offending: Vec<VertexId>,
    pub arrangement: Option<Arrangement>,
    pub page: Option<PageSummary>,
    pub profile_digest: Option<String>,
    pub checks: Option<Checks>,
    pub solver: Option<SolverSummary>,
    pub classification: Option<ClassificationReport>,
    pub verdict: ReportVerdict,
    /// An other-found verdict on a graph meeting the strict hypotheses.
    pub alarm: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(
            self.verdict,
            ReportVerdict::UniqueStandard | ReportVerdict::StandardPlusLantern
        ) || (self.verdict == ReportVerdict::OtherFound && !self.alarm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: HypothesisMode,
    pub solver: SolverConfig,
    pub orbit_cap: usize,
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: HypothesisMode::RelaxedLast,
            solver: SolverConfig::default(),
            orbit_cap: 10_000,
            timing: false,
        }
    }
}

/// Runs the pipeline with relaxed-last hypotheses and default orbit cap.
pub fn verify(g: &ResolutionGraph, cfg: SolverConfig) -> Result<VerificationReport, VerifyError> {
    verify_with(
        g,
        &VerifyOptions {
            solver: cfg,
            ..VerifyOptions::default()
        },
    )
}

pub fn hypothesis_status(g: &ResolutionGraph) -> (HypothesisStatus, Vec<VertexId>) {
    let bad = validate_no_bad_vertices(g);
    if !bad.passed {
        return (HypothesisStatus::Fails, bad.offending);
    }
    let strict = validate_theorem_hypotheses(g, HypothesisMode::Strict);
    if strict.passed {
        return (HypothesisStatus::Strict, Vec::new());
    }
    let relaxed = validate_theorem_hypotheses(g, HypothesisMode::RelaxedLast);
    if relaxed.passed {
        (HypothesisStatus::RelaxedLast, strict.offending)
    } else {
        (HypothesisStatus::Fails, relaxed.offending)
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn verify_with(g: &ResolutionGraph, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    opts.solver.validate()?;
    let mut timing = Timing::default();
    let mut clock = Instant::now();
    let mut lap = |slot: &mut f64| {
        *slot = ms(clock.elapsed());
        clock = Instant::now();
    };

    let mut weights = BTreeMap::new();
    for (_, w) in g.weights() {
        *weights.entry(w).or_insert(0) += 1;
    }
    let mut report = VerificationReport {
        input: InputSummary {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            weights,
        },
        mode: opts.mode,
        hypotheses: HypothesisStatus::Fails,
        offending: Vec::new(),
        arrangement: None,
        page: None,
        profile_digest: None,
        checks: None,
        solver: None,
        classification: None,
        verdict: ReportVerdict::HypothesesNotMet,
        alarm: false,
        timing: None,
    };

    let (status, offending) = hypothesis_status(g);
    report.hypotheses = status;
    report.offending = offending;
    let accepted = matches!(
        (opts.mode, status),
        (_, HypothesisStatus::Strict) | (HypothesisMode::RelaxedLast, HypothesisStatus::RelaxedLast)
    );
    lap(&mut timing.validate_ms);
    let arr = arrange_conveniently(g);
    report.arrangement = Some(arr.clone());
    let page = match build_page(g, &arr) {
        Ok(page) if accepted => page,
        _ => return Ok(finish(report, timing, opts.timing)),
    };
    let standard = standard_factorization(&page);
    let marks = select_marked_holes(&page).ok();
    report.page = Some(PageSummary {
        holes: page.holes().len(),
        holes_per_domain: (1..=arr.k()).map(|j| page.holes_in_domain(j).len()).collect(),
        standard_twists: standard.len(),
    });
    lap(&mut timing.page_ms);

    let target = page_profile(&page, &standard).expect("standard factorization lives on its page");
    let json = serde_json::to_vec(&target).expect("profiles serialize");
    report.profile_digest = Some(hex(&Sha256::digest(&json)));
    report.checks = Some(Checks {
        min_formula: marks.as_ref().map(|m| check_min_formula(&page, m, &target).passed),
        bounds: check_bounds(&page, &target).passed,
    });
    lap(&mut timing.profile_ms);

    let sols = enumerate_candidates(&page.hole_ids(), &target, &opts.solver)?;
    report.solver = Some(SolverSummary {
        status: sols.status,
        count: sols.solutions.len(),
        nodes: sols.nodes,
    });
    lap(&mut timing.solve_ms);

    let classification = classify_solutions(&page, &sols, &standard, marks.as_ref(), opts.orbit_cap);
    report.verdict = match classification.verdict {
        Verdict::UniqueStandard => ReportVerdict::UniqueStandard,
        Verdict::StandardPlusLantern => ReportVerdict::StandardPlusLantern,
        Verdict::Other => ReportVerdict::OtherFound,
        Verdict::Inconclusive => ReportVerdict::InconclusiveBudget,
    };
    report.alarm = report.verdict == ReportVerdict::OtherFound && status == HypothesisStatus::Strict;
    report.classification = Some(classification);
    lap(&mut timing.classify_ms);
    Ok(finish(report, timing, opts.timing))
}

fn finish(mut report: VerificationReport, timing: Timing, keep: bool) -> VerificationReport {
    if keep {
        report.timing = Some(timing);
    }
    report
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn run(text: &str) -> VerificationReport {
        verify(&parse_graph(text).unwrap(), SolverConfig::default()).unwrap()
    }

    #[test]
    fn lens_spaces() {
        let r = run("vertex 1 -5\n");
        assert_eq!(r.verdict, ReportVerdict::UniqueStandard);
        assert_eq!(r.hypotheses, HypothesisStatus::Strict);
        assert_eq!(r.solver.as_ref().unwrap().status, SolveStatus::Complete);
        assert!(r.passed());

        let r = run("vertex 1 -4\n");
        assert_eq!(r.verdict, ReportVerdict::StandardPlusLantern);
        assert_eq!(r.hypotheses, HypothesisStatus::RelaxedLast);
        assert_eq!(r.offending, vec![1]);
    }

    #[test]
    fn bad_star() {
        let r = run("vertex 1 -2\nvertex 2 -5\nvertex 3 -5\nvertex 4 -5\nedge 1 2\nedge 1 3\nedge 1 4\n");
        assert_eq!(r.verdict, ReportVerdict::HypothesesNotMet);
        assert_eq!(r.hypotheses, HypothesisStatus::Fails);
        assert_eq!(r.offending, vec![1]);
        assert!(r.solver.is_none());
        assert!(!r.passed());
    }

    #[test]
    fn strict_mode_rejects_minus_four() {
        let g = parse_graph("vertex 1 -4\n").unwrap();
        let opts = VerifyOptions {
            mode: HypothesisMode::Strict,
            ..VerifyOptions::default()
        };
        let r = verify_with(&g, &opts).unwrap();
        assert_eq!(r.verdict, ReportVerdict::HypothesesNotMet);
        assert!(r.page.is_none());
    }

    #[test]
    fn budget_is_inconclusive() {
        let g = ResolutionGraph::path(&[-5, -5]).unwrap();
        let cfg = SolverConfig {
            node_budget: 3,
            ..SolverConfig::default()
        };
        let r = verify(&g, cfg).unwrap();
        assert_eq!(r.verdict, ReportVerdict::InconclusiveBudget);
        assert!(!r.passed());
    }

    #[test]
    fn deterministic_without_timing() {
        let g = ResolutionGraph::path(&[-5, -6]).unwrap();
        let a = serde_json::to_string(&verify(&g, SolverConfig::default()).unwrap()).unwrap();
        let b = serde_json::to_string(&verify(&g, SolverConfig::default()).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("timing"));
    }
}
