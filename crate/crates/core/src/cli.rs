//! Command-line front end. Exit status: 0 success, 1 failed verdict,
//! 2 usage/parse/I-O error, 3 budget truncation.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::graph::{
    arrange_conveniently, export_dot, parse_graph, validate_no_bad_vertices, validate_theorem_hypotheses,
    HypothesisMode, ResolutionGraph,
};
use crate::multiplicity::page_profile;
use crate::open_book::{build_page, select_marked_holes, standard_factorization, PlanarPage};
use crate::render::{self, FactorizationDoc, OpenBookDoc, OrbitDoc, SolutionSetDoc, ValidateDoc};
use crate::solver::{classify_solutions, enumerate_candidates, lantern_orbit, SolveStatus, SolverConfig};
use crate::verify::{verify_with, ReportVerdict, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fillings", version, about = "Planar open books of plumbing trees and their factorizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check for bad vertices and the weight hypotheses
    Validate {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        mode: Mode,
    },
    /// Print the convenient arrangement
    Arrange {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Print the page holes, the standard factorization and the marked holes
    Openbook {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Print the multiplicity profile of the standard factorization
    Multiplicities {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Enumerate all factorizations with the standard profile
    Solve {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 10_000)]
        orbit_cap: usize,
    },
    /// Lantern orbit of the standard factorization
    LanternOrbit {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 10_000)]
        orbit_cap: usize,
    },
    /// Run the whole pipeline and print a verdict
    Verify {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        mode: Mode,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 10_000)]
        orbit_cap: usize,
        /// Include per-stage wall-clock durations
        #[arg(long)]
        timing: bool,
    },
    /// Graphviz rendering of the tree with its arrangement
    ExportDot {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args, Debug)]
struct IoArgs {
    /// Graph file, or `-` for standard input
    #[arg(long, default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_solutions: u64,
    #[arg(long, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    node_budget: u64,
}

impl BudgetArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_solutions: usize::try_from(self.max_solutions).unwrap_or(usize::MAX),
            node_budget: self.node_budget,
            report_partial: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strict,
    RelaxedLast,
}

impl From<Mode> for HypothesisMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => HypothesisMode::Strict,
            Mode::RelaxedLast => HypothesisMode::RelaxedLast,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

struct Output {
    text: String,
    code: i32,
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let io = match &cli.command {
        Command::Validate { io, .. }
        | Command::Arrange { io }
        | Command::Openbook { io }
        | Command::Multiplicities { io }
        | Command::Solve { io, .. }
        | Command::LanternOrbit { io, .. }
        | Command::Verify { io, .. }
        | Command::ExportDot { io } => io,
    };
    let result = read_graph(&io.input, stdin).and_then(|g| execute(&cli.command, &g, io.format));
    match result {
        Ok(out) => {
            let written = match &io.output {
                Some(path) => std::fs::write(path, &out.text),
                None => stdout.write_all(out.text.as_bytes()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write output: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read_graph(input: &str, stdin: &mut dyn Read) -> Result<ResolutionGraph, Failure> {
    let text = if input == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {input}: {e}")))?
    };
    parse_graph(&text).map_err(|e| Failure::new(EXIT_USAGE, e))
}

fn page_of(g: &ResolutionGraph) -> Result<PlanarPage, Failure> {
    build_page(g, &arrange_conveniently(g)).map_err(|e| Failure::new(EXIT_FAIL, e))
}

fn emit<T: serde::Serialize>(format: Format, doc: &T, text: impl FnOnce(&T) -> String, code: i32) -> Output {
    let text = match format {
        Format::Json => render::to_json(doc),
        Format::Text => text(doc),
    };
    Output { text, code }
}

fn execute(cmd: &Command, g: &ResolutionGraph, format: Format) -> Result<Output, Failure> {
    match cmd {
        Command::Validate { mode, .. } => {
            let doc = ValidateDoc {
                no_bad_vertices: validate_no_bad_vertices(g),
                hypotheses: validate_theorem_hypotheses(g, (*mode).into()),
                passed: false,
            };
            let doc = ValidateDoc {
                passed: doc.no_bad_vertices.passed && doc.hypotheses.passed,
                ..doc
            };
            let code = if doc.passed { EXIT_OK } else { EXIT_FAIL };
            Ok(emit(format, &doc, render::validate_text, code))
        }
        Command::Arrange { .. } => Ok(emit(format, &arrange_conveniently(g), render::arrangement_text, EXIT_OK)),
        Command::Openbook { .. } => {
            let page = page_of(g)?;
            let doc = OpenBookDoc {
                standard: FactorizationDoc::new(&page, &standard_factorization(&page)),
                marks: select_marked_holes(&page).ok(),
            };
            Ok(emit(format, &doc, render::openbook_text, EXIT_OK))
        }
        Command::Multiplicities { .. } => {
            let page = page_of(g)?;
            let p = page_profile(&page, &standard_factorization(&page)).expect("standard lives on its page");
            Ok(emit(format, &p, render::profile_text, EXIT_OK))
        }
        Command::Solve { budget, orbit_cap, .. } => {
            let page = page_of(g)?;
            let standard = standard_factorization(&page);
            let target = page_profile(&page, &standard).expect("standard lives on its page");
            let sols = enumerate_candidates(&page.hole_ids(), &target, &budget.config())
                .map_err(|e| Failure::new(EXIT_BUDGET, e))?;
            let marks = select_marked_holes(&page).ok();
            let classification = classify_solutions(&page, &sols, &standard, marks.as_ref(), *orbit_cap);
            let code = if sols.status == SolveStatus::TruncatedByBudget {
                EXIT_BUDGET
            } else {
                EXIT_OK
            };
            let doc = SolutionSetDoc::new(&sols, classification);
            Ok(emit(format, &doc, render::solutions_text, code))
        }
        Command::LanternOrbit { orbit_cap, .. } => {
            if *orbit_cap == 0 {
                return Err(Failure::new(EXIT_USAGE, "--orbit-cap must be positive"));
            }
            let page = page_of(g)?;
            let orbit = lantern_orbit(&standard_factorization(&page), *orbit_cap);
            let code = if orbit.complete { EXIT_OK } else { EXIT_BUDGET };
            Ok(emit(format, &OrbitDoc::from(&orbit), render::orbit_text, code))
        }
        Command::Verify {
            mode,
            budget,
            orbit_cap,
            timing,
            ..
        } => {
            let opts = VerifyOptions {
                mode: (*mode).into(),
                solver: budget.config(),
                orbit_cap: (*orbit_cap).max(1),
                timing: *timing,
            };
            let report = verify_with(g, &opts).map_err(|e| Failure::new(EXIT_BUDGET, e))?;
            let code = match report.verdict {
                ReportVerdict::UniqueStandard | ReportVerdict::StandardPlusLantern => EXIT_OK,
                ReportVerdict::OtherFound if !report.alarm => EXIT_OK,
                ReportVerdict::OtherFound | ReportVerdict::HypothesesNotMet => EXIT_FAIL,
                ReportVerdict::InconclusiveBudget => EXIT_BUDGET,
            };
            Ok(emit(format, &report, render::report_text, code))
        }
        Command::ExportDot { .. } => {
            let dot = export_dot(g, Some(&arrange_conveniently(g)));
            Ok(emit(format, &dot, |d| d.clone(), EXIT_OK))
        }
    }
}
