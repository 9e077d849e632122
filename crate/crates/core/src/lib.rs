//! Resolution graphs, their planar open books, and the search for monodromy
//! factorizations that share the multiplicities of the standard one.

pub mod cli;
pub mod graph;
pub mod multiplicity;
pub mod open_book;
pub mod render;
pub mod solver;
pub mod verify;

pub use graph::{arrange_conveniently, parse_graph, Arrangement, HypothesisMode, ResolutionGraph, VertexId};
pub use multiplicity::{page_profile, profile, MultiplicityProfile};
pub use open_book::{build_page, standard_factorization, CurveClass, Factorization, HoleId, PlanarPage};
pub use solver::{enumerate_candidates, SolutionSet, SolverConfig, Verdict};
pub use verify::{verify, VerificationReport};
