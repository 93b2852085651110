//! Candidate bases generated from one seed state by one-sided local unitaries,
//! their verification, and the numerical search for further members.

mod basis;
mod search;

pub use basis::{build_cyclic_basis, verify_candidate, BasisCandidate, VerificationReport};
pub use search::{
    extend, greedy_grow, make_extension_problem, orthogonality_residual, ExtensionOutcome,
    ExtensionProblem, ExtensionStatus, GrowthReport, SearchMethod, SearchParams, HEURISTIC_CAVEAT,
};
