//! Computational versions of the additive-combinatorics lemmas: exact
//! inequality checks, exhaustive or greedy witnesses for the existential
//! statements, and an exhaustive test harness over small sets.

mod closure;
mod covering;
mod pluennecke;
mod rudnev;
pub mod suites;

pub use closure::{generated_subfield, ClosureOp, ClosureWitness, Step};
pub use covering::{cover_greedy, cover_min_oracle, CoveringReport, COVER_ORACLE_LIMIT};
pub use pluennecke::{
    pluennecke_check, pluennecke_refine, pluennecke_refine_with, InequalityCheck, RefineMethod, Refinement,
    TieBreak, REFINE_EXHAUSTIVE_LIMIT,
};
pub use rudnev::{rudnev_select, RudnevSelection};
pub use suites::{run_suite, Suite, SuiteReport};
