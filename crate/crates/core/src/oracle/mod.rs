//! Ground-truth solvers for small instances.

pub mod exact;
pub mod search;

pub use exact::{exact_solve, exact_solve_relations, ExactOutcome, ExactResult};
pub use search::{min_unmatchable_kernel, search_unmatchable, MinKernelEstimate, SearchParams, SearchResult};
