//! Rainbow matchings for families of equivalence relations.
//!
//! An instance is a ground set `0..ground_size` with `n` partitions. A
//! rainbow matching picks, for every relation `i`, two distinct equivalent
//! elements, with all `2n` elements distinct. The crate provides
//!
//! * [`relations`]: the data model, verification and class-size normalization;
//! * [`construct`]: the constructive extension procedure that succeeds
//!   whenever every kernel has at least `ceil(16n/5) + c` elements;
//! * [`oracle`]: an exact backtracking solver and a search for unmatchable
//!   instances with large kernels;
//! * [`gen`]: instance generators;
//! * [`io`] and [`experiment`]: the text format and the experiment runner
//!   behind the `grinblat` binary.

pub mod construct;
pub mod error;
pub mod experiment;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod relations;
pub mod seed;

pub use error::{ConfigError, ConstructError, FixtureError, ParseError, ParseErrorKind, RelationError};
pub use relations::{
    verify_matching, Element, Instance, KernelInfo, Matching, Partition, PartitionIndex, VerifyReport, Violation,
};
