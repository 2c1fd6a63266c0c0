use thiserror::Error;

use crate::relations::Element;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("class {class} has size {size}; listed classes need at least 2 elements")]
    ClassTooSmall { class: usize, size: usize },
    #[error("element {element} appears twice in one relation")]
    DuplicateElement { element: Element },
    #[error("relation {}: element {element} is not below the ground size {ground_size}", relation + 1)]
    OutOfRange { relation: usize, element: Element, ground_size: usize },
    #[error("ground set of size {0} does not fit 32-bit element ids")]
    GroundTooLarge(usize),
    #[error("instance has no relations")]
    NoRelations,
}

/// Failure of the constructive extension step.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("kernel hypothesis violated: smallest kernel {min_kernel} is below {required}")]
    HypothesisViolation { min_kernel: usize, required: usize },
    #[error("sub-matching is not a rainbow matching of the remaining relations: {0}")]
    InvalidSubMatching(String),
    /// A step that cannot fail under the hypothesis did fail. Always a bug.
    #[error("internal logic error in {step}: {detail}")]
    InternalLogic { step: &'static str, detail: String },
    #[error("exact fallback ran out of budget after {nodes} nodes")]
    FallbackExhausted { nodes: u64 },
    #[error("the instance has no rainbow matching")]
    NoMatching,
}

impl ConstructError {
    pub(crate) fn logic(step: &'static str, detail: impl Into<String>) -> Self {
        ConstructError::InternalLogic { step, detail: detail.into() }
    }
}

/// Instance or matching text that could not be read.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("missing or malformed header, expected `grinblat 1 <n> <ground_size>`")]
    BadHeader,
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("expected `rel {expected} <k>`")]
    BadRelationHeader { expected: usize },
    #[error("not a non-negative integer: `{0}`")]
    BadNumber(String),
    #[error("duplicate element {0}")]
    DuplicateElement(Element),
    #[error("element {element} out of range for ground size {ground_size}")]
    OutOfRange { element: Element, ground_size: usize },
    #[error("class has {0} element(s); at least 2 are required")]
    ClassTooSmall(usize),
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("trailing content after the last relation")]
    Trailing,
    #[error("malformed matching line, expected `<relation> <a> <b>`")]
    BadMatchingLine,
    #[error("relation {0} listed out of order or twice")]
    RelationOrder(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("infeasible fixture: {0}")]
    Infeasible(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse experiment config: {0}")]
    Parse(String),
    #[error("invalid experiment config: {0}")]
    Invalid(String),
}
