use thiserror::Error;

use crate::structure::StructKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("kind mismatch: {left:?} vs {right:?}")]
    KindMismatch { left: StructKind, right: StructKind },
    #[error("bound too large: {0}")]
    BoundTooLarge(String),
    #[error("structure is not a member of class {0}")]
    MembershipError(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("not a basis: {0}")]
    NotABasis(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("malformed H: {0}")]
    MalformedH(String),
    #[error("invalid subgroup family: {0}")]
    InvalidFamily(String),
    #[error("structure is not naturally ordered")]
    NotNaturallyOrdered,
    #[error("minimality criteria disagree: {0}")]
    CriteriaDisagree(String),
    #[error("no atom matches the product: {0}")]
    NoSuchAtom(String),
    #[error("ret-algebra correspondence failed: {0}")]
    CorrespondenceFailed(String),
    #[error("amenability criteria disagree: {0}")]
    EquivalenceViolated(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Errors that can only arise from a defect in this library.
    pub fn is_bug_signal(&self) -> bool {
        matches!(
            self,
            Error::CriteriaDisagree(_)
                | Error::NoSuchAtom(_)
                | Error::CorrespondenceFailed(_)
                | Error::EquivalenceViolated(_)
                | Error::Internal(_)
        )
    }
}
