use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// A point is not part of the space's domain.
    #[error("point outside domain: {0}")]
    Domain(String),

    /// Caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid world-function table: asymmetric pairs {asymmetric:?}, nonzero diagonal {nonzero_diagonal:?}")]
    InvalidTable {
        asymmetric: Vec<(usize, usize)>,
        nonzero_diagonal: Vec<usize>,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Skeleton has zero length, so no tube or collinearity test is defined.
    #[error("degenerate skeleton: {0}")]
    DegenerateSkeleton(String),

    #[error("tube-section anchor is not a member of the tube")]
    AnchorNotOnTube,

    #[error("no basis: every pair of sample points has vanishing world function")]
    NoBasis,

    #[error("singular matrix")]
    Singular,
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
