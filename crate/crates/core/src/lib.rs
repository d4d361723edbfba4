//! Geometry built from a world function σ alone.
//!
//! A σ-space is any point set with a symmetric, zero-diagonal real function
//! σ(P, Q) (half the squared distance where a metric exists). Everything in
//! this crate is phrased in terms of σ: scalar products Γ, Gram determinants
//! Fₙ, tubes, envelopes, collinearity and the reconstruction of Euclidean
//! coordinates.
//!
//! The algebra is generic over the scalar type. [`Scalar`] (any ordered
//! field, including exact rationals) covers Gram determinants, tubes and
//! reconstruction; [`Real`] (`f32`/`f64`) is needed for lengths, envelopes
//! and direction sampling. The `*64` aliases below fix the scalar to `f64`.

pub mod collinearity;
pub mod error;
pub mod linalg;
pub mod objects;
pub mod reconstruct;
pub mod sampling;
pub mod scalar;
pub mod sigma;
pub mod spaces;

pub use collinearity::{
    cone_sample, fibonacci_directions, is_collinear, tube_through_point_member, CollinearityVerdict,
    ConeDirection, ConeSample, Orientation,
};
pub use error::{GeomError, Result};
pub use linalg::{Inertia, Matrix};
pub use objects::{
    classify_tube, envelope_value, evaluate, grid_sample, tube_member, tube_section_member,
    EnvelopeKind, EnvelopeObject, EnvelopeValue, Evaluation, GridBox, GridMember, TubeClass,
};
pub use reconstruct::{
    coordinates, detect_dimension, menger_embed_test, reconstruct, sigma_from_coords,
    verify_conditions, EmbeddabilityReport, ReconstructionFrame, Signature,
};
pub use sampling::{uniform_points, PRNG_NAME};
pub use scalar::{Real, Scalar};
pub use sigma::{
    cross_gram, gamma, gram_det, gram_matrix, mv_length, mv_scalar_product, negligible, sigma,
    squared_length, two_point_scalar, Domain, Multivector, Point, SigmaSpace, SignedLength,
};
pub use spaces::{
    metric_from_sigma_fd, restrict, Deformed, Distortion, Euclidean, Minkowski, Region,
    Restricted, Space, Tabulated,
};

pub type Point64 = Point<f64>;
pub type Multivector64 = Multivector<f64>;
pub type Matrix64 = Matrix<f64>;
pub type Space64 = Space<f64>;
pub type Tabulated64 = Tabulated<f64>;
pub type Region64 = Region<f64>;
pub type EnvelopeObject64 = EnvelopeObject<f64>;
pub type ReconstructionFrame64 = ReconstructionFrame<f64>;
pub type EmbeddabilityReport64 = EmbeddabilityReport<f64>;

/// Default relative tolerance for determinant zero tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default collinearity-defect tolerance for cone sampling.
pub const DEFAULT_CONE_TOL: f64 = 5e-4;
