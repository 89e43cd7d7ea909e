use thiserror::Error;

/// Errors raised by the combinatorial cohomology module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistedError {
    #[error("simplex {simplex:?} repeats a vertex")]
    RepeatedVertex { simplex: Vec<usize> },
    #[error("simplex {simplex:?} has dimension above the supported maximum {max}")]
    DimensionTooLarge { simplex: Vec<usize>, max: usize },
    #[error("complex has no simplices")]
    EmptyComplex,
    #[error("vertex {vertex} is missing: vertex labels must be exactly 0..{count}")]
    MissingVertex { vertex: usize, count: usize },
    #[error("edge [{a}, {b}] is not a simplex of the complex")]
    UnknownEdge { a: usize, b: usize },
    #[error("weight {weight} on edge [{a}, {b}] is not positive")]
    NonPositiveWeight { a: usize, b: usize, weight: String },
    #[error("edge [{a}, {b}] is assigned twice")]
    DuplicateEdge { a: usize, b: usize },
    #[error("cocycle condition fails on {simplex:?}: holonomy {holonomy}")]
    CocycleViolation { simplex: [usize; 3], holonomy: String },
    #[error("potential has {found} entries, complex has {expected} vertices")]
    PotentialLength { expected: usize, found: usize },
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("monodromy must be a nonempty square matrix, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("monodromy is not invertible over the integers (det = {det})")]
    NotUnimodular { det: String },
    #[error("twist parameter must be positive and finite, found {0}")]
    BadTwist(String),
    #[error("relative singular value {ratio:e} in degree {degree} falls inside the ambiguity band")]
    SingularThresholdAmbiguous { degree: usize, ratio: f64 },
    #[error("expected Betti numbers in degrees 0..={expected}, found {found} entries")]
    WrongDimension { expected: usize, found: usize },
}

pub type TwistedResult<T> = std::result::Result<T, TwistedError>;
