//! Crate-wide error type.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("degenerate period pair: Im(omega2/omega1) must be strictly positive")]
    DegenerateLattice,

    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("evaluation point within {distance:.3e} of divisor point {point}")]
    DivisorProximity { point: Complex64, distance: f64 },

    #[error("root search did not converge: residual {residual:.3e}, {} unresolved starts", unresolved.len())]
    NonConvergence {
        residual: f64,
        unresolved: Vec<Complex64>,
    },

    #[error("winding computation rejected offset: divisor point within {0:.3e} of a cell side")]
    BoundaryProximity(f64),

    #[error("lattice sum diverges: point congruent to the singular center")]
    PsiDivergence,

    #[error("integration accuracy failure: {0}")]
    IntegrationAccuracy(String),

    #[error("lift residual {residual:.3e} exceeds tolerance; homology class unreliable")]
    LiftAccuracy { residual: f64 },

    #[error("saddle connection between saddles {0} and {1}")]
    SaddleConnection(usize, usize),

    #[error("non-simple saddle at {0}")]
    NonSimpleSaddle(Complex64),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("degenerate vertex: fewer than 2 incident separatrices")]
    DegenerateVertex,

    #[error("ambiguous rotation order: arrival directions closer than {0:.3e} rad")]
    AmbiguousRotation(f64),

    #[error("extraction validation failed: {0}")]
    ExtractionValidation(String),

    #[error("consistency check failed: {0}")]
    Validation(String),

    #[error("invalid combinatorial map: {0}")]
    InvalidMap(String),

    #[error("map is not cellularly embedded in the torus")]
    NotCellular,

    #[error("edge {0} lies on a single face; operation refused")]
    SingleFaceEdge(usize),

    #[error("face subset must be a nonempty proper subset")]
    BadFaceSubset,

    #[error("enumeration budget exceeded: {darts} darts requested, limit {limit}")]
    BudgetExceeded { darts: u32, limit: u32 },

    #[error("unknown catalog name: {0}")]
    UnknownCatalogName(String),

    #[error("parse error: {0}")]
    Parse(String),
}
