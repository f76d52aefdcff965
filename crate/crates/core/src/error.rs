use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("elements belong to different algebras: {0}")]
    ParentMismatch(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid *-homomorphism: {0}")]
    InvalidHom(String),

    #[error("not a unitary: {0}")]
    NotUnitary(String),

    #[error("generator {index} is not a projection")]
    NotProjection { index: usize },

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("invalid subalgebra: {0}")]
    InvalidSubalgebra(String),

    #[error("subalgebra is not contained in the target: atom {atom} is not a sum of target atoms")]
    NotContained { atom: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("naturality fails on edge {edge}")]
    Naturality { edge: usize },

    #[error("homomorphism is not well defined: relation {relation} does not map into the codomain relations")]
    NotWellDefined { relation: usize },

    #[error("inverse check failed on generator {generator} ({detail}); the subdiagram is too coarse")]
    InverseCheck { generator: usize, detail: String },

    #[error("projection is not represented in the subdiagram")]
    NotInDiagram,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
