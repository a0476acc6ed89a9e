use thiserror::Error;

use crate::field::Representation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid reference material: {0}")]
    InvalidReferenceMaterial(String),

    #[error("poisson ratio {0} is at or beyond the incompressible limit")]
    Incompressible(f64),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("field is in {found:?} representation, expected {expected:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    #[error("inverse transform has imaginary residue {residue:e} (field norm {norm:e})")]
    SymmetryViolation { residue: f64, norm: f64 },

    #[error("strain field is not compatible (relative residual {0:e})")]
    Compatibility(f64),

    #[error("zero frequency is excluded from the Green operator")]
    ZeroFrequency,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("rasterization failed: {0}")]
    Rasterization(String),

    #[error("problem order {0} is not supported (only 1 and 2 are solvable)")]
    UnsupportedOrder(usize),

    #[error("corrector sub-solve for unit strain ({m},{n}) did not converge")]
    Corrector { m: usize, n: usize },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
