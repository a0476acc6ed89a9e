//! FFT-based homogenization of periodic linear elasticity.
//!
//! The crate solves cell problems on uniform voxel grids over the unit torus
//! with the Moulinec–Suquet fixed-point scheme or a matrix-free BiCGSTAB
//! solve of the Lippmann-Schwinger equation, and extends both to the
//! second-order problem of the asymptotic expansion, driven by a macroscopic
//! strain gradient.

pub mod error;
mod fft;
pub mod field;
pub mod green;
pub mod higher_order;
pub mod io;
pub mod microstructure;
pub mod solver;
pub mod tensor;
pub mod experiments;

pub use error::{Error, Result};
pub use field::{GridSpec, Representation, TensorField};
pub use green::ReferenceMaterial;
pub use higher_order::{CorrectorCache, CorrectorX1, MacroData, OrderAlphaProblem};
pub use microstructure::{HashinSpec, LaminateSpec, StiffnessField};
pub use solver::{Method, Order1Solution, SolveConfig, SolveReport};
pub use tensor::{IsotropicMaterial, Stiffness4, SymTensor2, Tensor3};
