//! Canonical forms, product decompositions, and separability certificates
//! for rank-N PPT states on `2⊗2⊗2⊗N`.
//!
//! The pipeline is:
//!
//! 1. [`tensor::is_ppt`] gates out states with a negative partial transpose.
//! 2. [`separability::find_product_basis`] finds a local qubit frame in which
//!    the `|111⟩` block has full rank.
//! 3. [`canonical::extract_canonical`] gauges that block to the identity and
//!    reads off commuting normal `A, B, C` and the block `D`.
//! 4. [`separability::decompose_canonical`] jointly diagonalizes `A, B, C`
//!    and writes the state as a sum of `N` product projectors, which are
//!    pulled back to the original frame and checked by reconstruction.

pub mod canonical;
pub mod error;
pub mod instances;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod selftest;
pub mod separability;
pub mod shape;
pub mod spectral;
pub mod tensor;

pub use canonical::{BlockAddress, CanonicalForm, ExtractError, Extraction};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use separability::{
    Certification, CertifyOptions, ProductDecomposition, ProductTerm, SeparabilityCertificate,
};
pub use shape::SystemShape;
pub use spectral::{EigenDecomposition, JointEigenDecomposition};
pub use tensor::{PptReport, PsdReport, DEFAULT_TOL};
