//! Exact computations for finite-dimensional A∞-algebras over prime fields
//! and the rationals.

pub mod ainfty;
pub mod doc;
pub mod error;
pub mod exactla;
pub mod field;
pub mod fixtures;
pub mod graded;
pub mod massey;
pub mod matric;
pub mod par;
pub mod random;
pub mod spectral;
pub mod transfer;
pub mod twist;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
