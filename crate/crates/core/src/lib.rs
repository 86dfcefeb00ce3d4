//! Exact Gaussian-integer arithmetic, linear algebra over `Q(i)`, finite
//! largeness detectors for subsets of `Z[i]`, and monochromatic image
//! search for matrices under finite colorings.

pub mod cli;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod largeness;
pub mod linalg;
pub mod search;
pub mod window;

pub use error::{Error, Result};
pub use gaussian::{GaussInt, GaussRational};
pub use linalg::{IprCertificate, MatrixQi, VectorQi, VectorZi};
pub use window::{GaussSet, Point, SetRule, Window};
