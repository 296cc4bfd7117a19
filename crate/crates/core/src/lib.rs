//! Maximally recoverable local reconstruction codes over small fields,
//! built from skew polynomials `F_{q0^m}[t; σ]` with `σ(x) = x^{q0}`.
//!
//! The crate is layered bottom-up:
//!
//! - [`field`]: finite field towers `F_p ⊂ F_{q0} ⊂ F_{q0^m}`.
//! - [`skew`]: the skew polynomial ring, evaluation, conjugacy and root structure.
//! - [`linalg`]: exact dense linear algebra, skew Vandermonde and Moore matrices.
//! - [`lrc`]: parity-check constructions and encoding.
//! - [`verify`]: erasure-pattern enumeration, MR certification and erasure decoding.
//! - [`msrd`]: maximum sum-rank distance codes.

pub mod error;
pub mod field;
pub mod linalg;
pub mod lrc;
pub mod msrd;
pub mod skew;
pub mod verify;

pub use error::{CodeError, FieldError, LinalgError, SkewError};
pub use field::{Element, FieldTower, Level};
pub use linalg::Matrix;
pub use lrc::{LrcCode, LrcParams, Variant};
pub use skew::SkewPoly;

/// Version tag written into every JSON document this crate produces.
pub const FORMAT_VERSION: u32 = 1;
