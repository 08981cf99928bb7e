//! Subspace-restriction statistics of finite classical groups.
//!
//! For a conjugacy class `C` of `G_d`, the random variable `X_C` counts the
//! `d`-dimensional subobjects fixed by a group element on which it restricts
//! into `C`. This crate evaluates these counts for GL_n(F_q), the symmetric
//! groups and Sp_2n(F_q), computes their expectations and joint moments
//! exactly (by full enumeration, in rational arithmetic) or by Monte Carlo,
//! and expands products of them back into the same basis.

pub mod charpoly;
pub mod conjugacy;
pub mod error;
pub mod families;
pub mod field;
pub mod linalg;
pub mod stats;
mod text;
pub mod verify;

pub use charpoly::CharPoly;
pub use conjugacy::{parse_class_spec, ConjClassLabel, FamilyKind, PolyFq};
pub use error::{Error, Result};
pub use families::{AmbientFamily, GlFamily, SpFamily, SymFamily};
pub use field::{Field, FieldElement};
pub use linalg::{Matrix, Subspace};
pub use stats::{MomentResult, MomentValue, Statistic};

/// Exact rational used for every expectation and expansion coefficient.
pub type Rational = num_rational::BigRational;

/// Upper bound on the number of group elements an exact computation may
/// enumerate, unless overridden.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
