//! A desk-scale p-adic workbench for Lubin-Tate theory: unramified scalars
//! with Frobenius, the division algebra of invariant `1/h`, formal modules,
//! the Gross-Hopkins fundamental domain with its group and Lie actions, the
//! period coordinates and distribution norms.

pub mod division;
pub mod domain;
pub mod error;
pub mod formal;
pub mod harness;
pub mod iwasawa;
pub mod matrix;
pub mod padic;
pub mod period;
pub mod quotient;
pub mod series;
pub mod span;

pub use error::{Error, Result};
