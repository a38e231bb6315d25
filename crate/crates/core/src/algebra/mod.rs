//! Exact combinatorics and small-finite-field linear algebra.

mod combinatorics;
mod field;
mod matrix;

pub use combinatorics::{binom, binom_u64, gauss_binom};
pub use field::{FieldElem, FieldTable, SUPPORTED_ORDERS};
pub use matrix::{intersection_dim, MatrixFq};
pub(crate) use matrix::eliminate;

pub type BigNat = num_bigint::BigUint;
