//! Exact scalars and dense linear algebra over them.
//!
//! Everything above this layer reduces to [`Matrix::rref`],
//! [`Matrix::kernel_basis`] and [`Matrix::solve`]. All three are
//! deterministic: the pivot in each column is the first nonzero entry at or
//! below the current row.

mod field;
mod matrix;

pub use field::{Field, FieldDescriptor, PrimeField, Rationals, DEFAULT_PRIME};
pub use matrix::{solve_vec, Matrix, Rref, Subspace};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("cannot parse field specification {0:?} (expected prime:P or rational)")]
    BadFieldSpec(String),
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("rows of unequal length")]
    Ragged,
}
