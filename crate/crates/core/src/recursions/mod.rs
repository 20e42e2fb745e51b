//! Exact normalized curve counts.
//!
//! Counts are produced in the normalized form n = N / (number of point
//! conditions)! that the recursions are naturally written in. Integrality of
//! the rescaled N is then a checkable property of every table rather than an
//! assumption baked into the arithmetic.

mod model;
mod p2;
mod p3;
mod table;

use thiserror::Error;

pub use model::{model_closed_form, model_recursion, ModelSpec};
pub use p2::{p2_genus0, p2_genus0_with_progress, p2_genus1, p2_genus1_with_progress, p2_kernel};
pub use p3::{p3_genus0, p3_genus0_with_progress, p3_kernel};
pub use table::{CountTable, Target};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecursionError {
    #[error("kernel argument outside its domain: {0}")]
    KernelDomain(String),
    #[error("genus-0 table covers d <= {available}, but d <= {required} is needed")]
    MissingPrerequisite { required: usize, available: usize },
    #[error("invalid count table: {0}")]
    InvalidTable(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Called once per finished degree by the long-running constructors.
pub type Progress<'a> = &'a (dyn Fn(usize) + Sync);

fn no_progress(_: usize) {}
