//! Multiplicative-weight solvers for packing, covering and mixed positive
//! linear programs.
//!
//! The solvers are generic over the float type through [`Scalar`]; the
//! aliases at the crate root fix it to `f64`.

// Negated comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod error;
pub mod exact;
pub mod format;
pub mod greedy;
pub mod instance;
pub mod matrix;
pub mod reductions;
pub mod scaled;
pub mod scalar;
pub mod update;
pub mod whack;

pub use certificate::{check_certificate, Outcome, Slack};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = matrix::SparseMatrix<f64>;
pub type Template = instance::NormalizedInstance<f64>;
pub type General = instance::GeneralInstance<f64>;
pub type Positive = instance::PositiveInstance<f64>;
pub type Certificate = certificate::Outcome<f64>;
pub type DynamicWhack = whack::DynamicWhackState<f64>;
pub type OnlineWhack = whack::OnlineState<f64>;
pub type Greedy = greedy::GreedyState<f64>;
