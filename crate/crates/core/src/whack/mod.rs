//! Whack-a-mole multiplicative-weight solvers for the covering and packing
//! templates.

mod basic;
mod engine;
mod dynamic;
mod fast;
mod online;
mod packing;
mod step;
mod stream;

pub use basic::{solve_basic, solve_basic_with, solve_packing_basic, Choice, LowestIndex, Selector};
pub use engine::{WhackCore, WhackStats};
pub use dynamic::{DynamicStats, DynamicWhackState};
pub use fast::{solve_fast, solve_fast_traced, WhackState};
pub use online::{InsertResult, OnlineState};
pub use packing::solve_packing_fast;
pub use step::{step_size, step_size_terms, whack, whack_packing, Side, Term};
pub use stream::{solve_stream, MatrixRows, PassResult, RowSource, StreamCursor, StreamedRow, StreamMode, StreamState, StreamStats};
