//! Greedy multiplicative-weights solver for positive LPs
//! (`P x <= 1`, `C x >= 1`), static and under relaxing updates.

mod dual;
mod dynamic;
mod fixed;
mod heap;
mod potentials;
mod weights;

/// Coordinate `k` is cheap when `lambda(x, k) <= (1 + CHEAP_SLACK eps) lambda_0(x)`.
pub const CHEAP_SLACK: f64 = 5.0;

pub use dual::{encoded_primal_slack, extract_packing_dual, RelaxingCovering};
pub use dynamic::{DeltaRecord, GreedyOptions, GreedyState, GreedyStats, Status};
pub use fixed::{solve_static_positive, StaticStats};
pub use heap::{DeltaHeap, Kind};
pub use potentials::{coordinate_cost, eta, log_sum_exp, relative_cost, soft_potentials, weight_ratio};
pub use weights::SideWeights;
