//! Divisible-load partitioning for a fixed distribution sequence.

mod invariant;
mod root;
pub mod sequence;
mod simulate;
mod system;
mod trace;
mod varying;

pub use invariant::{solve_time_invariant, ScheduleResult};
pub use sequence::{all_sequences, checked_factorial, factorial, next_permutation, Sequence};
pub use simulate::{simulate_schedule, Timeline, SIMPLEX_TOLERANCE};
pub use system::{EquivalentSpeeds, SystemConfig, TraceSet};
pub use trace::{HorizonBehavior, SpeedTrace};
pub use varying::{solve_time_varying, MAX_ITERATIONS, SPREAD_TOLERANCE, SUM_TOLERANCE};
