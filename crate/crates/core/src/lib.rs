//! Divisible-load scheduling on single-level trees, and online learning of
//! the load-distribution order with Thompson-sampling bandits.
//!
//! - [`schedule`]: optimal partitions for one sequence, with constant or
//!   piecewise-constant shared speeds, plus an event-replay checker.
//! - [`bandit`]: Beta posteriors over whole sequences or over
//!   position/worker weights.
//! - [`search`]: hill climbing and recursive batch optimisation over the
//!   permutation space.
//! - [`sim`]: trace generation, seeded trial loops and regret metrics.
//! - [`io`]: configuration, CSV/JSON outputs, posterior snapshots and run
//!   manifests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod bandit;
pub mod schedule;
pub mod search;
pub mod sim;
pub mod io;

pub use error::{Error, Result};
