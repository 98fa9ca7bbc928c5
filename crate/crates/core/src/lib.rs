//! Stochastic-channel calculus for time-correlated Pauli noise, and a Pauli-frame
//! simulator for quantum memories protected by single-shot error correction.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli_algebra`]: Pauli operations and F2 linear algebra.
//! * [`code`]: stabilizer codes with correction tables, metachecks and syndrome repair.
//! * [`prob`] and [`stochastic`]: stochastic channels, distances, failure rates,
//!   correlated and uncorrelated composition, locality classes.
//! * [`noise`]: fault-path samplers, including a Markov string adversary.
//! * [`memory`]: Monte Carlo quantum-memory engine.
//! * [`bounds`]: analytic parameter functions and the lifetime bound.
//! * [`verify`]: brute-force oracles over tiny instances.
//! * [`config`] and [`cli`]: experiment files and the command-line runner.

pub mod bounds;
pub mod cli;
pub mod code;
pub mod config;
pub mod error;
pub mod io;
pub mod lp;
pub mod memory;
pub mod noise;
pub mod pauli_algebra;
pub mod prob;
pub mod rng;
pub mod stochastic;
pub mod verify;

pub use code::{CodeFamily, CodeId, StabilizerCode};
pub use error::{Error, Result};
pub use pauli_algebra::{BitVec, F2Matrix, PauliOp};
pub use stochastic::{ClassSpec, JointFaultDistribution, RecoveryChannel, StochasticChannel};

/// Version string stamped into trajectory dumps and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
