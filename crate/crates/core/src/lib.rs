//! Statevector simulation and experiment harness for approximate-QFT integer
//! arithmetic under tunable depolarizing gate noise.
//!
//! The crate builds Fourier-basis adders (QFA) and multipliers (QFM) with a
//! configurable AQFT approximation depth, decomposes them to the
//! {Id, X, SX, RZ, CX} basis, simulates them exactly or under stochastic
//! Pauli-injection trajectories, and drives the success-rate sweeps over gate
//! error rates, depths, and operand superposition orders.
//!
//! Module map:
//! - [`circuit`]: gate/circuit IR, basis decomposition, gate counts, text
//!   serialization.
//! - [`arith`]: QFT/AQFT, addition step, QFA, controlled QFA, QFM builders;
//!   qinteger encoding and the classical expected-output oracle.
//! - [`sim`]: dense statevector kernels, noiseless execution, sampling.
//! - [`noise`]: depolarizing model, trajectory execution, density-matrix
//!   channel oracle.
//! - [`engine`]: split label/dense trajectory engine used by the sweeps.
//! - [`harness`]: experiment configs, instance generation, the plurality
//!   success metric, sweep execution and persistence.
//! - [`report`]: gate-count comparison against the published tallies.
//! - [`linalg`]: small dense matrices backing the validation oracles.
//! - [`seeding`]: the deterministic seed-derivation tree.

pub mod arith;
pub mod circuit;
pub mod engine;
mod error;
pub mod harness;
pub mod linalg;
pub mod noise;
pub mod report;
pub mod seeding;
pub mod sim;

pub use arith::{ArithOp, DepthSpec, QInteger};
pub use circuit::{Circuit, Gate, GateCounts};
pub use error::{Error, Result};
pub use harness::{ErrorAxis, ExperimentConfig, Pattern};
pub use noise::NoiseModel;
pub use sim::{CountsMap, Statevector};
