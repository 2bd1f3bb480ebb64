//! Linear-programming decoding of binary linear codes with interior-point
//! solvers.
//!
//! The decoding LP minimises `<gamma, x>` over the fundamental polytope of a
//! parity-check matrix. [`polytope`] builds that polytope and its
//! standard-form embedding, [`ipm`] runs affine-scaling or primal-dual
//! path-following iterations on it, and [`linalg`] / [`gabp`] provide the
//! solvers for the positive-definite system each iteration needs.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod codes;
pub mod error;
pub mod gabp;
pub mod harness;
pub mod ipm;
pub mod linalg;
pub mod polytope;

pub use channels::{transmit_and_llr, ChannelSpec, RngSeed};
pub use codes::{BinaryWord, LlrVector, SparseBinaryMatrix};
pub use error::{Error, Result};
pub use harness::{simulate, SimOptions, SimSummary, TrialRecord};
pub use ipm::{
    decode, Algorithm, DecodeResult, DecodeStatus, Decoder, InnerSolverKind, SolverConfig,
};
