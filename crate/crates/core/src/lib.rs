//! Quantum learning machines for binary classification of qubit states.
//!
//! Two unknown pure qubit states `ψ0`, `ψ1` are each supplied `n` times as a
//! labelled training set; the task is to label a further data qubit. This
//! crate evaluates the optimal (programmable) discrimination error, builds the
//! measure-first learning machine that attains it with a finite covariant
//! POVM, evaluates estimate-and-discriminate machines, and simulates all of
//! them by Monte Carlo.

pub mod e_and_d;
pub mod error;
pub mod hilbert;
pub mod machines;
pub mod par;
pub mod simulate;
pub mod su2;

pub use error::{Error, Result};
pub use par::Execution;
