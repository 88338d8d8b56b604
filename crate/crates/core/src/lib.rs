//! Bucket-brigade qRAM simulation and amplitude encoding from
//! squared-amplitude trees.
//!
//! - [`data`]: sparse vectors and matrices, bit paths, tolerances.
//! - [`kptree`]: partial-sum trees with signed leaves, one per row plus a
//!   tree of row norms for matrices.
//! - [`qram`]: the qutrit switch tree, routing, XOR retrieval, unrouting
//!   and cost accounting; [`qutrit`] is an explicit statevector model of
//!   the same device for small widths.
//! - [`simulator`]: dense statevector over named registers.
//! - [`stateprep`]: the level-by-level preparation pipeline.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod data;
pub mod error;
pub mod kptree;
pub mod qram;
pub mod qutrit;
pub mod simulator;
pub mod stateprep;

pub use data::{BitPath, SparseMatrix, SparseVector, Tolerance};
pub use error::{Error, Result};
pub use kptree::{KpForest, KpTree};
pub use qram::{QramInstance, RoutingLog, SwitchState};
pub use simulator::{RegisterLayout, StateVector};
pub use stateprep::{PrepOptions, PrepPlan, PrepResult, SignMethod};
