//! Coverage analysis of downlink NOMA cellular networks assisted by UAVs that
//! carry an intelligent reflecting surface (IRS).
//!
//! The crate has two halves that check each other:
//!
//! * closed forms: association statistics ([`association`]), near/far user
//!   coverage probabilities and the elevation-angle optimizer ([`coverage`]),
//!   built on the numeric kernels in [`special`];
//! * a trial-level Monte Carlo simulator of the same SIR model
//!   ([`montecarlo`]) with reproducible, scheduler-independent random streams.
//!
//! [`experiment`] wires both into the sweep presets, CSV/SVG emission and the
//! `uav-irs-noma` command line tool.
//!
//! Angles are radians everywhere in the library. Only the config file and
//! the command line speak degrees.

// `!(a < b)` is the NaN-rejecting form of parameter validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod coverage;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod network;
pub mod special;

pub use error::{Error, Result};
