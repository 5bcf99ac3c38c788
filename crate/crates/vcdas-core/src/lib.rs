//! Downlink rate analysis for virtual-cell based large-scale distributed
//! antenna systems (DAS).
//!
//! In a virtual-cell DAS, `K` single-antenna users and `L` base-station
//! antennas are scattered over the unit disk and every user is served by its
//! `V` closest antennas (its *virtual cell*). This crate provides the
//! numerical core for studying how the virtual cell size `V` drives the
//! average user rate:
//!
//! - [`geometry`]: random topologies, path-loss gains `d^{-α/2}`, virtual
//!   cell formation and nearest-interferer queries;
//! - [`specfun`]: the scaled exponential integral `e^z E₁(z)`, the upper
//!   incomplete gamma `Γ(1/2, x)` and the hypoexponential pdf;
//! - [`mrt`]: maximum ratio transmission without cooperation — per-antenna
//!   power fractions, average SINR and the closed-form ergodic rate, with a
//!   Monte Carlo cross-check;
//! - [`bounds`]: Monte Carlo estimation of the average-rate upper bound and
//!   its signal/interference entropy terms from order-statistic samplers;
//! - [`vopt`]: the optimal virtual-cell-size rule of thumb `⌈0.2·L/K⌉`;
//! - [`grouping`]: overlap-based user grouping and the sectorized
//!   BS-clustering baseline;
//! - [`zfbf`]: zero-forcing joint transmission inside each group with
//!   fading-averaged inter-group interference.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature to use it in that configuration. All randomized operations
//! take caller-supplied seeded streams (see [`seed`]) and are deterministic
//! and schedule-independent.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
mod fmath;
pub mod geometry;
pub mod grouping;
pub mod linalg;
pub mod mrt;
pub mod seed;
pub mod specfun;
pub mod stats;
pub mod vopt;
pub mod zfbf;

/// Errors reported by the analysis operations.
///
/// Every fallible operation validates its documented preconditions and
/// returns one of these instead of panicking.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A count parameter (users, antennas, samples, ...) is below its minimum.
    #[error("{what} must be at least {min}, got {got}")]
    CountTooSmall {
        what: &'static str,
        got: usize,
        min: usize,
    },
    /// Virtual cell size outside `1..=L`.
    #[error("virtual cell size {v} outside valid range 1..={l}")]
    CellSizeOutOfRange { v: usize, l: usize },
    /// A point lies outside the closed unit disk.
    #[error("{what} position {index} lies outside the unit disk")]
    OutsideUnitDisk {
        what: &'static str,
        index: usize,
    },
    /// Path-loss factor must be finite and greater than 2.
    #[error("path-loss factor must be finite and > 2, got {alpha}")]
    InvalidPathLoss { alpha: f64 },
    /// An argument that must be strictly positive and finite is not.
    #[error("{what} must be positive and finite, got {got}")]
    NonPositive { what: &'static str, got: f64 },
    /// An argument that must be nonnegative and finite is not.
    #[error("{what} must be nonnegative and finite, got {got}")]
    Negative { what: &'static str, got: f64 },
    /// Hypoexponential rates still coincide after the perturbation rule.
    #[error("hypoexponential rates are degenerate after perturbation")]
    DegenerateRates,
    /// Two containers that must describe the same system disagree.
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },
    /// Cluster count exceeds the number of antennas.
    #[error("cluster count {clusters} exceeds antenna count {l}")]
    TooManyClusters { clusters: usize, l: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub use geometry::{LargeScaleGains, Point, Topology, VirtualCellMap};
pub use grouping::{ClusterBaseline, GroupPartition};
pub use mrt::MrtContext;
pub use stats::Estimate;
pub use zfbf::RateReport;
