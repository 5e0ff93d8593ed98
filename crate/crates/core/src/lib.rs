//! Oriented projective shape (OPS) analysis on products of spheres.
//!
//! Planar landmark configurations are normalised against an oriented
//! projective frame, which registers every remaining landmark as a unit
//! vector on `S^m`. The crate then provides the extrinsic (directional)
//! summaries of such samples: mean resultant length, the total-variance
//! index `tS = 2(1 - R_n)`, its delta-method standard error, confidence
//! intervals and the one-sided coplanarity test. A Veronese-Whitney
//! projective-shape comparator, leave-one-out diagnostics and a synthetic
//! pinhole-camera scene generator complete the toolkit.
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `std` feature
//! for `std::error::Error` impls and `serde` for (de)serialisation of the
//! result types.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod diagnostics;
pub mod directional;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod rng;
pub mod special;
pub mod synth;
pub mod vw;

pub use diagnostics::{
    greedy_reduce, greedy_reduce_by, leave_one_out, LooRow, ReductionRule, ReductionStep, ReductionTrace, StopReason,
};
pub use directional::{coplanarity_test, CoplanarityTest, DirectionSample, OpsSummary};
pub use error::{GeometryError, StatsError, SynthError};
pub use geometry::{FrameSpec, HomogeneousPoint, LandmarkScene, OrientedFrameChart};
pub use linalg::Matrix;
pub use rng::SplitMix64;
pub use vw::VwSummary;
