//! Core algorithms for consistent dynamic labeling of rotating point maps.
//!
//! A statically labeled map (axis-aligned rectangular labels anchored at point
//! corners) is rotated through a full turn. Equivalently, each label rotates
//! about its own anchor while the points stay put. This crate computes, for
//! every label pair, the angular ranges where the labels overlap (soft
//! conflicts) or where one label covers the other's anchor (hard conflicts),
//! and schedules per-label activity ranges over [0, 2pi) so that no two
//! conflicting labels are active at the same angle and total activity is
//! maximized.
//!
//! The crate is `no_std` + `alloc`: all solvers are pure and clock-free. Time
//! limits are injected through [`exact::SearchBudget`]; file formats, timing
//! and the CLI live in the companion `rotlabel` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod angular;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod greedy;
pub mod metrics;
pub mod model;
pub mod qapx;

mod fmtnum;

pub use error::CoreError;
pub use fmtnum::format_sig12;

/// Set-arithmetic tolerance: boundaries closer than this merge, intervals at
/// most this long are degenerate and dropped during canonicalization.
pub const MERGE_EPS: f64 = 1e-12;

/// Conflict event deduplication tolerance: endpoints closer than this collapse
/// to one event in the global event list.
pub const EVENT_EPS: f64 = 1e-9;

/// Activity ranges shorter than this are never assigned by any solver.
pub const MIN_RANGE: f64 = 1e-9;
