//! AnchorHash style consistent hashing, reference tiers, classic baselines
//! (rendezvous, ring, maglev) and the measurement harness used to compare
//! them.
//!
//! The centerpiece is [`anchor::AnchorState`]: a consistent hash over a
//! fixed capacity of `a` buckets of which `N` are working, with O(1)
//! amortized lookups, O(1) updates, full consistency under arbitrary
//! removal/addition orders, and four flat `u32` arrays of memory.

mod error;

pub mod anchor;
pub mod baselines;
pub mod eval;
pub mod hashing;
pub mod resource;
pub mod snapshot;
pub mod tiers;
pub mod wrapper;

pub use error::{Error, SnapshotError};
