//! Measurement harness: load censuses, disruption classification, lookup
//! cost statistics and report emission.
//!
//! Key samples may be sharded across workers holding read-only views of a
//! state; every aggregate here is an associative fold, so shard order does
//! not matter. The desk-scale defaults run single-threaded.

pub mod census;
pub mod complexity;
pub mod cost;
pub mod disruption;
pub mod keys;
pub mod report;
pub mod stats;

pub use census::KeyCensus;
pub use complexity::{
    tau_statistics, theoretical_bounds, trace_statistics, xi_statistics, LookupDistribution,
    TheoreticalBounds, TraceStats,
};
pub use cost::{
    bucket_churn_cost, bucket_throughput, resource_churn_cost, resource_throughput, Throughput,
    UpdateCost,
};
pub use disruption::{classify, ChurnEvent, DisruptionCensus};
pub use keys::{event_rng, KeyStream};
pub use report::{MetricRow, ScenarioReport, CSV_HEADER};
