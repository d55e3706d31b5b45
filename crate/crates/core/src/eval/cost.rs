//! Update-cost and throughput probes. Operation counts are the portable
//! signal; wall-clock numbers ride along for reports but are never asserted.

use std::hint::black_box;
use std::time::Instant;

use crate::anchor::BucketHasher;
use crate::error::Error;
use crate::hashing::Key;
use crate::resource::{ResourceHasher, ResourceId};

/// Cost of one membership change, averaged over repeated trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateCost {
    pub trials: u32,
    /// Mutating primitive operations per remove+add cycle.
    pub ops_per_cycle: f64,
    /// Wall time per remove+add cycle; report-only.
    pub wall_nanos_per_cycle: f64,
}

/// Removes and re-adds one working bucket `trials` times. Re-adding always
/// revives the bucket just removed, so the state is unchanged afterwards.
pub fn bucket_churn_cost<B: BucketHasher + ?Sized>(
    state: &mut B,
    trials: u32,
) -> Result<UpdateCost, Error> {
    let bucket = *state
        .working_set()
        .last()
        .ok_or_else(|| Error::CorruptState("no working bucket to churn".into()))?;
    let ops_before = state.update_ops();
    let start = Instant::now();
    for _ in 0..trials {
        state.remove_bucket(bucket)?;
        state.add_bucket()?;
    }
    let wall = start.elapsed();
    Ok(UpdateCost {
        trials,
        ops_per_cycle: (state.update_ops() - ops_before) as f64 / f64::from(trials),
        wall_nanos_per_cycle: wall.as_nanos() as f64 / f64::from(trials),
    })
}

/// Removes and re-adds one resource `trials` times. Membership is restored
/// after every cycle; table-based algorithms may settle on a different but
/// equivalent-membership layout.
pub fn resource_churn_cost<R: ResourceHasher + ?Sized>(
    state: &mut R,
    trials: u32,
) -> Result<UpdateCost, Error> {
    let id: ResourceId = state
        .resources()
        .pop()
        .ok_or_else(|| Error::CorruptState("no resource to churn".into()))?;
    let ops_before = state.update_ops();
    let start = Instant::now();
    for _ in 0..trials {
        state.remove_resource(&id)?;
        state.add_resource(id.clone())?;
    }
    let wall = start.elapsed();
    Ok(UpdateCost {
        trials,
        ops_per_cycle: (state.update_ops() - ops_before) as f64 / f64::from(trials),
        wall_nanos_per_cycle: wall.as_nanos() as f64 / f64::from(trials),
    })
}

/// Timed lookup loop over a pre-generated key sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub lookups: u64,
    pub wall_seconds: f64,
    /// Millions of keys per second.
    pub mkps: f64,
}

fn rate(lookups: u64, wall_seconds: f64) -> Throughput {
    Throughput {
        lookups,
        wall_seconds,
        mkps: lookups as f64 / 1e6 / wall_seconds,
    }
}

pub fn bucket_throughput<B: BucketHasher + ?Sized>(state: &B, keys: &[Key]) -> Throughput {
    let start = Instant::now();
    let mut acc = 0u64;
    for &k in keys {
        acc = acc.wrapping_add(u64::from(state.get_bucket(k)));
    }
    black_box(acc);
    rate(keys.len() as u64, start.elapsed().as_secs_f64())
}

pub fn resource_throughput<R: ResourceHasher + ?Sized>(state: &R, keys: &[Key]) -> Throughput {
    let start = Instant::now();
    let mut acc = 0usize;
    for &k in keys {
        acc = acc.wrapping_add(state.resolve(k).as_bytes().len());
    }
    black_box(acc);
    rate(keys.len() as u64, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::AnchorState;
    use crate::baselines::HrwState;
    use crate::eval::keys::KeyStream;

    #[test]
    fn bucket_churn_restores_the_state_and_counts_ops() {
        let mut state = AnchorState::new(100, 90, 3).unwrap();
        let reference = state.clone();
        let cost = bucket_churn_cost(&mut state, 50).unwrap();
        assert_eq!(cost.trials, 50);
        assert_eq!(cost.ops_per_cycle, 10.0);
        let keys = KeyStream::new(0).take_keys(2000);
        for &k in &keys {
            assert_eq!(state.get_bucket(k), reference.get_bucket(k));
        }
    }

    #[test]
    fn resource_churn_preserves_membership() {
        let ids: Vec<ResourceId> = (0..8).map(|i| format!("r{i}").parse().unwrap()).collect();
        let mut state = HrwState::new(1, ids.clone()).unwrap();
        let cost = resource_churn_cost(&mut state, 10).unwrap();
        assert_eq!(cost.ops_per_cycle, 2.0);
        let mut expected = ids;
        expected.sort();
        assert_eq!(state.resources(), expected);
    }

    #[test]
    fn throughput_reports_positive_rates() {
        let state = AnchorState::new(64, 64, 0).unwrap();
        let keys = KeyStream::new(4).take_keys(200_000);
        let t = bucket_throughput(&state, &keys);
        assert_eq!(t.lookups, 200_000);
        assert!(t.mkps > 0.0);
        assert!(t.wall_seconds > 0.0);
    }
}
