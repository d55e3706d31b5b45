//! Load census over a key sample: how many keys each resource (or working
//! bucket) received, and how far the most loaded one sits above the mean.

use crate::error::Error;
use crate::eval::stats;
use crate::hashing::Key;

/// Per-slot key counts. Slots are dense indices chosen by the caller:
/// working buckets for bucket hashers, resource positions for the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyCensus {
    counts: Vec<u64>,
    total: u64,
}

impl KeyCensus {
    /// Tallies `assign(key)` over the sample. `assign` must return an
    /// index below `slots`.
    pub fn collect<F>(keys: &[Key], slots: usize, mut assign: F) -> Self
    where
        F: FnMut(Key) -> usize,
    {
        let mut counts = vec![0u64; slots];
        for &k in keys {
            counts[assign(k)] += 1;
        }
        KeyCensus {
            counts,
            total: keys.len() as u64,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Percentage by which the most loaded slot exceeds the average load.
    /// 0 means perfect balance.
    pub fn oversubscription_percent(&self) -> Result<f64, Error> {
        if self.counts.is_empty() || self.total == 0 {
            return Err(Error::CorruptState(
                "oversubscription needs a nonempty census".into(),
            ));
        }
        let max = *self.counts.iter().max().expect("nonempty") as f64;
        let mean = self.total as f64 / self.counts.len() as f64;
        Ok(100.0 * (max - mean) / mean)
    }

    /// Chi-square statistic against the uniform expectation.
    pub fn chi_square(&self) -> f64 {
        stats::chi_square_uniform(&self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(counts: &[u64]) -> KeyCensus {
        KeyCensus {
            counts: counts.to_vec(),
            total: counts.iter().sum(),
        }
    }

    #[test]
    fn equal_counts_are_perfectly_balanced() {
        let c = census(&[250, 250, 250, 250]);
        assert_eq!(c.oversubscription_percent().unwrap(), 0.0);
    }

    #[test]
    fn ten_percent_oversubscription_from_the_formula() {
        let c = census(&[110, 100, 90]);
        assert!((c.oversubscription_percent().unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn collect_sums_to_total() {
        let keys: Vec<Key> = (0..1000).map(Key).collect();
        let c = KeyCensus::collect(&keys, 7, |k| (k.0 % 7) as usize);
        assert_eq!(c.total(), 1000);
        assert_eq!(c.counts().iter().sum::<u64>(), 1000);
    }

    #[test]
    fn empty_census_is_rejected() {
        assert!(census(&[]).oversubscription_percent().is_err());
    }
}
