//! Monte-Carlo lookup-cost distributions: hash operations per lookup (tau)
//! and memory accesses per lookup (xi), with the analytic bounds they are
//! compared against.

use crate::anchor::BucketHasher;
use crate::eval::stats;
use crate::hashing::Key;

/// Empirical distribution of a per-lookup integer cost.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupDistribution {
    pub samples: u64,
    pub mean: f64,
    pub std: f64,
    /// Standard error of the mean.
    pub sem: f64,
    /// histogram[v] = number of lookups that cost exactly v.
    pub histogram: Vec<u64>,
}

impl LookupDistribution {
    fn from_histogram(histogram: Vec<u64>) -> Self {
        let samples: u64 = histogram.iter().sum();
        let n = samples as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (v, &count) in histogram.iter().enumerate() {
            let c = count as f64;
            sum += c * v as f64;
            sum_sq += c * (v as f64) * (v as f64);
        }
        let mean = sum / n;
        let var = if samples > 1 {
            (sum_sq - n * mean * mean) / (n - 1.0)
        } else {
            0.0
        };
        let std = var.max(0.0).sqrt();
        LookupDistribution {
            samples,
            mean,
            std,
            sem: stats::sem(std, samples),
            histogram,
        }
    }

    /// ccdf[t] = fraction of lookups with cost strictly greater than t.
    pub fn ccdf(&self) -> Vec<f64> {
        let n = self.samples as f64;
        let mut out = Vec::with_capacity(self.histogram.len());
        let mut above = self.samples;
        for &count in &self.histogram {
            above -= count;
            out.push(above as f64 / n);
        }
        out
    }

    /// Fraction of lookups that cost exactly v.
    pub fn fraction_at(&self, v: usize) -> f64 {
        let count = self.histogram.get(v).copied().unwrap_or(0);
        count as f64 / self.samples as f64
    }
}

/// tau and xi measured together over one traced pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStats {
    pub tau: LookupDistribution,
    pub xi: LookupDistribution,
}

pub fn trace_statistics<B, I>(state: &B, keys: I) -> TraceStats
where
    B: BucketHasher + ?Sized,
    I: IntoIterator<Item = Key>,
{
    let mut tau_hist: Vec<u64> = Vec::new();
    let mut xi_hist: Vec<u64> = Vec::new();
    let bump = |hist: &mut Vec<u64>, v: usize| {
        if hist.len() <= v {
            hist.resize(v + 1, 0);
        }
        hist[v] += 1;
    };
    for key in keys {
        let trace = state.get_bucket_traced(key);
        bump(&mut tau_hist, trace.hash_ops as usize);
        bump(&mut xi_hist, trace.memory_accesses as usize);
    }
    TraceStats {
        tau: LookupDistribution::from_histogram(tau_hist),
        xi: LookupDistribution::from_histogram(xi_hist),
    }
}

/// Hash operations per lookup.
pub fn tau_statistics<B, I>(state: &B, keys: I) -> LookupDistribution
where
    B: BucketHasher + ?Sized,
    I: IntoIterator<Item = Key>,
{
    trace_statistics(state, keys).tau
}

/// Memory accesses per lookup.
pub fn xi_statistics<B, I>(state: &B, keys: I) -> LookupDistribution
where
    B: BucketHasher + ?Sized,
    I: IntoIterator<Item = Key>,
{
    trace_statistics(state, keys).xi
}

/// Analytic references for a capacity-a state with w working buckets under
/// random removals. `mean_tau` and `std_tau` bound the lookup hash count;
/// `mean_xi_order` is the order-level envelope for memory accesses and
/// `mean_xi` the sharper expression it comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalBounds {
    pub mean_tau: f64,
    pub std_tau: f64,
    pub mean_xi: f64,
    pub mean_xi_order: f64,
}

pub fn theoretical_bounds(a: u32, w: u32) -> TheoreticalBounds {
    let l = (f64::from(a) / f64::from(w)).ln();
    TheoreticalBounds {
        mean_tau: 1.0 + l,
        std_tau: l.sqrt(),
        mean_xi: 1.0 + l + l * l,
        mean_xi_order: (1.0 + l) * (1.0 + l),
    }
}
