//! Small statistics helpers shared by the evaluation harness and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean and sample standard deviation (n - 1 denominator).
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n > 1, "need at least two samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, var.sqrt())
}

/// Standard error of the mean.
pub fn sem(std: f64, n: u64) -> f64 {
    std / (n as f64).sqrt()
}

/// Chi-square statistic of observed counts against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Chi-square statistic against arbitrary expected counts.
pub fn chi_square_expected(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Upper critical value of the chi-square distribution: the quantile at
/// `1 - alpha` for the given degrees of freedom.
pub fn chi_square_critical(df: f64, alpha: f64) -> f64 {
    ChiSquared::new(df)
        .expect("df must be positive")
        .inverse_cdf(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_basics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-12);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn chi_square_uniform_of_exact_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
    }

    #[test]
    fn critical_values_match_wilson_hilferty() {
        // Cross-check the library quantile against the Wilson-Hilferty
        // approximation, which is accurate to well under 1% at these dfs.
        let z = 3.090232306167813; // standard normal quantile at 0.999
        for df in [225.0f64, 999.0, 1999.0] {
            let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
            let wh = df * t * t * t;
            let got = chi_square_critical(df, 0.001);
            assert!(
                (got - wh).abs() / wh < 0.01,
                "df {df}: statrs {got:.2} vs WH {wh:.2}"
            );
        }
    }
}
