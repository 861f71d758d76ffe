//! Maximum-likelihood estimation of a power-law degree exponent.

use crate::error::{Error, Result};

/// Minimum number of samples at or above the cutoff for a usable estimate.
pub const MIN_SAMPLES: usize = 10;

/// Continuous maximum-likelihood estimate of the exponent of a power-law
/// degree distribution, with the Clauset-Shalizi-Newman half-step shift for
/// discrete data:
///
/// `beta = 1 + m / sum(ln(d_i / (d_min - 1/2)))` over the `m` degrees
/// `d_i >= d_min`.
///
/// ```
/// use pgmatch::mle::estimate_power_law_exponent;
/// let degrees: Vec<u64> = (0..1000).map(|i| 10 + i % 90).collect();
/// let beta = estimate_power_law_exponent(&degrees, 10).unwrap();
/// assert!(beta > 1.0);
/// ```
pub fn estimate_power_law_exponent(degrees: &[u64], d_min: u64) -> Result<f64> {
    if d_min < 1 {
        return Err(Error::InvalidParameter("d_min must be at least 1".into()));
    }
    let shift = d_min as f64 - 0.5;
    let mut m = 0usize;
    let mut log_sum = 0.0f64;
    let mut all_at_cutoff = true;
    for &d in degrees {
        if d >= d_min {
            m += 1;
            log_sum += (d as f64 / shift).ln();
            if d != d_min {
                all_at_cutoff = false;
            }
        }
    }
    if m < MIN_SAMPLES {
        return Err(Error::Estimation(format!(
            "need at least {MIN_SAMPLES} degrees >= d_min={d_min}, found {m}"
        )));
    }
    if all_at_cutoff {
        return Err(Error::Estimation(
            "all included degrees equal d_min; the estimator diverges".into(),
        ));
    }
    Ok(1.0 + m as f64 / log_sum)
}

/// Default cutoff convention: the smallest positive degree in the sample.
pub fn default_d_min(degrees: &[u64]) -> Option<u64> {
    degrees.iter().copied().filter(|&d| d >= 1).min()
}
