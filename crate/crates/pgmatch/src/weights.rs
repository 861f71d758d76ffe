//! Deterministic power-law weight sequences for expected-degree graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a synthetic scale-free groundtruth graph.
///
/// The weight of vertex `i` is
/// `w_bar * (beta-2)/(beta-1) * (n/(i+i0))^(1/(beta-1))`,
/// which is non-increasing in `i`. The default offset `i0` is the smallest
/// non-negative integer that caps the top weight at `sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraphSpec {
    pub n: usize,
    /// Power-law exponent; any value above 2 is accepted, the scale-free
    /// regime of interest is 2 < beta < 3.
    pub beta: f64,
    /// Target average weight, in expected-degree units.
    pub w_bar: f64,
    /// Index offset controlling the maximum weight.
    pub i0: f64,
    pub rng_seed: u64,
}

impl WeightedGraphSpec {
    /// Spec with the default `i0` (maximum weight capped at `sqrt(n)`).
    pub fn new(n: usize, beta: f64, w_bar: f64, rng_seed: u64) -> Result<Self> {
        let i0 = default_i0(n, beta, w_bar)?;
        Self::with_i0(n, beta, w_bar, i0, rng_seed)
    }

    pub fn with_i0(n: usize, beta: f64, w_bar: f64, i0: f64, rng_seed: u64) -> Result<Self> {
        let spec = WeightedGraphSpec {
            n,
            beta,
            w_bar,
            i0,
            rng_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.beta > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must exceed 2, got {}",
                self.beta
            )));
        }
        if !(self.w_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "w_bar must be positive, got {}",
                self.w_bar
            )));
        }
        if !(self.i0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "i0 must be non-negative, got {}",
                self.i0
            )));
        }
        Ok(())
    }

    /// Weight of vertex `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let prefactor = self.w_bar * (self.beta - 2.0) / (self.beta - 1.0);
        prefactor * (self.n as f64 / (i as f64 + self.i0)).powf(1.0 / (self.beta - 1.0))
    }

    /// The full non-increasing weight sequence.
    pub fn weight_sequence(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.weight(i)).collect()
    }
}

/// Smallest non-negative integer offset for which `weight(0) <= sqrt(n)`:
/// the exact solution `n*(w_bar*(beta-2)/((beta-1)*sqrt(n)))^(beta-1)`
/// rounded up.
pub fn default_i0(n: usize, beta: f64, w_bar: f64) -> Result<f64> {
    if !(beta > 2.0) || !(w_bar > 0.0) || n < 2 {
        return Err(Error::InvalidParameter(
            "default_i0 requires n >= 2, beta > 2, w_bar > 0".into(),
        ));
    }
    let nf = n as f64;
    let prefactor = w_bar * (beta - 2.0) / (beta - 1.0);
    let exact = nf * (prefactor / nf.sqrt()).powf(beta - 1.0);
    Ok(exact.ceil().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_is_non_increasing_and_capped() {
        for &(n, beta, w_bar) in &[
            (100usize, 2.5, 5.0),
            (10_000, 2.5, 5.0),
            (10_000, 2.23, 6.0),
            (5_000, 2.9, 25.0),
        ] {
            let spec = WeightedGraphSpec::new(n, beta, w_bar, 0).unwrap();
            let w = spec.weight_sequence();
            let sqrt_n = (n as f64).sqrt();
            assert!(
                w[0] <= sqrt_n + 1e-9,
                "max weight {} exceeds sqrt(n)={} for n={n} beta={beta}",
                w[0],
                sqrt_n
            );
            for i in 1..n {
                assert!(w[i] <= w[i - 1]);
                assert!(w[i] > 0.0);
            }
        }
    }

    #[test]
    fn default_i0_is_tight() {
        // One step less than the default must push the top weight over sqrt(n)
        // (unless i0 rounded up from an exact integer).
        let (n, beta, w_bar) = (10_000usize, 2.5, 5.0);
        let i0 = default_i0(n, beta, w_bar).unwrap();
        let spec = WeightedGraphSpec::with_i0(n, beta, w_bar, i0, 0).unwrap();
        assert!(spec.weight(0) <= (n as f64).sqrt() + 1e-9);
        if i0 >= 1.0 {
            let looser = WeightedGraphSpec::with_i0(n, beta, w_bar, i0 - 1.0, 0).unwrap();
            assert!(looser.weight(0) > (n as f64).sqrt() - 1e-6);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeightedGraphSpec::new(1, 2.5, 5.0, 0).is_err());
        assert!(WeightedGraphSpec::new(10, 2.0, 5.0, 0).is_err());
        assert!(WeightedGraphSpec::new(10, 2.5, 0.0, 0).is_err());
        assert!(WeightedGraphSpec::with_i0(10, 2.5, 5.0, -1.0, 0).is_err());
    }
}
