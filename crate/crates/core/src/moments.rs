//! Streaming mean, variance and skewness.
//!
//! Central sums are updated one sample at a time with the Welford recurrence
//! extended to the third moment, and two accumulators combine exactly with
//! the pairwise merge formulas. Moments use the population convention
//! (divide by `n`); [`SlotEstimator::variance`] is the only place the
//! divisor is chosen.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum MomentsError {
    #[error("need at least {required} samples, have {available}")]
    InsufficientSamples { required: u64, available: u64 },
    #[error("variance is zero, skewness is undefined")]
    DegenerateDistribution,
}

/// Running first three central moments of a stream of samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SlotEstimator {
    count: u64,
    mean: f64,
    /// Sum of squared deviations from the mean.
    m2: f64,
    /// Sum of cubed deviations from the mean.
    m3: f64,
}

impl SlotEstimator {
    pub const fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            m3: 0.0,
        }
    }

    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Self {
        let mut est = Self::new();
        for x in samples {
            est.observe(x);
        }
        est
    }

    pub fn observe(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let term1 = delta * delta_n * n1;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
        self.mean += delta_n;
    }

    /// Combines two accumulators as if every sample had gone through one.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let delta2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + delta2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        Self {
            count: self.count + other.count,
            mean,
            m2,
            m3,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn m3(&self) -> f64 {
        self.m3
    }

    fn require(&self, required: u64) -> Result<(), MomentsError> {
        if self.count < required {
            Err(MomentsError::InsufficientSamples {
                required,
                available: self.count,
            })
        } else {
            Ok(())
        }
    }

    pub fn mean(&self) -> Result<f64, MomentsError> {
        self.require(1)?;
        Ok(self.mean)
    }

    /// Population variance.
    pub fn variance(&self) -> Result<f64, MomentsError> {
        self.require(2)?;
        Ok(self.m2 / self.count as f64)
    }

    /// Third standardized central moment. Positive when the mass sits on the
    /// low side with a long tail toward high values.
    pub fn skewness(&self) -> Result<f64, MomentsError> {
        self.require(3)?;
        if self.m2 <= 0.0 {
            return Err(MomentsError::DegenerateDistribution);
        }
        let n = self.count as f64;
        let var = self.m2 / n;
        Ok((self.m3 / n) / (var * libm::sqrt(var)))
    }

    /// Large-sample standard error of the sample skewness of a normal
    /// population, `sqrt(6n(n-1) / ((n-2)(n+1)(n+3)))`.
    pub fn skewness_standard_error(&self) -> Result<f64, MomentsError> {
        self.require(3)?;
        let n = self.count as f64;
        Ok(libm::sqrt(
            6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)),
        ))
    }
}
