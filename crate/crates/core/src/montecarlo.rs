//! Deterministic parallel Monte Carlo.
//!
//! Trial `t` draws from stream `t` of the master seed, per-trial results are
//! collected in index order and reduced sequentially, so an estimate is
//! bit-identical whatever the size of the rayon pool.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::RngSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
        }
    }
}

/// A scalar result in bits per channel use with its standard error.
///
/// `std_error` is exactly zero for quadrature and closed-form values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError<T> {
    pub value: T,
    pub std_error: T,
    pub trials: u64,
    pub method: Method,
}

impl<T: Real> EstimateWithError<T> {
    pub fn closed_form(value: T) -> Self {
        Self {
            value,
            std_error: T::zero(),
            trials: 1,
            method: Method::ClosedForm,
        }
    }

    pub fn quadrature(value: T, nodes: usize) -> Self {
        Self {
            value,
            std_error: T::zero(),
            trials: nodes as u64,
            method: Method::Quadrature,
        }
    }

    /// Sample mean and `s / sqrt(n)` (two-pass, in slice order).
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one trial is required".into(),
            ));
        }
        let n = T::of(samples.len() as f64);
        let mean = samples.iter().fold(T::zero(), |acc, &x| acc + x) / n;
        let std_error = if samples.len() > 1 {
            let ss = samples
                .iter()
                .fold(T::zero(), |acc, &x| acc + (x - mean) * (x - mean));
            (ss / (n - T::one()) / n).sqrt()
        } else {
            T::zero()
        };
        if !mean.is_finite() || !std_error.is_finite() {
            return Err(Error::NonFinite("Monte Carlo average"));
        }
        Ok(Self {
            value: mean,
            std_error,
            trials: samples.len() as u64,
            method: Method::MonteCarlo,
        })
    }

    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            std_error: self.std_error * factor.abs(),
            ..self
        }
    }

    /// Same quantity in nats.
    pub fn to_nats(self) -> Self {
        self.scaled(T::ln_2())
    }

    /// `sqrt(σ_a² + σ_b²)`
    pub fn combined_std_error(&self, other: &Self) -> T {
        (self.std_error * self.std_error + other.std_error * other.std_error).sqrt()
    }

    /// `|a - b| <= k sqrt(σ_a² + σ_b²)`
    pub fn agrees_with(&self, other: &Self, k: T) -> bool {
        (self.value - other.value).abs() <= k * self.combined_std_error(other)
    }

    /// `a <= b + k sqrt(σ_a² + σ_b²)`
    pub fn at_most(&self, other: &Self, k: T) -> bool {
        self.value <= other.value + k * self.combined_std_error(other)
    }
}

/// Runs `trials` independent trials and averages them.
pub fn estimate<T, F>(trials: u64, seed: u64, trial: F) -> Result<EstimateWithError<T>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut RngSpec::new(seed, t).stream()))
        .collect::<Result<Vec<T>>>()?;
    EstimateWithError::from_samples(&samples)
}
