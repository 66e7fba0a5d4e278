use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite complex sample sequence tagged with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("signal samples"));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Contract(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        for s in &samples {
            for v in [s.re, s.im] {
                if !v.is_finite() {
                    return Err(Error::NonFinite { what: "signal sample", value: v });
                }
            }
        }
        Ok(Self { samples, sample_rate_hz })
    }

    /// Unit sample rate, for transform-only use.
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, 1.0)
    }

    /// `x[n] = e^{j2π k0 n / N}` for `n = 0..N`.
    pub fn tone(n: usize, k0: usize) -> Result<Self> {
        let samples = (0..n)
            .map(|i| {
                // Reduce k0·n mod N first so hot-bin phases are exact multiples.
                let m = (k0 * i) % n.max(1);
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64)
            })
            .collect();
        Self::from_samples(samples)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Multiplies every sample by a real gain.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|s| s * gain).collect(), self.sample_rate_hz)
    }

}
