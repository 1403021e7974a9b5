//! Discrete realization of the white Gaussian noise field.
//!
//! The continuous field has `E{N(r1) N^H(r2)} = sigma2 delta(r1 - r2)`; on a
//! grid with cell area dA the delta carries a 1/dA, so each cell draws an
//! independent circularly-symmetric complex Gaussian of variance
//! `sigma2 / dA`. Cell-area-weighted inner products then reproduce the
//! continuous statistics.

use super::DiscretizedAperture;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Noise spectral density plus the seed that makes sampling reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
    seed: u64,
}

impl NoiseModel {
    pub fn new(sigma2: f64, seed: u64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise density must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2, seed })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for one trial; streams split by counter so
    /// trials can run in any order and still reproduce bit-identically.
    pub(crate) fn rng_for_trial(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// One sampled noise field; `trial` selects an independent stream.
pub fn sample_noise(d: &DiscretizedAperture, nm: &NoiseModel, trial: u64) -> Vec<Complex64> {
    let mut rng = nm.rng_for_trial(trial);
    sample_noise_with(d, nm, &mut rng)
}

pub(crate) fn sample_noise_with(
    d: &DiscretizedAperture,
    nm: &NoiseModel,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex64> {
    let comp_std = (nm.sigma2 / (2.0 * d.cell_area())).sqrt();
    (0..d.n())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * comp_std, im * comp_std)
        })
        .collect()
}
