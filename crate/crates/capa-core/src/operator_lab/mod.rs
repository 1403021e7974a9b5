//! Discretized-operator laboratory.
//!
//! Replaces aperture integrals by cell sums (`integral ~ dA * sum`) so the
//! whitening identities and the SIC pipeline can be checked by plain matrix algebra
//! and Monte Carlo, independently of the closed forms. The Dirac delta is
//! realized as `(1/dA) * I`, which makes the identity-plus-rank-one algebra
//! exact on the grid once the grid's own channel gain is used inside the
//! whitening parameters; discretization error then shows up only when grid
//! statistics are compared against quadrature.

mod kernels;
mod noise;
mod sic;

pub use kernels::{
    autocorrelation_rzz, inverse_whitening_kernel, whitened_channel_hbar, whitening_kernel,
    whitening_residual, whitening_residual_dense, whitening_residuals_for_roots, KernelMatrix,
    WhiteningResidual,
};
pub use noise::{sample_noise, NoiseModel};
pub use sic::{run_sic_pipeline, Constellation, SicPipelineStats};

use crate::channel::Wave;
use crate::error::{Error, Result};
use crate::geometry::{ApertureRegion, UserSource};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Uniform cell-centered sampling of an aperture with one shared cell area.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedAperture {
    points: Vec<[f64; 3]>,
    cell_area: f64,
}

impl DiscretizedAperture {
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Sample a function of position at every grid point.
    pub fn sample<F: Fn([f64; 3]) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points.iter().map(|&p| f(p)).collect()
    }

    /// Grid realization of `integral |v|^2 dr`.
    pub fn grid_gain(&self, v: &[Complex64]) -> f64 {
        debug_assert_eq!(v.len(), self.n());
        self.cell_area * v.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Grid realization of `integral a^H b dr`.
    pub fn grid_inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        debug_assert_eq!(a.len(), b.len());
        self.cell_area
            * a.iter()
                .zip(b)
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
    }
}

/// Cell-centered uniform grid with `n_per_axis` cells per axis (per element
/// for a grid aperture, where each element gets its own subgrid).
pub fn discretize(region: &ApertureRegion, n_per_axis: usize) -> Result<DiscretizedAperture> {
    if n_per_axis < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_per_axis must be >= 2, got {n_per_axis}"
        )));
    }
    let mut points = Vec::new();
    let cell_area;
    if let Some((lx, lz)) = region.planar_dims() {
        let hx = lx / n_per_axis as f64;
        let hz = lz / n_per_axis as f64;
        cell_area = hx * hz;
        for i in 0..n_per_axis {
            let x = -lx / 2.0 + (i as f64 + 0.5) * hx;
            for j in 0..n_per_axis {
                let z = -lz / 2.0 + (j as f64 + 0.5) * hz;
                points.push([x, 0.0, z]);
            }
        }
    } else {
        let (_, _, _, side) = region.spd_dims().expect("aperture is planar or grid");
        let h = side / n_per_axis as f64;
        cell_area = h * h;
        for c in region.element_centers()? {
            for i in 0..n_per_axis {
                let x = c[0] - side / 2.0 + (i as f64 + 0.5) * h;
                for j in 0..n_per_axis {
                    let z = c[2] - side / 2.0 + (j as f64 + 0.5) * h;
                    points.push([x, 0.0, z]);
                }
            }
        }
    }
    Ok(DiscretizedAperture { points, cell_area })
}

/// Sampled normalized kernel `g(r_i, s)` for one user.
pub fn sample_kernel_g(wave: &Wave, d: &DiscretizedAperture, user: &UserSource) -> Vec<Complex64> {
    let s = user.position();
    let sy = s[1].abs();
    let k0 = wave.wavenumber();
    d.points
        .iter()
        .map(|r| {
            let dx = r[0] - s[0];
            let dz = r[2] - s[2];
            let dist = (dx * dx + sy * sy + dz * dz).sqrt();
            Complex64::from_polar((sy / dist).sqrt() / ((4.0 * PI).sqrt() * dist), -k0 * dist)
        })
        .collect()
}

/// Sampled channel response `h = (j k0 eta / sqrt(4 pi)) g` (radiating form).
pub fn sample_channel_h(wave: &Wave, d: &DiscretizedAperture, user: &UserSource) -> Vec<Complex64> {
    let scale = Complex64::new(
        0.0,
        wave.wavenumber() * wave.impedance() / (4.0 * PI).sqrt(),
    );
    sample_kernel_g(wave, d, user)
        .into_iter()
        .map(|g| scale * g)
        .collect()
}

/// Matrix-free action of the whitening kernel `K_Z = delta + lam g1 g1^H`
/// on a sampled field: `f + lam g1 (dA <g1, f>)`.
///
/// Kept separate from [`KernelMatrix`] so that grids too large for a dense
/// n x n realization can still be whitened.
pub fn apply_whitening(
    d: &DiscretizedAperture,
    g1: &[Complex64],
    lam: f64,
    f: &[Complex64],
) -> Vec<Complex64> {
    let inner = d.grid_inner(g1, f);
    f.iter()
        .zip(g1)
        .map(|(fi, gi)| fi + lam * gi * inner)
        .collect()
}
