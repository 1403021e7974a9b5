//! Scalar free-space channel kernels.
//!
//! The full propagation kernel between a source point `s` and a receive
//! point `r` at distance `D = ||r - s||` is
//!
//! ```text
//! h_em(r, s) = j k0 eta e^{-j k0 D} / (4 pi D) * (1 + j/(k0 D) - 1/(k0 D)^2)
//! ```
//!
//! where the last two terms describe the reactive near field. The working
//! approximation drops them (they contribute < 3% in power beyond one
//! wavelength). The receive surface additionally projects the incoming wave
//! onto its normal, giving the obliquity factor `h_pa`. The normalized
//! kernel `g` strips the j k0 eta / sqrt(4 pi) prefactor so that channel
//! gains integrate `|g|^2` directly.

use crate::error::{Error, Result};
use crate::geometry::ApertureRegion;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Free-space impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 120.0 * PI;

/// Points closer than this fraction of a wavelength are treated as singular.
const SINGULAR_FRACTION: f64 = 1e-9;

/// Carrier wavelength and derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    lambda: f64,
}

impl Wave {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Wavenumber k0 = 2 pi / lambda.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// Free-space impedance eta (constant, kept here for dimension bookkeeping).
    pub fn impedance(&self) -> f64 {
        FREE_SPACE_IMPEDANCE
    }
}

fn distance(r: [f64; 3], s: [f64; 3]) -> f64 {
    let dx = r[0] - s[0];
    let dy = r[1] - s[1];
    let dz = r[2] - s[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn checked_distance(wave: &Wave, r: [f64; 3], s: [f64; 3]) -> Result<f64> {
    let d = distance(r, s);
    let limit = SINGULAR_FRACTION * wave.lambda();
    if d < limit {
        return Err(Error::SingularKernel { limit });
    }
    Ok(d)
}

/// Propagation kernel including the reactive near-field terms.
pub fn green_full(wave: &Wave, r: [f64; 3], s: [f64; 3]) -> Result<Complex64> {
    let d = checked_distance(wave, r, s)?;
    let k0 = wave.wavenumber();
    let kd = k0 * d;
    let radiating = green_radiating_at(wave, d);
    let t = 1.0 / kd;
    Ok(radiating * Complex64::new(1.0 - t * t, t))
}

/// Propagation kernel with the reactive terms dropped.
pub fn green_radiating(wave: &Wave, r: [f64; 3], s: [f64; 3]) -> Result<Complex64> {
    let d = checked_distance(wave, r, s)?;
    Ok(green_radiating_at(wave, d))
}

fn green_radiating_at(wave: &Wave, d: f64) -> Complex64 {
    let k0 = wave.wavenumber();
    let phase = Complex64::from_polar(1.0, -k0 * d);
    Complex64::new(0.0, k0 * wave.impedance() / (4.0 * PI * d)) * phase
}

/// Obliquity loss sqrt(|e_r . (s - r)| / ||r - s||) of the receive surface.
///
/// Always lies in [0, 1]; vanishes at grazing incidence.
pub fn projected_aperture_factor(
    aperture: &ApertureRegion,
    r: [f64; 3],
    s: [f64; 3],
) -> Result<f64> {
    let d = distance(r, s);
    if d == 0.0 {
        return Err(Error::SingularKernel { limit: 0.0 });
    }
    let n = aperture.normal();
    let proj =
        (n[0] * (s[0] - r[0]) + n[1] * (s[1] - r[1]) + n[2] * (s[2] - r[2])).abs();
    Ok((proj / d).sqrt())
}

/// Normalized spherical-wave kernel `g(r, s) = e^{-j k0 D} / (sqrt(4 pi) D) * h_pa`.
///
/// The full response relates to it by `h = (j k0 eta / sqrt(4 pi)) g` under
/// the radiating approximation, so `integral |g|^2 dr` is the dimensionless
/// channel gain.
pub fn kernel_g(
    wave: &Wave,
    aperture: &ApertureRegion,
    r: [f64; 3],
    s: [f64; 3],
) -> Result<Complex64> {
    let d = checked_distance(wave, r, s)?;
    let hpa = projected_aperture_factor(aperture, r, s)?;
    let k0 = wave.wavenumber();
    let phase = Complex64::from_polar(1.0, -k0 * d);
    Ok(phase * (hpa / ((4.0 * PI).sqrt() * d)))
}

/// Spatial channel response `h = h_em * h_pa`; `include_reactive` selects the
/// full propagation kernel instead of the radiating approximation.
pub fn channel_response_h(
    wave: &Wave,
    aperture: &ApertureRegion,
    r: [f64; 3],
    s: [f64; 3],
    include_reactive: bool,
) -> Result<Complex64> {
    let em = if include_reactive {
        green_full(wave, r, s)?
    } else {
        green_radiating(wave, r, s)?
    };
    let hpa = projected_aperture_factor(aperture, r, s)?;
    Ok(em * hpa)
}
