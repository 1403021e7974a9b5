//! Receive apertures and user positions.
//!
//! The receive surface lives in the x-z plane, centered at the origin, with
//! normal `[0, 1, 0]`. Users are point sources located by spherical
//! coordinates `(r, phi, theta)` with direction cosines
//! `Phi = cos(phi) sin(theta)`, `Psi = sin(phi) sin(theta)`, `Theta = cos(theta)`.

use crate::error::{Error, Result};
use crate::Wave;

/// A point transmitter located by range and angles, with optional physical
/// drive parameters (current magnitude and transmit aperture area).
///
/// The capacity formulas consume the dimensionless transmit SNR instead of
/// the physical fields; the physical fields exist so that a transmit SNR can
/// be derived from first principles and so that field synthesis (the SIC
/// pipeline) can be driven with explicit amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSource {
    r: f64,
    phi: f64,
    theta: f64,
    current_density_mag: Option<f64>,
    tx_aperture_area: Option<f64>,
}

impl UserSource {
    /// Create a user at distance `r` (meters) with azimuth `phi` and
    /// elevation `theta`, both in `[0, pi]` radians.
    pub fn new(r: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "user distance must be positive and finite, got {r}"
            )));
        }
        for (name, v) in [("phi", phi), ("theta", theta)] {
            if !(v.is_finite() && (0.0..=std::f64::consts::PI).contains(&v)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, pi], got {v}"
                )));
            }
        }
        Ok(Self {
            r,
            phi,
            theta,
            current_density_mag: None,
            tx_aperture_area: None,
        })
    }

    /// Attach a source current magnitude |J| in A/m^2.
    pub fn with_current_density_mag(mut self, j: f64) -> Result<Self> {
        if !(j.is_finite() && j >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "current density magnitude must be >= 0, got {j}"
            )));
        }
        self.current_density_mag = Some(j);
        Ok(self)
    }

    /// Attach a transmit aperture area |A| in m^2 (overrides the
    /// lambda^2/(4 pi) isotropic default).
    pub fn with_tx_aperture_area(mut self, area: f64) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transmit aperture area must be positive, got {area}"
            )));
        }
        self.tx_aperture_area = Some(area);
        Ok(self)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn current_density_mag(&self) -> Option<f64> {
        self.current_density_mag
    }

    pub fn tx_aperture_area(&self) -> Option<f64> {
        self.tx_aperture_area
    }

    /// Transmit aperture area, defaulting to the isotropic lambda^2/(4 pi).
    pub fn tx_aperture_area_or_default(&self, wave: &Wave) -> f64 {
        self.tx_aperture_area
            .unwrap_or_else(|| wave.lambda().powi(2) / (4.0 * std::f64::consts::PI))
    }

    /// Direction cosines `[Phi, Psi, Theta]`; their squares sum to one.
    pub fn direction_cosines(&self) -> [f64; 3] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [cp * st, sp * st, ct]
    }

    /// Cartesian center position `[r Phi, r Psi, r Theta]` in meters.
    pub fn position(&self) -> [f64; 3] {
        let [cx, cy, cz] = self.direction_cosines();
        [self.r * cx, self.r * cy, self.r * cz]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RegionKind {
    PlanarRect {
        lx: f64,
        lz: f64,
    },
    SpdGrid {
        mx: usize,
        mz: usize,
        spacing: f64,
        element_side: f64,
    },
}

/// A receive surface in the x-z plane: either a contiguous rectangle or a
/// grid of square elements on a regular lattice (a conventional array).
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureRegion {
    kind: RegionKind,
}

impl ApertureRegion {
    /// Contiguous rectangle `{[x, 0, z] : |x| <= lx/2, |z| <= lz/2}`.
    pub fn planar_rect(lx: f64, lz: f64) -> Result<Self> {
        for (name, v) in [("lx", lx), ("lz", lz)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            kind: RegionKind::PlanarRect { lx, lz },
        })
    }

    /// Element grid with odd counts `mx` x `mz`, lattice `spacing`, and
    /// square elements of side `element_side <= spacing`.
    ///
    /// Element counts must be odd so the grid is centered on the origin;
    /// even counts are rejected rather than re-centered.
    pub fn spd_grid(mx: usize, mz: usize, spacing: f64, element_side: f64) -> Result<Self> {
        for (name, m) in [("mx", mx), ("mz", mz)] {
            if m == 0 || m % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "element count {name} must be odd and positive, got {m}"
                )));
            }
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "element spacing must be positive, got {spacing}"
            )));
        }
        if !(element_side.is_finite() && element_side > 0.0 && element_side <= spacing) {
            return Err(Error::InvalidParameter(format!(
                "element side must satisfy 0 < side <= spacing, got side {element_side} \
                 with spacing {spacing}"
            )));
        }
        Ok(Self {
            kind: RegionKind::SpdGrid {
                mx,
                mz,
                spacing,
                element_side,
            },
        })
    }

    /// Surface normal (the aperture is fixed in the x-z plane).
    pub fn normal(&self) -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.kind, RegionKind::PlanarRect { .. })
    }

    pub fn is_spd(&self) -> bool {
        matches!(self.kind, RegionKind::SpdGrid { .. })
    }

    /// Rectangle side lengths, or `None` for an element grid.
    pub fn planar_dims(&self) -> Option<(f64, f64)> {
        match self.kind {
            RegionKind::PlanarRect { lx, lz } => Some((lx, lz)),
            _ => None,
        }
    }

    /// `(mx, mz, spacing, element_side)` for an element grid.
    pub fn spd_dims(&self) -> Option<(usize, usize, f64, f64)> {
        match self.kind {
            RegionKind::SpdGrid {
                mx,
                mz,
                spacing,
                element_side,
            } => Some((mx, mz, spacing, element_side)),
            _ => None,
        }
    }

    /// Bounding box `(Lx, Lz)`; for a grid this is `(mx d, mz d)`.
    pub fn bounding_box(&self) -> (f64, f64) {
        match self.kind {
            RegionKind::PlanarRect { lx, lz } => (lx, lz),
            RegionKind::SpdGrid {
                mx, mz, spacing, ..
            } => (mx as f64 * spacing, mz as f64 * spacing),
        }
    }

    /// Total radiating surface area.
    pub fn area(&self) -> f64 {
        match self.kind {
            RegionKind::PlanarRect { lx, lz } => lx * lz,
            RegionKind::SpdGrid {
                mx,
                mz,
                element_side,
                ..
            } => (mx * mz) as f64 * element_side * element_side,
        }
    }

    /// Element centers `(m_x d, 0, m_z d)` with symmetric integer indices.
    pub fn element_centers(&self) -> Result<Vec<[f64; 3]>> {
        let (mx, mz, d, _) = self.spd_dims().ok_or(Error::WrongApertureVariant {
            expected: "element-grid",
        })?;
        let hx = (mx / 2) as i64;
        let hz = (mz / 2) as i64;
        let mut centers = Vec::with_capacity(mx * mz);
        for ix in -hx..=hx {
            for iz in -hz..=hz {
                centers.push([ix as f64 * d, 0.0, iz as f64 * d]);
            }
        }
        Ok(centers)
    }

    /// Occupation ratio A/d^2, the covered fraction of the bounding lattice.
    pub fn occupation_ratio(&self) -> Result<f64> {
        let (_, _, d, side) = self.spd_dims().ok_or(Error::WrongApertureVariant {
            expected: "element-grid",
        })?;
        Ok(side * side / (d * d))
    }
}
