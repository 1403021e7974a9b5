//! Panel-based 2-D integration over aperture regions, the numerically
//! integrated channel gains and correlation, and the closed-form planar and
//! element-grid gain expressions used to cross-validate them.
//!
//! The scheme is fixed-order tensor Gauss-Legendre per panel with uniform
//! panel bisection until two successive whole-integral estimates agree to a
//! relative tolerance. Integrands here are smooth (users are off-plane), and
//! the propagation phase cancels inside `|g|^2`, so gains converge from a
//! coarse initial grid. The correlation integrand keeps its phase; panels
//! for it are capped at a quarter wavelength so each panel sees at most a
//! fraction of an oscillation.

use crate::channel::Wave;
use crate::error::{Error, Result};
use crate::geometry::{ApertureRegion, UserSource};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Hard ceiling on the panel count; refinement refuses to go past it.
const PANEL_CAP: usize = 1 << 24;

/// Upper bound on the initial panel count per axis used to even out skewed
/// rectangles before refinement takes over.
const MAX_ASPECT_PANELS: usize = 32;

/// Below this direction cosine the user is treated as lying in the aperture
/// plane: the obliquity factor is identically zero there.
const IN_PLANE_PSI: f64 = 1e-14;

/// Configuration for panel-subdivided tensor Gauss-Legendre integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per axis per panel.
    pub panel_order: usize,
    /// Relative agreement required between successive refinements.
    pub rel_tol: f64,
    /// Maximum number of uniform bisection rounds.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_order: 16,
            rel_tol: 1e-8,
            max_refinements: 12,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.panel_order < 2 {
            return Err(Error::InvalidParameter(format!(
                "panel_order must be >= 2, got {}",
                self.panel_order
            )));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        // Tricomi initial guess
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    x0: f64,
    x1: f64,
    z0: f64,
    z1: f64,
}

impl Panel {
    fn split(&self) -> [Panel; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let zm = 0.5 * (self.z0 + self.z1);
        [
            Panel { x0: self.x0, x1: xm, z0: self.z0, z1: zm },
            Panel { x0: xm, x1: self.x1, z0: self.z0, z1: zm },
            Panel { x0: self.x0, x1: xm, z0: zm, z1: self.z1 },
            Panel { x0: xm, x1: self.x1, z0: zm, z1: self.z1 },
        ]
    }
}

fn axis_splits(len: f64, min_len: f64, max_width: Option<f64>) -> usize {
    let mut n = ((len / min_len).round() as usize).clamp(1, MAX_ASPECT_PANELS);
    if let Some(w) = max_width {
        n = n.max((len / w).ceil() as usize);
    }
    n
}

fn rect_panels(x0: f64, x1: f64, z0: f64, z1: f64, nx: usize, nz: usize, out: &mut Vec<Panel>) {
    let hx = (x1 - x0) / nx as f64;
    let hz = (z1 - z0) / nz as f64;
    for i in 0..nx {
        for j in 0..nz {
            out.push(Panel {
                x0: x0 + i as f64 * hx,
                x1: x0 + (i + 1) as f64 * hx,
                z0: z0 + j as f64 * hz,
                z1: z0 + (j + 1) as f64 * hz,
            });
        }
    }
}

/// Initial panel count, computed before any allocation so that oversized
/// oscillatory grids are refused rather than materialized.
fn initial_panel_count(region: &ApertureRegion, max_width: Option<f64>) -> usize {
    if let Some((lx, lz)) = region.planar_dims() {
        let min_len = lx.min(lz);
        let nx = axis_splits(lx, min_len, max_width);
        let nz = axis_splits(lz, min_len, max_width);
        nx.saturating_mul(nz)
    } else {
        let (mx, mz, _, side) = region.spd_dims().expect("aperture is planar or grid");
        let n = axis_splits(side, side, max_width);
        mx.saturating_mul(mz).saturating_mul(n.saturating_mul(n))
    }
}

fn initial_panels(region: &ApertureRegion, max_width: Option<f64>) -> Vec<Panel> {
    let mut panels = Vec::new();
    if let Some((lx, lz)) = region.planar_dims() {
        let min_len = lx.min(lz);
        let nx = axis_splits(lx, min_len, max_width);
        let nz = axis_splits(lz, min_len, max_width);
        rect_panels(-lx / 2.0, lx / 2.0, -lz / 2.0, lz / 2.0, nx, nz, &mut panels);
    } else {
        let (_, _, _, side) = region.spd_dims().expect("aperture is planar or grid");
        let n = axis_splits(side, side, max_width);
        for c in region.element_centers().expect("grid variant") {
            rect_panels(
                c[0] - side / 2.0,
                c[0] + side / 2.0,
                c[2] - side / 2.0,
                c[2] + side / 2.0,
                n,
                n,
                &mut panels,
            );
        }
    }
    panels
}

/// Deterministic pairwise reduction; fixed tree independent of evaluation order.
fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn eval_panels<F>(f: &F, panels: &[Panel], nodes: &[f64], weights: &[f64]) -> Complex64
where
    F: Fn([f64; 3]) -> Complex64,
{
    let per_panel: Vec<Complex64> = panels
        .iter()
        .map(|p| {
            let cx = 0.5 * (p.x0 + p.x1);
            let hx = 0.5 * (p.x1 - p.x0);
            let cz = 0.5 * (p.z0 + p.z1);
            let hz = 0.5 * (p.z1 - p.z0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, wx) in nodes.iter().zip(weights) {
                let x = cx + hx * xi;
                for (zi, wz) in nodes.iter().zip(weights) {
                    let z = cz + hz * zi;
                    acc += f([x, 0.0, z]) * (wx * wz);
                }
            }
            acc * (hx * hz)
        })
        .collect();
    pairwise_sum(&per_panel)
}

/// Integrate a complex-valued function of position over the aperture.
///
/// Successive uniform refinements must agree to `spec.rel_tol` relatively;
/// otherwise a convergence error carrying the last two estimates is
/// returned. For an element grid the integral is the sum of per-element
/// integrals (panels never straddle gaps).
pub fn integrate<F>(f: F, region: &ApertureRegion, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn([f64; 3]) -> Complex64,
{
    integrate_with_max_panel_width(f, region, spec, None)
}

pub(crate) fn integrate_with_max_panel_width<F>(
    f: F,
    region: &ApertureRegion,
    spec: &QuadratureSpec,
    max_width: Option<f64>,
) -> Result<Complex64>
where
    F: Fn([f64; 3]) -> Complex64,
{
    spec.validate()?;
    if initial_panel_count(region, max_width) > PANEL_CAP {
        return Err(Error::QuadratureNotConverged {
            refinements: 0,
            last: Complex64::new(f64::NAN, f64::NAN),
            previous: Complex64::new(f64::NAN, f64::NAN),
        });
    }
    let (nodes, weights) = gauss_legendre(spec.panel_order);
    let mut panels = initial_panels(region, max_width);
    let mut previous = eval_panels(&f, &panels, &nodes, &weights);
    for refinement in 1..=spec.max_refinements {
        if panels.len() > PANEL_CAP / 4 {
            return Err(Error::QuadratureNotConverged {
                refinements: refinement - 1,
                last: previous,
                previous,
            });
        }
        panels = panels.iter().flat_map(|p| p.split()).collect();
        let current = eval_panels(&f, &panels, &nodes, &weights);
        if (current - previous).norm() <= spec.rel_tol * current.norm() {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::QuadratureNotConverged {
        refinements: spec.max_refinements,
        last: previous,
        previous,
    })
}

/// Channel gain `a_k = integral |g(r, s_k)|^2 dr` over the aperture.
///
/// The phase of `g` cancels in the magnitude, leaving the smooth integrand
/// `|s_y| / (4 pi D^3)`; a user in the aperture plane has zero gain.
pub fn channel_gain(
    wave: &Wave,
    region: &ApertureRegion,
    user: &UserSource,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let _ = wave; // gains are wavelength-independent under the radiating kernel
    let s = user.position();
    let sy = s[1].abs();
    if user.direction_cosines()[1].abs() < IN_PLANE_PSI {
        return Ok(0.0);
    }
    let val = integrate_with_max_panel_width(
        |r| {
            let dx = r[0] - s[0];
            let dz = r[2] - s[2];
            let d2 = dx * dx + sy * sy + dz * dz;
            Complex64::new(sy / (4.0 * PI * d2 * d2.sqrt()), 0.0)
        },
        region,
        spec,
        None,
    )?;
    Ok(val.re)
}

/// Correlation `rho = integral g^H(r, s_1) g(r, s_2) dr` between two users'
/// spatial responses.
///
/// The integrand oscillates with the path-length difference, so panels are
/// capped at a quarter wavelength.
pub fn correlation_rho(
    wave: &Wave,
    region: &ApertureRegion,
    user1: &UserSource,
    user2: &UserSource,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let s1 = user1.position();
    let s2 = user2.position();
    if user1.direction_cosines()[1].abs() < IN_PLANE_PSI
        || user2.direction_cosines()[1].abs() < IN_PLANE_PSI
    {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k0 = wave.wavenumber();
    let s1y = s1[1].abs();
    let s2y = s2[1].abs();
    let amp_num = (s1y * s2y).sqrt() / (4.0 * PI);
    integrate_with_max_panel_width(
        |r| {
            let d1 = {
                let dx = r[0] - s1[0];
                let dz = r[2] - s1[2];
                (dx * dx + s1y * s1y + dz * dz).sqrt()
            };
            let d2 = {
                let dx = r[0] - s2[0];
                let dz = r[2] - s2[2];
                (dx * dx + s2y * s2y + dz * dz).sqrt()
            };
            // conj(g1) g2 = e^{j k0 (D1 - D2)} sqrt(s1y s2y) / (4 pi (D1 D2)^{3/2})
            let amp = amp_num / (d1 * d2 * (d1 * d2).sqrt());
            Complex64::from_polar(amp, k0 * (d1 - d2))
        },
        region,
        spec,
        Some(wave.lambda() / 4.0),
    )
}

/// Closed-form channel gain of a centered `lx` x `lz` rectangle for a user
/// with direction cosines `(Phi, Psi, Theta)` at range `r`:
///
/// ```text
/// a = (1/4pi) sum_{x in X} sum_{z in Z} arctan( x z / (Psi sqrt(Psi^2 + x^2 + z^2)) )
/// X = { lx/(2r) + Phi, lx/(2r) - Phi },  Z = { lz/(2r) + Theta, lz/(2r) - Theta }
/// ```
///
/// The set elements keep their signs, so the four terms carry the corner
/// orientations; a user whose projection falls outside the rectangle yields
/// negative terms that subtract the outside strip.
pub fn closed_form_gain_planar(lx: f64, lz: f64, user: &UserSource) -> Result<f64> {
    for (name, v) in [("lx", lx), ("lz", lz)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be nonnegative, got {v}"
            )));
        }
    }
    let [cphi, cpsi, cthe] = user.direction_cosines();
    if cpsi <= 0.0 {
        return Err(Error::UserInAperturePlane { psi: cpsi });
    }
    let r = user.r();
    let xs = [lx / (2.0 * r) + cphi, lx / (2.0 * r) - cphi];
    let zs = [lz / (2.0 * r) + cthe, lz / (2.0 * r) - cthe];
    let mut sum = 0.0;
    for x in xs {
        for z in zs {
            sum += ((x * z / cpsi) / (cpsi * cpsi + x * x + z * z).sqrt()).atan();
        }
    }
    Ok(sum / (4.0 * PI))
}

/// Element-grid gain approximation `a ~ mu_oc * a_c` (occupation ratio times
/// the contiguous-aperture gain of the bounding rectangle).
pub fn spd_gain_approx(a_c: f64, mu_oc: f64) -> f64 {
    debug_assert!(a_c >= 0.0);
    debug_assert!(mu_oc > 0.0 && mu_oc <= 1.0);
    mu_oc * a_c
}

/// Sufficient statistics of a two-user link: both channel gains and the
/// complex correlation between the users' spatial responses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoUserChannel {
    a1: f64,
    a2: f64,
    rho: Complex64,
}

/// Tolerated relative Cauchy-Schwarz excess before the statistics are
/// rejected as inconsistent; smaller excesses are clamped.
const RHO_U_SLACK: f64 = 1e-9;

impl TwoUserChannel {
    pub fn new(a1: f64, a2: f64, rho: Complex64) -> Result<Self> {
        for (name, a) in [("a1", a1), ("a2", a2)] {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "channel gain {name} must be positive, got {a}"
                )));
            }
        }
        let bound = (a1 * a2).sqrt();
        let rho_u = rho.norm() / bound;
        if rho_u > 1.0 + RHO_U_SLACK {
            return Err(Error::CorrelationBound { rho_u });
        }
        Ok(Self { a1, a2, rho })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn rho(&self) -> Complex64 {
        self.rho
    }

    /// Normalized correlation rho / sqrt(a1 a2), clamped onto the unit disk.
    pub fn rho_u(&self) -> Complex64 {
        let ru = self.rho / (self.a1 * self.a2).sqrt();
        let m = ru.norm();
        if m > 1.0 {
            ru / m
        } else {
            ru
        }
    }

    pub fn rho_u_abs(&self) -> f64 {
        self.rho_u().norm()
    }

    /// Statistics with user indices swapped (conjugates the correlation).
    pub fn swapped(&self) -> Self {
        Self {
            a1: self.a2,
            a2: self.a1,
            rho: self.rho.conj(),
        }
    }
}

/// Compute the two-user statistics for a geometry by quadrature.
pub fn two_user_channel(
    wave: &Wave,
    region: &ApertureRegion,
    user1: &UserSource,
    user2: &UserSource,
    spec: &QuadratureSpec,
) -> Result<TwoUserChannel> {
    let a1 = channel_gain(wave, region, user1, spec)?;
    let a2 = channel_gain(wave, region, user2, spec)?;
    let rho = correlation_rho(wave, region, user1, user2, spec)?;
    TwoUserChannel::new(a1, a2, rho)
}
