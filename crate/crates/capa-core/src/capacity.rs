//! Closed-form rates and capacities: single-user capacity, the whitening
//! parameter and its two roots, the post-whitening decode SNR, per-order
//! rate pairs, the order-independent sum-rate capacity, its decoupled upper
//! bound and large-aperture asymptotics, and the two-user capacity region.
//!
//! Rates are in bits/s/Hz (base-2 logarithms) throughout.

use crate::error::{Error, Result};
use crate::quadrature::TwoUserChannel;
use crate::Wave;
use std::f64::consts::{LN_2, PI};

/// Dimensionless transmit SNR of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    gamma_bar: f64,
}

impl LinkBudget {
    /// From the dimensionless value directly.
    pub fn from_linear(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar.is_finite() && gamma_bar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transmit SNR must be nonnegative and finite, got {gamma_bar}"
            )));
        }
        Ok(Self { gamma_bar })
    }

    /// From a decibel value: gamma_bar = 10^(db/10).
    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dB value must be finite, got {db}"
            )));
        }
        Self::from_linear(10f64.powf(db / 10.0))
    }

    /// From physical drive parameters:
    /// `gamma_bar = |J|^2 |A|^2 k0^2 eta^2 / (4 pi sigma^2)`.
    pub fn from_physical(
        current_density_mag: f64,
        tx_aperture_area: f64,
        wave: &Wave,
        sigma2: f64,
    ) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise density must be positive, got {sigma2}"
            )));
        }
        let k0 = wave.wavenumber();
        let eta = wave.impedance();
        let num = (current_density_mag * tx_aperture_area * k0 * eta).powi(2);
        Self::from_linear(num / (4.0 * PI * sigma2))
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Single-user capacity `log2(1 + gamma_bar a_R)`.
pub fn single_user_capacity(lb: &LinkBudget, a_r: f64) -> f64 {
    debug_assert!(a_r >= 0.0);
    log2_1p(lb.gamma_bar() * a_r)
}

/// Both roots of the whitening parameter,
/// `lambda = -1/a1 +- 1/(a1 sqrt(1 + gamma1 a1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStarRoots {
    /// The '+' branch, lying in (-1/a1, 0]; keeps the whitening kernel a
    /// small perturbation of the identity.
    pub plus: f64,
    /// The '-' branch, lying in [-2/a1, -1/a1).
    pub minus: f64,
}

impl LambdaStarRoots {
    /// The canonical root (the '+' branch).
    pub fn canonical(&self) -> f64 {
        self.plus
    }
}

/// Whitening parameter roots for interference gain `a1` at transmit SNR
/// `gamma_bar_1`. Both roots produce the same decode SNR; they are the two
/// solutions of `2 lam + gamma1 + 2 lam gamma1 a1 + lam^2 a1 + gamma1 lam^2 a1^2 = 0`.
pub fn lambda_star(gamma_bar_1: f64, a1: f64) -> Result<LambdaStarRoots> {
    if !(a1.is_finite() && a1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interference channel gain must be positive, got {a1}"
        )));
    }
    if !(gamma_bar_1.is_finite() && gamma_bar_1 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "transmit SNR must be nonnegative, got {gamma_bar_1}"
        )));
    }
    let q = 1.0 / (1.0 + gamma_bar_1 * a1).sqrt();
    Ok(LambdaStarRoots {
        plus: (q - 1.0) / a1,
        minus: (-q - 1.0) / a1,
    })
}

/// Decode SNR of the interfered user after whitening with `lam` and
/// matched combining: `gamma2 = gamma_bar_2 (a2 + |rho|^2 (lam^2 a1 + 2 lam))`.
///
/// The penalty factor is evaluated as `lam (lam a1 + 2)`, which is exact for
/// either root and avoids cancellation on the '-' branch.
pub fn gamma2_sic(lb2: &LinkBudget, ch: &TwoUserChannel, lam: f64) -> f64 {
    let penalty = lam * (lam * ch.a1() + 2.0);
    lb2.gamma_bar() * (ch.a2() + ch.rho().norm_sqr() * penalty)
}

/// Which user is decoded first (and bears the interference penalty).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicOrder {
    /// Decode user 2 first treating user 1 as interference, then user 1
    /// cleanly (the 2 -> 1 order).
    User2First,
    /// Decode user 1 first treating user 2 as interference, then user 2
    /// cleanly (the 1 -> 2 order).
    User1First,
}

impl SicOrder {
    pub fn label(&self) -> &'static str {
        match self {
            SicOrder::User2First => "2->1",
            SicOrder::User1First => "1->2",
        }
    }
}

/// Achievable rate pair under one SIC order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
    pub order: SicOrder,
}

impl RatePair {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Achievable rates under the given SIC order.
///
/// The user decoded second sees no interference and gets its single-user
/// rate; the user decoded first gets the whitened-combining SNR with the
/// canonical whitening root.
pub fn rates_for_order(
    lb1: &LinkBudget,
    lb2: &LinkBudget,
    ch: &TwoUserChannel,
    order: SicOrder,
) -> RatePair {
    match order {
        SicOrder::User2First => {
            let lam = lambda_star(lb1.gamma_bar(), ch.a1())
                .expect("gains validated by TwoUserChannel")
                .canonical();
            RatePair {
                r1: single_user_capacity(lb1, ch.a1()),
                r2: log2_1p(gamma2_sic(lb2, ch, lam)),
                order,
            }
        }
        SicOrder::User1First => {
            let swapped = ch.swapped();
            let lam = lambda_star(lb2.gamma_bar(), swapped.a1())
                .expect("gains validated by TwoUserChannel")
                .canonical();
            RatePair {
                r1: log2_1p(gamma2_sic(lb1, &swapped, lam)),
                r2: single_user_capacity(lb2, ch.a2()),
                order,
            }
        }
    }
}

/// Sum-rate capacity
/// `log2(1 + g1 a1 + g2 a2 + g1 g2 a1 a2 (1 - |rho_u|^2))`,
/// identical under either SIC order.
pub fn sum_rate_capacity(lb1: &LinkBudget, lb2: &LinkBudget, ch: &TwoUserChannel) -> f64 {
    let g1a1 = lb1.gamma_bar() * ch.a1();
    let g2a2 = lb2.gamma_bar() * ch.a2();
    let ru2 = ch.rho_u_abs().powi(2);
    log2_1p(g1a1 + g2a2 + g1a1 * g2a2 * (1.0 - ru2))
}

/// Decoupled upper bound `log2(1 + g1 a1) + log2(1 + g2 a2)`; met with
/// equality iff the correlation vanishes.
pub fn sum_rate_upper_bound(lb1: &LinkBudget, lb2: &LinkBudget, ch: &TwoUserChannel) -> f64 {
    single_user_capacity(lb1, ch.a1()) + single_user_capacity(lb2, ch.a2())
}

/// Infinite-aperture sum rate `log2(1 + mu g1/2) + log2(1 + mu g2/2)`;
/// `mu_oc = 1` is the contiguous-aperture limit.
pub fn asymptotic_sum_rate(gamma1: f64, gamma2: f64, mu_oc: f64) -> f64 {
    debug_assert!(mu_oc > 0.0 && mu_oc <= 1.0);
    log2_1p(mu_oc * gamma1 / 2.0) + log2_1p(mu_oc * gamma2 / 2.0)
}

/// Two-user capacity region: the pentagon bounded by the per-user
/// single-user rates and the sum-rate capacity. The SIC orders achieve the
/// two corners; the segment between them is reached by time sharing.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRegion {
    /// Corner achieved by the 2 -> 1 order (user 1 interference-free).
    pub corner_21: RatePair,
    /// Corner achieved by the 1 -> 2 order (user 2 interference-free).
    pub corner_12: RatePair,
    /// Sampled time-sharing segment between the corners, inclusive.
    pub segment: Vec<(f64, f64)>,
    /// Per-user single-user maxima (the bounding box).
    pub single_user_box: (f64, f64),
}

impl CapacityRegion {
    /// Length of the dominant-face cut; zero when the region is a rectangle.
    pub fn cut_length(&self) -> f64 {
        let dx = self.corner_21.r1 - self.corner_12.r1;
        let dy = self.corner_21.r2 - self.corner_12.r2;
        (dx * dx + dy * dy).sqrt()
    }

    /// Sum rate along the dominant face.
    pub fn sum_rate(&self) -> f64 {
        self.corner_21.sum()
    }
}

/// Build the capacity region, sampling the time-sharing segment at
/// `segment_points` points (at least the two corners).
pub fn capacity_region(
    lb1: &LinkBudget,
    lb2: &LinkBudget,
    ch: &TwoUserChannel,
    segment_points: usize,
) -> CapacityRegion {
    let corner_21 = rates_for_order(lb1, lb2, ch, SicOrder::User2First);
    let corner_12 = rates_for_order(lb1, lb2, ch, SicOrder::User1First);
    let k = segment_points.max(2);
    let segment = (0..k)
        .map(|i| {
            let t = i as f64 / (k - 1) as f64;
            (
                corner_21.r1 + t * (corner_12.r1 - corner_21.r1),
                corner_21.r2 + t * (corner_12.r2 - corner_21.r2),
            )
        })
        .collect();
    CapacityRegion {
        corner_21,
        corner_12,
        segment,
        single_user_box: (
            single_user_capacity(lb1, ch.a1()),
            single_user_capacity(lb2, ch.a2()),
        ),
    }
}
