//! Uplink analysis for continuous-aperture receive surfaces.
//!
//! The crate models a planar receive surface (contiguous or partitioned
//! into discrete elements) observing point transmitters through scalar
//! free-space kernels, and provides:
//!
//! - [`geometry`]: aperture regions and user positions;
//! - [`channel`]: propagation kernels, the obliquity factor, and the
//!   normalized kernel whose squared magnitude integrates to the channel
//!   gain;
//! - [`quadrature`]: panel-based Gauss-Legendre integration of gains and
//!   the inter-user correlation, plus the closed-form planar gain and the
//!   occupation-ratio approximation for element grids;
//! - [`capacity`]: single-user capacity, whitening parameters, SIC rate
//!   pairs, order-independent sum-rate capacity, asymptotics, and the
//!   two-user capacity region;
//! - [`operator_lab`]: grid realizations of the noise field and the
//!   whitening operators, and a symbol-level SIC simulation;
//! - [`verify`]: the pinned-tolerance suites checking each closed form
//!   against its independent numerical realization.

pub mod capacity;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod operator_lab;
pub mod quadrature;
pub mod verify;

pub use capacity::{
    asymptotic_sum_rate, capacity_region, gamma2_sic, lambda_star, rates_for_order,
    single_user_capacity, sum_rate_capacity, sum_rate_upper_bound, CapacityRegion,
    LambdaStarRoots, LinkBudget, RatePair, SicOrder,
};
pub use channel::{
    channel_response_h, green_full, green_radiating, kernel_g, projected_aperture_factor, Wave,
};
pub use error::{Error, Result};
pub use geometry::{ApertureRegion, UserSource};
pub use quadrature::{
    channel_gain, closed_form_gain_planar, correlation_rho, integrate, spd_gain_approx,
    two_user_channel, QuadratureSpec, TwoUserChannel,
};
