use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an out-of-range argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The operation is only defined for the named aperture variant.
    #[error("operation requires a {expected} aperture")]
    WrongApertureVariant { expected: &'static str },

    /// Source and receive points are (numerically) coincident; the kernel is singular.
    #[error("singular kernel: points are closer than {limit:.3e} m")]
    SingularKernel { limit: f64 },

    /// The user sits in or behind the aperture plane, where the closed-form gain is undefined.
    #[error("user lies in or behind the aperture plane (Psi = {psi:.6e})")]
    UserInAperturePlane { psi: f64 },

    /// Panel refinement stopped before the requested relative tolerance was met.
    #[error(
        "quadrature did not converge after {refinements} refinements \
         (last estimate {last}, previous {previous})"
    )]
    QuadratureNotConverged {
        refinements: usize,
        last: Complex64,
        previous: Complex64,
    },

    /// Channel statistics violate the Cauchy-Schwarz bound beyond numerical noise.
    #[error("|rho_u| = {rho_u:.12} exceeds the Cauchy-Schwarz bound 1")]
    CorrelationBound { rho_u: f64 },

    /// The symbol constellation is not normalized to unit average energy.
    #[error("constellation must have unit average energy, got {0:.9}")]
    ConstellationEnergy(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
