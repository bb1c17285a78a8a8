use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// The inputs describe something the model does not accept.
    Config,
    /// The inputs are well formed but the numerics cannot be carried out.
    Numeric,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("medium is not passive: min Im k(omega) = {min_im_k:e} on the source band")]
    NotPassive { min_im_k: f64 },

    #[error("Lorentz resonance at {resonance:e} rad/s is too close to the pump half-frequency {center:e} rad/s")]
    NearResonance { resonance: f64, center: f64 },

    #[error("beta_convention \"single\" requires a vacuum arm 2")]
    ConventionMismatch,

    #[error(
        "effective variance {variance:e} is not positive; reduce the negative Im(beta) \
         (arm1 x*Im(beta) = {arm1_term:e}, arm2 x*Im(beta) = {arm2_term:e})"
    )]
    NonPositiveVariance { variance: f64, arm1_term: f64, arm2_term: f64 },

    #[error("quadrature under-resolved: halving freq_points moved D/N by {change:e} (limit {limit:e})")]
    Underresolved { change: f64, limit: f64 },

    #[error("arm 2 medium has Im(alpha) = {im_alpha:e}; there is no absorption to match arm 1")]
    NoAbsorptionToMatch { im_alpha: f64 },

    #[error("fringe fit: {0}")]
    FitDomain(String),

    #[error("no evaluable point in the search box (effective variance <= 0 or medium not passive everywhere)")]
    InfeasibleBox,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. }
            | Error::NotPassive { .. }
            | Error::NearResonance { .. }
            | Error::ConventionMismatch => ErrorKind::Config,
            Error::NonPositiveVariance { .. }
            | Error::Underresolved { .. }
            | Error::NoAbsorptionToMatch { .. }
            | Error::FitDomain(_)
            | Error::InfeasibleBox => ErrorKind::Numeric,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
