//! Two-photon (Hong–Ou–Mandel) interference through lossy, dispersive
//! dielectrics placed in one or both arms of an interferometer.
//!
//! The crate is `no_std` (it needs `alloc`); the default `std` feature only
//! switches the float math from `libm` to the platform library, so results
//! do not depend on what else is in the build. It splits into:
//!
//! - [`optics`]: source, media, arms and the complex wave-vector expansion
//!   `k(ω) = k₀ + α(ω − Ω/2) + β(ω − Ω/2)²`.
//! - [`closed_form`]: the analytic normalized coincidence probability.
//! - [`oracle`]: brute-force quadrature of the antisymmetrized two-path
//!   amplitude, used to check the closed forms.
//! - [`fit`]: Gaussian fringe-width extraction from a delay scan.
//! - [`tuner`]: choosing the second dielectric so the dark fringe comes back.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod closed_form;
mod error;
pub mod fit;
pub mod nelder_mead;
pub mod optics;
pub mod oracle;
pub mod tuner;

pub use closed_form::{coincidence_closed_form, effective_variance, tau_r, throughput_estimate};
pub use error::{Error, ErrorKind, Result};
pub use optics::{
    lorentz_to_dispersion, make_vacuum_dispersion, wavevector_at, ArmConfig, BetaConvention,
    CoincidenceResult, ComplexDispersion, InterferometerConfig, LorentzOscillator, Medium,
    SourceSpec, Units, SPEED_OF_LIGHT,
};
pub use oracle::{
    biphoton_amplitude, coincidence_oracle, compare_conventions, ConventionReport, ConventionWinner,
    OracleWorkspace, QuadratureGrids, SpectralConvention,
};

pub use num_complex::Complex64;
