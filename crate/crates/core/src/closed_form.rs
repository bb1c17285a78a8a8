//! Analytic coincidence probability in the long-integration-time limit.
//!
//! With `σ²` the effective variance, `Δ = x₁ Im α₁ − x₂ Im α₂` and `τ_r`
//! the group-delay difference,
//!
//! ```text
//! P_c / κ = 1 − exp(−Δ² / σ²) · exp(−τ_r² / σ²)
//! ```
//!
//! The overall constant `κ` (pair survival) is not part of the bracket; it
//! is reported separately by [`throughput_estimate`].


#[allow(unused_imports)] // needed when std is absent from the graph
use num_traits::Float;
use crate::error::{Error, Result};
use crate::optics::{BetaConvention, CoincidenceResult, InterferometerConfig};

/// Group-delay difference `x₂ Re α₂ − x₁ Re α₁`.
///
/// A vacuum arm contributes `x/c`.
pub fn tau_r(config: &InterferometerConfig) -> f64 {
    let d1 = config.dispersion1();
    let d2 = config.dispersion2();
    config.arm2().length() * d2.alpha.re - config.arm1().length() * d1.alpha.re
}

/// Loss-imbalance numerator `x₁ Im α₁ − x₂ Im α₂`.
pub fn loss_imbalance(config: &InterferometerConfig) -> f64 {
    let d1 = config.dispersion1();
    let d2 = config.dispersion2();
    config.arm1().length() * d1.alpha.im - config.arm2().length() * d2.alpha.im
}

pub fn effective_variance(config: &InterferometerConfig) -> Result<f64> {
    let inv_b2 = config.source().inverse_bandwidth_sq();
    let arm1_term = config.arm1().length() * config.dispersion1().beta.im;
    let arm2_term = config.arm2().length() * config.dispersion2().beta.im;
    let variance = match config.beta_convention() {
        BetaConvention::TwoFormula => inv_b2 + arm1_term + arm2_term,
        BetaConvention::SingleFormula => {
            if !config.arm2().is_vacuum() {
                return Err(Error::ConventionMismatch);
            }
            inv_b2 + 2.0 * arm1_term
        }
    };
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance { variance, arm1_term, arm2_term });
    }
    Ok(variance)
}

/// Center-frequency estimate of the pair survival probability,
/// `exp[−2(x₁ Im k₀,₁ + x₂ Im k₀,₂)]`.
///
/// This ignores the tilt `Im α` puts on the spectrum: with `β = 0` the
/// band-integrated survival is larger by `exp(B²Δ²)`, `Δ` the loss
/// imbalance. The oracle reports the band-integrated number.
pub fn throughput_estimate(config: &InterferometerConfig) -> f64 {
    let d1 = config.dispersion1();
    let d2 = config.dispersion2();
    (-2.0 * (config.arm1().length() * d1.k0.im + config.arm2().length() * d2.k0.im)).exp()
}

pub fn coincidence_closed_form(config: &InterferometerConfig) -> Result<CoincidenceResult> {
    let variance = effective_variance(config)?;
    let delay = tau_r(config);
    let imbalance = loss_imbalance(config);
    let exponent = (imbalance * imbalance + delay * delay) / variance;
    Ok(CoincidenceResult {
        // expm1 keeps full relative precision near the dark fringe
        p_normalized: -(-exponent).exp_m1(),
        visibility: (-(imbalance * imbalance) / variance).exp(),
        tau_r: delay,
        effective_variance: variance,
        throughput: throughput_estimate(config),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{ArmConfig, ComplexDispersion, SourceSpec, SPEED_OF_LIGHT};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn natural(arm1: ArmConfig, arm2: ArmConfig, conv: BetaConvention) -> InterferometerConfig {
        InterferometerConfig::new(SourceSpec::natural_preset(), arm1, arm2, conv).unwrap()
    }

    #[test]
    fn tau_r_examples() {
        let s = SourceSpec::si(2.4e15, 1e13).unwrap();
        let sym = InterferometerConfig::new(
            s,
            ArmConfig::vacuum(3.0).unwrap(),
            ArmConfig::vacuum(3.0).unwrap(),
            BetaConvention::TwoFormula,
        )
        .unwrap();
        assert_eq!(tau_r(&sym), 0.0);

        let glass = ComplexDispersion::new(c(1e7, 0.0), c(5e-9, 0.0), c(0.0, 0.0));
        let cfg = InterferometerConfig::new(
            s,
            ArmConfig::dielectric(2.0, glass).unwrap(),
            ArmConfig::vacuum(3.0).unwrap(),
            BetaConvention::TwoFormula,
        )
        .unwrap();
        // 3/c − 1e-8
        assert_relative_eq!(tau_r(&cfg), 6.922_855_944_56e-12, epsilon = 0.0, max_relative = 1e-10);
        assert_relative_eq!(tau_r(&cfg), 3.0 / SPEED_OF_LIGHT - 1e-8, epsilon = 0.0, max_relative = 1e-12);

        let both = InterferometerConfig::new(
            s,
            ArmConfig::dielectric(2.0, glass).unwrap(),
            ArmConfig::dielectric(2.0, glass).unwrap(),
            BetaConvention::TwoFormula,
        )
        .unwrap();
        assert_eq!(tau_r(&both), 0.0);
    }

    #[test]
    fn variance_examples() {
        let s = SourceSpec::si(2.4e15, 1e12).unwrap();
        let vac = InterferometerConfig::new(
            s,
            ArmConfig::vacuum(1.0).unwrap(),
            ArmConfig::vacuum(1.0).unwrap(),
            BetaConvention::TwoFormula,
        )
        .unwrap();
        assert_relative_eq!(effective_variance(&vac).unwrap(), 1e-24, epsilon = 0.0, max_relative = 1e-15);

        let m1 = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 0.0), c(0.0, 0.3));
        let m2 = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 0.0), c(0.0, 0.2));
        let two = natural(
            ArmConfig::dielectric(1.0, m1).unwrap(),
            ArmConfig::dielectric(1.0, m2).unwrap(),
            BetaConvention::TwoFormula,
        );
        assert_relative_eq!(effective_variance(&two).unwrap(), 1.5, max_relative = 1e-15);

        let single = natural(
            ArmConfig::dielectric(1.0, m1).unwrap(),
            ArmConfig::vacuum(1.0).unwrap(),
            BetaConvention::SingleFormula,
        );
        assert_relative_eq!(effective_variance(&single).unwrap(), 1.6, max_relative = 1e-15);

        let illegal = two.with_convention(BetaConvention::SingleFormula);
        assert_eq!(effective_variance(&illegal), Err(Error::ConventionMismatch));
    }

    #[test]
    fn negative_variance_names_beta() {
        let m = ComplexDispersion::new(c(10.0, 60.0), c(1.0, 0.0), c(0.0, -1.5));
        let cfg = natural(
            ArmConfig::dielectric(1.0, m).unwrap(),
            ArmConfig::vacuum(1.0).unwrap(),
            BetaConvention::TwoFormula,
        );
        let err = effective_variance(&cfg).unwrap_err();
        assert!(matches!(err, Error::NonPositiveVariance { .. }));
        assert!(alloc::format!("{err}").contains("beta"));
        assert!(coincidence_closed_form(&cfg).is_err());
    }

    #[test]
    fn dark_fringe_vacuum() {
        let cfg = natural(
            ArmConfig::vacuum(2.0).unwrap(),
            ArmConfig::vacuum(2.0).unwrap(),
            BetaConvention::TwoFormula,
        );
        let r = coincidence_closed_form(&cfg).unwrap();
        assert_eq!(r.p_normalized, 0.0);
        assert!(r.p_normalized.is_sign_positive());
        assert_eq!(r.visibility, 1.0);
        assert_eq!(r.throughput, 1.0);
    }

    #[test]
    fn single_dielectric_suppression() {
        // x₁ Im α₁ = 1, B⁻² = 1, τ_r = 0
        let m = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 1.0), c(0.0, 0.0));
        let cfg = natural(
            ArmConfig::dielectric(1.0, m).unwrap(),
            ArmConfig::vacuum(1.0).unwrap(),
            BetaConvention::SingleFormula,
        );
        let r = coincidence_closed_form(&cfg).unwrap();
        assert_eq!(r.tau_r, 0.0);
        assert_relative_eq!(r.p_normalized, 1.0 - (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(r.p_normalized, 0.632_120_558_828_557_7, max_relative = 1e-15);
    }

    #[test]
    fn matched_two_dielectrics_restore() {
        let m1 = ComplexDispersion::new(c(10.0, 8.0), c(1.4, 0.7), c(0.0, 0.1));
        let m2 = ComplexDispersion::new(c(10.0, 8.0), c(2.8, 1.4), c(0.0, 0.3));
        let cfg = natural(
            ArmConfig::dielectric(1.0, m1).unwrap(),
            ArmConfig::dielectric(0.5, m2).unwrap(),
            BetaConvention::TwoFormula,
        );
        assert_eq!(coincidence_closed_form(&cfg).unwrap().p_normalized, 0.0);
    }

    #[test]
    fn throughput_examples() {
        let m = ComplexDispersion::new(c(10.0, 0.5), c(1.0, 0.0), c(0.0, 0.0));
        let cfg = natural(
            ArmConfig::dielectric(1.0, m).unwrap(),
            ArmConfig::vacuum(1.0).unwrap(),
            BetaConvention::TwoFormula,
        );
        let t = throughput_estimate(&cfg);
        assert_relative_eq!(t, (-1.0f64).exp(), max_relative = 1e-15);
        let doubled = cfg.with_arm1(ArmConfig::dielectric(2.0, m).unwrap()).unwrap();
        assert_relative_eq!(throughput_estimate(&doubled), t * t, max_relative = 1e-15);
    }
}
