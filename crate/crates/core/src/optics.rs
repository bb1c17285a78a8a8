//! Source, media and arm descriptions, and the complex wave-vector expansion
//! shared by every engine.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Half-width of the source band in units of the bandwidth `B`.
///
/// The two-photon spectral intensity is `exp(-36)` there.
pub const BAND_HALFWIDTH: f64 = 6.0;

/// Minimum ratio `(Ω/2) / B` accepted for a source.
pub const NARROW_BAND_RATIO: f64 = 8.0;

/// Unit system. `Natural` sets `c = 1`; all other quantities are then
/// expressed in a common time unit (usually `1/B`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Units {
    #[default]
    Si,
    Natural,
}

impl Units {
    pub fn speed_of_light(self) -> f64 {
        match self {
            Units::Si => SPEED_OF_LIGHT,
            Units::Natural => 1.0,
        }
    }
}

/// Down-conversion source: sum frequency `Ω` and Gaussian bandwidth `B`.
///
/// The joint spectral intensity of the pair is `exp[-(ω - Ω/2)² / B²]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceSpec {
    omega_sum: f64,
    bandwidth: f64,
    units: Units,
}

impl SourceSpec {
    pub fn new(omega_sum: f64, bandwidth: f64, units: Units) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid("source.bandwidth", "must be finite and > 0"));
        }
        if !(omega_sum.is_finite() && omega_sum > 0.0) {
            return Err(Error::invalid("source.omega_sum", "must be finite and > 0"));
        }
        if omega_sum / 2.0 < NARROW_BAND_RATIO * bandwidth {
            return Err(Error::invalid(
                "source.omega_sum",
                "narrow-band condition omega_sum/2 >= 8*bandwidth violated",
            ));
        }
        Ok(Self { omega_sum, bandwidth, units })
    }

    /// SI source (`c` = 299 792 458 m/s).
    pub fn si(omega_sum: f64, bandwidth: f64) -> Result<Self> {
        Self::new(omega_sum, bandwidth, Units::Si)
    }

    /// Dimensionless preset used throughout the tests: `c = 1`, `B = 1`, `Ω = 20`.
    pub fn natural_preset() -> Self {
        Self { omega_sum: 20.0, bandwidth: 1.0, units: Units::Natural }
    }

    pub fn omega_sum(&self) -> f64 {
        self.omega_sum
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn speed_of_light(&self) -> f64 {
        self.units.speed_of_light()
    }

    /// Expansion center `Ω/2`.
    pub fn center(&self) -> f64 {
        self.omega_sum / 2.0
    }

    /// `B⁻²`, the bandwidth-only part of the fringe variance.
    pub fn inverse_bandwidth_sq(&self) -> f64 {
        1.0 / (self.bandwidth * self.bandwidth)
    }

    /// `(Ω/2 − 6B, Ω/2 + 6B)`.
    pub fn band(&self) -> (f64, f64) {
        let half = BAND_HALFWIDTH * self.bandwidth;
        (self.center() - half, self.center() + half)
    }
}

/// Coefficients of `k(ω) = k₀ + α(ω − Ω/2) + β(ω − Ω/2)²`.
///
/// Real parts: propagation phase, inverse group velocity, dispersion.
/// Imaginary parts: attenuation and its linear / quadratic frequency
/// dependence.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexDispersion {
    /// 1/m
    pub k0: Complex64,
    /// s/m
    pub alpha: Complex64,
    /// s²/m
    pub beta: Complex64,
}

impl ComplexDispersion {
    pub const fn new(k0: Complex64, alpha: Complex64, beta: Complex64) -> Self {
        Self { k0, alpha, beta }
    }

    /// `k(Ω/2 + δ) − k₀`.
    #[inline]
    pub fn offset(&self, delta: f64) -> Complex64 {
        self.alpha * delta + self.beta * (delta * delta)
    }

    /// Minimum of `Im k` over the source band (exact for the quadratic).
    pub fn min_im_k_on_band(&self, source: &SourceSpec) -> f64 {
        let half = BAND_HALFWIDTH * source.bandwidth();
        let im = |d: f64| self.k0.im + self.alpha.im * d + self.beta.im * d * d;
        let mut min = im(-half).min(im(half));
        if self.beta.im > 0.0 {
            let vertex = -self.alpha.im / (2.0 * self.beta.im);
            if vertex.abs() <= half {
                min = min.min(im(vertex));
            }
        }
        min
    }

    fn max_abs_k_on_band(&self, source: &SourceSpec) -> f64 {
        let half = BAND_HALFWIDTH * source.bandwidth();
        [-half, 0.0, half]
            .iter()
            .map(|&d| (self.k0 + self.offset(d)).norm())
            .fold(0.0, f64::max)
    }

    /// Rejects media with `Im k(ω) < 0` anywhere on the band (gain).
    pub fn check_passive(&self, source: &SourceSpec) -> Result<()> {
        let finite = [self.k0, self.alpha, self.beta]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::invalid("medium", "dispersion coefficients must be finite"));
        }
        let min = self.min_im_k_on_band(source);
        if min < -1e-12 * self.max_abs_k_on_band(source) {
            return Err(Error::NotPassive { min_im_k: min });
        }
        Ok(())
    }
}

/// Free-space dispersion for `source`: `k₀ = Ω/(2c)`, `α = 1/c`, `β = 0`.
pub fn make_vacuum_dispersion(source: &SourceSpec) -> ComplexDispersion {
    let c = source.speed_of_light();
    ComplexDispersion::new(
        Complex64::new(source.center() / c, 0.0),
        Complex64::new(1.0 / c, 0.0),
        Complex64::new(0.0, 0.0),
    )
}

/// Evaluates the quadratic expansion at `omega`.
pub fn wavevector_at(d: &ComplexDispersion, source: &SourceSpec, omega: f64) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", "must be finite and > 0"));
    }
    Ok(d.k0 + d.offset(omega - source.center()))
}

/// Single-oscillator Lorentz medium, `ε(ω) = 1 + ω_p² / (ω_r² − ω² − iγω)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorentzOscillator {
    pub plasma_freq: f64,
    pub resonance_freq: f64,
    pub damping: f64,
}

impl LorentzOscillator {
    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let denom = Complex64::new(
            self.resonance_freq * self.resonance_freq - omega * omega,
            -self.damping * omega,
        );
        Complex64::new(1.0, 0.0) + (self.plasma_freq * self.plasma_freq) / denom
    }

    /// Refractive index on the branch with `Im n ≥ 0`.
    pub fn refractive_index(&self, omega: f64) -> Complex64 {
        let n = self.permittivity(omega).sqrt();
        if n.im < 0.0 {
            -n
        } else {
            n
        }
    }

    /// `k(ω) = ω n(ω) / c`.
    pub fn wavenumber(&self, omega: f64, c: f64) -> Complex64 {
        self.refractive_index(omega) * (omega / c)
    }
}

/// Expansion coefficients of a Lorentz medium about `Ω/2`, by central
/// differences with step `B/10`.
pub fn lorentz_to_dispersion(osc: &LorentzOscillator, source: &SourceSpec) -> Result<ComplexDispersion> {
    lorentz_to_dispersion_with_step(osc, source, source.bandwidth() / 10.0)
}

/// As [`lorentz_to_dispersion`] with an explicit difference step.
pub fn lorentz_to_dispersion_with_step(
    osc: &LorentzOscillator,
    source: &SourceSpec,
    step: f64,
) -> Result<ComplexDispersion> {
    if !(osc.resonance_freq.is_finite() && osc.resonance_freq > 0.0) {
        return Err(Error::invalid("lorentz.resonance_freq", "must be finite and > 0"));
    }
    if !(osc.damping.is_finite() && osc.damping >= 0.0) {
        return Err(Error::invalid("lorentz.damping", "must be finite and >= 0"));
    }
    if !(osc.plasma_freq.is_finite() && osc.plasma_freq >= 0.0) {
        return Err(Error::invalid("lorentz.plasma_freq", "must be finite and >= 0"));
    }
    if !(step.is_finite() && step > 0.0 && step < source.center()) {
        return Err(Error::invalid("step", "must lie in (0, omega_sum/2)"));
    }
    let center = source.center();
    let (lo, hi) = source.band();
    let detuning = (center - osc.resonance_freq).abs();
    let inside_band = osc.plasma_freq > 0.0 && osc.resonance_freq >= lo && osc.resonance_freq <= hi;
    if detuning <= 10.0 * osc.damping || inside_band {
        return Err(Error::NearResonance { resonance: osc.resonance_freq, center });
    }

    let c = source.speed_of_light();
    let k_minus = osc.wavenumber(center - step, c);
    let k_center = osc.wavenumber(center, c);
    let k_plus = osc.wavenumber(center + step, c);

    let alpha = (k_plus - k_minus) / (2.0 * step);
    let beta = (k_plus - k_center * 2.0 + k_minus) / (2.0 * step * step);
    let dispersion = ComplexDispersion::new(k_center, alpha, beta);
    dispersion.check_passive(source)?;
    Ok(dispersion)
}

/// Contents of one arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Medium {
    Vacuum,
    Dielectric(ComplexDispersion),
}

/// One interferometer arm: physical length (m) and what fills it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmConfig {
    length: f64,
    medium: Medium,
}

impl ArmConfig {
    pub fn new(length: f64, medium: Medium) -> Result<Self> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(Error::invalid("arm.length", "must be finite and >= 0"));
        }
        Ok(Self { length, medium })
    }

    pub fn vacuum(length: f64) -> Result<Self> {
        Self::new(length, Medium::Vacuum)
    }

    pub fn dielectric(length: f64, dispersion: ComplexDispersion) -> Result<Self> {
        Self::new(length, Medium::Dielectric(dispersion))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self.medium, Medium::Vacuum)
    }

    /// Effective dispersion; a vacuum arm resolves to [`make_vacuum_dispersion`].
    pub fn dispersion(&self, source: &SourceSpec) -> ComplexDispersion {
        match self.medium {
            Medium::Vacuum => make_vacuum_dispersion(source),
            Medium::Dielectric(d) => d,
        }
    }
}

/// Which denominator to use for the fringe exponents.
///
/// `SingleFormula`: `B⁻² + 2 x₁ Im β₁` (single dielectric, vacuum arm 2).
/// `TwoFormula`: `B⁻² + x₁ Im β₁ + x₂ Im β₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BetaConvention {
    #[cfg_attr(feature = "serde", serde(rename = "single"))]
    SingleFormula,
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "two"))]
    TwoFormula,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerConfig {
    source: SourceSpec,
    arm1: ArmConfig,
    arm2: ArmConfig,
    beta_convention: BetaConvention,
}

impl InterferometerConfig {
    /// Both arms are checked for passivity on the source band.
    pub fn new(
        source: SourceSpec,
        arm1: ArmConfig,
        arm2: ArmConfig,
        beta_convention: BetaConvention,
    ) -> Result<Self> {
        arm1.dispersion(&source).check_passive(&source)?;
        arm2.dispersion(&source).check_passive(&source)?;
        Ok(Self { source, arm1, arm2, beta_convention })
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn arm1(&self) -> &ArmConfig {
        &self.arm1
    }

    pub fn arm2(&self) -> &ArmConfig {
        &self.arm2
    }

    pub fn beta_convention(&self) -> BetaConvention {
        self.beta_convention
    }

    pub fn dispersion1(&self) -> ComplexDispersion {
        self.arm1.dispersion(&self.source)
    }

    pub fn dispersion2(&self) -> ComplexDispersion {
        self.arm2.dispersion(&self.source)
    }

    pub fn with_convention(&self, beta_convention: BetaConvention) -> Self {
        Self { beta_convention, ..*self }
    }

    pub fn with_arm1(&self, arm1: ArmConfig) -> Result<Self> {
        Self::new(self.source, arm1, self.arm2, self.beta_convention)
    }

    pub fn with_arm2(&self, arm2: ArmConfig) -> Result<Self> {
        Self::new(self.source, self.arm1, arm2, self.beta_convention)
    }

    pub fn with_source(&self, source: SourceSpec) -> Result<Self> {
        Self::new(source, self.arm1, self.arm2, self.beta_convention)
    }

    /// Arms exchanged.
    pub fn swapped(&self) -> Self {
        Self { arm1: self.arm2, arm2: self.arm1, ..*self }
    }

    /// Same geometry with every imaginary dispersion part set to zero.
    pub fn lossless(&self) -> Self {
        let strip = |arm: &ArmConfig| match arm.medium {
            Medium::Vacuum => *arm,
            Medium::Dielectric(d) => ArmConfig {
                length: arm.length,
                medium: Medium::Dielectric(ComplexDispersion::new(
                    Complex64::new(d.k0.re, 0.0),
                    Complex64::new(d.alpha.re, 0.0),
                    Complex64::new(d.beta.re, 0.0),
                )),
            },
        };
        Self { arm1: strip(&self.arm1), arm2: strip(&self.arm2), ..*self }
    }
}

/// Output of either engine.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoincidenceResult {
    /// Coincidence probability over the no-interference level.
    pub p_normalized: f64,
    /// Loss-imbalance suppression factor of the interference term.
    pub visibility: f64,
    /// Group-delay difference, arm 2 minus arm 1.
    pub tau_r: f64,
    /// Denominator of the fringe exponents.
    pub effective_variance: f64,
    /// Pair survival probability relative to lossless arms.
    pub throughput: f64,
}
