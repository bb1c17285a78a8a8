//! Brute-force coincidence probability by quadrature.
//!
//! The antisymmetrized two-path amplitude at detection times `t_a`, `t_b`
//! (carrier `e^{−iΩ(t_a+t_b)/2}` removed) is
//!
//! ```text
//! A(t_a, t_b) = ∫ dδ g(δ) P₁(Ω/2+δ) P₂(Ω/2−δ) [e^{−iδ(t_a − t_b)} − e^{−iδ(t_b − t_a)}]
//! ```
//!
//! with `P_j(ω) = e^{i k_j(ω) x_j}` and `δ = ω − Ω/2`. With a monochromatic
//! pump the integrand depends on the detection times only through
//! `τ = t_b − t_a`, so over a detector window of length `T` the double
//! time integral is `T ∫ dτ`, and `T` cancels in every ratio reported here.
//!
//! `g` is the amplitude spectral weight. Under [`SpectralConvention::JointIntensity`]
//! (the default) `|g|² = exp(−δ²/B²)`, which is the convention under which
//! the single-dielectric closed form holds exactly; the literal-amplitude
//! reading `g = exp(−δ²/B²)` is kept for comparison.
//!
//! The frequency integral is a trapezoid over `Ω/2 ± 6B`; the `τ` integral
//! is a trapezoid over a symmetric window wide enough to hold both path
//! packets, centered at `±τ_peak`.

#[allow(unused_imports)] // needed when std is absent from the graph
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::closed_form;
use crate::error::{Error, Result};
use crate::fit::{fit_gaussian_dip, FringeFit};
use crate::optics::{
    ArmConfig, BetaConvention, CoincidenceResult, InterferometerConfig, SourceSpec, BAND_HALFWIDTH,
};

/// Reseed interval for the rotating-phasor recurrence.
const RESEED: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SpectralConvention {
    /// `|f₁f₂|² = exp[−(ω − Ω/2)²/B²]`.
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "intensity"))]
    JointIntensity,
    /// `f₁f₂ = exp[−(ω − Ω/2)²/B²]`.
    #[cfg_attr(feature = "serde", serde(rename = "amplitude"))]
    JointAmplitude,
}

impl SpectralConvention {
    /// `γ` in `g(δ) = exp(−γ δ²)`.
    fn gaussian_coefficient(self, bandwidth: f64) -> f64 {
        let inv_b2 = 1.0 / (bandwidth * bandwidth);
        match self {
            SpectralConvention::JointIntensity => 0.5 * inv_b2,
            SpectralConvention::JointAmplitude => inv_b2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureGrids {
    /// Frequency nodes over `Ω/2 ± 6B` (odd).
    pub freq_points: usize,
    /// Nodes on the detection-time-difference axis (odd).
    pub time_points: usize,
    /// Half-width of the time window beyond the packet peak, in packet widths.
    pub time_halfwidth_sigmas: f64,
    /// Requested accuracy of `D/N`; a half-resolution check above ten times
    /// this is reported as under-resolution.
    pub tolerance: f64,
    pub spectrum: SpectralConvention,
}

impl Default for QuadratureGrids {
    fn default() -> Self {
        Self {
            freq_points: 2049,
            time_points: 513,
            time_halfwidth_sigmas: 8.0,
            tolerance: 1e-6,
            spectrum: SpectralConvention::JointIntensity,
        }
    }
}

impl QuadratureGrids {
    pub fn validate(&self) -> Result<()> {
        if self.freq_points < 129 || self.freq_points % 2 == 0 {
            return Err(Error::invalid("oracle.freq_points", "must be odd and >= 129"));
        }
        if self.time_points < 65 || self.time_points % 2 == 0 {
            return Err(Error::invalid("oracle.time_points", "must be odd and >= 65"));
        }
        if !(self.time_halfwidth_sigmas.is_finite() && self.time_halfwidth_sigmas >= 5.0) {
            return Err(Error::invalid("oracle.time_halfwidth_sigmas", "must be >= 5"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("oracle.tolerance", "must be > 0"));
        }
        Ok(())
    }

    /// Same grids with `freq_points` replaced.
    pub fn with_freq_points(&self, freq_points: usize) -> Self {
        Self { freq_points, ..*self }
    }

    /// Both axes doubled in resolution (`n → 2n − 1`).
    pub fn refined(&self) -> Self {
        Self {
            freq_points: 2 * self.freq_points - 1,
            time_points: 2 * self.time_points - 1,
            ..*self
        }
    }
}

/// Raw quadrature output for one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValues {
    /// `D/N` on the full frequency grid.
    pub ratio: f64,
    /// `D/N` with every other frequency node.
    pub ratio_coarse: f64,
    /// `N` per unit detector window, including pair attenuation.
    pub pair_rate: f64,
}

/// Frequency nodes and spectral weights for one source, reused across
/// configurations that share it.
#[derive(Clone, Debug)]
pub struct OracleWorkspace {
    source: SourceSpec,
    grids: QuadratureGrids,
    deltas: Vec<f64>,
    /// trapezoid weight × g(δ), full grid
    fine: Vec<f64>,
    /// trapezoid weight × g(δ) on even nodes of the full grid, zero elsewhere
    coarse: Vec<f64>,
}

struct Packet {
    fine: Vec<Complex64>,
    coarse: Vec<Complex64>,
    tau_weights: Vec<f64>,
    global: Complex64,
}

impl OracleWorkspace {
    pub fn new(source: SourceSpec, grids: QuadratureGrids) -> Result<Self> {
        grids.validate()?;
        let n = grids.freq_points;
        let half = BAND_HALFWIDTH * source.bandwidth();
        let step = 2.0 * half / (n - 1) as f64;
        let gamma = grids.spectrum.gaussian_coefficient(source.bandwidth());

        let deltas: Vec<f64> = (0..n).map(|j| -half + step * j as f64).collect();
        let mut fine = vec![0.0; n];
        let mut coarse = vec![0.0; n];
        for (j, &d) in deltas.iter().enumerate() {
            let g = (-gamma * d * d).exp();
            let edge = j == 0 || j == n - 1;
            fine[j] = g * step * if edge { 0.5 } else { 1.0 };
            if j % 2 == 0 {
                coarse[j] = g * 2.0 * step * if edge { 0.5 } else { 1.0 };
            }
        }
        Ok(Self { source, grids, deltas, fine, coarse })
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn grids(&self) -> &QuadratureGrids {
        &self.grids
    }

    /// Two-photon amplitude factor `P₁(Ω/2+δ)P₂(Ω/2−δ)` without the
    /// `e^{i(k₀,₁x₁ + k₀,₂x₂)}` factor, which is common to both paths.
    fn path_phase(config: &InterferometerConfig, delta: f64) -> Complex64 {
        let x1 = config.arm1().length();
        let x2 = config.arm2().length();
        let phase = config.dispersion1().offset(delta) * x1 + config.dispersion2().offset(-delta) * x2;
        (Complex64::i() * phase).exp()
    }

    fn global_factor(config: &InterferometerConfig) -> Complex64 {
        let phase = config.dispersion1().k0 * config.arm1().length()
            + config.dispersion2().k0 * config.arm2().length();
        (Complex64::i() * phase).exp()
    }

    fn check_source(&self, config: &InterferometerConfig) -> Result<()> {
        if config.source() != &self.source {
            return Err(Error::invalid("source", "workspace was built for a different source"));
        }
        Ok(())
    }

    /// Antisymmetrized amplitude at `(t_a, t_b)`, times relative to the
    /// carrier, by direct summation over the frequency grid.
    pub fn amplitude(&self, config: &InterferometerConfig, t_a: f64, t_b: f64) -> Result<Complex64> {
        self.check_source(config)?;
        let (plus, minus) = self.path_amplitudes(config, t_a, t_b);
        Ok(plus - minus)
    }

    /// The two un-antisymmetrized path terms `(A₊, A₋)`.
    pub fn path_amplitudes(&self, config: &InterferometerConfig, t_a: f64, t_b: f64) -> (Complex64, Complex64) {
        let tau = t_b - t_a;
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        for (&d, &w) in self.deltas.iter().zip(&self.fine) {
            if w == 0.0 {
                continue;
            }
            let amp = Self::path_phase(config, d) * w;
            plus += amp * Complex64::cis(d * tau);
            minus += amp * Complex64::cis(-d * tau);
        }
        let global = Self::global_factor(config);
        (plus * global, minus * global)
    }

    /// Location and width of the `|A₊(τ)|²` packet for the quadratic
    /// expansion, used only to place the time window.
    fn packet_window(&self, config: &InterferometerConfig, extra_delay: f64) -> Result<f64> {
        let d1 = config.dispersion1();
        let d2 = config.dispersion2();
        let x1 = config.arm1().length();
        let x2 = config.arm2().length();
        let a = d1.alpha * x1 - d2.alpha * x2;
        let b = d1.beta * x1 + d2.beta * x2;
        let gamma = self.grids.spectrum.gaussian_coefficient(self.source.bandwidth());
        let p_re = gamma + b.im;
        if !(p_re > 0.0) {
            return Err(Error::NonPositiveVariance {
                variance: 2.0 * p_re,
                arm1_term: x1 * d1.beta.im,
                arm2_term: x2 * d2.beta.im,
            });
        }
        let p_abs = (p_re * p_re + b.re * b.re).sqrt();
        let peak = -(a.re - extra_delay) + a.im * b.re / p_re;
        let width = core::f64::consts::SQRT_2 * p_abs / p_re.sqrt();
        Ok(peak.abs() + self.grids.time_halfwidth_sigmas * width)
    }

    fn packet(&self, config: &InterferometerConfig, extra_delay: f64) -> Result<Packet> {
        self.check_source(config)?;
        let window = self.packet_window(config, extra_delay)?;
        let nt = self.grids.time_points;
        let dt = 2.0 * window / (nt - 1) as f64;
        let tau0 = -window;

        let mut fine = vec![Complex64::new(0.0, 0.0); nt];
        let mut coarse = vec![Complex64::new(0.0, 0.0); nt];
        for (j, &d) in self.deltas.iter().enumerate() {
            let w = self.fine[j];
            if w == 0.0 {
                continue;
            }
            let wc = self.coarse[j];
            // extra delay in arm 2 shifts the packet like a longer vacuum path
            let amp = Self::path_phase(config, d) * Complex64::cis(-d * extra_delay);
            let rot = Complex64::cis(d * dt);
            let mut z = Complex64::new(0.0, 0.0);
            for m in 0..nt {
                if m % RESEED == 0 {
                    z = Complex64::cis(d * (tau0 + dt * m as f64));
                }
                let term = amp * z;
                fine[m] += term * w;
                if wc != 0.0 {
                    coarse[m] += term * wc;
                }
                z *= rot;
            }
        }
        let tau_weights = (0..nt)
            .map(|m| if m == 0 || m == nt - 1 { 0.5 * dt } else { dt })
            .collect();
        Ok(Packet { fine, coarse, tau_weights, global: Self::global_factor(config) })
    }

    fn ratio_of(f: &[Complex64], weights: &[f64]) -> (f64, f64) {
        let n = f.len();
        let mut d = 0.0;
        let mut norm = 0.0;
        for m in 0..n {
            let fwd = f[m];
            let rev = f[n - 1 - m];
            d += weights[m] * (fwd - rev).norm_sqr();
            norm += weights[m] * (fwd.norm_sqr() + rev.norm_sqr());
        }
        (d, norm)
    }

    /// `D/N` (full and half frequency resolution) and the pair rate.
    pub fn evaluate(&self, config: &InterferometerConfig) -> Result<OracleValues> {
        self.evaluate_with_delay(config, 0.0)
    }

    /// As [`evaluate`](Self::evaluate) with an additional free-space delay
    /// in arm 2 that leaves every loss term unchanged.
    pub fn evaluate_with_delay(&self, config: &InterferometerConfig, extra_delay: f64) -> Result<OracleValues> {
        let packet = self.packet(config, extra_delay)?;
        let (d, n) = Self::ratio_of(&packet.fine, &packet.tau_weights);
        let (dc, nc) = Self::ratio_of(&packet.coarse, &packet.tau_weights);
        let ratio = if n > 0.0 { d / n } else { 0.0 };
        let ratio_coarse = if nc > 0.0 { dc / nc } else { 0.0 };
        Ok(OracleValues { ratio, ratio_coarse, pair_rate: n * packet.global.norm_sqr() })
    }

    /// `D/N` with the half-resolution check applied.
    pub fn ratio_checked(&self, config: &InterferometerConfig) -> Result<f64> {
        let v = self.evaluate(config)?;
        self.check_resolution(&v)?;
        Ok(v.ratio)
    }

    fn check_resolution(&self, v: &OracleValues) -> Result<()> {
        let change = (v.ratio - v.ratio_coarse).abs();
        let limit = 10.0 * self.grids.tolerance;
        if !(change <= limit) {
            return Err(Error::Underresolved { change, limit });
        }
        Ok(())
    }

    /// Full oracle result: `p_normalized = D/N`, band-integrated throughput
    /// against the lossless copy, and closed-form companion values for
    /// `visibility`, `effective_variance` and `tau_r`.
    pub fn coincidence(&self, config: &InterferometerConfig) -> Result<CoincidenceResult> {
        let companion = closed_form::coincidence_closed_form(config)?;
        let v = self.evaluate(config)?;
        self.check_resolution(&v)?;
        let lossless = self.evaluate(&config.lossless())?;
        Ok(CoincidenceResult {
            p_normalized: v.ratio,
            throughput: v.pair_rate / lossless.pair_rate,
            ..companion
        })
    }

    /// Scans an extra arm-2 delay across the fringe and fits the envelope.
    pub fn fit_envelope(&self, config: &InterferometerConfig, points: usize) -> Result<FringeFit> {
        let points = points.max(7);
        let gamma = self.grids.spectrum.gaussian_coefficient(self.source.bandwidth());
        let d1 = config.dispersion1();
        let d2 = config.dispersion2();
        let b_im = d1.beta.im * config.arm1().length() + d2.beta.im * config.arm2().length();
        let sigma = (2.0 * (gamma + b_im)).max(0.0).sqrt();
        if !(sigma > 0.0) {
            return Err(Error::FitDomain("non-positive oracle variance".into()));
        }
        let tau = closed_form::tau_r(config);
        let half = 3.0 * sigma;
        let mut rows = Vec::with_capacity(points);
        for i in 0..points {
            let shift = -half + 2.0 * half * i as f64 / (points - 1) as f64;
            let v = self.evaluate_with_delay(config, shift - tau)?;
            self.check_resolution(&v)?;
            rows.push((shift, v.ratio));
        }
        fit_gaussian_dip(&rows)
    }
}

/// [`OracleWorkspace::amplitude`] on the default grids.
pub fn biphoton_amplitude(config: &InterferometerConfig, t_a: f64, t_b: f64) -> Result<Complex64> {
    OracleWorkspace::new(*config.source(), QuadratureGrids::default())?.amplitude(config, t_a, t_b)
}

pub fn coincidence_oracle(config: &InterferometerConfig, grids: &QuadratureGrids) -> Result<CoincidenceResult> {
    OracleWorkspace::new(*config.source(), *grids)?.coincidence(config)
}

/// Oracle result with `visibility` and `effective_variance` back-solved
/// from a fitted delay scan instead of the closed-form companions.
pub fn coincidence_oracle_fitted(
    config: &InterferometerConfig,
    grids: &QuadratureGrids,
) -> Result<CoincidenceResult> {
    let ws = OracleWorkspace::new(*config.source(), *grids)?;
    let base = ws.coincidence(config)?;
    let fit = ws.fit_envelope(config, 21)?;
    Ok(CoincidenceResult {
        visibility: fit.visibility,
        effective_variance: fit.sigma_sq,
        ..base
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ConventionWinner {
    Single,
    Two,
    /// The two closed forms coincide on this scan.
    Tie,
    /// Both closed forms miss the oracle by more than 5 %.
    Indeterminate,
}

/// Relative deviation above which a convention is considered to have failed.
pub const INDETERMINATE_DEVIATION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConventionRow {
    pub tau_r: f64,
    pub oracle: f64,
    pub single: f64,
    pub two: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConventionReport {
    pub rows: Vec<ConventionRow>,
    pub max_rel_dev_single: f64,
    pub max_rel_dev_two: f64,
    pub winner: ConventionWinner,
}

/// `τ_r` scan used by [`compare_conventions`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConventionScan {
    pub points: usize,
    /// Half-width of the scan in units of the larger of the two closed-form
    /// fringe widths.
    pub halfwidth_sigmas: f64,
}

impl Default for ConventionScan {
    fn default() -> Self {
        Self { points: 11, halfwidth_sigmas: 2.0 }
    }
}

/// Runs the oracle and both β conventions over a `τ_r` scan (obtained by
/// moving the vacuum arm-2 length) and names the convention that tracks
/// the oracle.
pub fn compare_conventions(
    config: &InterferometerConfig,
    grids: &QuadratureGrids,
    scan: &ConventionScan,
) -> Result<ConventionReport> {
    if !config.arm2().is_vacuum() {
        return Err(Error::invalid("arm2", "convention comparison needs a vacuum arm 2"));
    }
    if scan.points < 11 {
        return Err(Error::invalid("adjudicate.points", "need at least 11 scan points"));
    }
    if !(scan.halfwidth_sigmas.is_finite() && scan.halfwidth_sigmas > 0.0) {
        return Err(Error::invalid("adjudicate.halfwidth_sigmas", "must be > 0"));
    }
    let single_cfg = config.with_convention(BetaConvention::SingleFormula);
    let two_cfg = config.with_convention(BetaConvention::TwoFormula);
    let var = closed_form::effective_variance(&single_cfg)?.max(closed_form::effective_variance(&two_cfg)?);
    let half = scan.halfwidth_sigmas * var.sqrt();

    let ws = OracleWorkspace::new(*config.source(), *grids)?;
    let c = config.source().speed_of_light();
    let base_delay = config.arm1().length() * config.dispersion1().alpha.re;

    let mut rows = Vec::with_capacity(scan.points);
    for i in 0..scan.points {
        let target = -half + 2.0 * half * i as f64 / (scan.points - 1) as f64;
        let x2 = c * (base_delay + target);
        if x2 < 0.0 {
            return Err(Error::invalid("arm2.length", "tau_r scan would need a negative arm-2 length"));
        }
        let cfg = config.with_arm2(ArmConfig::vacuum(x2)?)?;
        let single = closed_form::coincidence_closed_form(&cfg.with_convention(BetaConvention::SingleFormula))?;
        let two = closed_form::coincidence_closed_form(&cfg.with_convention(BetaConvention::TwoFormula))?;
        rows.push(ConventionRow {
            tau_r: single.tau_r,
            oracle: ws.ratio_checked(&cfg)?,
            single: single.p_normalized,
            two: two.p_normalized,
        });
    }

    let rel = |model: f64, truth: f64| (model - truth).abs() / truth.abs().max(1e-12);
    let max_rel_dev_single = rows.iter().map(|r| rel(r.single, r.oracle)).fold(0.0, f64::max);
    let max_rel_dev_two = rows.iter().map(|r| rel(r.two, r.oracle)).fold(0.0, f64::max);
    let coincide = rows.iter().all(|r| (r.single - r.two).abs() <= 1e-12 * r.single.abs().max(1e-300));

    let winner = if coincide {
        ConventionWinner::Tie
    } else if max_rel_dev_single > INDETERMINATE_DEVIATION && max_rel_dev_two > INDETERMINATE_DEVIATION {
        ConventionWinner::Indeterminate
    } else if max_rel_dev_single < max_rel_dev_two {
        ConventionWinner::Single
    } else {
        ConventionWinner::Two
    };
    Ok(ConventionReport { rows, max_rel_dev_single, max_rel_dev_two, winner })
}

/// Winner of [`compare_conventions`] at each frequency resolution.
pub fn convention_stability(
    config: &InterferometerConfig,
    grids: &QuadratureGrids,
    scan: &ConventionScan,
    freq_points: &[usize],
) -> Result<Vec<(usize, ConventionWinner)>> {
    freq_points
        .iter()
        .map(|&n| Ok((n, compare_conventions(config, &grids.with_freq_points(n), scan)?.winner)))
        .collect()
}
