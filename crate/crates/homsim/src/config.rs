//! Strict JSON configuration.
//!
//! Unknown keys anywhere are rejected, and every parse error carries the
//! dotted path of the offending key.

use std::fmt;
use std::path::Path;

use homsim_core::oracle::{ConventionScan, SpectralConvention};
use homsim_core::tuner::{FreeParam, Objective, ParamBound, TuneRequest};
use homsim_core::{
    lorentz_to_dispersion, ArmConfig, BetaConvention, Complex64, ComplexDispersion, InterferometerConfig,
    LorentzOscillator, QuadratureGrids, SourceSpec, Units,
};
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer};

use crate::error::AppError;
use crate::sweep::{Engine, SweepParam, SweepSpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub source: RawSource,
    pub arm1: RawArm,
    pub arm2: RawArm,
    #[serde(default)]
    pub beta_convention: BetaConvention,
    #[serde(default)]
    pub units: Units,
    pub oracle: Option<RawOracle>,
    pub sweep: Option<RawSweep>,
    pub tune: Option<RawTune>,
    pub adjudicate: Option<RawAdjudicate>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    pub omega_sum: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArm {
    pub length: f64,
    pub medium: RawMedium,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLorentz {
    pub plasma_freq: f64,
    pub resonance_freq: f64,
    pub damping: f64,
}

/// `"vacuum"`, `{"k0", "alpha", "beta"}` or `{"lorentz": {...}}`.
#[derive(Debug, Clone, Copy)]
pub enum RawMedium {
    Vacuum,
    Expansion { k0: [f64; 2], alpha: [f64; 2], beta: [f64; 2] },
    Lorentz(RawLorentz),
}

const MEDIUM_FIELDS: &[&str] = &["k0", "alpha", "beta", "lorentz"];

impl<'de> Deserialize<'de> for RawMedium {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MediumVisitor;

        impl<'de> Visitor<'de> for MediumVisitor {
            type Value = RawMedium;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"vacuum\", {\"k0\", \"alpha\", \"beta\"} or {\"lorentz\": {...}}")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<RawMedium, E> {
                if v == "vacuum" {
                    Ok(RawMedium::Vacuum)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawMedium, A::Error> {
                let (mut k0, mut alpha, mut beta, mut lorentz) = (None, None, None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "k0" => k0 = Some(map.next_value()?),
                        "alpha" => alpha = Some(map.next_value()?),
                        "beta" => beta = Some(map.next_value()?),
                        "lorentz" => lorentz = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, MEDIUM_FIELDS)),
                    }
                }
                match lorentz {
                    Some(l) => {
                        if k0.is_some() || alpha.is_some() || beta.is_some() {
                            return Err(de::Error::custom("\"lorentz\" cannot be combined with k0/alpha/beta"));
                        }
                        Ok(RawMedium::Lorentz(l))
                    }
                    None => Ok(RawMedium::Expansion {
                        k0: k0.ok_or_else(|| de::Error::missing_field("k0"))?,
                        alpha: alpha.ok_or_else(|| de::Error::missing_field("alpha"))?,
                        beta: beta.ok_or_else(|| de::Error::missing_field("beta"))?,
                    }),
                }
            }
        }

        deserializer.deserialize_any(MediumVisitor)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOracle {
    pub freq_points: Option<usize>,
    pub time_points: Option<usize>,
    pub time_halfwidth_sigmas: Option<f64>,
    pub tolerance: Option<f64>,
    pub spectrum: Option<SpectralConvention>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
}

fn default_engines() -> Vec<Engine> {
    vec![Engine::ClosedForm]
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RawObjective {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBounds {
    pub x2: Option<[f64; 2]>,
    pub scale_im_alpha2: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTune {
    pub free: Vec<FreeParam>,
    pub bounds: RawBounds,
    #[serde(default = "default_objective")]
    pub objective: RawObjective,
    /// Starting `Im α₂` multiplier (also the fixed value when not free).
    #[serde(default = "one")]
    pub scale_im_alpha2: f64,
}

fn default_objective() -> RawObjective {
    RawObjective::ClosedForm
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAdjudicate {
    #[serde(default = "default_scan_points")]
    pub points: usize,
    #[serde(default = "default_scan_halfwidth")]
    pub halfwidth_sigmas: f64,
    #[serde(default = "default_stability_grids")]
    pub freq_points: Vec<usize>,
}

fn default_scan_points() -> usize {
    ConventionScan::default().points
}

fn default_scan_halfwidth() -> f64 {
    ConventionScan::default().halfwidth_sigmas
}

pub fn default_stability_grids() -> Vec<usize> {
    vec![1025, 2049, 4097]
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub units: Option<Units>,
    /// `(freq_points, time_points, time_halfwidth_sigmas)`.
    pub grids: Option<(usize, usize, f64)>,
}

/// Parses `"f,t,s"`.
pub fn parse_grids(text: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected \"freq_points,time_points,halfwidth_sigmas\", got {text:?}"));
    }
    let f = parts[0].parse().map_err(|e| format!("freq_points: {e}"))?;
    let t = parts[1].parse().map_err(|e| format!("time_points: {e}"))?;
    let s = parts[2].parse().map_err(|e| format!("time_halfwidth_sigmas: {e}"))?;
    Ok((f, t, s))
}

/// A validated configuration ready for the engines.
#[derive(Debug, Clone)]
pub struct Setup {
    pub raw: RawConfig,
    pub config: InterferometerConfig,
    pub grids: QuadratureGrids,
}

pub fn parse_str(text: &str) -> Result<RawConfig, AppError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            AppError::config(inner.to_string())
        } else {
            AppError::config(format!("{path}: {inner}"))
        }
    })
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Setup, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::config(format!("cannot read {}: {e}", path.display())))?;
    let raw = parse_str(&text)?;
    build(raw, overrides)
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn context(key: &str) -> impl Fn(homsim_core::Error) -> AppError + '_ {
    move |e| AppError::model(key, e)
}

fn build_arm(name: &str, raw: &RawArm, source: &SourceSpec) -> Result<ArmConfig, AppError> {
    let arm = match raw.medium {
        RawMedium::Vacuum => ArmConfig::vacuum(raw.length),
        RawMedium::Expansion { k0, alpha, beta } => {
            if k0.iter().chain(&alpha).chain(&beta).any(|v| !v.is_finite()) {
                return Err(AppError::config(format!("{name}.medium: coefficients must be finite")));
            }
            ArmConfig::dielectric(raw.length, ComplexDispersion::new(complex(k0), complex(alpha), complex(beta)))
        }
        RawMedium::Lorentz(l) => {
            let osc = LorentzOscillator {
                plasma_freq: l.plasma_freq,
                resonance_freq: l.resonance_freq,
                damping: l.damping,
            };
            let d = lorentz_to_dispersion(&osc, source).map_err(context(&format!("{name}.medium.lorentz")))?;
            ArmConfig::dielectric(raw.length, d)
        }
    };
    let arm = arm.map_err(context(&format!("{name}.length")))?;
    arm.dispersion(source).check_passive(source).map_err(context(&format!("{name}.medium")))?;
    Ok(arm)
}

pub fn build(raw: RawConfig, overrides: &Overrides) -> Result<Setup, AppError> {
    let units = overrides.units.unwrap_or(raw.units);
    let source =
        SourceSpec::new(raw.source.omega_sum, raw.source.bandwidth, units).map_err(context("source"))?;
    let arm1 = build_arm("arm1", &raw.arm1, &source)?;
    let arm2 = build_arm("arm2", &raw.arm2, &source)?;
    let config = InterferometerConfig::new(source, arm1, arm2, raw.beta_convention).map_err(context("config"))?;
    if raw.beta_convention == BetaConvention::SingleFormula && !arm2.is_vacuum() {
        return Err(AppError::config("beta_convention: \"single\" requires arm2.medium = \"vacuum\""));
    }

    let mut grids = QuadratureGrids::default();
    if let Some(o) = raw.oracle {
        grids.freq_points = o.freq_points.unwrap_or(grids.freq_points);
        grids.time_points = o.time_points.unwrap_or(grids.time_points);
        grids.time_halfwidth_sigmas = o.time_halfwidth_sigmas.unwrap_or(grids.time_halfwidth_sigmas);
        grids.tolerance = o.tolerance.unwrap_or(grids.tolerance);
        grids.spectrum = o.spectrum.unwrap_or(grids.spectrum);
    }
    if let Some((f, t, s)) = overrides.grids {
        grids.freq_points = f;
        grids.time_points = t;
        grids.time_halfwidth_sigmas = s;
    }
    grids.validate().map_err(context("oracle"))?;

    Ok(Setup { raw, config, grids })
}

impl Setup {
    pub fn sweep_spec(&self) -> Result<SweepSpec, AppError> {
        let s = self.raw.sweep.as_ref().ok_or_else(|| AppError::config("sweep: section missing"))?;
        let parameter: SweepParam = s.parameter.parse().map_err(|e| AppError::config(format!("sweep.parameter: {e}")))?;
        let spec = SweepSpec {
            parameter,
            start: s.start,
            stop: s.stop,
            steps: s.steps,
            engines: s.engines.clone(),
        };
        spec.validate(&self.config)?;
        Ok(spec)
    }

    pub fn tune_request(&self) -> Result<TuneRequest, AppError> {
        let t = self.raw.tune.as_ref().ok_or_else(|| AppError::config("tune: section missing"))?;
        let material2 = match self.config.arm2().medium() {
            homsim_core::Medium::Dielectric(d) => *d,
            homsim_core::Medium::Vacuum => {
                return Err(AppError::config("arm2.medium: tuning needs a candidate dielectric in arm 2"))
            }
        };
        let mut free = Vec::with_capacity(t.free.len());
        for p in &t.free {
            let (key, b) = match p {
                FreeParam::ArmLength2 => ("x2", t.bounds.x2),
                FreeParam::ImAlphaScale2 => ("scale_im_alpha2", t.bounds.scale_im_alpha2),
            };
            let [lower, upper] = b.ok_or_else(|| AppError::config(format!("tune.bounds.{key}: missing for free parameter")))?;
            free.push(ParamBound { param: *p, lower, upper });
        }
        let objective = match t.objective {
            RawObjective::ClosedForm => Objective::ClosedForm,
            RawObjective::Oracle => Objective::Oracle(self.grids),
        };
        let req = TuneRequest {
            source: *self.config.source(),
            fixed_arm1: *self.config.arm1(),
            material2,
            x2: self.config.arm2().length(),
            scale_im_alpha2: t.scale_im_alpha2,
            free,
            objective,
            beta_convention: self.config.beta_convention(),
        };
        req.validate().map_err(context("tune"))?;
        Ok(req)
    }

    pub fn convention_scan(&self) -> (ConventionScan, Vec<usize>) {
        match &self.raw.adjudicate {
            Some(a) => (
                ConventionScan { points: a.points, halfwidth_sigmas: a.halfwidth_sigmas },
                a.freq_points.clone(),
            ),
            None => (ConventionScan::default(), default_stability_grids()),
        }
    }
}
