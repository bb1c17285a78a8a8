//! Choosing the arm-2 dielectric so the dark fringe comes back.
//!
//! The dark fringe needs both `x₁ Im α₁ = x₂ Im α₂` (equal loss tilt) and
//! `x₁ Re α₁ = x₂ Re α₂` (equal group delay). With only `x₂` free this is
//! overdetermined unless `Im α₂ / Re α₂ = Im α₁ / Re α₁`; scaling `Im α₂`
//! as a second free parameter makes it solvable for any material.

#[allow(unused_imports)] // needed when std is absent from the graph
use num_traits::Float;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::closed_form;
use crate::error::{Error, Result};
use crate::nelder_mead::{minimize_in_unit_box, NelderMeadOptions};
use crate::optics::{ArmConfig, BetaConvention, ComplexDispersion, InterferometerConfig, SourceSpec};
use crate::oracle::{OracleWorkspace, QuadratureGrids};

/// Points per axis of the coarse scan that precedes the simplex search.
pub const GRID_POINTS_PER_AXIS: usize = 11;

/// `|residual τ_r|` below this fraction of the fringe width counts as restored.
pub const FEASIBLE_FRACTION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FreeParam {
    /// Arm-2 length.
    #[cfg_attr(feature = "serde", serde(rename = "x2"))]
    ArmLength2,
    /// Multiplier on `Im α₂` of the candidate material.
    #[cfg_attr(feature = "serde", serde(rename = "scale_im_alpha2"))]
    ImAlphaScale2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamBound {
    pub param: FreeParam,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    ClosedForm,
    Oracle(QuadratureGrids),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneRequest {
    pub source: SourceSpec,
    pub fixed_arm1: ArmConfig,
    pub material2: ComplexDispersion,
    /// Arm-2 length used when `x2` is not free.
    pub x2: f64,
    /// `Im α₂` multiplier used when it is not free.
    pub scale_im_alpha2: f64,
    pub free: Vec<ParamBound>,
    pub objective: Objective,
    pub beta_convention: BetaConvention,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Restoration {
    pub x2: f64,
    pub scale_im_alpha2: f64,
    /// `x₂ Re α₂ − x₁ Re α₁` at the restored point.
    pub residual_tau_r: f64,
    pub feasible: bool,
    /// Whether `Im α₂ / Re α₂ = Im α₁ / Re α₁` for the unscaled material.
    pub exact_solution_exists: bool,
    pub in_bounds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StartPoint {
    Analytic,
    BoxCenter,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TuneOutcome {
    pub params: Vec<(FreeParam, f64)>,
    pub x2: f64,
    pub scale_im_alpha2: f64,
    pub p_normalized: f64,
    pub evaluations: usize,
    pub start: StartPoint,
    pub converged: bool,
}

impl TuneRequest {
    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() || self.free.len() > 2 {
            return Err(Error::invalid("tune.free", "need one or two free parameters"));
        }
        if self.free.len() == 2 && self.free[0].param == self.free[1].param {
            return Err(Error::invalid("tune.free", "duplicate free parameter"));
        }
        for b in &self.free {
            if !(b.lower.is_finite() && b.upper.is_finite() && b.lower < b.upper) {
                return Err(Error::invalid("tune.bounds", "bounds must be finite with lower < upper"));
            }
            if b.param == FreeParam::ArmLength2 && b.lower < 0.0 {
                return Err(Error::invalid("tune.bounds", "x2 bounds must be >= 0"));
            }
        }
        if !(self.x2.is_finite() && self.x2 >= 0.0) {
            return Err(Error::invalid("arm2.length", "must be finite and >= 0"));
        }
        if !self.scale_im_alpha2.is_finite() {
            return Err(Error::invalid("scale_im_alpha2", "must be finite"));
        }
        Ok(())
    }

    fn is_free(&self, p: FreeParam) -> bool {
        self.free.iter().any(|b| b.param == p)
    }

    /// Arm-2 material with `Im α₂` scaled.
    pub fn material_scaled(&self, scale: f64) -> ComplexDispersion {
        let a = self.material2.alpha;
        ComplexDispersion { alpha: Complex64::new(a.re, a.im * scale), ..self.material2 }
    }

    pub fn config_at(&self, x2: f64, scale: f64) -> Result<InterferometerConfig> {
        InterferometerConfig::new(
            self.source,
            self.fixed_arm1,
            ArmConfig::dielectric(x2, self.material_scaled(scale))?,
            self.beta_convention,
        )
    }

    /// `(x₂, scale)` for a point in the unit box.
    fn params_at(&self, unit: &[f64]) -> (f64, f64) {
        let mut x2 = self.x2;
        let mut scale = self.scale_im_alpha2;
        for (b, u) in self.free.iter().zip(unit) {
            let v = b.lower + u * (b.upper - b.lower);
            match b.param {
                FreeParam::ArmLength2 => x2 = v,
                FreeParam::ImAlphaScale2 => scale = v,
            }
        }
        (x2, scale)
    }

    fn unit_of(&self, x2: f64, scale: f64) -> Vec<f64> {
        self.free
            .iter()
            .map(|b| {
                let v = match b.param {
                    FreeParam::ArmLength2 => x2,
                    FreeParam::ImAlphaScale2 => scale,
                };
                (v - b.lower) / (b.upper - b.lower)
            })
            .collect()
    }
}

/// Solves the restoration conditions directly.
///
/// - `x2` free only: `x₂ = x₁ Im α₁ / Im α₂` (equal loss tilt); the group
///   delay is left as a residual.
/// - `x2` and `scale_im_alpha2` free: `x₂ = x₁ Re α₁ / Re α₂`, then the scale
///   that equalizes the tilt.
/// - `scale_im_alpha2` free only: the scale at the fixed `x₂`.
pub fn analytic_restore(req: &TuneRequest) -> Result<Restoration> {
    req.validate()?;
    let d1 = req.fixed_arm1.dispersion(&req.source);
    let x1 = req.fixed_arm1.length();
    let a1 = d1.alpha;
    let a2 = req.material2.alpha;
    let free_x2 = req.is_free(FreeParam::ArmLength2);
    let free_scale = req.is_free(FreeParam::ImAlphaScale2);

    let (x2, scale) = match (free_x2, free_scale) {
        (true, false) => {
            let im = a2.im * req.scale_im_alpha2;
            if !(im > 0.0) {
                return Err(Error::NoAbsorptionToMatch { im_alpha: im });
            }
            (x1 * a1.im / im, req.scale_im_alpha2)
        }
        (true, true) => {
            if !(a2.im > 0.0) {
                return Err(Error::NoAbsorptionToMatch { im_alpha: a2.im });
            }
            if !(a2.re > 0.0) {
                return Err(Error::invalid("material2.alpha", "Re(alpha) must be > 0 to match the group delay"));
            }
            let x2 = x1 * a1.re / a2.re;
            let scale = if x2 > 0.0 { x1 * a1.im / (x2 * a2.im) } else { req.scale_im_alpha2 };
            (x2, scale)
        }
        (false, true) => {
            if !(a2.im > 0.0) {
                return Err(Error::NoAbsorptionToMatch { im_alpha: a2.im });
            }
            if !(req.x2 > 0.0) {
                return Err(Error::invalid("arm2.length", "must be > 0 to solve for the Im(alpha) scale"));
            }
            (req.x2, x1 * a1.im / (req.x2 * a2.im))
        }
        (false, false) => unreachable!("validated: at least one free parameter"),
    };

    let residual_tau_r = x2 * a2.re - x1 * a1.re;
    let variance = closed_form::effective_variance(&req.config_at(x2, scale)?)?;
    let feasible = residual_tau_r.abs() <= FEASIBLE_FRACTION * variance.sqrt();
    let cross = a2.im * a1.re - a1.im * a2.re;
    let exact_solution_exists = cross.abs() <= 1e-12 * (a2.im * a1.re).abs().max(f64::MIN_POSITIVE);
    let in_bounds = req.free.iter().all(|b| {
        let v = match b.param {
            FreeParam::ArmLength2 => x2,
            FreeParam::ImAlphaScale2 => scale,
        };
        v >= b.lower && v <= b.upper
    });
    Ok(Restoration {
        x2,
        scale_im_alpha2: scale,
        residual_tau_r,
        feasible,
        exact_solution_exists,
        in_bounds,
    })
}

/// Minimizes the normalized coincidence probability over the free
/// parameters: an 11-point-per-axis scan, then Nelder–Mead from the
/// analytic point (box center if that is infeasible or outside the box).
pub fn minimize_coincidence(req: &TuneRequest) -> Result<TuneOutcome> {
    req.validate()?;
    let start = match analytic_restore(req) {
        Ok(r) if r.feasible && r.in_bounds => Some(req.unit_of(r.x2, r.scale_im_alpha2)),
        _ => None,
    };
    minimize_from(req, start, &NelderMeadOptions::default())
}

/// As [`minimize_coincidence`] with an explicit unit-box start (`None`:
/// box center).
pub fn minimize_from(
    req: &TuneRequest,
    start: Option<Vec<f64>>,
    options: &NelderMeadOptions,
) -> Result<TuneOutcome> {
    req.validate()?;
    let workspace = match req.objective {
        Objective::ClosedForm => None,
        Objective::Oracle(grids) => Some(OracleWorkspace::new(req.source, grids)?),
    };
    let objective = |unit: &[f64]| -> f64 {
        let (x2, scale) = req.params_at(unit);
        let value = req.config_at(x2, scale).and_then(|cfg| match &workspace {
            None => closed_form::coincidence_closed_form(&cfg).map(|r| r.p_normalized),
            Some(ws) => ws.ratio_checked(&cfg),
        });
        value.unwrap_or(f64::INFINITY)
    };

    let dims = req.free.len();
    let mut evaluations = 0usize;
    let mut grid_best: Option<(Vec<f64>, f64)> = None;
    let total = GRID_POINTS_PER_AXIS.pow(dims as u32);
    for flat in 0..total {
        // first axis varies slowest: lexicographic order
        let mut unit = alloc::vec![0.0; dims];
        let mut rest = flat;
        for axis in (0..dims).rev() {
            unit[axis] = (rest % GRID_POINTS_PER_AXIS) as f64 / (GRID_POINTS_PER_AXIS - 1) as f64;
            rest /= GRID_POINTS_PER_AXIS;
        }
        let v = objective(&unit);
        evaluations += 1;
        if v.is_finite() && grid_best.as_ref().map_or(true, |(_, best)| v < *best) {
            grid_best = Some((unit, v));
        }
    }
    let (grid_x, grid_v) = grid_best.ok_or(Error::InfeasibleBox)?;

    let (start_kind, start_unit) = match start {
        Some(u) => (StartPoint::Analytic, u),
        None => (StartPoint::BoxCenter, alloc::vec![0.5; dims]),
    };
    let nm = minimize_in_unit_box(objective, &start_unit, options);
    evaluations += nm.evaluations;

    let (best_unit, best_v) = if nm.value <= grid_v { (nm.x, nm.value) } else { (grid_x, grid_v) };
    let (x2, scale) = req.params_at(&best_unit);
    let params = req
        .free
        .iter()
        .map(|b| {
            (
                b.param,
                match b.param {
                    FreeParam::ArmLength2 => x2,
                    FreeParam::ImAlphaScale2 => scale,
                },
            )
        })
        .collect();
    Ok(TuneOutcome {
        params,
        x2,
        scale_im_alpha2: scale,
        p_normalized: best_v,
        evaluations,
        start: start_kind,
        converged: nm.converged,
    })
}
