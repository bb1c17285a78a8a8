//! One-parameter scans, fringe-width fits and CSV / JSON-lines output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use homsim_core::fit::{fit_gaussian_dip, FringeFit};
use homsim_core::{
    coincidence_closed_form, ArmConfig, Complex64, Error as CoreError, InterferometerConfig,
    Medium, OracleWorkspace, QuadratureGrids, SourceSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    K0,
    Alpha,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// Scan target, written as a dotted path in the config.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// `arm1.length` / `arm2.length`
    Length { arm: u8 },
    /// `source.bandwidth`
    Bandwidth,
    /// e.g. `arm2.alpha.im`
    Coefficient { arm: u8, coef: Coefficient, part: Part },
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('.').collect();
        let arm = |name: &str| match name {
            "arm1" => Ok(1),
            "arm2" => Ok(2),
            other => Err(format!("unknown arm {other:?}")),
        };
        match parts.as_slice() {
            ["source", "bandwidth"] => Ok(SweepParam::Bandwidth),
            [a, "length"] => Ok(SweepParam::Length { arm: arm(a)? }),
            [a, c, p] => {
                let coef = match *c {
                    "k0" => Coefficient::K0,
                    "alpha" => Coefficient::Alpha,
                    "beta" => Coefficient::Beta,
                    other => return Err(format!("unknown coefficient {other:?}")),
                };
                let part = match *p {
                    "re" => Part::Re,
                    "im" => Part::Im,
                    other => return Err(format!("expected re or im, got {other:?}")),
                };
                Ok(SweepParam::Coefficient { arm: arm(a)?, coef, part })
            }
            _ => Err(format!("cannot resolve {s:?}")),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::Bandwidth => f.write_str("source.bandwidth"),
            SweepParam::Length { arm } => write!(f, "arm{arm}.length"),
            SweepParam::Coefficient { arm, coef, part } => {
                let c = match coef {
                    Coefficient::K0 => "k0",
                    Coefficient::Alpha => "alpha",
                    Coefficient::Beta => "beta",
                };
                let p = match part {
                    Part::Re => "re",
                    Part::Im => "im",
                };
                write!(f, "arm{arm}.{c}.{p}")
            }
        }
    }
}

impl SweepParam {
    /// `base` with this parameter set to `value`.
    pub fn apply(&self, base: &InterferometerConfig, value: f64) -> Result<InterferometerConfig, CoreError> {
        let arm_of = |arm: u8| if arm == 1 { *base.arm1() } else { *base.arm2() };
        let put = |arm: u8, a: ArmConfig| if arm == 1 { base.with_arm1(a) } else { base.with_arm2(a) };
        match *self {
            SweepParam::Bandwidth => {
                let s = base.source();
                base.with_source(SourceSpec::new(s.omega_sum(), value, s.units())?)
            }
            SweepParam::Length { arm } => {
                let a = arm_of(arm);
                put(arm, ArmConfig::new(value, *a.medium())?)
            }
            SweepParam::Coefficient { arm, coef, part } => {
                let a = arm_of(arm);
                let Medium::Dielectric(mut d) = *a.medium() else {
                    unreachable!("validated: coefficient sweeps need a dielectric arm")
                };
                let slot: &mut Complex64 = match coef {
                    Coefficient::K0 => &mut d.k0,
                    Coefficient::Alpha => &mut d.alpha,
                    Coefficient::Beta => &mut d.beta,
                };
                match part {
                    Part::Re => slot.re = value,
                    Part::Im => slot.im = value,
                }
                put(arm, ArmConfig::dielectric(a.length(), d)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub start: f64,
    /// Inclusive.
    pub stop: f64,
    pub steps: usize,
    pub engines: Vec<Engine>,
}

impl SweepSpec {
    pub fn validate(&self, base: &InterferometerConfig) -> Result<(), AppError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(AppError::config("sweep: need finite start < stop"));
        }
        if self.steps < 2 {
            return Err(AppError::config("sweep.steps: must be >= 2"));
        }
        if self.engines.is_empty() {
            return Err(AppError::config("sweep.engines: at least one engine"));
        }
        if let SweepParam::Coefficient { arm, .. } = self.parameter {
            let a = if arm == 1 { base.arm1() } else { base.arm2() };
            if a.is_vacuum() {
                return Err(AppError::config(format!(
                    "sweep.parameter: {} needs a dielectric arm{arm}",
                    self.parameter
                )));
            }
        }
        Ok(())
    }

    pub fn has(&self, engine: Engine) -> bool {
        self.engines.contains(&engine)
    }

    /// Evenly spaced values; each is computed from the nearer end point so
    /// a reversed scan lands on the same floats.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if 2 * i == n {
                    0.5 * (self.start + self.stop)
                } else if 2 * i < n {
                    self.start + (self.stop - self.start) * (i as f64 / n as f64)
                } else {
                    self.stop - (self.stop - self.start) * ((n - i) as f64 / n as f64)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param_value: f64,
    #[serde(rename = "tau_r_s")]
    pub tau_r: Option<f64>,
    pub p_closed: Option<f64>,
    pub p_oracle: Option<f64>,
    pub visibility: Option<f64>,
    pub throughput: Option<f64>,
    /// `ok`, or the single-line diagnostic of the engine that failed.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn poisoned(param_value: f64, status: String) -> SweepRow {
    SweepRow {
        param_value,
        tau_r: None,
        p_closed: None,
        p_oracle: None,
        visibility: None,
        throughput: None,
        status,
    }
}

fn row_at(
    base: &InterferometerConfig,
    spec: &SweepSpec,
    shared: Option<&OracleWorkspace>,
    grids: &QuadratureGrids,
    value: f64,
) -> SweepRow {
    let tag = |e: CoreError| AppError::model(&spec.parameter.to_string(), e).diagnostic();
    let cfg = match spec.parameter.apply(base, value) {
        Ok(c) => c,
        Err(e) => return poisoned(value, tag(e)),
    };
    // τ_r and visibility always come from the closed form
    let closed = match coincidence_closed_form(&cfg) {
        Ok(r) => r,
        Err(e) => return poisoned(value, tag(e)),
    };
    let mut row = SweepRow {
        param_value: value,
        tau_r: Some(closed.tau_r),
        p_closed: spec.has(Engine::ClosedForm).then_some(closed.p_normalized),
        p_oracle: None,
        visibility: Some(closed.visibility),
        throughput: Some(closed.throughput),
        status: "ok".to_string(),
    };
    if spec.has(Engine::Oracle) {
        let result = match shared {
            Some(ws) => ws.coincidence(&cfg),
            None => OracleWorkspace::new(*cfg.source(), *grids).and_then(|ws| ws.coincidence(&cfg)),
        };
        match result {
            Ok(r) => {
                row.p_oracle = Some(r.p_normalized);
                row.throughput = Some(r.throughput);
            }
            Err(e) => {
                row.status = tag(e);
            }
        }
    }
    row
}

/// Rows for explicit parameter values, in the order given. Rows are
/// computed in parallel; a failing row is kept with its diagnostic in
/// `status`.
pub fn evaluate_points(
    base: &InterferometerConfig,
    spec: &SweepSpec,
    grids: &QuadratureGrids,
    values: &[f64],
) -> Vec<SweepRow> {
    // the frequency grid depends only on the source, so it is shared unless
    // the bandwidth itself is swept
    let shared = match (spec.has(Engine::Oracle), spec.parameter) {
        (true, SweepParam::Bandwidth) | (false, _) => None,
        (true, _) => OracleWorkspace::new(*base.source(), *grids).ok(),
    };
    values
        .par_iter()
        .map(|&v| row_at(base, spec, shared.as_ref(), grids, v))
        .collect()
}

/// Rows in ascending parameter order.
pub fn run_sweep(base: &InterferometerConfig, spec: &SweepSpec, grids: &QuadratureGrids) -> Vec<SweepRow> {
    evaluate_points(base, spec, grids, &spec.values())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FringeWidth {
    /// Fitted `σ²` in units of `τ_r²`.
    pub sigma_sq: f64,
    /// Fringe minimum on the `τ_r` axis.
    pub center_tau_r: f64,
    /// Fringe minimum in swept-parameter units.
    pub center_param: f64,
    pub visibility: f64,
    pub rms_residual: f64,
}

/// Fits `p(τ_r) = 1 − V exp(−(τ_r − τ₀)²/σ²)` to the rows of one engine.
pub fn fit_fringe_width(rows: &[SweepRow], engine: Engine) -> Result<FringeWidth, AppError> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.is_ok())
        .filter_map(|r| {
            let p = match engine {
                Engine::ClosedForm => r.p_closed,
                Engine::Oracle => r.p_oracle,
            }?;
            Some((r.tau_r?, p, r.param_value))
        })
        .collect();
    let fit_err = |e| AppError::model("fit", e);
    let (first, last) = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(fit_err(CoreError::FitDomain("no usable rows".into()))),
    };
    if first.0 == last.0 {
        return Err(fit_err(CoreError::FitDomain("tau_r does not vary across the sweep".into())));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(t, p, _)| (t, p)).collect();
    let FringeFit { sigma_sq, center, visibility, rms_residual } = fit_gaussian_dip(&xy).map_err(fit_err)?;
    // τ_r is affine in every length-like parameter; elsewhere this is an
    // interpolation between the end rows
    let center_param = first.2 + (center - first.0) * (last.2 - first.2) / (last.0 - first.0);
    Ok(FringeWidth { sigma_sq, center_tau_r: center, center_param, visibility, rms_residual })
}

/// Writes the fixed-column CSV (header always present).
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["param_value", "tau_r_s", "p_closed", "p_oracle", "visibility", "throughput", "status"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| AppError::io("csv output", e))?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>, AppError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(AppError::from)).collect()
}

pub fn write_jsonl<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<(), AppError> {
    for r in rows {
        serde_json::to_writer(&mut out, r).map_err(|e| AppError::io("jsonl output", e.into()))?;
        out.write_all(b"\n").map_err(|e| AppError::io("jsonl output", e))?;
    }
    Ok(())
}
