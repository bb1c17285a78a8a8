//! The four subcommands as library calls; `main` only handles argv, files
//! and exit codes.

use homsim_core::oracle::{convention_stability, ConventionReport, ConventionWinner};
use homsim_core::tuner::{analytic_restore, minimize_coincidence, Restoration, TuneOutcome};
use homsim_core::{coincidence_closed_form, coincidence_oracle, compare_conventions, CoincidenceResult};
use serde::Serialize;

use crate::config::Setup;
use crate::error::AppError;
use crate::sweep::{fit_fringe_width, run_sweep, Engine, FringeWidth, SweepRow};

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub closed_form: CoincidenceResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<CoincidenceResult>,
    /// `|p_oracle − p_closed|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

pub fn simulate(setup: &Setup, oracle: bool) -> Result<SimulateReport, AppError> {
    let closed = coincidence_closed_form(&setup.config).map_err(|e| AppError::model("closed_form", e))?;
    if !oracle {
        return Ok(SimulateReport { closed_form: closed, oracle: None, deviation: None });
    }
    let o = coincidence_oracle(&setup.config, &setup.grids).map_err(|e| AppError::model("oracle", e))?;
    Ok(SimulateReport {
        closed_form: closed,
        deviation: Some((o.p_normalized - closed.p_normalized).abs()),
        oracle: Some(o),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FringeWidth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub parameter: String,
    pub rows: usize,
    pub failed_rows: usize,
    pub fits: Vec<FitSummary>,
}

/// Runs the configured sweep. `force_oracle` adds the oracle engine.
pub fn sweep(setup: &Setup, force_oracle: bool) -> Result<(Vec<SweepRow>, SweepReport), AppError> {
    let mut spec = setup.sweep_spec()?;
    if force_oracle && !spec.has(Engine::Oracle) {
        spec.engines.push(Engine::Oracle);
    }
    let rows = run_sweep(&setup.config, &spec, &setup.grids);
    let fits = [Engine::ClosedForm, Engine::Oracle]
        .into_iter()
        .filter(|e| spec.has(*e))
        .map(|engine| match fit_fringe_width(&rows, engine) {
            Ok(f) => FitSummary { engine, fit: Some(f), error: None },
            Err(e) => FitSummary { engine, fit: None, error: Some(e.diagnostic()) },
        })
        .collect();
    let report = SweepReport {
        parameter: spec.parameter.to_string(),
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| !r.is_ok()).count(),
        fits,
    };
    Ok((rows, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<Restoration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_error: Option<String>,
    pub optimizer: TuneOutcome,
    /// Analytic solution restores the dark fringe inside the box.
    pub feasible: bool,
}

pub fn tune(setup: &Setup) -> Result<TuneReport, AppError> {
    let req = setup.tune_request()?;
    let analytic = analytic_restore(&req);
    let optimizer = minimize_coincidence(&req).map_err(|e| AppError::model("tune", e))?;
    let (analytic, analytic_error) = match analytic {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(AppError::model("tune", e).diagnostic())),
    };
    Ok(TuneReport {
        feasible: analytic.is_some_and(|r| r.feasible && r.in_bounds),
        analytic,
        analytic_error,
        optimizer,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityEntry {
    pub freq_points: usize,
    pub winner: ConventionWinner,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjudicateReport {
    pub report: ConventionReport,
    pub stability: Vec<StabilityEntry>,
    /// Same winner at every resolution.
    pub stable: bool,
}

pub fn adjudicate(setup: &Setup) -> Result<AdjudicateReport, AppError> {
    let (scan, freq_points) = setup.convention_scan();
    let err = |e| AppError::model("adjudicate", e);
    let report = compare_conventions(&setup.config, &setup.grids, &scan).map_err(err)?;
    let stability: Vec<StabilityEntry> = convention_stability(&setup.config, &setup.grids, &scan, &freq_points)
        .map_err(err)?
        .into_iter()
        .map(|(freq_points, winner)| StabilityEntry { freq_points, winner })
        .collect();
    let stable = stability.iter().all(|s| s.winner == report.winner);
    Ok(AdjudicateReport { report, stability, stable })
}
