//! Gaussian fringe-envelope fit.
//!
//! Fits `p(τ) = 1 − V exp(−(τ − τ₀)² / σ²)` by taking `ln((1 − p)/V₀)`,
//! with `V₀ = 1 − p_min`, and solving the resulting quadratic least-squares
//! problem. The choice of `V₀` only shifts the constant term, so `σ²` and
//! `τ₀` do not depend on it.

#[allow(unused_imports)] // needed when std is absent from the graph
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Rows whose `(1 − p)/V₀` falls below this carry no usable information.
const LOG_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FringeFit {
    pub sigma_sq: f64,
    /// Abscissa of the fringe minimum.
    pub center: f64,
    /// Fitted interference visibility `V`.
    pub visibility: f64,
    /// RMS of `p − p_model` over every input point.
    pub rms_residual: f64,
}

/// Fits `(τ, p)` samples. Needs at least 7 points with the minimum strictly
/// inside the scanned range.
pub fn fit_gaussian_dip(points: &[(f64, f64)]) -> Result<FringeFit> {
    if points.len() < 7 {
        return Err(Error::FitDomain(format!("need at least 7 rows, got {}", points.len())));
    }
    if points.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
        return Err(Error::FitDomain("non-finite sample".into()));
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (min_idx, &(_, p_min)) = pts
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1).1.total_cmp(&(b.1).1).then(a.0.cmp(&b.0)))
        .expect("non-empty");
    if min_idx == 0 || min_idx == pts.len() - 1 {
        return Err(Error::FitDomain("no interior minimum in the scan".into()));
    }
    let v0 = 1.0 - p_min;
    if !(v0 > 0.0) {
        return Err(Error::FitDomain("no dip: minimum coincidence level is 1".into()));
    }

    let lo = pts[0].0;
    let hi = pts[pts.len() - 1].0;
    let mid = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);

    // normal equations for y = c0 + c1 t + c2 t²
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    let mut used = 0usize;
    for &(tau, p) in &pts {
        let y = (1.0 - p) / v0;
        if y <= LOG_FLOOR {
            continue;
        }
        let t = (tau - mid) / scale;
        let basis = [1.0, t, t * t];
        let ly = y.ln();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * ly;
        }
        used += 1;
    }
    if used < 3 {
        return Err(Error::FitDomain(format!("only {used} rows above the log floor")));
    }
    let [c0, c1, c2] = solve3(m, rhs).ok_or_else(|| Error::FitDomain("singular normal equations".into()))?;
    if !(c2 < 0.0) {
        return Err(Error::FitDomain("log-envelope is not concave".into()));
    }

    let sigma_sq = -scale * scale / c2;
    let t0 = -c1 / (2.0 * c2);
    let center = mid + scale * t0;
    let visibility = v0 * (c0 - c1 * c1 / (4.0 * c2)).exp();

    let sum_sq: f64 = pts
        .iter()
        .map(|&(tau, p)| {
            let model = 1.0 - visibility * (-(tau - center) * (tau - center) / sigma_sq).exp();
            (p - model) * (p - model)
        })
        .sum();
    Ok(FringeFit {
        sigma_sq,
        center,
        visibility,
        rms_residual: (sum_sq / pts.len() as f64).sqrt(),
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
