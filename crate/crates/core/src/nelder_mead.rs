//! Box-constrained Nelder–Mead on the unit hypercube.
//!
//! Callers map their parameters onto `[0, 1]^n`; trial points are clamped
//! to the box. Fully deterministic: fixed initial simplex, stable ordering.

use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex (unit-box coordinates).
    pub initial_step: f64,
    /// Stop once every vertex is within this max-norm distance of the best.
    pub x_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { initial_step: 0.1, x_tolerance: 1e-6, max_evaluations: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn clamp_unit(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Along `c + t (c − w)`, clamped.
fn along(centroid: &[f64], worst: &[f64], t: f64) -> Vec<f64> {
    let mut p: Vec<f64> = centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect();
    clamp_unit(&mut p);
    p
}

pub fn minimize_in_unit_box<F>(mut f: F, start: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert!(n > 0, "need at least one parameter");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut x0 = start.to_vec();
    clamp_unit(&mut x0);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(&x0, &mut evaluations);
    simplex.push((x0.clone(), v0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] = if x[i] + opts.initial_step <= 1.0 { x[i] + opts.initial_step } else { x[i] - opts.initial_step };
        let v = eval(&x, &mut evaluations);
        simplex.push((x, v));
    }

    let mut converged = false;
    loop {
        // stable sort keeps earlier vertices first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.x_tolerance {
            converged = true;
            break;
        }
        if evaluations >= opts.max_evaluations {
            break;
        }

        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let best = simplex[0].1;
        let second_worst = simplex[n - 1].1;
        let (worst_x, worst) = simplex[n].clone();

        let xr = along(&centroid, &worst_x, REFLECT);
        let fr = eval(&xr, &mut evaluations);
        if fr < best {
            let xe = along(&centroid, &worst_x, EXPAND);
            let fe = eval(&xe, &mut evaluations);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < worst {
            let xc = along(&centroid, &worst_x, REFLECT * CONTRACT);
            let fc = eval(&xc, &mut evaluations);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(&centroid, &worst_x, -CONTRACT);
            let fc = eval(&xc, &mut evaluations);
            let ok = fc < worst;
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + SHRINK * (v - a)).collect();
            clamp_unit(&mut x);
            let v = eval(&x, &mut evaluations);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadOutcome { x, value, evaluations, converged }
}
