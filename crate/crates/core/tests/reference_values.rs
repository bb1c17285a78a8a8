//! Fixed reference cases checked against values computed independently of
//! the library (analytic derivatives, closed Gaussian integrals).

use approx::assert_relative_eq;
use homsim_core::optics::lorentz_to_dispersion_with_step;
use homsim_core::tuner::{analytic_restore, minimize_coincidence, FreeParam, Objective, ParamBound, TuneRequest};
use homsim_core::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn natural(arm1: ArmConfig, arm2: ArmConfig, conv: BetaConvention) -> InterferometerConfig {
    InterferometerConfig::new(SourceSpec::natural_preset(), arm1, arm2, conv).unwrap()
}

/// x₁ Im α₁ = 1, B = 1, β = 0, τ_r = 0, vacuum arm 2.
fn single_reference() -> InterferometerConfig {
    let m = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 1.0), c(0.0, 0.0));
    natural(ArmConfig::dielectric(1.0, m).unwrap(), ArmConfig::vacuum(1.0).unwrap(), BetaConvention::SingleFormula)
}

// k(ω) = ω n(ω)/c with n² = 1 + ω_p²/(ω_r² − ω² − iγω); derivatives by hand
fn lorentz_expansion(wp: f64, wr: f64, g: f64, w: f64) -> (Complex64, Complex64, Complex64) {
    let d = c(wr * wr - w * w, -g * w);
    let eps = 1.0 + wp * wp / d;
    let s = c(2.0 * w, g);
    let eps1 = wp * wp * s / (d * d);
    let eps2 = wp * wp * (2.0 / (d * d) + 2.0 * s * s / (d * d * d));
    let mut n = eps.sqrt();
    if n.im < 0.0 {
        n = -n;
    }
    let n1 = eps1 / (2.0 * n);
    let n2 = (eps2 - 2.0 * n1 * n1) / (2.0 * n);
    let cl = SPEED_OF_LIGHT;
    let k0 = w * n / cl;
    let k1 = (n + w * n1) / cl;
    let k2 = (2.0 * n1 + w * n2) / cl;
    (k0, k1, k2 / 2.0)
}

#[test]
fn lorentz_reference_set_matches_analytic_derivatives() {
    let (wp, wr, g) = (1e15, 4e15, 1e13);
    let source = SourceSpec::si(2.4e15, 1e13).unwrap();
    let osc = LorentzOscillator { plasma_freq: wp, resonance_freq: wr, damping: g };
    let d = lorentz_to_dispersion(&osc, &source).unwrap();
    let (k0, alpha, beta) = lorentz_expansion(wp, wr, g, 1.2e15);
    for (got, want) in [(d.k0, k0), (d.alpha, alpha), (d.beta, beta)] {
        assert_relative_eq!(got.re, want.re, epsilon = 0.0, max_relative = 1e-6);
        assert_relative_eq!(got.im, want.im, epsilon = 0.0, max_relative = 1e-6);
    }
    // normal dispersion, small positive loss
    assert!(d.alpha.re > 1.0 / SPEED_OF_LIGHT);
    assert!(d.k0.im > 0.0 && d.alpha.im > 0.0);
}

#[test]
fn lossless_lorentz_far_below_resonance() {
    let source = SourceSpec::si(2.4e15, 1e13).unwrap();
    let osc = LorentzOscillator { plasma_freq: 1e15, resonance_freq: 4e15, damping: 0.0 };
    let d = lorentz_to_dispersion(&osc, &source).unwrap();
    assert_eq!(d.alpha.im, 0.0);
    assert!(d.alpha.re > 1.0 / SPEED_OF_LIGHT);
}

#[test]
fn lorentz_second_difference_is_second_order() {
    let source = SourceSpec::si(2.4e15, 1e13).unwrap();
    let osc = LorentzOscillator { plasma_freq: 1e15, resonance_freq: 4e15, damping: 1e13 };
    let steps = [1e14, 5e13, 2.5e13];
    let betas: Vec<Complex64> = steps
        .iter()
        .map(|&h| lorentz_to_dispersion_with_step(&osc, &source, h).unwrap().beta)
        .collect();
    let order = ((betas[0] - betas[1]).norm() / (betas[1] - betas[2]).norm()).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn biphoton_amplitude_matches_gaussian_integral() {
    let cfg = single_reference();
    let (t_a, t_b) = (0.0, 1.0);
    let got = biphoton_amplitude(&cfg, t_a, t_b).unwrap().norm_sqr();

    // F(τ) = ∫ exp(−δ²/2 + i a δ + i τ δ) dδ = √(2π) exp(−(a + τ)²/2), a = i
    let a = c(0.0, 1.0);
    let tau = t_b - t_a;
    let f = |t: f64| (2.0 * std::f64::consts::PI).sqrt() * (-(a + t) * (a + t) / 2.0).exp();
    let global = (Complex64::i() * c(20.0, 8.0)).exp();
    let want = ((f(tau) - f(-tau)) * global).norm_sqr();
    assert_relative_eq!(got, want, epsilon = 0.0, max_relative = 1e-6);
    // same number by hand: 8π sin²(1) e⁻¹⁶
    let hand = 8.0 * std::f64::consts::PI * 1f64.sin().powi(2) * (-16f64).exp();
    assert_relative_eq!(want, hand, epsilon = 0.0, max_relative = 1e-12);
}

#[test]
fn oracle_examples() {
    let g = QuadratureGrids::default();
    let vac = natural(ArmConfig::vacuum(5.0).unwrap(), ArmConfig::vacuum(5.0).unwrap(), BetaConvention::TwoFormula);
    assert!(coincidence_oracle(&vac, &g).unwrap().p_normalized < 1e-10);

    let p = coincidence_oracle(&single_reference(), &g).unwrap().p_normalized;
    assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-3);

    let m1 = ComplexDispersion::new(c(10.0, 5.0), c(1.4, 0.7), c(0.0, 0.0));
    let m2 = ComplexDispersion::new(c(10.0, 9.0), c(2.8, 1.4), c(0.0, 0.0));
    let matched = natural(
        ArmConfig::dielectric(1.0, m1).unwrap(),
        ArmConfig::dielectric(0.5, m2).unwrap(),
        BetaConvention::TwoFormula,
    );
    assert!(coincidence_oracle(&matched, &g).unwrap().p_normalized < 1e-6);
}

#[test]
fn literal_amplitude_reading_halves_the_exponent() {
    let g = QuadratureGrids { spectrum: SpectralConvention::JointAmplitude, ..Default::default() };
    let p = coincidence_oracle(&single_reference(), &g).unwrap().p_normalized;
    assert!((p - (1.0 - (-0.5f64).exp())).abs() < 1e-6);
}

fn tune_request(material2: ComplexDispersion, free: Vec<ParamBound>) -> TuneRequest {
    TuneRequest {
        source: SourceSpec::natural_preset(),
        fixed_arm1: ArmConfig::dielectric(1.0, ComplexDispersion::new(c(10.0, 8.0), c(1.0, 1.0), c(0.0, 0.0))).unwrap(),
        material2,
        x2: 0.3,
        scale_im_alpha2: 1.0,
        free,
        objective: Objective::ClosedForm,
        beta_convention: BetaConvention::TwoFormula,
    }
}

fn x2_bound() -> ParamBound {
    ParamBound { param: FreeParam::ArmLength2, lower: 0.0, upper: 2.0 }
}

#[test]
fn tuner_examples() {
    let same = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 1.0), c(0.0, 0.0));
    let req = tune_request(same, vec![x2_bound()]);
    let r = analytic_restore(&req).unwrap();
    assert_eq!((r.x2, r.residual_tau_r, r.feasible), (1.0, 0.0, true));
    let out = minimize_coincidence(&req).unwrap();
    assert_relative_eq!(out.x2, 1.0, epsilon = 0.0, max_relative = 1e-6);
    assert!(out.p_normalized < 1e-10);

    let doubled = ComplexDispersion::new(c(10.0, 16.0), c(2.0, 2.0), c(0.0, 0.0));
    let r = analytic_restore(&tune_request(doubled, vec![x2_bound()])).unwrap();
    assert_eq!((r.x2, r.residual_tau_r), (0.5, 0.0));

    let over = ComplexDispersion::new(c(10.0, 16.0), c(1.0, 2.0), c(0.0, 0.0));
    let r = analytic_restore(&tune_request(over, vec![x2_bound()])).unwrap();
    assert_eq!((r.x2, r.residual_tau_r, r.feasible), (0.5, -0.5, false));
    assert!(!r.exact_solution_exists);

    let both = vec![x2_bound(), ParamBound { param: FreeParam::ImAlphaScale2, lower: 0.0, upper: 1.0 }];
    let out = minimize_coincidence(&tune_request(over, both)).unwrap();
    assert!(out.p_normalized < 1e-8);
    assert_relative_eq!(out.x2, 1.0, epsilon = 0.0, max_relative = 1e-6);
    assert_relative_eq!(out.scale_im_alpha2, 0.5, epsilon = 0.0, max_relative = 1e-6);
}

#[test]
fn oracle_objective_tracks_closed_form_minimizer() {
    let m = ComplexDispersion::new(c(10.0, 8.0), c(1.0, 1.0), c(0.0, 0.0));
    let closed = minimize_coincidence(&tune_request(m, vec![x2_bound()])).unwrap();
    let mut req = tune_request(m, vec![x2_bound()]);
    req.objective = Objective::Oracle(QuadratureGrids { freq_points: 513, time_points: 129, ..Default::default() });
    let oracle = minimize_coincidence(&req).unwrap();
    assert!((oracle.x2 - closed.x2).abs() < 1e-3, "{} vs {}", oracle.x2, closed.x2);
}
