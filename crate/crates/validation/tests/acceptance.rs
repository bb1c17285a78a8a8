//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so every line is
//! printed, passing or not.

use std::path::PathBuf;
use std::process::ExitCode;

use homsim::commands;
use homsim::config::{load, Overrides, Setup};
use homsim::sweep::{fit_fringe_width, run_sweep, Engine};
use homsim_core::oracle::{ConventionWinner, OracleWorkspace};
use homsim_core::tuner::{analytic_restore, minimize_coincidence, FreeParam, Objective, ParamBound, TuneRequest};
use homsim_core::*;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Check = std::result::Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn setup(name: &str) -> Setup {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load(&path, &Overrides::default()).unwrap_or_else(|e| panic!("{name}: {}", e.diagnostic()))
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn vacuum_dark_fringe() -> Check {
    let s = setup("vacuum_symmetric.json");
    let closed = coincidence_closed_form(&s.config).map_err(|e| e.to_string())?.p_normalized;
    let oracle = coincidence_oracle(&s.config, &s.grids).map_err(|e| e.to_string())?.p_normalized;
    verdict(closed == 0.0 && oracle < 1e-10, format!("closed {closed:e}, oracle {oracle:e}"))
}

fn single_dielectric_reference() -> Check {
    let s = setup("single_dielectric.json");
    let want = 1.0 - (-1.0f64).exp();
    let closed = coincidence_closed_form(&s.config).map_err(|e| e.to_string())?.p_normalized;
    let oracle = coincidence_oracle(&s.config, &s.grids).map_err(|e| e.to_string())?.p_normalized;
    verdict(
        (closed - want).abs() <= 1e-15 && (oracle - want).abs() <= 1e-3,
        format!("closed {closed:.15}, oracle {oracle:.9}, want {want:.15}"),
    )
}

fn matched_pair_restores_fringe() -> Check {
    let s = setup("matched_two.json");
    let closed = coincidence_closed_form(&s.config).map_err(|e| e.to_string())?.p_normalized;
    let oracle = coincidence_oracle(&s.config, &s.grids).map_err(|e| e.to_string())?.p_normalized;
    verdict(closed == 0.0 && oracle < 1e-6, format!("closed {closed:e}, oracle {oracle:e}"))
}

fn throughput_cost() -> Check {
    let m = ComplexDispersion::new(c(10.0, 0.5), c(1.0, 0.05), c(0.0, 0.0));
    let arm1 = ArmConfig::dielectric(1.0, m).unwrap();
    let before = InterferometerConfig::new(
        SourceSpec::natural_preset(),
        arm1,
        ArmConfig::vacuum(1.0).unwrap(),
        BetaConvention::TwoFormula,
    )
    .unwrap();
    let after = before.with_arm2(ArmConfig::dielectric(1.0, m).unwrap()).unwrap();
    let ws = OracleWorkspace::new(SourceSpec::natural_preset(), QuadratureGrids::default()).unwrap();
    let rate = |cfg| ws.evaluate(cfg).map(|v| v.pair_rate).map_err(|e| e.to_string());
    let measured = rate(&after)? / rate(&before)?;
    let predicted = throughput_estimate(&after) / throughput_estimate(&before);
    let rel = (measured / predicted - 1.0).abs();
    verdict(rel <= 0.01, format!("oracle ratio {measured:.6}, predicted {predicted:.6}, rel {rel:.2e}"))
}

fn fitted_sigma_sq(name: &str, engine: Engine) -> std::result::Result<f64, String> {
    let s = setup(name);
    let spec = s.sweep_spec().map_err(|e| e.diagnostic())?;
    let rows = run_sweep(&s.config, &spec, &s.grids);
    fit_fringe_width(&rows, engine).map(|f| f.sigma_sq).map_err(|e| e.diagnostic())
}

fn fringe_width() -> Check {
    let s = setup("quadratic_loss_two.json");
    let formula = effective_variance(&s.config).map_err(|e| e.to_string())?;
    let closed = fitted_sigma_sq("quadratic_loss_two.json", Engine::ClosedForm)?;
    let zero_beta = fitted_sigma_sq("single_dielectric.json", Engine::Oracle)?;
    let oracle = fitted_sigma_sq("quadratic_loss_two.json", Engine::Oracle)?;
    let a = (closed - formula).abs() <= 1e-6 * formula;
    let b = (zero_beta - 1.0).abs() <= 0.01;
    let c = (oracle - 1.5).abs() <= 0.01 * 1.5;
    let mark = |ok| if ok { "ok" } else { "miss" };
    verdict(
        a && b && c,
        format!(
            "closed fit {closed:.6} vs formula {formula:.6} [{}]; oracle beta=0 {zero_beta:.6} vs 1 [{}]; \
             oracle {oracle:.6} vs 1.5 [{}]",
            mark(a),
            mark(b),
            mark(c)
        ),
    )
}

fn adjudication_stable() -> Check {
    let s = setup("adjudicate.json");
    let report = commands::adjudicate(&s).map_err(|e| e.diagnostic())?;
    let decided = matches!(report.report.winner, ConventionWinner::Single | ConventionWinner::Two);
    let mut fresh = serde_json::to_string_pretty(&report).unwrap();
    fresh.push('\n');
    let artifact = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../reports/convention_adjudication.json");
    let shipped = std::fs::read_to_string(&artifact).map_err(|e| format!("{}: {e}", artifact.display()))?;
    let winners: Vec<String> =
        report.stability.iter().map(|e| format!("{}:{:?}", e.freq_points, e.winner)).collect();
    verdict(
        report.stable && decided && fresh == shipped,
        format!(
            "winner {:?} at {}; shipped report {}",
            report.report.winner,
            winners.join(" "),
            if fresh == shipped { "matches" } else { "differs" }
        ),
    )
}

fn beta_free_agreement() -> Check {
    let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
    let delays = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let bandwidths = [0.5, 0.75, 1.0, 1.5, 2.0];
    let mut worst = (0.0f64, 0.0, 0.0, 0.0);
    for &b in &bandwidths {
        let source = SourceSpec::new(40.0, b, Units::Natural).map_err(|e| e.to_string())?;
        let ws = OracleWorkspace::new(source, QuadratureGrids::default()).map_err(|e| e.to_string())?;
        for &loss in &levels {
            let m = ComplexDispersion::new(c(20.0, 12.0 * loss + 1.0), c(2.0, loss), c(0.0, 0.0));
            for &tau in &delays {
                let cfg = InterferometerConfig::new(
                    source,
                    ArmConfig::dielectric(1.0, m).unwrap(),
                    ArmConfig::vacuum(2.0 + tau).unwrap(),
                    BetaConvention::TwoFormula,
                )
                .map_err(|e| e.to_string())?;
                let closed = coincidence_closed_form(&cfg).map_err(|e| e.to_string())?.p_normalized;
                let oracle = ws.ratio_checked(&cfg).map_err(|e| e.to_string())?;
                let dev = (oracle - closed).abs();
                if dev > worst.0 {
                    worst = (dev, loss, tau, b);
                }
            }
        }
    }
    verdict(
        worst.0 <= 1e-3,
        format!("125 points, max |oracle - closed| {:.2e} (x1 Im a1 {}, tau_r {}, B {})", worst.0, worst.1, worst.2, worst.3),
    )
}

fn draw_request(runner: &mut TestRunner, kind: usize) -> TuneRequest {
    let draw = (0.5..3.0f64, 0.05..1.0f64, 0.5..2.0f64, 0.0..0.2f64, 0.5..3.0f64, 0.05..1.0f64, 0.5..2.0f64);
    let (ra1, ia1, x1, ib, ra2, ia2, s) = draw.new_tree(runner).unwrap().current();
    let m1 = ComplexDispersion::new(c(10.0, 6.0 * ia1 + 1.0), c(ra1, ia1), c(0.0, ib));
    let x2_bound = |hi| ParamBound { param: FreeParam::ArmLength2, lower: 0.0, upper: hi };
    let scale_bound = ParamBound { param: FreeParam::ImAlphaScale2, lower: 0.0, upper: 4.0 };
    let (material2, x2, free) = match kind {
        // proportional material, length free
        0 => (ComplexDispersion::new(c(10.0, 6.0 * s * ia1 + 1.0), c(s * ra1, s * ia1), c(0.0, ib)), 1.0, vec![x2_bound(5.0)]),
        // arbitrary material, length and loss scale free
        1 => (ComplexDispersion::new(c(10.0, 30.0), c(ra2, ia2), c(0.0, ib)), 1.0, vec![x2_bound(8.0), scale_bound]),
        // loss scale free at a length that already matches the delay
        _ => (ComplexDispersion::new(c(10.0, 30.0), c(ra2, ia2), c(0.0, ib)), x1 * ra1 / ra2, vec![scale_bound]),
    };
    TuneRequest {
        source: SourceSpec::natural_preset(),
        fixed_arm1: ArmConfig::dielectric(x1, m1).unwrap(),
        material2,
        x2,
        scale_im_alpha2: 1.0,
        free,
        objective: Objective::ClosedForm,
        beta_convention: BetaConvention::TwoFormula,
    }
}

fn tuner_matches_analytic() -> Check {
    let mut runner = TestRunner::deterministic();
    let (mut feasible, mut failures, mut worst) = (0, Vec::new(), 0.0f64);
    for i in 0..100 {
        let req = draw_request(&mut runner, i % 3);
        let r = match analytic_restore(&req) {
            Ok(r) if r.feasible && r.in_bounds => r,
            _ => continue,
        };
        feasible += 1;
        let out = minimize_coincidence(&req).map_err(|e| format!("draw {i}: {e}"))?;
        let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        let dev = req
            .free
            .iter()
            .map(|b| match b.param {
                FreeParam::ArmLength2 => rel(out.x2, r.x2),
                FreeParam::ImAlphaScale2 => rel(out.scale_im_alpha2, r.scale_im_alpha2),
            })
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev > 1e-6 {
            failures.push(i);
        }
    }
    verdict(
        failures.is_empty() && feasible >= 50,
        format!("{feasible}/100 feasible draws, max rel dev {worst:.2e}, failing draws {failures:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("vacuum dark fringe", vacuum_dark_fringe),
        ("single-dielectric reference", single_dielectric_reference),
        ("matched dielectric pair", matched_pair_restores_fringe),
        ("throughput cost of matching", throughput_cost),
        ("fringe width", fringe_width),
        ("convention adjudication", adjudication_stable),
        ("oracle vs closed form, beta = 0", beta_free_agreement),
        ("tuner vs analytic restoration", tuner_matches_analytic),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", n + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail}", n + 1);
                failed.push(n + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
