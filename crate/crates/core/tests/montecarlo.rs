use std::f64::consts::PI;

use sirtail_core::asymptotics::{ginibre_tail_constant, ConstantProcess, GinibreOptions};
use sirtail_core::error::Error;
use sirtail_core::fading::FadingModel;
use sirtail_core::montecarlo::*;
use sirtail_core::pathloss::PathLossModel;
use sirtail_core::pointproc::ProcessModel;

const EXP1: FadingModel = FadingModel::Exponential { mean: 1.0 };
const PL: PathLossModel = PathLossModel::PowerLaw { d: 2, beta: 2.0 };

fn cfg(process: ProcessModel, fading: FadingModel, pathloss: PathLossModel, n: u64) -> TailConfig {
    TailConfig { process, fading, pathloss, window: WindowPolicy::default(), n, seed: 42 }
}

fn poisson() -> ProcessModel {
    ProcessModel::Poisson { intensity: 1.0 / PI }
}

/// Coverage of the nearest Poisson base station under Rayleigh fading and
/// `r^{-4}` path loss: `1 / (1 + √θ (π/2 - arctan(1/√θ)))`.
fn rayleigh_coverage(theta: f64) -> f64 {
    let s = theta.sqrt();
    1.0 / (1.0 + s * (PI / 2.0 - (1.0 / s).atan()))
}

#[test]
fn matches_rayleigh_closed_form() {
    let thetas = [0.5, 1.0, 10.0, 100.0];
    let c = scaled_tail_curve(&cfg(poisson(), EXP1, PL, 200_000), &thetas).unwrap();
    for e in &c.estimates {
        let p = rayleigh_coverage(e.theta);
        assert!((e.p_hat - p).abs() <= 3.5 * e.stderr, "theta={} {} vs {p}", e.theta, e.p_hat);
    }
}

#[test]
fn same_result_on_any_thread_count() {
    let c = cfg(ProcessModel::Ginibre { alpha: 0.5 }, EXP1, PL, 5_000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| scaled_tail_curve(&c, &[1.0, 10.0, 100.0]).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    let efir = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            estimate_efir(ConstantProcess::Ginibre { alpha: 1.0 }, 2.0, &EXP1, 3_000, 200, 9).unwrap()
        })
    };
    assert_eq!(efir(1), efir(4));
}

#[test]
fn tails_are_nested_and_consistent() {
    let c = scaled_tail_curve(&cfg(poisson(), FadingModel::Nakagami { m: 2.0 }, PL, 20_000), &[0.1, 1.0, 1.0, 5.0, 50.0])
        .unwrap();
    for w in c.estimates.windows(2) {
        assert!(w[1].p_hat <= w[0].p_hat);
    }
    for e in &c.estimates {
        assert!((e.stderr - (e.p_hat * (1.0 - e.p_hat) / e.n as f64).sqrt()).abs() < 1e-15);
        assert!((e.scaled_unbounded - e.theta.sqrt() * e.p_hat).abs() < 1e-15);
        assert_eq!(e.scaled_bounded, None);
    }
    for (raw, pess) in c.estimates.iter().zip(&c.pessimistic) {
        assert!(pess.p_hat <= raw.p_hat);
    }
}

#[test]
fn doubling_the_window_changes_little() {
    for (process, pathloss, theta) in [
        (poisson(), PL, 100.0),
        (ProcessModel::Ginibre { alpha: 1.0 }, PL, 100.0),
        (poisson(), PathLossModel::BoundedPower { d: 2, beta: 2.0 }, 10.0),
    ] {
        let base = cfg(process, EXP1, pathloss, 40_000);
        let r = base.window.resolve(&process, &EXP1, &pathloss).unwrap();
        let a = estimate_tail(&TailConfig { window: WindowPolicy::Fixed { radius: r }, ..base }, theta).unwrap();
        let b = estimate_tail(&TailConfig { window: WindowPolicy::Fixed { radius: 2.0 * r }, ..base }, theta).unwrap();
        let tol = 3.0 * a.stderr.hypot(b.stderr);
        assert!((a.p_hat - b.p_hat).abs() <= tol, "{process} {pathloss}: {} vs {}", a.p_hat, b.p_hat);
    }
}

#[test]
fn poisson_scaled_tail_flattens() {
    let c = scaled_tail_curve(&cfg(poisson(), EXP1, PL, 1_000_000), &[1e2, 1e3, 1e4]).unwrap();
    let (a, b) = (c.estimates[1].scaled_unbounded, c.estimates[2].scaled_unbounded);
    assert!((a - b).abs() / a < 0.1, "{a} vs {b}");
}

#[test]
fn ginibre_scaled_tail_near_constant() {
    let theta = 1e3;
    let c = estimate_tail(&cfg(ProcessModel::Ginibre { alpha: 1.0 }, EXP1, PL, 200_000), theta).unwrap();
    let k = ginibre_tail_constant(1.0, 2.0, &EXP1, GinibreOptions::default().scaled(100.0)).unwrap().value;
    let se = theta.sqrt() * c.stderr;
    assert!((c.scaled_unbounded - k).abs() <= 3.0 * se, "{} vs {k} (se {se})", c.scaled_unbounded);
}

#[test]
fn bounded_path_loss_reports_log_scaling() {
    let pl = PathLossModel::BoundedPower { d: 2, beta: 2.0 };
    let e = estimate_tail(&cfg(poisson(), EXP1, pl, 20_000), 4.0).unwrap();
    assert_eq!(e.h_used, "z^(1/beta)");
    assert!((e.scaled_bounded.unwrap() - e.p_hat.ln() / 2.0).abs() < 1e-15);
}

#[test]
fn palm_constant_for_poisson() {
    let exp = estimate_efir(ConstantProcess::Poisson, 2.0, &EXP1, 100_000, 500, 1).unwrap();
    assert!((exp.value - 2.0 / PI).abs() / (2.0 / PI) < 0.02, "{}", exp.value);
    let dirac = estimate_efir(ConstantProcess::Poisson, 2.0, &FadingModel::Dirac1, 100_000, 500, 2).unwrap();
    let tol = 3.0 * exp.abs_error_estimate.hypot(dirac.abs_error_estimate);
    assert!((exp.value - dirac.value).abs() <= tol, "{} vs {}", exp.value, dirac.value);
    assert!(matches!(
        estimate_efir(ConstantProcess::Poisson, 2.0, &EXP1, 100, 2, 1),
        Err(Error::Divergent(_))
    ));
}

#[test]
fn lattice_tail_slope() {
    let r = lattice_counterexample(1.5, 50_000, 1_000, 3).unwrap();
    assert!((r.slope + 0.75).abs() < 0.1, "{}", r.slope);
    assert!(r.x_grid.first() == Some(&10.0) && (r.x_grid[8] - 1e3).abs() < 1e-9);
}

#[test]
fn lattice_sir_estimates_run() {
    let e = estimate_tail(&cfg(ProcessModel::Lattice { a: 1.5 }, EXP1, PL, 2_000), 1.0).unwrap();
    assert!(e.p_hat > 0.0 && e.p_hat < 1.0);
}

#[test]
fn palm_moment_of_nearest_point() {
    // |X_1|² ~ Exp(1) under Poisson Palm with λπ = 1
    let (m, se) = palm_point_moment(&poisson(), 1, 20_000, 8).unwrap();
    assert!((m - 1.0).abs() < 3.0 * se, "{m} ± {se}");
    let (m, se) = palm_point_moment(&poisson(), 3, 20_000, 8).unwrap();
    assert!((m - 3.0).abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn rare_events_get_exact_intervals() {
    let e = estimate_tail(&cfg(poisson(), EXP1, PL, 1_000), 1e6).unwrap();
    let ci = e.clopper_pearson.expect("p_hat below 10/n");
    assert!(ci[0] <= e.p_hat && e.p_hat <= ci[1]);
}
