//! Acceptance criteria. Prints one PASS/FAIL line per criterion to stderr:
//! `cargo test -p mutsel-cli --test acceptance`.

use std::io::Write;
use std::time::{Duration, Instant};

use mutsel::analytics::{g_at_equilibrium, g_infinity};
use mutsel::flow::drift;
use mutsel::harness::{
    check_martingale, check_moment_duality_r, check_monotone_coupling, check_pdmp_duality, check_r_absorption,
    check_rate_swap, check_siegmund, check_stationary_geometric, CheckReport,
};
use mutsel::montecarlo::derive_seed;
use mutsel::pdmp::{estimate_pdmp_absorb_one, jump_rates};
use mutsel::{equilibria, ModelParams};
use mutsel_cli::{fig2_rows, fig5_rows, FigureArgs, Format};

const SEED: u64 = 0xACCE_97A1_0000_2019;

fn params(s: f64, u: f64, nu0: f64) -> ModelParams {
    ModelParams::new(s, u, nu0).unwrap()
}

fn seed(criterion: u64, index: u64) -> u64 {
    derive_seed(derive_seed(SEED, criterion), index)
}

fn figure_args(nu0: f64) -> FigureArgs {
    FigureArgs { s: 1.0, nu0, umin: 0.0, umax: 1.4, steps: 140, format: Format::Csv }
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn count_passed(reports: &[CheckReport]) -> usize {
    reports.iter().filter(|r| r.passed()).count()
}

fn worst_z(reports: &[CheckReport]) -> f64 {
    reports.iter().filter_map(|r| r.z).map(f64::abs).fold(0.0, f64::max)
}

/// Residual of the equilibrium equation at `y`.
fn equilibrium_residual(p: &ModelParams, y: f64) -> f64 {
    -p.s() * y * (1.0 - y) - p.beneficial_rate() * y + p.deleterious_rate() * (1.0 - y)
}

fn equilibria_exactness() -> Verdict {
    let mut worst = 0.0f64;
    let mut exact = true;
    let mut points = 0;
    for s in [0.1, 0.5, 1.0, 2.0, 10.0] {
        for u in [0.05, 0.5, 1.0, 3.0, 20.0] {
            for nu0 in [0.0, 0.3] {
                let p = params(s, u, nu0);
                let eq = equilibria(&p);
                let y_star = eq.y_star.unwrap();
                worst = worst.max(equilibrium_residual(&p, eq.y_bar).abs());
                worst = worst.max(equilibrium_residual(&p, y_star).abs());
                if nu0 == 0.0 {
                    exact &= eq.y_bar == (u / s).min(1.0) && y_star == (u / s).max(1.0);
                }
                points += 1;
            }
        }
    }
    verdict(
        worst < 1e-12 && exact && points == 50,
        format!("{points} points, max residual {worst:.2e}, nu0=0 exact: {exact}"),
    )
}

/// Lower and upper roots of `s y^2 - (s + u) y + u nu1` by the textbook formula.
fn textbook_roots(s: f64, u: f64, nu0: f64) -> (f64, f64) {
    let b = s + u;
    let disc = (b * b - 4.0 * s * u * (1.0 - nu0)).sqrt();
    ((b - disc) / (2.0 * s), (b + disc) / (2.0 * s))
}

fn second_differences(values: &[f64]) -> Vec<f64> {
    values.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect()
}

fn fig2_reproduction() -> Verdict {
    let step = 1.4 / 140.0;
    let kinked = fig2_rows(&figure_args(0.0)).unwrap();
    let kink_ok = kinked.iter().all(|r| if r.u_over_s < 1.0 { r.y_bar == r.u_over_s } else { r.y_bar == 1.0 });
    let kink_size = second_differences(&kinked.iter().map(|r| r.y_bar).collect::<Vec<_>>())
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);

    let smooth = fig2_rows(&figure_args(0.01)).unwrap();
    let bounds_ok = smooth.iter().all(|r| r.y_bar < 1.0 && r.y_star > 1.0);
    let bend = second_differences(&smooth.iter().map(|r| r.y_bar).collect::<Vec<_>>())
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);

    let mut worst = 0.0f64;
    for (rows, nu0) in [(&kinked, 0.0), (&smooth, 0.01)] {
        for x in [0.4, 1.0, 1.2] {
            let r = rows.iter().find(|r| (r.u_over_s - x).abs() < 1e-9).expect("grid contains the point");
            let (lo, hi) = textbook_roots(1.0, r.u_over_s, nu0);
            worst = worst.max((r.y_bar - lo.min(1.0)).abs()).max((r.y_star - hi.max(1.0)).abs());
        }
    }
    let passed = kink_ok && kink_size > 0.5 * step && bounds_ok && bend < 0.1 * step && worst < 1e-12;
    verdict(
        passed,
        format!(
            "kink {kink_ok} (jump in slope {:.3}), smooth bounds {bounds_ok} (max bend {:.2e}), closed-form error {worst:.1e}",
            kink_size / step,
            bend / step
        ),
    )
}

fn moment_duality() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let mut reports = Vec::new();
    for n in 1..=3 {
        for t in [0.5, 1.0, 2.0] {
            for y0 in [0.3, 0.6, 0.9] {
                let idx = reports.len() as u64;
                reports.push(check_moment_duality_r(&p, y0, n, t, 100_000, seed(3, idx)).unwrap());
            }
        }
    }
    let ok = count_passed(&reports);
    verdict(ok >= 26, format!("{ok}/27 within 3 SE, max |z| {:.2}", worst_z(&reports)))
}

fn absorption_equals_equilibrium() -> Verdict {
    let sets = [params(1.0, 0.3, 0.2), params(1.0, 0.5, 0.0), params(2.0, 1.0, 0.5)];
    let reports: Vec<CheckReport> =
        sets.iter().enumerate().map(|(i, p)| check_r_absorption(p, 100_000, seed(4, i as u64)).unwrap()).collect();
    let detail: Vec<String> =
        reports.iter().map(|r| format!("{:.4} vs {:.4}", r.estimate.as_ref().unwrap().mean(), r.target)).collect();
    verdict(count_passed(&reports) == 3, format!("{}, max |z| {:.2}", detail.join("; "), worst_z(&reports)))
}

fn martingale() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let mut reports = Vec::new();
    for n in [1, 2] {
        reports.extend(check_martingale(&p, n, &[0.5, 1.0, 2.0, 5.0], 100_000, seed(5, n)).unwrap());
    }
    let ok = count_passed(&reports);
    verdict(ok == reports.len(), format!("{ok}/{} within 3 SE, max |z| {:.2}", reports.len(), worst_z(&reports)))
}

fn geometric_stationarity() -> Verdict {
    let reports: Vec<CheckReport> = [params(1.0, 3.0, 0.0), params(1.0, 0.3, 0.2)]
        .iter()
        .enumerate()
        .map(|(i, p)| check_stationary_geometric(p, 400_000, seed(6, i as u64)).unwrap())
        .collect();
    let tvs: Vec<String> = reports.iter().map(|r| format!("{:.4}", r.estimate.as_ref().unwrap().mean())).collect();
    verdict(count_passed(&reports) == 2, format!("TV {} (limit 0.01)", tvs.join(", ")))
}

fn siegmund_duality() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let mut reports = Vec::new();
    for n in 1..=3 {
        for m in 1..=3 {
            for t in [0.5, 1.0] {
                let idx = reports.len() as u64;
                reports.push(check_siegmund(&p, n, m, t, 100_000, seed(7, idx)).unwrap());
            }
        }
    }
    let ok = count_passed(&reports);
    verdict(ok == 18, format!("{ok}/18 within 3 combined SE, max |z| {:.2}", worst_z(&reports)))
}

fn rate_swap() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let reports: Vec<CheckReport> = [0.5, 1.0, 2.0]
        .iter()
        .enumerate()
        .map(|(i, &t)| check_rate_swap(&p, t, 100_000, seed(8, i as u64)).unwrap())
        .collect();
    let tvs: Vec<String> = reports.iter().map(|r| format!("{:.4}", r.estimate.as_ref().unwrap().mean())).collect();
    verdict(count_passed(&reports) == 3, format!("TV {} (limit 0.02)", tvs.join(", ")))
}

fn pdmp_duality_and_absorption() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let mut reports = Vec::new();
    for n in 1..=3 {
        for t in [0.5, 1.0, 2.0] {
            let idx = reports.len() as u64;
            reports.push(check_pdmp_duality(&p, 0.6, n, t, 100_000, seed(9, idx)).unwrap());
        }
    }
    let duality_ok = count_passed(&reports);
    let y_bar = equilibria(&p).y_bar;
    let mut absorb_ok = 0;
    let mut worst = 0.0f64;
    for (i, y0) in [0.25, y_bar, 0.75].into_iter().enumerate() {
        let est = estimate_pdmp_absorb_one(&p, y0, 100_000, None, seed(9, 100 + i as u64)).unwrap().estimate;
        let z = (est.mean - g_infinity(&p, y0)) / est.std_error;
        worst = worst.max(z.abs());
        if z.abs() <= 3.0 {
            absorb_ok += 1;
        }
    }
    verdict(
        duality_ok >= 8 && absorb_ok == 3,
        format!(
            "duality {duality_ok}/9 (max |z| {:.2}), absorption {absorb_ok}/3 (max |z| {worst:.2})",
            worst_z(&reports)
        ),
    )
}

fn error_threshold_jump() -> Verdict {
    let jump = fig5_rows(&figure_args(0.0)).unwrap();
    let jump_ok = jump.iter().all(|r| if r.u_over_s < 1.0 { r.g_eq == 0.0 } else { r.g_eq == 1.0 });
    let smooth = fig5_rows(&figure_args(0.01)).unwrap();
    let interior = smooth.iter().all(|r| r.g_eq > 0.0 && r.g_eq < 1.0);
    let increasing = smooth.windows(2).all(|w| w[1].g_eq > w[0].g_eq);
    verdict(
        jump_ok && interior && increasing,
        format!("nu0=0 step {jump_ok}, nu0=0.01 interior {interior}, increasing {increasing}"),
    )
}

fn coupling_monotonicity() -> Verdict {
    let report =
        check_monotone_coupling(&params(1.0, 0.3, 0.1), &params(1.0, 0.3, 0.3), 50.0, 10_000, seed(11, 0)).unwrap();
    let violations = report.estimate.as_ref().unwrap().mean();
    let g: Vec<f64> = (1..=19).map(|k| g_infinity(&params(1.0, 0.3, 0.05 * k as f64), 0.5)).collect();
    let increasing = g.windows(2).all(|w| w[1] > w[0]);
    verdict(
        report.passed() && increasing,
        format!("{violations} violations in 10^4 coupled paths, g_infinity increasing in nu0: {increasing}"),
    )
}

fn bvp_residual() -> Verdict {
    let p = params(1.0, 0.3, 0.2);
    let g = |y: f64| g_infinity(&p, y);
    let h = 1e-6;
    let worst = (1..=9)
        .map(|k| {
            let y = 0.1 * k as f64;
            let slope = (g(y + h) - g(y - h)) / (2.0 * h);
            let (to_zero, to_one) = jump_rates(&p, y);
            (drift(&p, y) * slope + to_one * (1.0 - g(y)) - to_zero * g(y)).abs()
        })
        .fold(0.0, f64::max);
    verdict(worst < 1e-5, format!("max |generator applied to g| {worst:.2e}"))
}

/// Number, name, time budget in seconds and check.
type Criterion = (u32, &'static str, u64, fn() -> Verdict);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        (1, "equilibria exactness", 1, equilibria_exactness),
        (2, "equilibrium curves", 1, fig2_reproduction),
        (3, "moment duality", 120, moment_duality),
        (4, "absorption equals equilibrium", 60, absorption_equals_equilibrium),
        (5, "martingale", 60, martingale),
        (6, "geometric stationarity", 120, geometric_stationarity),
        (7, "Siegmund duality", 120, siegmund_duality),
        (8, "rate swap", 60, rate_swap),
        (9, "PDMP duality and absorption", 120, pdmp_duality_and_absorption),
        (10, "error-threshold jump", 1, error_threshold_jump),
        (11, "coupling monotonicity", 60, coupling_monotonicity),
        (12, "boundary-value residual", 1, bvp_residual),
    ];
    let mut failures = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let passed = v.passed && in_time;
        let _ = writeln!(
            std::io::stderr().lock(),
            "criterion {id:>2} {name}: {} ({}; {:.2}s of {limit}s)",
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64()
        );
        if !passed {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

#[test]
fn equilibrium_ancestral_probability_reference() {
    let g = g_at_equilibrium(&params(1.0, 0.3, 0.2));
    assert!((g - 0.020_131_296_495_864_69).abs() < 1e-12);
}
