use std::process::{Command, Output};

use mutsel::analytics::g_at_equilibrium;
use mutsel::harness::CSV_HEADER;
use mutsel::ModelParams;
use mutsel_cli::{fig2_rows, svg, FigureArgs, Format};

fn mutsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mutsel")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV rows after the header into numeric columns.
fn numeric_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn row_at(rows: &[Vec<f64>], x: f64) -> &[f64] {
    rows.iter().find(|r| (r[0] - x).abs() < 1e-9).unwrap_or_else(|| panic!("no row at {x}"))
}

#[test]
fn equilibria_below_threshold() {
    let out = mutsel(&["equilibria", "--s", "1", "--u", "0.5", "--nu0", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("y_bar=0.5\n"));
    assert!(text.contains("y_star=1\n"));
    assert!(text.contains("L=Transient\n"));
}

#[test]
fn equilibria_neutral() {
    let text = stdout(&mutsel(&["equilibria", "--s", "0", "--u", "1", "--nu0", "0.3"]));
    assert!(text.contains("y_bar=0.7\n"), "{text}");
}

#[test]
fn equilibria_rejects_zero_mutation() {
    let out = mutsel(&["equilibria", "--s", "1", "--u", "0", "--nu0", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("u must be positive"));
}

#[test]
fn fig2_error_threshold_kink() {
    let out = mutsel(&["fig2", "--s", "1", "--nu0", "0", "--umin", "0", "--umax", "1.4", "--steps", "70"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("u_over_s,y_bar,y_star\n"));
    let rows = numeric_rows(&text);
    assert_eq!(row_at(&rows, 0.4)[1], 0.4);
    assert_eq!(row_at(&rows, 1.2)[1], 1.0);
    assert!(rows.iter().all(|r| r[1] <= r[2]));
}

#[test]
fn fig2_smooth_with_beneficial_mutation() {
    let text = stdout(&mutsel(&["fig2", "--s", "1", "--nu0", "0.01", "--steps", "70"]));
    let rows = numeric_rows(&text);
    assert!((row_at(&rows, 1.0)[1] - 0.9).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[1] < 1.0 && r[2] > 1.0 && r[1] <= r[2]));
}

#[test]
fn fig2_rejects_neutral() {
    assert!(!mutsel(&["fig2", "--s", "0", "--nu0", "0"]).status.success());
}

#[test]
fn fig5_jump_at_threshold() {
    let text = stdout(&mutsel(&["fig5", "--s", "1", "--nu0", "0", "--umin", "0.99", "--umax", "1.0", "--steps", "1"]));
    assert!(text.starts_with("u_over_s,g_eq\n"));
    let rows = numeric_rows(&text);
    assert_eq!(row_at(&rows, 0.99)[1], 0.0);
    assert_eq!(row_at(&rows, 1.0)[1], 1.0);
}

#[test]
fn fig5_interior_with_beneficial_mutation() {
    let rows = numeric_rows(&stdout(&mutsel(&["fig5", "--s", "1", "--nu0", "0.01", "--steps", "70"])));
    let g = row_at(&rows, 1.0)[1];
    assert!(g > 0.0 && g < 1.0);
    let rows = numeric_rows(&stdout(&mutsel(&[
        "fig5", "--s", "1", "--nu0", "0.2", "--umin", "0.3", "--umax", "0.3", "--steps", "1",
    ])));
    let expected = g_at_equilibrium(&ModelParams::new(1.0, 0.3, 0.2).unwrap());
    assert!((row_at(&rows, 0.3)[1] - expected).abs() < 1e-11);
}

#[test]
fn figure_output_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = mutsel(&["fig2", "--s", "1", "--nu0", "0.01", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let again = stdout(&mutsel(&["fig2", "--s", "1", "--nu0", "0.01"]));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), again);
}

#[test]
fn svg_plots_the_csv_points() {
    let args = FigureArgs { s: 1.0, nu0: 0.0, umin: 0.0, umax: 1.4, steps: 14, format: Format::Svg };
    let rows = fig2_rows(&args).unwrap();
    let text = svg::fig2_svg(&rows, 0.0);
    assert!(text.starts_with("<svg"));
    let polylines: Vec<&str> = text.lines().filter(|l| l.starts_with("<polyline")).collect();
    assert_eq!(polylines.len(), 2);
    for line in polylines {
        let points = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(points.split(' ').count(), rows.len());
    }
    let cli = stdout(&mutsel(&["fig2", "--s", "1", "--nu0", "0", "--steps", "14", "--format", "svg"]));
    assert_eq!(cli, text);
}

#[test]
fn simulate_r_from_zero() {
    let text = stdout(&mutsel(&["simulate", "r", "--s", "1", "--u", "0.3", "--nu0", "0.2", "--n0", "0"]));
    assert_eq!(text, "replicate,terminal,time,final_state\n0,AbsorbedZero,0,0\n");
}

#[test]
fn simulate_pdmp_from_one() {
    let text = stdout(&mutsel(&["simulate", "pdmp", "--s", "1", "--u", "0.3", "--nu0", "0.2", "--y0", "1"]));
    assert_eq!(text, "replicate,terminal,time,final_state\n0,AbsorbedOne,0,1\n");
}

#[test]
fn simulate_l_matches_geometric_parameter() {
    let reps = 20_000;
    let args = format!("simulate l --n0 1 --t 60 --reps {reps} --s 1 --u 0.3 --nu0 0.2");
    let out = mutsel(&args.split_whitespace().collect::<Vec<_>>());
    assert!(out.status.success());
    let text = stdout(&out);
    let above = text.lines().skip(1).filter(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap() > 1).count();
    let frac = above as f64 / reps as f64;
    let p = 0.928_332_553_058_847_7;
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    assert!((frac - p).abs() < 4.0 * se, "{frac}");
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "d", "--s", "1", "--u", "0.3", "--nu0", "0.2", "--n0", "3", "--reps", "50", "--t", "2"];
    assert_eq!(stdout(&mutsel(&args)), stdout(&mutsel(&args)));
    let other = stdout(&mutsel(&[&args[..], &["--seed", "7"]].concat()));
    assert_ne!(stdout(&mutsel(&args)), other);
}

#[test]
fn simulate_events_end_in_reported_state() {
    let base = ["simulate", "r", "--s", "1", "--u", "0.3", "--nu0", "0.2", "--n0", "2", "--reps", "20", "--t", "3"];
    let outcomes = stdout(&mutsel(&base));
    let events = stdout(&mutsel(&[&base[..], &["--events"]].concat()));
    assert!(events.starts_with("replicate,time,state,kind\n"));
    for row in outcomes.lines().skip(1) {
        let fields: Vec<&str> = row.split(',').collect();
        let last = events.lines().skip(1).filter(|l| l.starts_with(&format!("{},", fields[0]))).last();
        let state = last.map_or("2", |l| l.split(',').nth(2).unwrap());
        assert_eq!(state, fields[3], "replicate {}", fields[0]);
    }
}

#[test]
fn verify_empty_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    std::fs::write(&path, "").unwrap();
    let out = mutsel(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), format!("{CSV_HEADER}\n"));
}

#[test]
fn verify_skips_neutral_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neutral.toml");
    let config = "[reps]\nmoment = 5000\nmartingale = 5000\nsiegmund = 5000\ntail = 5000\nstationary = 5000\n\
                  pdmp = 5000\nabsorption = 5000\nswap = 50000\ncoupling = 100\ntrend = 100\n\
                  [[grid]]\ns = 0\nu = 1\nnu0 = 0.3\n";
    std::fs::write(&path, config).unwrap();
    let out = mutsel(&["verify", "--config", path.to_str().unwrap()]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().any(|l| l.ends_with(",skipped")));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true") || l.ends_with(",skipped")));
}

#[test]
fn verify_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[[grid]]\ns = 1\n").unwrap();
    assert_eq!(mutsel(&["verify", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(mutsel(&["verify", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}
