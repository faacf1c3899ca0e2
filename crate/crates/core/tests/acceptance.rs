//! Acceptance criteria. Each test prints one PASS/FAIL line and then
//! asserts. Tolerances are fixed here.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use nodal_lab::arith;
use nodal_lab::cli::{self, ExperimentConfig};
use nodal_lab::coeffs::{rng_for, sample_matrix, CoeffLaw};
use nodal_lab::experiment::replicate;
use nodal_lab::geometry::{self, Polyline};
use nodal_lab::kacrice;
use nodal_lab::limitfield::{local_length_distribution, LocalSource};
use nodal_lab::nodal::{nodal_length, GridSpec, Rect};
use nodal_lab::stats::{ks_two_sample, mean, std_error};
use nodal_lab::TrigPoly;
use rand::Rng;

/// Writes to the stdout handle directly so the line survives output capture.
fn report(id: u32, ok: bool, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stdout().lock(),
        "{status} criterion {id}: {detail}"
    );
    assert!(ok, "criterion {id}: {detail}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nodal-lab"))
}

fn simulate_lengths(law: CoeffLaw, n: usize, reps: usize, seed: u64) -> Vec<f64> {
    let cfg = ExperimentConfig {
        law: Some(law),
        n: Some(n),
        reps: Some(reps),
        seed: Some(seed),
        ..Default::default()
    };
    let (records, _) = cli::simulate(&cfg).unwrap();
    records.iter().map(|r| r.total_length).collect()
}

#[test]
fn criterion_01_exact_cross() {
    const TOL_KR: f64 = 1e-6;
    const TOL_MC: f64 = 1e-3;
    const MAX_SECS: f64 = 1.0;

    let t = Instant::now();
    let out = bin()
        .args(["kacrice", "--n", "1", "--tol", "1e-6"])
        .output()
        .unwrap();
    let kr_secs = t.elapsed().as_secs_f64();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = json["value"].as_f64().unwrap();

    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let out = bin()
        .args([
            "simulate", "--law", "gaussian", "--n", "1", "--reps", "50", "--seed", "1",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    let sim_secs = t.elapsed().as_secs_f64();
    assert!(out.status.success());
    let mut rd = csv::Reader::from_path(dir.path().join("simulate.csv")).unwrap();
    let col = rd
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "total_length")
        .unwrap();
    let lengths: Vec<f64> = rd
        .records()
        .map(|r| r.unwrap()[col].parse().unwrap())
        .collect();
    let worst = lengths
        .iter()
        .map(|v| (v - 2.0 * PI).abs())
        .fold(0.0, f64::max);

    let ok = (value - 2.0 * PI).abs() <= TOL_KR
        && lengths.len() == 50
        && worst <= TOL_MC
        && kr_secs < MAX_SECS
        && sim_secs < MAX_SECS;
    report(
        1,
        ok,
        format!(
            "kacrice {value:.9} ({kr_secs:.3} s), simulate worst |l - 2pi| = {worst:.2e} over {} reps ({sim_secs:.3} s)",
            lengths.len()
        ),
    );
}

#[test]
fn criterion_02_kacrice_vs_monte_carlo() {
    const N: usize = 20;
    const REPS: usize = 2000;
    const SE_MULT: f64 = 3.0;
    const ASYMPTOTIC_REL: f64 = 0.05;
    // Reference value quoted to two decimals.
    const QUOTED: f64 = 58.41;

    let e = kacrice::expected_length(N, &Rect::square(0.0, PI).unwrap(), 1e-8)
        .unwrap()
        .value;
    let xs = simulate_lengths(CoeffLaw::Gaussian, N, REPS, 2024);
    let (m, se) = (mean(&xs), std_error(&xs));
    let asym = kacrice::asymptotic_expected_length(N);
    let ok = (m - e).abs() <= SE_MULT * se
        && (e / asym - 1.0).abs() <= ASYMPTOTIC_REL
        && (asym - QUOTED).abs() <= 0.005;
    report(
        2,
        ok,
        format!(
            "MC mean {m:.4} +- {se:.4}, Kac-Rice {e:.4} ({:.2} SE), asymptotic {asym:.4} ({:+.2}%)",
            (m - e) / se,
            100.0 * (e / asym - 1.0)
        ),
    );
}

#[test]
fn criterion_03_global_universality() {
    const N: usize = 100;
    const REPS: usize = 2000;
    const REL: f64 = 0.02;
    const SE_MULT: f64 = 3.0;
    // Commonly quoted value; the formula gives 2.86335, and both are checked.
    const QUOTED: f64 = 2.8639;

    let configs: Vec<ExperimentConfig> = CoeffLaw::ALL
        .iter()
        .enumerate()
        .map(|(i, &law)| ExperimentConfig {
            law: Some(law),
            n: Some(N),
            reps: Some(REPS),
            seed: Some(300 + i as u64),
            ..Default::default()
        })
        .collect();
    let r = cli::compare_laws(&configs).unwrap();
    let g = &r.laws[0];
    let mut ok = true;
    let mut lines = vec![format!("reference {:.5} (quoted {QUOTED})", r.reference)];
    for s in &r.laws {
        let within_ref =
            (s.mean / r.reference - 1.0).abs() <= REL && (s.mean / QUOTED - 1.0).abs() <= REL;
        let within_g = if s.law == CoeffLaw::Gaussian {
            true
        } else {
            let cse = s.se.hypot(g.se);
            (s.mean - g.mean).abs() <= (REL * g.mean).max(SE_MULT * cse)
        };
        ok &= within_ref && within_g;
        lines.push(format!(
            "{} {:.4} +- {:.4} ({:+.2}% vs reference)",
            s.law,
            s.mean,
            s.se,
            100.0 * s.relative_to_reference
        ));
    }
    report(3, ok, lines.join("; "));
}

#[test]
fn criterion_04_local_universality() {
    const N: usize = 200;
    const REPS: usize = 1000;
    const KS_MAX: f64 = 0.08;

    let w = Rect::square(0.0, PI).unwrap();
    let poly = LocalSource::Polynomial {
        law: CoeffLaw::Rademacher,
        n: N,
    };
    let a = local_length_distribution(poly, &w, REPS, 41).unwrap();
    let b = local_length_distribution(LocalSource::FInfinity { m: 200 }, &w, REPS, 42).unwrap();
    let c = local_length_distribution(LocalSource::FInfinity { m: 400 }, &w, REPS, 43).unwrap();
    let (k200, k400) = (ks_two_sample(&a, &b), ks_two_sample(&a, &c));
    report(
        4,
        k200 <= KS_MAX && k400 <= KS_MAX,
        format!("KS vs F_inf: m = 200 {k200:.4}, m = 400 {k400:.4}"),
    );
}

#[test]
fn criterion_05_translation_stationarity() {
    const N: usize = 200;
    const REPS: usize = 1000;
    const KS_MAX: f64 = 0.08;

    let c = (N / 2) as f64 * PI;
    let w = Rect::new(c, c + PI, c, c + PI).unwrap();
    let poly = LocalSource::Polynomial {
        law: CoeffLaw::Rademacher,
        n: N,
    };
    let a = local_length_distribution(poly, &w, REPS, 51).unwrap();
    let origin = Rect::square(0.0, PI).unwrap();
    let b =
        local_length_distribution(LocalSource::GInfinity { m: 200 }, &origin, REPS, 52).unwrap();
    let ks = ks_two_sample(&a, &b);
    report(
        5,
        ks <= KS_MAX,
        format!(
            "KS central cell vs G_inf = {ks:.4} (means {:.4} / {:.4})",
            mean(&a),
            mean(&b)
        ),
    );
}

#[test]
fn criterion_06_closed_form_sums() {
    const MAX_REL: f64 = 1e-9;
    const POINTS: usize = 1000;

    let mut rng = rng_for(6);
    let mut worst = 0.0f64;
    let t = Instant::now();
    for n in [5, 50, 500, 5000] {
        for _ in 0..POINTS {
            let x = loop {
                let x = rng.random_range(0.0..PI);
                if kacrice::dist_to_pi_lattice(x) > 1e-3 {
                    break x;
                }
            };
            let d = kacrice::sums_direct(n, x);
            let c = kacrice::sums_closed(n, x).unwrap();
            for (u, v) in [(c.a, d.a), (c.b, d.b), (c.c, d.c)] {
                worst = worst.max((u - v).abs() / v.abs());
            }
        }
    }
    report(
        6,
        worst <= MAX_REL,
        format!(
            "max relative discrepancy {worst:.2e} ({:.2} s)",
            t.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_conditional_identity() {
    const MAX_REL: f64 = 1e-8;

    let mut rng = rng_for(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=2000);
        let s = kacrice::sigma(n, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        worst = worst.max(s.identity_relative());
    }
    report(
        7,
        worst <= MAX_REL,
        format!("max relative residual {worst:.2e}"),
    );
}

#[test]
fn criterion_08_arithmetic_identities() {
    const MAX_DIFF: f64 = 1e-12;

    let first_failure = (1..=5000u64).find(|&n| !arith::check_order_bound(n).unwrap());
    let f = |x: f64| {
        let fr = x - x.floor();
        fr * fr + (2.0 * PI * x).cos()
    };
    let mut rng = rng_for(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n, p) = (rng.random_range(1..=500), rng.random_range(1..=500));
        let (l, r) = arith::periodic_riemann_reduce(f, n, p).unwrap();
        worst = worst.max((l - r).abs() / (1.0 + l.abs()));
    }
    report(
        8,
        first_failure.is_none() && worst <= MAX_DIFF,
        format!("order bound first failure {first_failure:?}; max scaled difference {worst:.2e}"),
    );
}

#[test]
fn criterion_09_geometry() {
    const RANDOM_POLYLINES: usize = 1000;
    const NODAL_CELLS: usize = 100;
    const PENCIL_POLYLINES: usize = 100;
    const PENCIL_SAMPLES: usize = 4000;
    const SE_MULT: f64 = 3.0;
    const APRIORI_REPS: usize = 200;

    let mut rng = rng_for(9);
    let mut axis_fail = 0;
    for _ in 0..RANDOM_POLYLINES {
        let c = geometry::random_polyline(&mut rng, 20, 0.3);
        if (geometry::best_axis_line(&c).count as f64) < c.length() / 2.0 {
            axis_fail += 1;
        }
    }

    let cells: Vec<Vec<Polyline>> = replicate(NODAL_CELLS, 90, |_, s| cli_cell(s)).unwrap();
    let nodal: Vec<&Polyline> = cells.iter().flatten().collect();
    let nodal_fail = nodal
        .iter()
        .filter(|c| (geometry::best_axis_line(c).count as f64) < c.length() / 2.0)
        .count();

    let mut pencil_fail = 0;
    for _ in 0..PENCIL_POLYLINES {
        let c = geometry::random_polyline(&mut rng, 10, 0.2);
        let (m, se) = geometry::pencil_monte_carlo(&c, PENCIL_SAMPLES, &mut rng);
        if m < c.length() - SE_MULT * se {
            pencil_fail += 1;
        }
    }

    let mut apriori_fail = 0;
    for n in [20, 50] {
        let ok = replicate(APRIORI_REPS, 900 + n as u64, |_, s| {
            let p = TrigPoly::new(sample_matrix(CoeffLaw::Gaussian, n, s)?)?;
            let ns = nodal_length(&p, &GridSpec::global(n))?;
            let (_, m) = ns.cell_length_matrix().expect("attributed");
            Ok(geometry::apriori_check(n, &m))
        })
        .unwrap();
        apriori_fail += ok.iter().filter(|&&b| !b).count();
    }

    let ok = axis_fail == 0 && nodal_fail == 0 && pencil_fail == 0 && apriori_fail == 0;
    report(
        9,
        ok,
        format!(
            "axis-line failures {axis_fail}/{RANDOM_POLYLINES} random, {nodal_fail}/{} nodal polylines from {NODAL_CELLS} cells; pencil failures {pencil_fail}/{PENCIL_POLYLINES}; a-priori failures {apriori_fail}",
            nodal.len()
        ),
    );
}

fn cli_cell(seed: u64) -> nodal_lab::Result<Vec<Polyline>> {
    cli::nodal_cell_polylines(CoeffLaw::Gaussian, 20, seed)
}

#[test]
fn criterion_10_small_ball_universality() {
    const REPS: u64 = 10_000;
    const SLACK: f64 = 0.02;
    const SE_MULT: f64 = 3.0;

    let mut ok = true;
    let mut worst_cross = f64::NEG_INFINITY;
    let mut worst_exact = 0.0f64;
    let mut seed = 1000;
    for n in [50, 100] {
        for (k, l) in [(1, 1), (3, 7)] {
            for eps in [0.05, 0.1, 0.2] {
                seed += 2;
                let g = arith::smallball_empirical(CoeffLaw::Gaussian, n, k, l, eps, REPS, seed)
                    .unwrap();
                let r =
                    arith::smallball_empirical(CoeffLaw::Rademacher, n, k, l, eps, REPS, seed + 1)
                        .unwrap();
                let exact = arith::smallball_gaussian(n, k, l, eps).unwrap();
                let exact_se = (exact * (1.0 - exact) / REPS as f64).sqrt();
                let cse = g.se.hypot(r.se);
                let d_cross = (g.probability - r.probability).abs();
                let d_exact = (g.probability - exact).abs();
                ok &= d_cross <= SLACK + SE_MULT * cse && d_exact <= SE_MULT * exact_se;
                worst_cross = worst_cross.max(d_cross - SE_MULT * cse);
                worst_exact = worst_exact.max(d_exact / exact_se);
            }
        }
    }
    report(
        10,
        ok,
        format!(
            "max |P_rad - P_gauss| - 3 SE = {worst_cross:.4} (limit {SLACK}); max Gaussian deviation {worst_exact:.2} SE"
        ),
    );
}

#[test]
fn criterion_11_char_fn_product() {
    const MAX_DIFF: f64 = 1e-10;

    let mut rng = rng_for(11);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let law = CoeffLaw::ALL[i % 4];
        let n = rng.random_range(1..=200u64);
        let (k, l) = (rng.random_range(1..=n), rng.random_range(1..=n));
        let xi = rng.random_range(-20.0..20.0);
        let a = arith::char_fn_lattice(law, n, k, l, xi)
            .unwrap()
            .norm()
            .ln();
        let b = arith::char_fn_lattice_brute_logmod(law, n, k, l, xi);
        let d = if a == b { 0.0 } else { (a - b).abs() };
        worst = worst.max(d);
    }
    report(
        11,
        worst <= MAX_DIFF,
        format!("max log-modulus difference {worst:.2e}"),
    );
}
