//! Fast invariant suite behind `nodal-lab verify`.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::arith;
use crate::coeffs::{rng_for, sample_matrix, CoeffLaw};
use crate::error::Result;
use crate::experiment::{replicate, thread_pool};
use crate::geometry;
use crate::kacrice;
use crate::nodal::{nodal_length, GridSpec, Rect};
use crate::trigpoly::{Coordinates, TrigPoly};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("kacrice_cross", kacrice_cross),
    ("closed_form_sums", closed_form_sums),
    ("conditional_identity", conditional_identity),
    ("order_bound", order_bound),
    ("residue_reduction", residue_reduction),
    ("lattice_variance", lattice_variance),
    ("char_fn_product", char_fn_product),
    ("halasz_gaussian", halasz_gaussian),
    ("axis_line_bound", axis_line_bound),
    ("cross_length", cross_length),
    ("cell_additivity", cell_additivity),
    ("scale_covariance", scale_covariance),
    ("thread_independence", thread_independence),
];

/// Run every check; an error counts as a failure.
pub fn run_suite() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| match f() {
            Ok((passed, detail)) => CheckResult {
                name,
                passed,
                detail,
            },
            Err(e) => CheckResult {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn kacrice_cross() -> Result<(bool, String)> {
    let v = kacrice::expected_length(1, &Rect::square(0.0, PI)?, 1e-6)?.value;
    let e = (v - 2.0 * PI).abs();
    Ok((e <= 1e-6, format!("|E - 2 pi| = {e:.2e}")))
}

fn away_from_lattice<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let x = rng.random_range(0.0..PI);
        if kacrice::dist_to_pi_lattice(x) > 1e-3 {
            return x;
        }
    }
}

fn closed_form_sums() -> Result<(bool, String)> {
    let mut rng = rng_for(11);
    let mut worst = 0.0f64;
    for n in [5, 50, 500] {
        for _ in 0..100 {
            let x = away_from_lattice(&mut rng);
            let d = kacrice::sums_direct(n, x);
            let c = kacrice::sums_closed(n, x)?;
            for (u, v) in [(c.a, d.a), (c.b, d.b), (c.c, d.c)] {
                worst = worst.max((u - v).abs() / v.abs());
            }
        }
    }
    Ok((
        worst <= 1e-9,
        format!("max relative discrepancy {worst:.2e}"),
    ))
}

fn conditional_identity() -> Result<(bool, String)> {
    let mut rng = rng_for(12);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..300);
        let s = kacrice::sigma(n, rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        worst = worst.max(s.identity_relative());
    }
    Ok((worst <= 1e-8, format!("max relative residual {worst:.2e}")))
}

fn order_bound() -> Result<(bool, String)> {
    for n in 1..=1000 {
        if !arith::check_order_bound(n)? {
            return Ok((false, format!("fails at n = {n}")));
        }
    }
    Ok((true, "holds for n <= 1000".into()))
}

fn residue_reduction() -> Result<(bool, String)> {
    let mut rng = rng_for(13);
    let f = |x: f64| {
        let fr = x - x.floor();
        fr * fr + (2.0 * PI * x).cos()
    };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n, p) = (rng.random_range(1..=500), rng.random_range(1..=500));
        let (l, r) = arith::periodic_riemann_reduce(f, n, p)?;
        worst = worst.max((l - r).abs() / (1.0 + l.abs()));
    }
    Ok((worst <= 1e-12, format!("max scaled difference {worst:.2e}")))
}

fn lattice_variance() -> Result<(bool, String)> {
    let mut rng = rng_for(14);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..300);
        let (k, l) = (rng.random_range(0..=n), rng.random_range(0..=n));
        let d = arith::lattice_variance(n, k, l)? - arith::lattice_variance_reduced(n, k, l)?;
        worst = worst.max(d.abs());
    }
    Ok((worst <= 1e-12, format!("max difference {worst:.2e}")))
}

fn char_fn_product() -> Result<(bool, String)> {
    let mut rng = rng_for(15);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let law = CoeffLaw::ALL[i % 4];
        let n = rng.random_range(1..=60);
        let (k, l) = (rng.random_range(1..=n), rng.random_range(1..=n));
        let xi = rng.random_range(-20.0..20.0);
        let a = arith::char_fn_lattice(law, n, k, l, xi)?.norm().ln();
        let b = arith::char_fn_lattice_brute_logmod(law, n, k, l, xi);
        if a.is_finite() || b.is_finite() {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((
        worst <= 1e-10,
        format!("max log-modulus difference {worst:.2e}"),
    ))
}

fn halasz_gaussian() -> Result<(bool, String)> {
    let (n, k, l, eps) = (25, 1, 1, 0.1);
    let var = arith::lattice_variance(n, k, l)?;
    let v = arith::halasz_integral(CoeffLaw::Gaussian, n, k, l, eps)?;
    let exact = eps * (2.0 * PI / (var + eps * eps)).sqrt();
    let rel = (v / exact - 1.0).abs();
    Ok((rel <= 1e-8, format!("relative error {rel:.2e}")))
}

fn axis_line_bound() -> Result<(bool, String)> {
    let mut rng = rng_for(16);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let c = geometry::random_polyline(&mut rng, 20, 0.3);
        let a = geometry::best_axis_line(&c);
        worst = worst.min(a.count as f64 - c.length() / 2.0);
    }
    Ok((
        worst >= 0.0,
        format!("min of count - length/2 is {worst:.3}"),
    ))
}

fn cross_length() -> Result<(bool, String)> {
    let p = TrigPoly::from_fn(1, |_, _| 1.0)?;
    let v = nodal_length(&p, &GridSpec::global(1))?.total_length();
    let e = (v - 2.0 * PI).abs();
    Ok((e <= 1e-3, format!("|length - 2 pi| = {e:.2e}")))
}

fn cell_additivity() -> Result<(bool, String)> {
    let p = TrigPoly::new(sample_matrix(CoeffLaw::Rademacher, 10, 3)?)?;
    let ns = nodal_length(&p, &GridSpec::global(10))?;
    let total = ns.total_length();
    let sum: f64 = ns.cell_lengths().values().sum();
    let rel = (sum - total).abs() / total;
    Ok((rel <= 1e-9, format!("relative difference {rel:.2e}")))
}

fn scale_covariance() -> Result<(bool, String)> {
    let n = 10;
    let p = TrigPoly::new(sample_matrix(CoeffLaw::Gaussian, n, 4)?)?;
    let big = nodal_length(&p, &GridSpec::global(n))?.total_length();
    let spec = GridSpec::new(
        Rect::square(0.0, PI)?,
        8.0 * n as f64 / PI,
        Coordinates::Raw,
    )?;
    let small = nodal_length(&p, &spec)?.total_length();
    let rel = (big / (n as f64 * small) - 1.0).abs();
    Ok((rel <= 1e-6, format!("relative difference {rel:.2e}")))
}

fn thread_independence() -> Result<(bool, String)> {
    let run = |threads| -> Result<Vec<f64>> {
        thread_pool(Some(threads))?.install(|| {
            replicate(8, 5, |_, s| {
                let p = TrigPoly::new(sample_matrix(CoeffLaw::UniformCentered, 6, s)?)?;
                Ok(nodal_length(&p, &GridSpec::global(6))?.total_length())
            })
        })
    };
    let same = run(1)? == run(3)?;
    Ok((
        same,
        if same {
            "bit-identical"
        } else {
            "outputs differ"
        }
        .into(),
    ))
}
