use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::{
    compare, invalid, verify, Command, ExperimentConfig, EXIT_CHECK_FAILED, EXIT_NUMERICAL,
};
use crate::arith;
use crate::coeffs::{rng_for, sample_matrix, splitmix64, CoeffLaw};
use crate::error::{Error, Result};
use crate::experiment::replicate;
use crate::geometry::{self, Polyline};
use crate::kacrice;
use crate::limitfield::{local_length_distribution, LocalSource, DEFAULT_RESOLUTION};
use crate::nodal::{extract, nodal_length, write_svg, ExtractOptions, GridSpec, Rect};
use crate::stats::{ks_two_sample, summarize, Summary};
use crate::trigpoly::{Coordinates, TrigPoly};

pub(super) fn dispatch(command: Command, cfg: &ExperimentConfig) -> Result<i32> {
    match command {
        Command::Simulate => {
            let (records, report) = simulate(cfg)?;
            emit_table(cfg, "simulate.csv", &records, &report)?;
            Ok(0)
        }
        Command::Kacrice => {
            let report = kacrice(cfg)?;
            emit_json(cfg, "kacrice.json", &report)?;
            Ok(if report.converged { 0 } else { EXIT_NUMERICAL })
        }
        Command::Local => {
            let (records, report) = local(cfg)?;
            emit_table(cfg, "local.csv", &records, &report)?;
            Ok(0)
        }
        Command::Smallball => {
            let report = smallball(cfg)?;
            if !report.order_condition {
                eprintln!(
                    "warning: ord(k) or ord(l) is below sqrt(n); the small-ball bound does not apply"
                );
            }
            emit_json(cfg, "smallball.json", &report)?;
            Ok(0)
        }
        Command::GeometryCheck => {
            let records = geometry_check(cfg)?;
            let failures = records
                .iter()
                .filter(|r| !(r.axis_ok && r.corner_ok))
                .count();
            let summary = GeometrySummary {
                polylines: records.len(),
                failures,
            };
            emit_table(cfg, "geometry.csv", &records, &summary)?;
            Ok(if failures == 0 { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Plot => {
            let (rect, lines) = plot(cfg)?;
            match cfg.prepare_out()? {
                Some(d) => {
                    let path = d.join("nodal.svg");
                    write_svg(BufWriter::new(File::create(&path)?), &rect, &lines)?;
                    say(&path.display().to_string())?;
                }
                None => write_svg(io::stdout().lock(), &rect, &lines)?,
            }
            Ok(0)
        }
        Command::Verify => {
            let results = verify::run_suite();
            let mut ok = true;
            for r in &results {
                say(&format!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                ))?;
                ok &= r.passed;
            }
            if let Some(d) = cfg.prepare_out()? {
                write_json(&d.join("verify.json"), &results)?;
            }
            Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Compare => {
            let laws = cfg
                .laws
                .clone()
                .unwrap_or_else(|| vec![CoeffLaw::Gaussian, CoeffLaw::Rademacher]);
            let configs: Vec<ExperimentConfig> = laws
                .iter()
                .enumerate()
                .map(|(i, &law)| ExperimentConfig {
                    law: Some(law),
                    seed: Some(cfg.seed().wrapping_add(i as u64)),
                    ..cfg.clone()
                })
                .collect();
            let report = compare::compare_laws(&configs)?;
            emit_json(cfg, "compare.json", &report)?;
            Ok(0)
        }
    }
}

/// A line on stdout; a closed pipe is an error, not a panic.
fn say(line: &str) -> Result<()> {
    writeln!(io::stdout().lock(), "{line}")?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// JSON to stdout, and to `out/name` when an output directory is set.
fn emit_json<T: Serialize>(cfg: &ExperimentConfig, name: &str, value: &T) -> Result<()> {
    if let Some(d) = cfg.prepare_out()? {
        write_json(&d.join(name), value)?;
    }
    say(&serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// With an output directory: CSV and `summary.json` there, summary on
/// stdout. Without: CSV on stdout, summary on stderr.
fn emit_table<R: Serialize, S: Serialize>(
    cfg: &ExperimentConfig,
    name: &str,
    records: &[R],
    summary: &S,
) -> Result<()> {
    match cfg.prepare_out()? {
        Some(d) => {
            write_csv(File::create(d.join(name))?, records)?;
            write_json(&d.join("summary.json"), summary)?;
            say(&serde_json::to_string_pretty(summary)?)?;
        }
        None => {
            write_csv(io::stdout().lock(), records)?;
            eprintln!("{}", serde_json::to_string_pretty(summary)?);
        }
    }
    Ok(())
}

fn write_csv<W: Write, R: Serialize>(w: W, records: &[R]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

fn elapsed_ms(t: Instant, omit: bool) -> f64 {
    if omit {
        0.0
    } else {
        (t.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3
    }
}

/// One `simulate` replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRecord {
    pub law: String,
    pub n: usize,
    pub seed: u64,
    pub rep: u64,
    /// Nodal length of `F_n` on `[0, n pi]^2` divided by `n`, which is the
    /// length of `f_n` on `[0, pi]^2`.
    pub total_length: f64,
    /// Largest pi-cell length of `F_n`.
    pub max_cell_length: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub command: &'static str,
    pub law: CoeffLaw,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub total_length: Summary,
    pub max_cell_length: Summary,
    /// `(2n + 1) pi^2 / (4 sqrt 3)`.
    pub asymptotic: f64,
    /// Every pi-cell length of every replication is at most `4n`.
    pub apriori_ok: bool,
}

/// Monte Carlo nodal lengths of `f_n` over `[0, pi]^2`, computed as the
/// length of `F_n` over `[0, n pi]^2` (or over `window`) divided by `n`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(Vec<SimRecord>, SimReport)> {
    let n = cfg.n_or(20)?;
    let reps = cfg.reps_or(100)?;
    let law = cfg.law();
    let seed = cfg.seed();
    let mut spec = GridSpec::global(n);
    spec.rect = cfg.window_or(spec.rect)?;
    if let Some(s) = cfg.samples_per_unit {
        spec.samples_per_unit = s;
    }
    spec.validate()?;
    let rows = replicate(reps, seed, |rep, s| {
        let t = Instant::now();
        let p = TrigPoly::new(sample_matrix(law, n, s)?)?;
        let ns = nodal_length(&p, &spec)?;
        let apriori = match ns.cell_length_matrix() {
            Some((_, m)) => geometry::apriori_check(n, &m),
            None => true,
        };
        let rec = SimRecord {
            law: law.cli_name().to_string(),
            n,
            seed,
            rep,
            total_length: ns.total_length() / n as f64,
            max_cell_length: ns.max_cell_length(),
            wall_ms: elapsed_ms(t, cfg.omit_timing),
        };
        Ok((rec, apriori))
    })?;
    let apriori_ok = rows.iter().all(|r| r.1);
    let records: Vec<SimRecord> = rows.into_iter().map(|r| r.0).collect();
    let lengths: Vec<f64> = records.iter().map(|r| r.total_length).collect();
    let cells: Vec<f64> = records.iter().map(|r| r.max_cell_length).collect();
    let report = SimReport {
        command: "simulate",
        law,
        n,
        reps,
        seed,
        total_length: summarize(&lengths),
        max_cell_length: summarize(&cells),
        asymptotic: kacrice::asymptotic_expected_length(n),
        apriori_ok,
    };
    Ok((records, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KacRiceReport {
    pub command: &'static str,
    pub n: usize,
    pub window: Rect,
    pub tol: f64,
    /// Expected length, or the best estimate when `converged` is false.
    pub value: f64,
    pub achieved: f64,
    pub panels: usize,
    pub converged: bool,
    pub asymptotic: f64,
}

/// Expected nodal length of Gaussian `f_n` over a window of `[0, pi]^2`.
pub fn kacrice(cfg: &ExperimentConfig) -> Result<KacRiceReport> {
    let n = cfg.n_or(20)?;
    let window = cfg.window_or(Rect::square(0.0, PI)?)?;
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut report = KacRiceReport {
        command: "kacrice",
        n,
        window,
        tol,
        value: f64::NAN,
        achieved: f64::NAN,
        panels: 0,
        converged: true,
        asymptotic: kacrice::asymptotic_expected_length(n),
    };
    match kacrice::expected_length(n, &window, tol) {
        Ok(e) => {
            report.value = e.value;
            report.achieved = e.achieved;
            report.panels = e.panels;
        }
        Err(Error::QuadratureDepth { estimate, achieved }) => {
            report.value = estimate;
            report.achieved = achieved;
            report.converged = false;
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn parse_source(name: &str, cfg: &ExperimentConfig) -> Result<LocalSource> {
    let m = cfg.m.unwrap_or(DEFAULT_RESOLUTION);
    let s = match name {
        "polynomial" => LocalSource::Polynomial {
            law: cfg.law(),
            n: cfg.n_or(200)?,
        },
        "f_infinity" => LocalSource::FInfinity { m },
        "g_infinity" => LocalSource::GInfinity { m },
        other => {
            return Err(invalid(format!(
                "unknown source `{other}` (expected polynomial, f_infinity or g_infinity)"
            )))
        }
    };
    s.validate()?;
    Ok(s)
}

fn source_degree(s: LocalSource) -> usize {
    match s {
        LocalSource::Polynomial { n, .. } => n,
        LocalSource::FInfinity { m } | LocalSource::GInfinity { m } => m,
    }
}

fn source_name(s: LocalSource) -> &'static str {
    match s {
        LocalSource::Polynomial { .. } => "polynomial",
        LocalSource::FInfinity { .. } => "f_infinity",
        LocalSource::GInfinity { .. } => "g_infinity",
    }
}

/// One `local` replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalRecord {
    pub source: &'static str,
    /// Degree, or spectral resolution for a limit field.
    pub n: usize,
    pub seed: u64,
    pub rep: u64,
    pub length: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalReport {
    pub command: &'static str,
    pub source: LocalSource,
    pub window: Rect,
    pub reps: usize,
    pub seed: u64,
    pub length: Summary,
    pub reference: Option<LocalSource>,
    pub reference_length: Option<Summary>,
    /// Two-sample KS statistic against the reference draws.
    pub ks: Option<f64>,
}

/// Length distribution in a window (rescaled coordinates, default
/// `[0, pi]^2`), optionally against a reference source drawn with seed
/// `seed + 1`.
pub fn local(cfg: &ExperimentConfig) -> Result<(Vec<LocalRecord>, LocalReport)> {
    let source = parse_source(cfg.source.as_deref().unwrap_or("polynomial"), cfg)?;
    let reference = cfg
        .reference
        .as_deref()
        .map(|r| parse_source(r, cfg))
        .transpose()?;
    let window = cfg.window_or(Rect::square(0.0, PI)?)?;
    let reps = cfg.reps_or(100)?;
    let seed = cfg.seed();
    let rows = replicate(reps, seed, |rep, s| {
        let t = Instant::now();
        let length = source.length(&window, s)?;
        Ok(LocalRecord {
            source: source_name(source),
            n: source_degree(source),
            seed,
            rep,
            length,
            wall_ms: elapsed_ms(t, cfg.omit_timing),
        })
    })?;
    let lengths: Vec<f64> = rows.iter().map(|r| r.length).collect();
    let ref_lengths = reference
        .map(|r| local_length_distribution(r, &window, reps, seed.wrapping_add(1)))
        .transpose()?;
    let report = LocalReport {
        command: "local",
        source,
        window,
        reps,
        seed,
        length: summarize(&lengths),
        reference,
        reference_length: ref_lengths.as_deref().map(summarize),
        ks: ref_lengths.as_deref().map(|r| ks_two_sample(&lengths, r)),
    };
    Ok((rows, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallBallReport {
    pub command: &'static str,
    pub law: CoeffLaw,
    pub n: u64,
    pub k: u64,
    pub l: u64,
    pub eps: f64,
    pub reps: u64,
    pub seed: u64,
    pub probability: f64,
    pub se: f64,
    /// `Var F_n(k pi, l pi)`.
    pub variance: f64,
    /// Exact probability for Gaussian coefficients at the same variance.
    pub gaussian_probability: f64,
    pub halasz: f64,
    /// `ord k >= sqrt n` and `ord l >= sqrt n`.
    pub order_condition: bool,
}

pub fn smallball(cfg: &ExperimentConfig) -> Result<SmallBallReport> {
    let law = cfg.law();
    let n = cfg.n_or(50)? as u64;
    let (k, l) = (cfg.k.unwrap_or(1), cfg.l.unwrap_or(1));
    let eps = cfg.eps.unwrap_or(0.1);
    let reps = cfg.reps_or(10_000)? as u64;
    let seed = cfg.seed();
    let r = arith::smallball_empirical(law, n, k, l, eps, reps, seed)?;
    Ok(SmallBallReport {
        command: "smallball",
        law,
        n,
        k,
        l,
        eps,
        reps,
        seed,
        probability: r.probability,
        se: r.se,
        variance: arith::lattice_variance(n, k, l)?,
        gaussian_probability: arith::smallball_gaussian(n, k, l, eps)?,
        halasz: arith::halasz_integral(law, n, k, l, eps)?,
        order_condition: arith::order_condition(n, k, l)?,
    })
}

/// Checks on one polyline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryRecord {
    pub source: &'static str,
    pub rep: u64,
    pub polyline: usize,
    pub length: f64,
    pub axis_count: usize,
    /// `axis_count >= length / 2`.
    pub axis_ok: bool,
    pub corner_count: usize,
    /// `corner_count >= length / 4 - slack`.
    pub corner_ok: bool,
    pub pencil_mean: f64,
    pub pencil_se: f64,
}

#[derive(Serialize)]
struct GeometrySummary {
    polylines: usize,
    failures: usize,
}

const PENCIL_GRID: usize = 32;
const PENCIL_SAMPLES: usize = 2000;

fn check_polyline(
    source: &'static str,
    rep: u64,
    index: usize,
    c: &Polyline,
    seed: u64,
) -> Result<GeometryRecord> {
    let len = c.length();
    let axis = geometry::best_axis_line(c);
    let corner = geometry::best_corner_line(c, PENCIL_GRID)?;
    let (pencil_mean, pencil_se) =
        geometry::pencil_monte_carlo(c, PENCIL_SAMPLES, &mut rng_for(seed ^ index as u64));
    Ok(GeometryRecord {
        source,
        rep,
        polyline: index,
        length: len,
        axis_count: axis.count,
        axis_ok: axis.count as f64 >= len / 2.0,
        corner_count: corner.count,
        corner_ok: corner.count as f64 >= len / 4.0 - geometry::corner_slack(len, PENCIL_GRID),
        pencil_mean,
        pencil_se,
    })
}

/// Polylines of one random pi-cell of `F_n`, on the unit square.
pub fn nodal_cell_polylines(law: CoeffLaw, n: usize, seed: u64) -> Result<Vec<Polyline>> {
    let mut rng = rng_for(splitmix64(seed));
    let k = rand::Rng::random_range(&mut rng, 0..n as i64);
    let l = rand::Rng::random_range(&mut rng, 0..n as i64);
    let p = TrigPoly::new(sample_matrix(law, n, seed)?)?;
    let cell = Rect::new(
        k as f64 * PI,
        (k + 1) as f64 * PI,
        l as f64 * PI,
        (l + 1) as f64 * PI,
    )?;
    let spec = GridSpec::local(cell);
    let (xs, ys) = spec.axes(n);
    let ns = extract(
        &p.field(Coordinates::Rescaled),
        &xs,
        &ys,
        PI,
        ExtractOptions::default(),
    )?;
    ns.cell_polylines(k, l)?
        .into_iter()
        .filter(|pl| pl.len() >= 2)
        .map(Polyline::new)
        .collect()
}

/// Line-crossing bounds on random walks (`--source random`) or on the
/// nodal polylines of a random pi-cell of `F_n` (`--source nodal`).
pub fn geometry_check(cfg: &ExperimentConfig) -> Result<Vec<GeometryRecord>> {
    let reps = cfg.reps_or(100)?;
    let seed = cfg.seed();
    let source = cfg.source.as_deref().unwrap_or("random");
    let per_rep = match source {
        "random" => replicate(reps, seed, |rep, s| {
            let c = geometry::random_polyline(&mut rng_for(s), 20, 0.3);
            Ok(vec![check_polyline("random", rep, 0, &c, s)?])
        })?,
        "nodal" => {
            let n = cfg.n_or(20)?;
            let law = cfg.law();
            replicate(reps, seed, |rep, s| {
                nodal_cell_polylines(law, n, s)?
                    .iter()
                    .enumerate()
                    .map(|(i, c)| check_polyline("nodal", rep, i, c, s))
                    .collect()
            })?
        }
        other => {
            return Err(invalid(format!(
                "unknown source `{other}` (expected random or nodal)"
            )))
        }
    };
    Ok(per_rep.into_iter().flatten().collect())
}

/// Nodal polylines of one `F_n` over a window (default `[0, n pi]^2`).
pub fn plot(cfg: &ExperimentConfig) -> Result<(Rect, Vec<Vec<[f64; 2]>>)> {
    let n = cfg.n_or(10)?;
    let mut spec = GridSpec::global(n);
    spec.rect = cfg.window_or(spec.rect)?;
    let p = TrigPoly::new(sample_matrix(cfg.law(), n, cfg.seed())?)?;
    let ns = nodal_length(&p, &spec)?;
    Ok((spec.rect, ns.polylines()))
}
