//! Limiting Gaussian fields of the rescaled polynomials.
//!
//! `F_inf` is the local limit of `F_n` near the origin, with covariance
//!
//! ```text
//! E F(x, y) F(x', y') = 1/4 (sinc(x + x') + sinc(x - x')) (sinc(y + y') + sinc(y - y'))
//! ```
//!
//! and `G_inf` the stationary limit far from the axes, with covariance
//! `1/4 sinc(x - x') sinc(y - y')`.
//!
//! `F_inf` is drawn as a Gaussian `F_m` of large degree. `G_inf` is drawn by
//! spectral synthesis at midpoint frequencies of `[0, 1]^2`.

use std::f64::consts::PI;

use ndarray::{s, Array2, CowArray};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coeffs::{derive_seed, rng_for, sample_matrix, sinc, CoeffLaw};
use crate::error::{Error, Result};
use crate::experiment::replicate;
use crate::field::{AxisBasis, SeparableField};
use crate::nodal::{aligned_axis, extract, ExtractOptions, Rect};
use crate::trigpoly::{Coordinates, TrigPoly};

/// Smallest spectral resolution accepted by the samplers.
pub const MIN_RESOLUTION: usize = 8;
/// Default spectral resolution.
pub const DEFAULT_RESOLUTION: usize = 200;
/// Grid steps per pi along each axis for local windows.
pub const LOCAL_STEPS_PER_PI: usize = 32;

pub fn cov_f_infinity(x: f64, y: f64, x2: f64, y2: f64) -> f64 {
    0.25 * (sinc(x + x2) + sinc(x - x2)) * (sinc(y + y2) + sinc(y - y2))
}

pub fn cov_g_infinity(dx: f64, dy: f64) -> f64 {
    0.25 * sinc(dx) * sinc(dy)
}

fn check_resolution(m: usize) -> Result<()> {
    if m < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "spectral resolution must be at least {MIN_RESOLUTION}, got {m}"
        )));
    }
    Ok(())
}

/// One approximate draw of `F_inf`: a degree-`m` polynomial with Gaussian
/// coefficients, to be evaluated in rescaled coordinates. On a fixed window
/// its covariance differs from the limit by a Riemann-sum error of order
/// `1/m`.
pub fn sample_f_infinity(m: usize, seed: u64) -> Result<TrigPoly> {
    check_resolution(m)?;
    TrigPoly::new(sample_matrix(CoeffLaw::Gaussian, m, seed)?)
}

/// One draw of the spectral approximation of `G_inf`:
///
/// ```text
/// G(x, y) = 1/(2m) sum_{i,j} [ xi1 cos(s_i x) cos(t_j y) + xi2 cos(s_i x) sin(t_j y)
///                            + xi3 sin(s_i x) cos(t_j y) + xi4 sin(s_i x) sin(t_j y) ]
/// ```
///
/// with `s_i = (i + 1/2) / m`, `t_j = (j + 1/2) / m`. Its covariance is the
/// midpoint rule for `1/4 int int cos(s dx) cos(t dy) ds dt` over `[0, 1]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GInfinity {
    m: usize,
    /// `[[xi1, xi2], [xi3, xi4]]` as one `2m x 2m` block matrix; rows follow
    /// the x basis (cosines then sines), columns the y basis.
    coeffs: Array2<f64>,
}

impl GInfinity {
    pub fn sample(m: usize, seed: u64) -> Result<Self> {
        check_resolution(m)?;
        let mut rng = rng_for(seed);
        let mut coeffs = Array2::zeros((2 * m, 2 * m));
        // Fill xi1..xi4 in order so each block is an independent m x m array.
        for (r, c) in [(0, 0), (0, m), (m, 0), (m, m)] {
            for v in coeffs.slice_mut(s![r..r + m, c..c + m]).iter_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
            }
        }
        Ok(Self { m, coeffs })
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> SeparableField<'_> {
        let basis = AxisBasis::cos_sin(0.5, 1.0 / self.m as f64, self.m);
        SeparableField::new(
            basis.clone(),
            basis,
            CowArray::from(self.coeffs.view()),
            0.5 / self.m as f64,
        )
        .expect("block matrix matches cos/sin bases")
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.field().eval(x, y)
    }
}

/// Covariance of the `G_inf` synthesis at lag `(dx, dy)`, exactly.
pub fn cov_g_synthesis(m: usize, dx: f64, dy: f64) -> f64 {
    let avg = |d: f64| {
        (0..m)
            .map(|i| ((i as f64 + 0.5) / m as f64 * d).cos())
            .sum::<f64>()
            / m as f64
    };
    0.25 * avg(dx) * avg(dy)
}

/// Source of fields for local length distributions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalSource {
    /// `F_n` with i.i.d. coefficients of the given law.
    Polynomial { law: CoeffLaw, n: usize },
    /// `F_m` with Gaussian coefficients, approximating `F_inf`.
    FInfinity { m: usize },
    /// Spectral synthesis of `G_inf` at resolution `m`.
    GInfinity { m: usize },
}

impl LocalSource {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LocalSource::Polynomial { n: 0, .. } => Err(Error::ZeroDegree),
            LocalSource::Polynomial { .. } => Ok(()),
            LocalSource::FInfinity { m } | LocalSource::GInfinity { m } => check_resolution(m),
        }
    }

    /// Nodal length inside `window` (rescaled coordinates) of the draw with
    /// the given seed.
    pub fn length(&self, window: &Rect, seed: u64) -> Result<f64> {
        let xs = aligned_axis(window.x_min, window.x_max, PI, LOCAL_STEPS_PER_PI);
        let ys = aligned_axis(window.y_min, window.y_max, PI, LOCAL_STEPS_PER_PI);
        let opts = ExtractOptions::default();
        let ns = match *self {
            LocalSource::Polynomial { law, n } => {
                let p = TrigPoly::new(sample_matrix(law, n, seed)?)?;
                extract(&p.field(Coordinates::Rescaled), &xs, &ys, PI, opts)?
            }
            LocalSource::FInfinity { m } => {
                let p = sample_f_infinity(m, seed)?;
                extract(&p.field(Coordinates::Rescaled), &xs, &ys, PI, opts)?
            }
            LocalSource::GInfinity { m } => {
                let g = GInfinity::sample(m, seed)?;
                extract(&g.field(), &xs, &ys, PI, opts)?
            }
        };
        Ok(ns.total_length())
    }
}

/// `reps` independent nodal lengths inside `window`, in replication order.
/// A window with zero width or height yields zeros.
pub fn local_length_distribution(
    source: LocalSource,
    window: &Rect,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    source.validate()?;
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    let finite = [window.x_min, window.x_max, window.y_min, window.y_max]
        .iter()
        .all(|v| v.is_finite());
    if finite && window.x_min <= window.x_max && window.y_min <= window.y_max {
        if window.width() == 0.0 || window.height() == 0.0 {
            return Ok(vec![0.0; reps]);
        }
    } else {
        window.validate()?;
    }
    replicate(reps, seed, |_, s| source.length(window, s))
}

/// Seeds of the `reps` draws of [`local_length_distribution`].
pub fn draw_seeds(seed: u64, reps: usize) -> Vec<u64> {
    (0..reps as u64).map(|r| derive_seed(seed, r)).collect()
}
