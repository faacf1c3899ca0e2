//! Curve-line intersection counts for polylines in the unit square.
//!
//! A curve of length `L` inside `[0, 1]^2` meets some straight line at least
//! `L / 4` times, and some horizontal or vertical line at least `L / 2` times.
//! Applied to a pi-cell of a nodal set, rescaled to the unit square, the
//! second bound caps the nodal length of the cell by twice the number of
//! roots of a one-variable trigonometric polynomial on a line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodal::neumaier_sum;

/// Half-width of the collinearity band of the orientation test.
pub const COLLINEAR_EPS: f64 = 1e-12;
/// Line offset used to re-count when a vertex falls inside the band.
pub const NUDGE: f64 = 1e-9;
/// Default lattice size of [`best_corner_line`].
pub const DEFAULT_PENCIL_GRID: usize = 128;

/// Corners `A = (0, 1)`, `B = (1, 1)`, `C = (1, 0)`, `D = (0, 0)`.
pub const CORNERS: [[f64; 2]; 4] = [[0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]];

/// Ordered points inside the unit square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        for &[x, y] in &points {
            if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
                return Err(Error::PointOutsideSquare(x, y));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        neumaier_sum(
            self.segments()
                .map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])),
        )
    }

    /// First and last point coincide.
    pub fn is_closed(&self) -> bool {
        self.points.len() > 2 && self.points.first() == self.points.last()
    }
}

/// Infinite line through two distinct points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Line {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        if a == b || !(a.iter().chain(&b).all(|v| v.is_finite())) {
            return Err(Error::DegenerateLine);
        }
        Ok(Self { a, b })
    }

    /// Signed distance of `p` from the line (positive to the left of a->b).
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = (self.b[0] - self.a[0], self.b[1] - self.a[1]);
        (dx * (p[1] - self.a[1]) - dy * (p[0] - self.a[0])) / dx.hypot(dy)
    }
}

/// Number of intersections of the line through `a` and `b` with `c`.
///
/// A segment meets the line if its endpoints lie strictly on opposite sides
/// or its start lies on the line; a vertex therefore counts once, with the
/// segment that follows it, and a segment lying on the line counts once. The
/// final vertex of an open polyline belongs to the last segment.
///
/// Points within [`COLLINEAR_EPS`] of the line count as on it. If a vertex
/// lies in that band without being exactly on the line, the count is repeated
/// with the line shifted by [`NUDGE`] and the smaller count is returned.
pub fn line_crossings(c: &Polyline, a: [f64; 2], b: [f64; 2]) -> Result<usize> {
    let line = Line::new(a, b)?;
    Ok(crossings(c, &line))
}

fn crossings(c: &Polyline, line: &Line) -> usize {
    let d: Vec<f64> = c.points.iter().map(|&p| line.signed_distance(p)).collect();
    let snapped = count_signs(&d, c.is_closed());
    if d.iter().any(|&v| v != 0.0 && v.abs() <= COLLINEAR_EPS) {
        let shifted: Vec<f64> = d.iter().map(|v| v - NUDGE).collect();
        snapped.min(count_signs(&shifted, c.is_closed()))
    } else {
        snapped
    }
}

fn count_signs(d: &[f64], closed: bool) -> usize {
    let sign = |v: f64| {
        if v.abs() <= COLLINEAR_EPS {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let s: Vec<i8> = d.iter().map(|&v| sign(v)).collect();
    if s.len() < 2 {
        return 0;
    }
    let last = s.len() - 2;
    let mut count = 0;
    for (i, w) in s.windows(2).enumerate() {
        let (s0, s1) = (w[0], w[1]);
        if s0 == 0 || s0 * s1 < 0 || (i == last && !closed && s1 == 0) {
            count += 1;
        }
    }
    count
}

/// Total crossings of the four lines joining `p` to the corners.
pub fn corner_pencil_score(c: &Polyline, p: [f64; 2]) -> Result<usize> {
    if !(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0) {
        return Err(Error::PointNotInterior);
    }
    Ok(CORNERS
        .iter()
        .map(|&q| crossings(c, &Line { a: p, b: q }))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CornerLine {
    pub line: Line,
    pub count: usize,
    /// Pencil centre that maximised the total score.
    pub centre: [f64; 2],
    pub score: usize,
}

/// Search the `grid x grid` lattice of cell centres for the pencil with the
/// largest [`corner_pencil_score`] and return its best single line.
pub fn best_corner_line(c: &Polyline, grid: usize) -> Result<CornerLine> {
    if grid < 16 {
        return Err(Error::InvalidArgument(format!(
            "pencil lattice must be at least 16 x 16, got {grid}"
        )));
    }
    let mut best: Option<([usize; 4], [f64; 2])> = None;
    let total = |v: &[usize; 4]| v.iter().sum::<usize>();
    for i in 0..grid {
        for j in 0..grid {
            let p = [
                (i as f64 + 0.5) / grid as f64,
                (j as f64 + 0.5) / grid as f64,
            ];
            let counts = CORNERS.map(|q| crossings(c, &Line { a: p, b: q }));
            if best.as_ref().is_none_or(|(b, _)| total(&counts) > total(b)) {
                best = Some((counts, p));
            }
        }
    }
    let (counts, p) = best.expect("lattice is non-empty");
    let (k, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("four corners");
    Ok(CornerLine {
        line: Line {
            a: p,
            b: CORNERS[k],
        },
        count,
        centre: p,
        score: total(&counts),
    })
}

/// Mean and standard error of [`corner_pencil_score`] over `samples`
/// uniform interior points.
pub fn pencil_monte_carlo<R: rand::Rng + ?Sized>(
    c: &Polyline,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let scores: Vec<f64> = (0..samples)
        .map(|_| {
            let p = loop {
                let p = [rng.random::<f64>(), rng.random::<f64>()];
                if p[0] > 0.0 && p[1] > 0.0 {
                    break p;
                }
            };
            corner_pencil_score(c, p).expect("interior point") as f64
        })
        .collect();
    (
        crate::stats::mean(&scores),
        crate::stats::std_error(&scores),
    )
}

/// Slack allowed by the lattice search: `2 / grid * length`.
pub fn corner_slack(length: f64, grid: usize) -> f64 {
    2.0 / grid as f64 * length
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// A line `y = coordinate`.
    Horizontal,
    /// A line `x = coordinate`.
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisLine {
    pub axis: Axis,
    pub coordinate: f64,
    pub count: usize,
}

impl AxisLine {
    pub fn line(&self) -> Line {
        match self.axis {
            Axis::Horizontal => Line {
                a: [0.0, self.coordinate],
                b: [1.0, self.coordinate],
            },
            Axis::Vertical => Line {
                a: [self.coordinate, 0.0],
                b: [self.coordinate, 1.0],
            },
        }
    }
}

/// Candidate coordinates for one axis: midpoints between consecutive distinct
/// vertex ordinates, or the single ordinate if there is only one.
fn sweep_candidates(c: &Polyline, axis: Axis) -> Vec<f64> {
    let k = match axis {
        Axis::Horizontal => 1,
        Axis::Vertical => 0,
    };
    let mut v: Vec<f64> = c.points.iter().map(|p| p[k]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    if v.len() == 1 {
        return v;
    }
    v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

fn axis_count(c: &Polyline, axis: Axis, t: f64) -> usize {
    crossings(
        c,
        &AxisLine {
            axis,
            coordinate: t,
            count: 0,
        }
        .line(),
    )
}

/// Horizontal or vertical line with the most crossings, by an exact sweep.
/// Ties go to the horizontal axis and then to the smaller coordinate.
pub fn best_axis_line(c: &Polyline) -> AxisLine {
    let mut best = AxisLine {
        axis: Axis::Horizontal,
        coordinate: 0.5,
        count: 0,
    };
    for axis in [Axis::Horizontal, Axis::Vertical] {
        for t in sweep_candidates(c, axis) {
            let count = axis_count(c, axis, t);
            if count > best.count {
                best = AxisLine {
                    axis,
                    coordinate: t,
                    count,
                };
            }
        }
    }
    best
}

/// `int_0^1 #(c meets y = t) dt`, from the piecewise-constant sweep profile.
pub fn horizontal_sweep_integral(c: &Polyline) -> f64 {
    let mut ys: Vec<f64> = c.points.iter().map(|p| p[1]).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    neumaier_sum(
        ys.windows(2)
            .map(|w| (w[1] - w[0]) * axis_count(c, Axis::Horizontal, 0.5 * (w[0] + w[1])) as f64),
    )
}

/// `sum |dy|` over the segments.
pub fn vertical_extent(c: &Polyline) -> f64 {
    neumaier_sum(c.segments().map(|(a, b)| (b[1] - a[1]).abs()))
}

/// A-priori cell bound: every pi-cell length is at most `4 n`.
pub fn apriori_bound(n: usize) -> f64 {
    4.0 * n as f64
}

pub fn apriori_check(n: usize, cell_lengths: &ndarray::Array2<f64>) -> bool {
    let bound = apriori_bound(n);
    cell_lengths.iter().all(|&v| v <= bound)
}

/// Random walk of `steps` segments with steps of at most `max_step` in each
/// coordinate, reflected into the unit square.
pub fn random_polyline<R: rand::Rng + ?Sized>(
    rng: &mut R,
    steps: usize,
    max_step: f64,
) -> Polyline {
    let reflect = |v: f64| {
        let r = v.rem_euclid(2.0);
        if r > 1.0 {
            2.0 - r
        } else {
            r
        }
    };
    let mut p = [rng.random::<f64>(), rng.random::<f64>()];
    let mut pts = vec![p];
    for _ in 0..steps {
        p = [
            reflect(p[0] + rng.random_range(-max_step..=max_step)),
            reflect(p[1] + rng.random_range(-max_step..=max_step)),
        ];
        pts.push(p);
    }
    Polyline::new(pts).expect("reflected into the unit square")
}
