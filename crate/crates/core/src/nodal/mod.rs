//! Zero sets of sampled fields: extraction, length accounting, plotting.
//!
//! The pipeline is grid evaluation, marching squares, Newton polishing of the
//! edge crossings, Hermite refinement of each segment, and attribution of
//! segments to pi-cells. Grid lines are placed on every pi-cell boundary, so
//! each segment lies inside exactly one pi-cell.

mod grid;
mod marching;
mod polish;
mod svg;

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SeparableField;
use crate::trigpoly::TrigPoly;

pub use grid::{aligned_axis, steps_per_cell, GridSpec, Rect};
pub use marching::marching_squares;
pub use polish::{polish_vertices, refine_hermite};
pub use svg::{write_svg, SVG_PX_PER_UNIT};

/// Grid edge a marching-squares vertex was found on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridEdge {
    /// On `y = ys[j]`, between `xs[i]` and `xs[i + 1]`.
    Horizontal { i: usize, j: usize },
    /// On `x = xs[i]`, between `ys[j]` and `ys[j + 1]`.
    Vertical { i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub point: [f64; 2],
    /// Gradient at `point`, filled in by polishing.
    pub grad: Option<[f64; 2]>,
    pub edge: Option<GridEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: usize,
    pub b: usize,
    /// Grid cell `(i, j)`: `[xs[i], xs[i+1]] x [ys[j], ys[j+1]]`.
    pub grid_cell: (usize, usize),
    /// Pi-cell `(k, l)`: `[k c, (k+1) c] x [l c, (l+1) c]` for cell side `c`.
    pub cell: Option<(i64, i64)>,
}

#[derive(Clone, Debug)]
pub struct NodalSet {
    pub vertices: Vec<Vertex>,
    pub segments: Vec<Segment>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Raw grid values at the edge endpoints, needed to bracket polishing.
    values: Array2<f64>,
    cell_size: Option<f64>,
    total_length: f64,
}

impl NodalSet {
    pub(crate) fn from_parts(
        vertices: Vec<Vertex>,
        segments: Vec<Segment>,
        xs: Vec<f64>,
        ys: Vec<f64>,
        values: Array2<f64>,
    ) -> Self {
        let mut ns = Self {
            vertices,
            segments,
            xs,
            ys,
            values,
            cell_size: None,
            total_length: 0.0,
        };
        ns.total_length = ns.recompute_length();
        ns
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn grid_values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn rect(&self) -> Rect {
        Rect {
            x_min: self.xs[0],
            x_max: *self.xs.last().unwrap(),
            y_min: self.ys[0],
            y_max: *self.ys.last().unwrap(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn segment_points(&self, s: &Segment) -> [[f64; 2]; 2] {
        [self.vertices[s.a].point, self.vertices[s.b].point]
    }

    pub fn segment_length(&self, s: &Segment) -> f64 {
        let [p, q] = self.segment_points(s);
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    /// Sum of segment lengths, recomputed with compensated summation.
    pub fn recompute_length(&self) -> f64 {
        neumaier_sum(self.segments.iter().map(|s| self.segment_length(s)))
    }

    pub(crate) fn refresh_length(&mut self) {
        self.total_length = self.recompute_length();
    }

    pub fn cell_size(&self) -> Option<f64> {
        self.cell_size
    }

    /// Attribute every segment to the pi-cell containing its midpoint. Since
    /// grid lines include every cell boundary, this is the pi-cell containing
    /// the segment's grid cell, which is what is computed.
    pub fn attribute_cells(&mut self, cell_size: f64) {
        let cx: Vec<i64> = self
            .xs
            .windows(2)
            .map(|w| (0.5 * (w[0] + w[1]) / cell_size).floor() as i64)
            .collect();
        let cy: Vec<i64> = self
            .ys
            .windows(2)
            .map(|w| (0.5 * (w[0] + w[1]) / cell_size).floor() as i64)
            .collect();
        for s in &mut self.segments {
            s.cell = Some((cx[s.grid_cell.0], cy[s.grid_cell.1]));
        }
        self.cell_size = Some(cell_size);
    }

    /// Length per pi-cell, keyed by `(k, l)`; cells without nodal set are absent.
    pub fn cell_lengths(&self) -> BTreeMap<(i64, i64), f64> {
        let mut out = BTreeMap::new();
        if let Some(((k0, l0), m)) = self.cell_length_matrix() {
            for ((a, b), &v) in m.indexed_iter() {
                if v > 0.0 {
                    out.insert((k0 + a as i64, l0 + b as i64), v);
                }
            }
        }
        out
    }

    /// Dense `K x L` matrix of lengths over the pi-cells met by the grid,
    /// with the `(k, l)` of entry `[0, 0]`.
    pub fn cell_length_matrix(&self) -> Option<((i64, i64), Array2<f64>)> {
        let c = self.cell_size?;
        let r = self.rect();
        let k0 = (r.x_min / c).floor() as i64;
        let l0 = (r.y_min / c).floor() as i64;
        let k1 = ((r.x_max / c).ceil() as i64 - 1).max(k0);
        let l1 = ((r.y_max / c).ceil() as i64 - 1).max(l0);
        let mut m = Array2::zeros(((k1 - k0 + 1) as usize, (l1 - l0 + 1) as usize));
        for s in &self.segments {
            if let Some((k, l)) = s.cell {
                m[[(k - k0) as usize, (l - l0) as usize]] += self.segment_length(s);
            }
        }
        Some(((k0, l0), m))
    }

    pub fn max_cell_length(&self) -> f64 {
        self.cell_length_matrix()
            .map(|(_, m)| m.iter().copied().fold(0.0, f64::max))
            .unwrap_or(0.0)
    }

    /// Chain segments into polylines. Open chains come first, in order of
    /// their lowest segment index, then closed loops.
    pub fn polylines(&self) -> Vec<Vec<[f64; 2]>> {
        self.chain(|_| true)
    }

    /// Polylines of one pi-cell, mapped affinely onto the unit square.
    pub fn cell_polylines(&self, k: i64, l: i64) -> Result<Vec<Vec<[f64; 2]>>> {
        let c = self
            .cell_size
            .ok_or_else(|| Error::InvalidArgument("nodal set has no cell attribution".into()))?;
        let (x0, y0) = (k as f64 * c, l as f64 * c);
        Ok(self
            .chain(|s| s.cell == Some((k, l)))
            .into_iter()
            .map(|pl| {
                pl.into_iter()
                    .map(|[x, y]| {
                        [
                            ((x - x0) / c).clamp(0.0, 1.0),
                            ((y - y0) / c).clamp(0.0, 1.0),
                        ]
                    })
                    .collect()
            })
            .collect())
    }

    fn chain(&self, keep: impl Fn(&Segment) -> bool) -> Vec<Vec<[f64; 2]>> {
        let nv = self.vertices.len();
        let mut adj: Vec<[usize; 2]> = vec![[usize::MAX; 2]; nv];
        let mut degree = vec![0u8; nv];
        let chosen: Vec<usize> = (0..self.segments.len())
            .filter(|&i| keep(&self.segments[i]))
            .collect();
        let mut attach = |v: usize, s: usize| {
            if (degree[v] as usize) < 2 {
                adj[v][degree[v] as usize] = s;
            }
            degree[v] = degree[v].saturating_add(1);
        };
        for &si in &chosen {
            let s = self.segments[si];
            attach(s.a, si);
            attach(s.b, si);
        }
        let mut used = vec![false; self.segments.len()];
        let mut out = Vec::new();
        let walk = |start_vertex: usize, first: usize, used: &mut Vec<bool>| {
            let mut line = vec![self.vertices[start_vertex].point];
            let (mut v, mut s) = (start_vertex, first);
            loop {
                used[s] = true;
                let seg = self.segments[s];
                let next = if seg.a == v { seg.b } else { seg.a };
                line.push(self.vertices[next].point);
                v = next;
                if degree[v] != 2 {
                    break;
                }
                let cand = if adj[v][0] == s { adj[v][1] } else { adj[v][0] };
                if used[cand] {
                    break;
                }
                s = cand;
            }
            line
        };
        for pass_open in [true, false] {
            for &si in &chosen {
                if used[si] {
                    continue;
                }
                let s = self.segments[si];
                let start = if !pass_open || degree[s.a] != 2 {
                    s.a
                } else if degree[s.b] != 2 {
                    s.b
                } else {
                    continue;
                };
                out.push(walk(start, si, &mut used));
            }
        }
        out
    }
}

/// Extraction options after marching squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtractOptions {
    /// Newton iterations per vertex; 0 disables polishing.
    pub polish_iters: usize,
    /// Interior points inserted per segment by Hermite refinement; 0 disables it.
    pub hermite_points: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            polish_iters: 8,
            hermite_points: 3,
        }
    }
}

impl ExtractOptions {
    pub const RAW: ExtractOptions = ExtractOptions {
        polish_iters: 0,
        hermite_points: 0,
    };
}

/// Zero set of a separable field on explicit grid axes, attributed to
/// pi-cells of side `cell_size`.
pub fn extract(
    field: &SeparableField<'_>,
    xs: &[f64],
    ys: &[f64],
    cell_size: f64,
    opts: ExtractOptions,
) -> Result<NodalSet> {
    check_axis(xs)?;
    check_axis(ys)?;
    let (values, h, v) = field.eval_grid_with_lines(xs, ys)?;
    let mut ns = marching_squares(values, xs, ys)?;
    if opts.polish_iters > 0 {
        polish::polish_with_tables(field, &h, &v, &mut ns, opts.polish_iters);
    }
    if opts.hermite_points > 0 {
        refine_hermite(&mut ns, opts.hermite_points);
    }
    ns.attribute_cells(cell_size);
    Ok(ns)
}

/// Nodal set of `p` over `spec.rect` in `spec.coordinates`, with default
/// polishing and refinement.
pub fn nodal_length(p: &TrigPoly, spec: &GridSpec) -> Result<NodalSet> {
    nodal_length_with(p, spec, ExtractOptions::default())
}

pub fn nodal_length_with(p: &TrigPoly, spec: &GridSpec, opts: ExtractOptions) -> Result<NodalSet> {
    spec.validate()?;
    let n = p.degree();
    let (xs, ys) = spec.axes(n);
    extract(
        &p.field(spec.coordinates),
        &xs,
        &ys,
        spec.coordinates.cell_size(n),
        opts,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// `(step, length)` per refinement level.
    pub levels: Vec<(f64, f64)>,
    /// `|L(h) - L(h/2)|` for consecutive levels.
    pub increments: Vec<f64>,
}

/// Lengths under successive grid halvings.
pub fn length_convergence_check(
    p: &TrigPoly,
    spec: &GridSpec,
    steps: &[f64],
    opts: ExtractOptions,
) -> Result<ConvergenceReport> {
    if steps.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three grid steps".into(),
        ));
    }
    for w in steps.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(
                "each grid step must halve the previous one".into(),
            ));
        }
    }
    let mut levels = Vec::with_capacity(steps.len());
    for &h in steps {
        let s = GridSpec::new(spec.rect, 1.0 / h, spec.coordinates)?;
        levels.push((h, nodal_length_with(p, &s, opts)?.total_length()));
    }
    let increments = levels.windows(2).map(|w| (w[0].1 - w[1].1).abs()).collect();
    Ok(ConvergenceReport { levels, increments })
}

fn check_axis(ts: &[f64]) -> Result<()> {
    if ts.len() < 2 {
        return Err(Error::EmptyGrid);
    }
    if ts
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::GridNotIncreasing);
    }
    Ok(())
}

pub(crate) fn neumaier_sum(it: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in it {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
