use super::{GridEdge, NodalSet, Segment, Vertex};
use crate::field::{LineTable, SeparableField};

/// Below this gradient (or edge-derivative) magnitude a vertex is left alone.
const MIN_SLOPE: f64 = 1e-8;
/// Residual at which Newton stops.
const RESIDUAL_TOL: f64 = 1e-14;
/// Relative Newton step below which the root is considered converged.
const STEP_TOL: f64 = 1e-13;
/// Tangents further than this from the chord (cosine of 60 degrees) disable
/// Hermite refinement of a segment.
const MIN_TANGENT_COS: f64 = 0.5;

/// Newton-polish every vertex onto the zero set of `field`.
///
/// Vertices found on a grid edge are moved along that edge, keeping them on
/// the grid line, with the edge itself as a bisection bracket. Other vertices
/// move along the gradient by at most one grid step. A step is kept only if
/// it reduces `|F|`. Gradients are recorded for later refinement.
pub fn polish_vertices(field: &SeparableField<'_>, ns: &NodalSet, max_iter: usize) -> NodalSet {
    let h = field.horizontal_lines(ns.ys());
    let v = field.vertical_lines(ns.xs());
    let mut out = ns.clone();
    polish_with_tables(field, &h, &v, &mut out, max_iter);
    out
}

pub(crate) fn polish_with_tables(
    field: &SeparableField<'_>,
    h: &LineTable,
    v: &LineTable,
    ns: &mut NodalSet,
    max_iter: usize,
) {
    let step = grid_step(ns);
    let (xs, ys) = (ns.xs.clone(), ns.ys.clone());
    for k in 0..ns.vertices.len() {
        let vert = ns.vertices[k].clone();
        let polished = match vert.edge {
            Some(GridEdge::Horizontal { i, j }) => {
                let line = EdgeLine {
                    basis: &field.x_basis,
                    table: h,
                    line: j,
                    scale: field.scale,
                };
                let (t, along, across) = line.newton(
                    vert.point[0],
                    (xs[i], xs[i + 1]),
                    ns.values[[i, j]],
                    max_iter,
                );
                Vertex {
                    point: [t, ys[j]],
                    grad: Some([along, across]),
                    edge: vert.edge,
                }
            }
            Some(GridEdge::Vertical { i, j }) => {
                let line = EdgeLine {
                    basis: &field.y_basis,
                    table: v,
                    line: i,
                    scale: field.scale,
                };
                let (t, along, across) = line.newton(
                    vert.point[1],
                    (ys[j], ys[j + 1]),
                    ns.values[[i, j]],
                    max_iter,
                );
                Vertex {
                    point: [xs[i], t],
                    grad: Some([across, along]),
                    edge: vert.edge,
                }
            }
            None => gradient_newton(field, &vert, step, max_iter),
        };
        ns.vertices[k] = polished;
    }
    ns.refresh_length();
}

fn grid_step(ns: &NodalSet) -> f64 {
    let dx = ns.xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let dy = ns.ys.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    dx.max(dy)
}

struct EdgeLine<'a> {
    basis: &'a crate::field::AxisBasis,
    table: &'a LineTable,
    line: usize,
    scale: f64,
}

impl EdgeLine<'_> {
    /// Value, along-line and across-line derivative at `t`.
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (v, d, x) = self.table.eval(self.basis, self.line, t);
        (self.scale * v, self.scale * d, self.scale * x)
    }

    /// Safeguarded Newton on `[lo, hi]`; `f_lo` is the grid value at `lo`.
    fn newton(&self, t0: f64, (lo, hi): (f64, f64), f_lo: f64, max_iter: usize) -> (f64, f64, f64) {
        let (mut t, mut f, mut df, mut cross) = {
            let (f, df, c) = self.eval(t0);
            (t0, f, df, c)
        };
        let lo_positive = f_lo >= 0.0;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..max_iter {
            if f.abs() <= RESIDUAL_TOL || df.abs() < MIN_SLOPE {
                break;
            }
            let mut tn = t - f / df;
            if (tn - t).abs() <= STEP_TOL * t.abs().max(1.0) {
                break;
            }
            let newton = tn > a && tn < b;
            if !newton {
                tn = 0.5 * (a + b);
            }
            let (fn_, dfn, cn) = self.eval(tn);
            if (fn_ >= 0.0) == lo_positive {
                a = tn;
            } else {
                b = tn;
            }
            if fn_.abs() < f.abs() {
                (t, f, df, cross) = (tn, fn_, dfn, cn);
            } else if newton {
                // Rounding floor reached.
                break;
            }
        }
        (t, df, cross)
    }
}

fn gradient_newton(field: &SeparableField<'_>, v: &Vertex, step: f64, max_iter: usize) -> Vertex {
    let p0 = v.point;
    let (mut f, mut g) = field.eval_with_grad(p0[0], p0[1]);
    let g0 = g;
    let gn2 = g0[0] * g0[0] + g0[1] * g0[1];
    if gn2.sqrt() < MIN_SLOPE {
        return Vertex {
            point: p0,
            grad: Some(g),
            edge: None,
        };
    }
    // Search along p0 + s * g0 with |s * g0| <= step.
    let s_max = step / gn2.sqrt();
    let mut s = 0.0;
    let mut p = p0;
    for _ in 0..max_iter {
        if f.abs() <= RESIDUAL_TOL {
            break;
        }
        let slope = g[0] * g0[0] + g[1] * g0[1];
        if slope.abs() < MIN_SLOPE * gn2.sqrt() {
            break;
        }
        let sn = (s - f / slope).clamp(-s_max, s_max);
        let q = [p0[0] + sn * g0[0], p0[1] + sn * g0[1]];
        let (fq, gq) = field.eval_with_grad(q[0], q[1]);
        if fq.abs() < f.abs() {
            (s, p, f, g) = (sn, q, fq, gq);
        } else {
            break;
        }
    }
    Vertex {
        point: p,
        grad: Some(g),
        edge: None,
    }
}

/// Replace every segment whose endpoint gradients are known by the cubic
/// Hermite curve matching the endpoint tangents, sampled at `points` interior
/// parameters. Interior points are clamped to the segment's grid cell.
/// Segments with a tangent more than 60 degrees off the chord are kept as is.
pub fn refine_hermite(ns: &mut NodalSet, points: usize) {
    if points == 0 {
        return;
    }
    let old = std::mem::take(&mut ns.segments);
    let mut segments = Vec::with_capacity(old.len() * (points + 1));
    ns.vertices.reserve(old.len() * points);
    let mut interior = Vec::with_capacity(points);
    for s in old {
        if hermite_points(ns, &s, points, &mut interior) {
            let mut prev = s.a;
            for &q in &interior {
                let idx = ns.vertices.len();
                ns.vertices.push(Vertex {
                    point: q,
                    grad: None,
                    edge: None,
                });
                segments.push(Segment {
                    a: prev,
                    b: idx,
                    ..s
                });
                prev = idx;
            }
            segments.push(Segment {
                a: prev,
                b: s.b,
                ..s
            });
        } else {
            segments.push(s);
        }
    }
    ns.segments = segments;
    ns.refresh_length();
}

fn hermite_points(ns: &NodalSet, s: &Segment, points: usize, out: &mut Vec<[f64; 2]>) -> bool {
    out.clear();
    let va = &ns.vertices[s.a];
    let vb = &ns.vertices[s.b];
    let (Some(ga), Some(gb)) = (va.grad, vb.grad) else {
        return false;
    };
    let (p0, p1) = (va.point, vb.point);
    let d = [p1[0] - p0[0], p1[1] - p0[1]];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return false;
    }
    let (Some(t0), Some(t1)) = (tangent(ga, d, len), tangent(gb, d, len)) else {
        return false;
    };
    let (i, j) = s.grid_cell;
    let (x_lo, x_hi) = (ns.xs[i], ns.xs[i + 1]);
    let (y_lo, y_hi) = (ns.ys[j], ns.ys[j + 1]);
    out.extend((1..=points).map(|m| {
        let u = m as f64 / (points + 1) as f64;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let x = h00 * p0[0] + h10 * len * t0[0] + h01 * p1[0] + h11 * len * t1[0];
        let y = h00 * p0[1] + h10 * len * t0[1] + h01 * p1[1] + h11 * len * t1[1];
        [x.clamp(x_lo, x_hi), y.clamp(y_lo, y_hi)]
    }));
    true
}

/// Unit tangent of the level curve, oriented along the chord `d`.
fn tangent(g: [f64; 2], d: [f64; 2], len: f64) -> Option<[f64; 2]> {
    let gn = g[0].hypot(g[1]);
    if gn < MIN_SLOPE {
        return None;
    }
    let mut t = [-g[1] / gn, g[0] / gn];
    let mut c = (t[0] * d[0] + t[1] * d[1]) / len;
    if c < 0.0 {
        t = [-t[0], -t[1]];
        c = -c;
    }
    (c >= MIN_TANGENT_COS).then_some(t)
}
