//! Gauss-Legendre rules and adaptive integration in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::nodal::neumaier_sum;

/// Points per axis of the panel rule.
pub const PANEL_POINTS: usize = 15;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

fn rule_1d(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl15();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// Adaptive bisection with the 15-point rule: an interval is accepted when
/// its two halves agree with the whole to `max(abs_tol, rel_tol * |value|)`.
/// Returns the value and the summed error estimate.
pub fn integrate_1d(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> (f64, f64) {
    let whole = rule_1d(&mut f, a, b);
    let mut parts = Vec::new();
    let mut err = 0.0;
    bisect_1d(
        &mut f, a, b, whole, rel_tol, abs_tol, max_depth, &mut parts, &mut err,
    );
    (neumaier_sum(parts), err)
}

#[allow(clippy::too_many_arguments)]
fn bisect_1d(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    parts: &mut Vec<f64>,
    err: &mut f64,
) {
    let m = 0.5 * (a + b);
    let left = rule_1d(f, a, m);
    let right = rule_1d(f, m, b);
    let fine = left + right;
    let diff = (fine - whole).abs();
    if depth == 0 || diff <= abs_tol.max(rel_tol * fine.abs()) {
        parts.push(fine);
        *err += diff;
        return;
    }
    bisect_1d(f, a, m, left, rel_tol, abs_tol * 0.5, depth - 1, parts, err);
    bisect_1d(
        f,
        m,
        b,
        right,
        rel_tol,
        abs_tol * 0.5,
        depth - 1,
        parts,
        err,
    );
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral2d {
    pub value: f64,
    /// Sum of panel error estimates.
    pub error: f64,
    pub panels: usize,
    /// False if a panel at the depth cap still needed refinement.
    pub converged: bool,
}

struct Panel {
    x: (f64, f64),
    y: (f64, f64),
    depth: u32,
    /// Tensor-rule value on each quadrant.
    quads: [f64; 4],
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.x.0.total_cmp(&self.x.0))
            .then(other.y.0.total_cmp(&self.y.0))
    }
}

fn rule_2d(f: &mut impl FnMut(f64, f64) -> f64, x: (f64, f64), y: (f64, f64)) -> f64 {
    let (nodes, weights) = gl15();
    let (mx, hx) = (0.5 * (x.0 + x.1), 0.5 * (x.1 - x.0));
    let (my, hy) = (0.5 * (y.0 + y.1), 0.5 * (y.1 - y.0));
    let mut s = 0.0;
    for (u, wu) in nodes.iter().zip(weights) {
        let px = mx + hx * u;
        let mut row = 0.0;
        for (v, wv) in nodes.iter().zip(weights) {
            row += wv * f(px, my + hy * v);
        }
        s += wu * row;
    }
    s * hx * hy
}

fn quadrants(x: (f64, f64), y: (f64, f64)) -> [((f64, f64), (f64, f64)); 4] {
    let (xm, ym) = (0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1));
    [
        ((x.0, xm), (y.0, ym)),
        ((xm, x.1), (y.0, ym)),
        ((x.0, xm), (ym, y.1)),
        ((xm, x.1), (ym, y.1)),
    ]
}

fn make_panel(
    f: &mut impl FnMut(f64, f64) -> f64,
    x: (f64, f64),
    y: (f64, f64),
    depth: u32,
    coarse: f64,
) -> Panel {
    let q = quadrants(x, y);
    let quads = q.map(|(qx, qy)| rule_2d(f, qx, qy));
    let value = (quads[0] + quads[1]) + (quads[2] + quads[3]);
    Panel {
        x,
        y,
        depth,
        quads,
        value,
        error: (value - coarse).abs(),
    }
}

/// Globally adaptive tensor Gauss quadrature over `x x y`.
///
/// Each panel is estimated by the 15x15 rule on its four quadrants, with the
/// error taken as the difference to the rule on the whole panel. The panel
/// with the largest error is bisected in both directions until the summed
/// error drops below `rel_tol * |value|` or that panel sits at `max_depth`.
pub fn integrate_2d(
    mut f: impl FnMut(f64, f64) -> f64,
    x: (f64, f64),
    y: (f64, f64),
    rel_tol: f64,
    max_depth: u32,
) -> Integral2d {
    let coarse = rule_2d(&mut f, x, y);
    let mut heap = BinaryHeap::new();
    heap.push(make_panel(&mut f, x, y, 0, coarse));
    let mut converged = true;
    loop {
        let value = neumaier_sum(heap.iter().map(|p| p.value));
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= rel_tol * value.abs() {
            break;
        }
        let worst = heap.peek().expect("at least one panel");
        if worst.depth >= max_depth {
            converged = false;
            break;
        }
        let p = heap.pop().expect("at least one panel");
        for ((qx, qy), coarse) in quadrants(p.x, p.y).into_iter().zip(p.quads) {
            heap.push(make_panel(&mut f, qx, qy, p.depth + 1, coarse));
        }
    }
    // Sum in a fixed spatial order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.y.0.total_cmp(&b.y.0).then(a.x.0.total_cmp(&b.x.0)));
    Integral2d {
        value: neumaier_sum(panels.iter().map(|p| p.value)),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
        converged,
    }
}
