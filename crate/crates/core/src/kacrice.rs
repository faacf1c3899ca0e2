//! Exact expected nodal length for Gaussian coefficients.
//!
//! With i.i.d. standard Gaussian coefficients, `(f_n, d_x f_n, d_y f_n)` at a
//! point is a centered Gaussian vector whose covariance factors through the
//! one-dimensional sums
//!
//! ```text
//! A_n(x) = sum_k cos^2(kx),   B_n(x) = sum_k k sin(kx) cos(kx),   C_n(x) = sum_k k^2 sin^2(kx).
//! ```
//!
//! Given `f_n = 0` the two partial derivatives are independent, so the
//! Kac-Rice density is a Gaussian density at zero times the mean norm of a
//! diagonal Gaussian vector.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nodal::{neumaier_sum, Rect};
use crate::quad;

/// Closed forms are refused within this distance of a multiple of pi.
pub const SINGULAR_GUARD: f64 = 1e-4;
/// Residual allowed in `S11 S23 - S12 S13 = 0`, relative to the larger product.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Depth cap of the adaptive panel recursion.
pub const MAX_DEPTH: u32 = 20;

/// Below this `|x|` the function `csc x - 1/x` and its derivatives come from
/// their Taylor series.
const TAYLOR_RADIUS: f64 = 0.5;
/// Odd Taylor coefficients of `csc x - 1/x`: `sum_j F[j] x^(2j+1)`.
const CSC_TAYLOR: [f64; 12] = [
    0.16666666666666666,
    0.019444444444444445,
    0.00205026455026455,
    0.0002099867724867725,
    2.1336045641601196e-05,
    2.1633474427786596e-06,
    2.192327134456764e-07,
    2.2213930853920414e-08,
    2.2507674795567867e-09,
    2.280510770721821e-10,
    2.3106421580996967e-11,
    2.3411704028931947e-12,
];
/// Below this `|z|` the `z^-k` combinations in `h_0` and `k_0` use series.
const SERIES_Z: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumsAbc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `A_n, B_n, C_n` by direct summation.
///
/// The argument `k x` is carried as an exact two-term sum and the three sums
/// are compensated, so the result stays accurate for large `n`.
pub fn sums_direct(n: usize, x: f64) -> SumsAbc {
    let mut acc = [Compensated::default(); 3];
    for k in 1..=n {
        let kf = k as f64;
        let (s, co) = sin_cos_product(kf, x);
        acc[0].add(co * co);
        acc[1].add(kf * s * co);
        acc[2].add(kf * kf * s * s);
    }
    SumsAbc {
        a: acc[0].value(),
        b: acc[1].value(),
        c: acc[2].value(),
    }
}

/// `sin(a b)` and `cos(a b)` with the rounding error of the product `a b`
/// folded back in to first order.
fn sin_cos_product(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    let (s, c) = hi.sin_cos();
    (s + lo * c, c - lo * s)
}

#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Distance from `x` to the nearest multiple of pi.
pub fn dist_to_pi_lattice(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    r.min(PI - r)
}

/// `A_n, B_n, C_n` in closed form with `N = 2n + 1`, `z = N x` and
/// `f(x) = csc x - 1/x`:
///
/// ```text
///  4 A = N g0 + g1
///  8 B = N^2 h0 + N h1 + h2
/// 48 C = N^3 k0 + N^2 k1 + N k2 + k3
/// ```
///
/// The sums are pi-periodic, `A` and `C` are even and `B` is odd, so `x` is
/// first reduced to `(0, pi/2]`.
pub fn sums_closed(n: usize, x: f64) -> Result<SumsAbc> {
    if dist_to_pi_lattice(x) < SINGULAR_GUARD || !x.is_finite() {
        return Err(Error::ClosedFormSingular);
    }
    let r = x.rem_euclid(PI);
    let (x, sign) = if r > 0.5 * PI {
        (PI - r, -1.0)
    } else {
        (r, 1.0)
    };
    let nn = (2 * n + 1) as f64;
    let z = nn * x;
    let (sz, cz) = sin_cos_product(nn, x);
    let (f0, f1, f2) = csc_minus_inv(x);

    let g0 = 1.0 + sz / z;
    let g1 = -2.0 + f0 * sz;
    let (h0, k0) = if z.abs() < SERIES_Z {
        h0_k0_series(z)
    } else {
        let (z2, z3) = (z * z, z * z * z);
        (
            -cz / z + sz / z2,
            1.0 - 3.0 * sz / z - 6.0 * cz / z2 + 6.0 * sz / z3,
        )
    };
    let h1 = -f0 * cz;
    let h2 = -f1 * sz;
    let k1 = -3.0 * f0 * sz;
    let k2 = 6.0 * f1 * cz - 1.0;
    let k3 = 3.0 * f2 * sz;

    let a = (nn * g0 + g1) / 4.0;
    let b = ((nn * nn * h0 + nn * h1) + h2) / 8.0;
    let c = (((nn * nn * nn * k0 + nn * nn * k1) + nn * k2) + k3) / 48.0;
    Ok(SumsAbc { a, b: sign * b, c })
}

/// Closed form away from the pi-lattice, direct sums inside the guard band.
pub fn sums(n: usize, x: f64) -> SumsAbc {
    sums_closed(n, x).unwrap_or_else(|_| sums_direct(n, x))
}

/// `f(x) = csc x - 1/x` with `f'` and `f''`.
fn csc_minus_inv(x: f64) -> (f64, f64, f64) {
    if x.abs() < TAYLOR_RADIUS {
        let x2 = x * x;
        let (mut f, mut d1, mut d2) = (0.0, 0.0, 0.0);
        // Horner in x^2; with p = 2j + 1 the three series are
        // sum c x^p, sum p c x^(p-1) and sum p (p-1) c x^(p-2).
        for (j, &c) in CSC_TAYLOR.iter().enumerate().rev() {
            let p = (2 * j + 1) as f64;
            f = f * x2 + c;
            d1 = d1 * x2 + c * p;
            if j > 0 {
                d2 = d2 * x2 + c * p * (p - 1.0);
            }
        }
        (x * f, d1, x * d2)
    } else {
        let (s, c) = x.sin_cos();
        let csc = 1.0 / s;
        let cot = c / s;
        (
            csc - 1.0 / x,
            -csc * cot + 1.0 / (x * x),
            csc * (cot * cot + csc * csc) - 2.0 / (x * x * x),
        )
    }
}

/// Series for `h0 = -cos z / z + sin z / z^2` and
/// `k0 = 1 - 3 sin z / z - 6 cos z / z^2 + 6 sin z / z^3` near zero.
fn h0_k0_series(z: f64) -> (f64, f64) {
    let z2 = z * z;
    let (mut h0, mut k0) = (0.0, 0.0);
    // term m of h0: (-1)^(m+1) 2m / (2m+1)! z^(2m-1)
    // term m of k0: (-1)^m (-3/(2m+1)! + 6/(2m+2)! - 6/(2m+3)!) z^(2m)
    let mut fact = 6.0; // (2m+1)! at m = 1
    let mut zp = z; // z^(2m-1)
    for m in 1..=12 {
        let mf = m as f64;
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let f2 = fact * (2.0 * mf + 2.0);
        let f3 = f2 * (2.0 * mf + 3.0);
        h0 += sign * 2.0 * mf / fact * zp;
        k0 -= sign * (-3.0 / fact + 6.0 / f2 - 6.0 / f3) * zp * z;
        fact = f3;
        zp *= z2;
    }
    (h0, k0)
}

/// Covariance of `(f_n, d_x f_n, d_y f_n)` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaMatrix(pub [[f64; 3]; 3]);

impl SigmaMatrix {
    pub fn from_sums(sx: SumsAbc, sy: SumsAbc) -> Self {
        let s11 = sx.a * sy.a;
        let s22 = sx.c * sy.a;
        let s33 = sx.a * sy.c;
        let s12 = -sx.b * sy.a;
        let s13 = -sx.a * sy.b;
        let s23 = sx.b * sy.b;
        Self([[s11, s12, s13], [s12, s22, s23], [s13, s23, s33]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Eigenvalues in increasing order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut a = self.0;
        for _ in 0..50 {
            let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
            let diag = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
            if off <= f64::EPSILON * 1e-3 * diag || off == 0.0 {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut b = a;
                for k in 0..3 {
                    b[k][p] = c * a[k][p] - s * a[k][q];
                    b[k][q] = s * a[k][p] + c * a[k][q];
                }
                a = b;
                for k in 0..3 {
                    b[p][k] = c * a[p][k] - s * a[q][k];
                    b[q][k] = s * a[p][k] + c * a[q][k];
                }
                a = b;
            }
        }
        let mut e = [a[0][0], a[1][1], a[2][2]];
        e.sort_by(f64::total_cmp);
        e
    }

    /// `S11 S23 - S12 S13`, which vanishes identically for this model.
    pub fn identity_residual(&self) -> f64 {
        let a = &self.0;
        a[0][0] * a[1][2] - a[0][1] * a[0][2]
    }

    /// [`identity_residual`](Self::identity_residual) relative to the larger
    /// of its two products (0 when both vanish).
    pub fn identity_relative(&self) -> f64 {
        let a = &self.0;
        let scale = (a[0][0] * a[1][2]).abs().max((a[0][1] * a[0][2]).abs());
        if scale == 0.0 {
            0.0
        } else {
            self.identity_residual().abs() / scale
        }
    }
}

/// Covariance at `(x, y)` in `f_n` coordinates.
pub fn sigma(n: usize, x: f64, y: f64) -> SigmaMatrix {
    SigmaMatrix::from_sums(sums(n, x), sums(n, y))
}

/// Conditional variances `(vx, vy)` of the gradient given `f_n = 0`.
pub fn conditional_grad_cov(s: &SigmaMatrix) -> Result<(f64, f64)> {
    let a = &s.0;
    let s11 = a[0][0];
    if s11.is_nan() || s11 <= 0.0 {
        return Err(Error::DegenerateMarginal);
    }
    let rel = s.identity_relative();
    if rel > IDENTITY_TOL {
        return Err(Error::IdentityViolated(rel));
    }
    Ok((schur(s11, a[1][1], a[0][1]), schur(s11, a[2][2], a[0][2])))
}

/// `(s11 s22 - s12^2) / s11`, set to zero when the difference is at the
/// rounding level of its terms.
fn schur(s11: f64, s22: f64, s12: f64) -> f64 {
    let (p, q) = (s11 * s22, s12 * s12);
    let d = p - q;
    if d.abs() <= 8.0 * f64::EPSILON * p.abs().max(q) {
        0.0
    } else {
        d / s11
    }
}

/// `E sqrt(a^2 Z1^2 + b^2 Z2^2)` for independent standard normals, from
///
/// ```text
/// sqrt(2/pi) * int_0^{pi/2} sqrt(a^2 cos^2 t + b^2 sin^2 t) dt.
/// ```
pub fn mean_norm_2d(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == 0.0 {
        return 0.0;
    }
    if lo == hi {
        return hi * (0.5 * PI).sqrt();
    }
    let r2 = (lo / hi) * (lo / hi);
    let (v, _) = quad::integrate_1d(
        |t| {
            let (s, c) = t.sin_cos();
            (c * c + r2 * s * s).sqrt()
        },
        0.0,
        0.5 * PI,
        1e-14,
        1e-15,
        30,
    );
    hi * (2.0 / PI).sqrt() * v
}

/// Kac-Rice density of nodal length at `(x, y)` in `f_n` coordinates.
pub fn kacrice_integrand(n: usize, x: f64, y: f64) -> Result<f64> {
    let s = sigma(n, x, y);
    let (vx, vy) = conditional_grad_cov(&s)?;
    let (vx, vy) = (vx.max(0.0), vy.max(0.0));
    Ok(mean_norm_2d(vx.sqrt(), vy.sqrt()) / (2.0 * PI * s.get(0, 0)).sqrt())
}

/// `(2n + 1) pi^2 / (4 sqrt 3)`, the large-`n` equivalent of the expected
/// length on `[0, pi]^2`.
pub fn asymptotic_expected_length(n: usize) -> f64 {
    (2 * n + 1) as f64 * PI * PI / (4.0 * 3f64.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedLength {
    pub value: f64,
    /// Estimated relative error.
    pub achieved: f64,
    pub panels: usize,
}

/// Expected nodal length of `f_n` over `rect`, a subset of `[0, pi]^2`.
///
/// For `n = 1` the field is `a cos x cos y` whose zero set does not depend on
/// `a`; the Kac-Rice density degenerates to a line measure on the zero set of
/// `cos x cos y`, so the exact length of that set is returned.
pub fn expected_length(n: usize, rect: &Rect, rel_tol: f64) -> Result<ExpectedLength> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    rect.validate()?;
    let eps = 1e-12;
    if rect.x_min < -eps || rect.y_min < -eps || rect.x_max > PI + eps || rect.y_max > PI + eps {
        return Err(Error::InvalidArgument(format!(
            "rectangle must lie in [0, pi]^2, got [{}, {}] x [{}, {}]",
            rect.x_min, rect.x_max, rect.y_min, rect.y_max
        )));
    }
    if !(rel_tol > 1e-10 && rel_tol < 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in (1e-10, 1e-2), got {rel_tol}"
        )));
    }
    if n == 1 {
        return Ok(ExpectedLength {
            value: cross_length(rect),
            achieved: 0.0,
            panels: 0,
        });
    }
    let mut failure = None;
    let r = quad::integrate_2d(
        |x, y| match kacrice_integrand(n, x, y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        (rect.x_min, rect.x_max),
        (rect.y_min, rect.y_max),
        rel_tol,
        MAX_DEPTH,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let achieved = if r.value == 0.0 {
        0.0
    } else {
        r.error / r.value.abs()
    };
    if !r.converged {
        return Err(Error::QuadratureDepth {
            estimate: r.value,
            achieved,
        });
    }
    Ok(ExpectedLength {
        value: r.value,
        achieved,
        panels: r.panels,
    })
}

/// Length of `{cos x cos y = 0}` inside `rect`.
fn cross_length(rect: &Rect) -> f64 {
    let lines = |lo: f64, hi: f64| {
        let first = ((lo - 0.5 * PI) / PI).ceil() as i64;
        let last = ((hi - 0.5 * PI) / PI).floor() as i64;
        (last - first + 1).max(0) as f64
    };
    let vertical = lines(rect.x_min, rect.x_max) * rect.height();
    let horizontal = lines(rect.y_min, rect.y_max) * rect.width();
    neumaier_sum([vertical, horizontal])
}
