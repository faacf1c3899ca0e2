//! Bivariate cosine polynomials
//!
//! ```text
//! f_n(x, y) = sum_{1 <= k, l <= n} a[k, l] cos(k x) cos(l y)
//! F_n(x, y) = f_n(x / n, y / n) / n
//! ```
//!
//! The math indexes coefficients from 1; storage is 0-based, so `coeffs[[k - 1, l - 1]]`
//! multiplies `cos(k x) cos(l y)`.

use std::ops::{Add, Mul};

use ndarray::{Array2, ArrayView1, CowArray};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dot, AxisBasis, SeparableField};

/// Which parametrisation of the polynomial a domain refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinates {
    /// `f_n`, highest frequency `n`; a pi-cell has side `pi / n`.
    Raw,
    /// `F_n`, frequencies in `(0, 1]`; a pi-cell has side `pi`.
    #[default]
    Rescaled,
}

impl Coordinates {
    /// Side of a pi-cell (the unit of local length accounting) for degree `n`.
    pub fn cell_size(self, n: usize) -> f64 {
        match self {
            Coordinates::Raw => std::f64::consts::PI / n as f64,
            Coordinates::Rescaled => std::f64::consts::PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    coeffs: Array2<f64>,
}

impl TrigPoly {
    pub fn new(coeffs: Array2<f64>) -> Result<Self> {
        let (rows, cols) = coeffs.dim();
        if rows == 0 && cols == 0 {
            return Err(Error::ZeroDegree);
        }
        if rows != cols {
            return Err(Error::CoeffShape { rows, cols });
        }
        if let Some(((row, col), _)) = coeffs.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCoeff { row, col });
        }
        Ok(Self { coeffs })
    }

    /// Build from a function of the 1-based indices `(k, l)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| f(i + 1, j + 1)))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<f64> {
        self.coeffs
    }

    /// `f_n(x, y)` as `c(x)^T A c(y)` with `c(t) = (cos(k t))_k`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.degree();
        let cx: Vec<f64> = (1..=n).map(|k| (k as f64 * x).cos()).collect();
        let cy: Vec<f64> = (1..=n).map(|l| (l as f64 * y).cos()).collect();
        let a_cy = self.coeffs.dot(&ArrayView1::from(&cy[..]));
        dot(&cx, a_cy.as_slice().unwrap())
    }

    /// `F_n(x, y) = f_n(x / n, y / n) / n`.
    pub fn eval_rescaled(&self, x: f64, y: f64) -> f64 {
        let n = self.degree() as f64;
        self.eval(x / n, y / n) / n
    }

    /// Exact partial derivatives of `F_n`.
    pub fn grad_rescaled(&self, x: f64, y: f64) -> (f64, f64) {
        let n = self.degree();
        let nf = n as f64;
        let (xr, yr) = (x / nf, y / nf);
        let mut cx = Vec::with_capacity(n);
        let mut ksx = Vec::with_capacity(n);
        let mut cy = Vec::with_capacity(n);
        let mut lsy = Vec::with_capacity(n);
        for k in 1..=n {
            let kf = k as f64;
            let (s, c) = (kf * xr).sin_cos();
            cx.push(c);
            ksx.push(kf * s);
            let (s, c) = (kf * yr).sin_cos();
            cy.push(c);
            lsy.push(kf * s);
        }
        let a_cy = self.coeffs.dot(&ArrayView1::from(&cy[..]));
        let a_lsy = self.coeffs.dot(&ArrayView1::from(&lsy[..]));
        let n2 = nf * nf;
        let gx = -dot(&ksx, a_cy.as_slice().unwrap()) / n2;
        let gy = -dot(&cx, a_lsy.as_slice().unwrap()) / n2;
        (gx, gy)
    }

    /// Values on the tensor grid `xs x ys` via two cosine matrices and two
    /// matrix products. `out[[i, j]]` is the value at `(xs[i], ys[j])`.
    pub fn eval_grid(&self, xs: &[f64], ys: &[f64], rescaled: bool) -> Result<Array2<f64>> {
        let coords = if rescaled {
            Coordinates::Rescaled
        } else {
            Coordinates::Raw
        };
        self.field(coords).eval_grid(xs, ys)
    }

    /// Borrowed separable view of the polynomial in the given coordinates.
    pub fn field(&self, coords: Coordinates) -> SeparableField<'_> {
        let n = self.degree();
        let (step, scale) = match coords {
            Coordinates::Raw => (1.0, 1.0),
            Coordinates::Rescaled => (1.0 / n as f64, 1.0 / n as f64),
        };
        SeparableField::new(
            AxisBasis::cosines(1.0, step, n),
            AxisBasis::cosines(1.0, step, n),
            CowArray::from(self.coeffs.view()),
            scale,
        )
        .expect("square coefficients match cosine bases")
    }

    /// Pad with zeros up to degree `n` (no-op if already at least `n`).
    pub fn padded(&self, n: usize) -> TrigPoly {
        let d = self.degree();
        if n <= d {
            return self.clone();
        }
        let mut c = Array2::zeros((n, n));
        c.slice_mut(ndarray::s![..d, ..d]).assign(&self.coeffs);
        TrigPoly { coeffs: c }
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;

    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let n = self.degree().max(rhs.degree());
        let a = self.padded(n);
        let b = rhs.padded(n);
        TrigPoly {
            coeffs: a.coeffs + b.coeffs,
        }
    }
}

impl Mul<f64> for &TrigPoly {
    type Output = TrigPoly;

    fn mul(self, rhs: f64) -> TrigPoly {
        TrigPoly {
            coeffs: &self.coeffs * rhs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{sample_matrix, CoeffLaw};
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_poly(n: usize, seed: u64) -> TrigPoly {
        TrigPoly::new(sample_matrix(CoeffLaw::Gaussian, n, seed).unwrap()).unwrap()
    }

    fn naive(p: &TrigPoly, x: f64, y: f64) -> f64 {
        let n = p.degree();
        let mut s = 0.0;
        for k in 1..=n {
            for l in 1..=n {
                s += p.coeffs()[[k - 1, l - 1]] * (k as f64 * x).cos() * (l as f64 * y).cos();
            }
        }
        s
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            TrigPoly::new(Array2::zeros((0, 0))),
            Err(Error::ZeroDegree)
        ));
        assert!(matches!(
            TrigPoly::new(Array2::zeros((2, 3))),
            Err(Error::CoeffShape { .. })
        ));
        assert!(matches!(
            TrigPoly::new(array![[1.0, f64::NAN], [0.0, 0.0]]),
            Err(Error::NonFiniteCoeff { row: 0, col: 1 })
        ));
    }

    #[test]
    fn eval_small_cases() {
        let p = TrigPoly::new(array![[1.0]]).unwrap();
        assert_eq!(p.eval(0.0, 0.0), 1.0);
        assert!(p.eval(PI / 2.0, 0.3).abs() < 1e-16);
        let q = TrigPoly::new(Array2::ones((2, 2))).unwrap();
        assert_eq!(q.eval(0.0, 0.0), 4.0);
    }

    #[test]
    fn eval_matches_double_loop() {
        let p = random_poly(3, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (x, y) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            assert!((p.eval(x, y) - naive(&p, x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn rescaled_identities() {
        let p = TrigPoly::new(array![[0.7]]).unwrap();
        assert_eq!(p.eval_rescaled(0.4, 1.1), p.eval(0.4, 1.1));

        let q = random_poly(4, 3);
        let sum: f64 = q.coeffs().sum();
        assert!((q.eval_rescaled(0.0, 0.0) - sum / 4.0).abs() < 1e-14);
        let lhs = q.eval_rescaled(PI, PI);
        let rhs = 0.25 * q.eval(PI / 4.0, PI / 4.0);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn gradient_small_cases() {
        let p = random_poly(6, 8);
        assert_eq!(p.grad_rescaled(0.0, 0.0), (0.0, 0.0));
        let one = TrigPoly::new(array![[1.0]]).unwrap();
        let (gx, gy) = one.grad_rescaled(PI / 2.0, 0.0);
        assert!((gx + 1.0).abs() < 1e-15);
        assert!(gy.abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &n in &[1usize, 5, 50] {
            let p = random_poly(n, n as u64);
            let h = 1e-5;
            for _ in 0..100 {
                let x = rng.random_range(0.0..(n as f64 * PI));
                let y = rng.random_range(0.0..(n as f64 * PI));
                let (gx, gy) = p.grad_rescaled(x, y);
                let fx = (p.eval_rescaled(x + h, y) - p.eval_rescaled(x - h, y)) / (2.0 * h);
                let fy = (p.eval_rescaled(x, y + h) - p.eval_rescaled(x, y - h)) / (2.0 * h);
                let norm = gx.hypot(gy).max(1e-3);
                assert!((gx - fx).abs() / norm < 1e-5, "n={n} gx={gx} fd={fx}");
                assert!((gy - fy).abs() / norm < 1e-5, "n={n} gy={gy} fd={fy}");
            }
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let p = random_poly(2, 21);
        let xs = [0.1, 0.5, 2.0];
        let ys = [-1.0, 0.25, 3.0];
        let g = p.eval_grid(&xs, &ys, false).unwrap();
        let gr = p.eval_grid(&xs, &ys, true).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[[i, j]] - p.eval(xs[i], ys[j])).abs() < 1e-12);
                assert!((gr[[i, j]] - p.eval_rescaled(xs[i], ys[j])).abs() < 1e-12);
            }
        }
        let single = p.eval_grid(&[0.3], &[0.8], false).unwrap();
        assert!((single[[0, 0]] - p.eval(0.3, 0.8)).abs() < 1e-15);
        assert!(matches!(
            p.eval_grid(&[], &[1.0], true),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn grid_random_discrepancy_scales_with_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &n in &[3usize, 17, 60] {
            let p = random_poly(n, 1000 + n as u64);
            let xs: Vec<f64> = (0..13).map(|_| rng.random_range(-5.0..5.0)).collect();
            let ys: Vec<f64> = (0..9).map(|_| rng.random_range(-5.0..5.0)).collect();
            let g = p.eval_grid(&xs, &ys, false).unwrap();
            for i in 0..xs.len() {
                for j in 0..ys.len() {
                    assert!((g[[i, j]] - p.eval(xs[i], ys[j])).abs() <= 1e-10 * n as f64);
                }
            }
        }
    }

    #[test]
    fn grid_is_much_faster_than_pointwise() {
        let p = random_poly(200, 5);
        let xs: Vec<f64> = (0..100).map(|i| 0.031 * i as f64).collect();
        let ys: Vec<f64> = (0..100).map(|i| 0.029 * i as f64).collect();
        let t = std::time::Instant::now();
        let g = p.eval_grid(&xs, &ys, false).unwrap();
        let grid = t.elapsed();
        let t = std::time::Instant::now();
        let mut acc = 0.0;
        for &x in &xs {
            for &y in &ys {
                acc += p.eval(x, y);
            }
        }
        let pointwise = t.elapsed();
        assert!((acc - g.sum()).abs() <= 1e-8 * g.len() as f64);
        assert!(
            pointwise >= 10 * grid,
            "grid {grid:?}, pointwise {pointwise:?}"
        );
    }

    proptest! {
        #[test]
        fn linearity(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, x in -10.0..10.0f64,
                     y in -10.0..10.0f64, s1 in 0u64..1000, s2 in 0u64..1000) {
            let p = random_poly(4, s1);
            let q = random_poly(6, s2);
            let combo = &(&p * alpha) + &(&q * beta);
            let lhs = combo.eval(x, y);
            let rhs = alpha * p.eval(x, y) + beta * q.eval(x, y);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn periodic_and_even(x in -20.0..20.0f64, y in -20.0..20.0f64, seed in 0u64..500) {
            let p = random_poly(7, seed);
            let v = p.eval(x, y);
            let tol = 1e-10 * (1.0 + v.abs());
            prop_assert!((p.eval(x + 2.0 * PI, y) - v).abs() <= tol);
            prop_assert!((p.eval(x, y + 2.0 * PI) - v).abs() <= tol);
            prop_assert!((p.eval(-x, y) - v).abs() <= tol);
            prop_assert!((p.eval(x, -y) - v).abs() <= tol);
        }
    }
}
