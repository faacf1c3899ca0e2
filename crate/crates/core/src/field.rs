//! Separable trigonometric fields.
//!
//! Every random field in this crate has the form
//!
//! ```text
//! F(x, y) = scale * sum_{k,l} C[k, l] * phi_k(x) * psi_l(y)
//! ```
//!
//! where each axis basis is a block of `cos(w_i t)` (optionally followed by a
//! block of `sin(w_i t)`) over an arithmetic progression of frequencies
//! `w_i = (offset + i) * step`. Trigonometric polynomials use a cosine-only
//! basis; the stationary spectral sampler uses cosines and sines.
//!
//! The separable structure gives two fast paths: grid evaluation as two matrix
//! products, and O(len) evaluation along a grid line once the coefficient
//! matrix has been contracted against that line's basis vector.

use ndarray::{Array1, Array2, ArrayView1, CowArray, Ix2};

use crate::error::{Error, Result};

/// Re-anchor the rotation recurrence with exact `sin_cos` every this many terms.
const RECURRENCE_ANCHOR: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct AxisBasis {
    offset: f64,
    step: f64,
    count: usize,
    with_sin: bool,
}

impl AxisBasis {
    /// Cosines `cos((offset + i) * step * t)` for `i in 0..count`.
    pub fn cosines(offset: f64, step: f64, count: usize) -> Self {
        Self {
            offset,
            step,
            count,
            with_sin: false,
        }
    }

    /// Cosine block followed by a sine block over the same frequencies.
    pub fn cos_sin(offset: f64, step: f64, count: usize) -> Self {
        Self {
            offset,
            step,
            count,
            with_sin: true,
        }
    }

    pub fn len(&self) -> usize {
        if self.with_sin {
            2 * self.count
        } else {
            self.count
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn frequency(&self, i: usize) -> f64 {
        (self.offset + i as f64) * self.step
    }

    /// Basis values at `t`, computed with one `sin_cos` per frequency.
    pub fn fill(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let (cos_part, sin_part) = out.split_at_mut(self.count);
        for i in 0..self.count {
            let (s, c) = (self.frequency(i) * t).sin_cos();
            cos_part[i] = c;
            if self.with_sin {
                sin_part[i] = s;
            }
        }
    }

    /// Derivatives of the basis functions at `t`.
    pub fn fill_derivative(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let (cos_part, sin_part) = out.split_at_mut(self.count);
        for i in 0..self.count {
            let w = self.frequency(i);
            let (s, c) = (w * t).sin_cos();
            cos_part[i] = -w * s;
            if self.with_sin {
                sin_part[i] = w * c;
            }
        }
    }

    /// Values and derivatives by complex rotation, re-anchored periodically.
    /// Agrees with [`fill`](Self::fill) to a few ulps times the anchor spacing.
    pub fn fill_fast(&self, t: f64, val: &mut [f64], der: &mut [f64]) {
        debug_assert_eq!(val.len(), self.len());
        debug_assert_eq!(der.len(), self.len());
        let (rs, rc) = (self.step * t).sin_cos();
        let (mut s, mut c) = (0.0, 0.0);
        let n = self.count;
        for i in 0..n {
            if i % RECURRENCE_ANCHOR == 0 {
                (s, c) = (self.frequency(i) * t).sin_cos();
            } else {
                let c_next = c * rc - s * rs;
                s = s * rc + c * rs;
                c = c_next;
            }
            let w = self.frequency(i);
            val[i] = c;
            der[i] = -w * s;
            if self.with_sin {
                val[n + i] = s;
                der[n + i] = w * c;
            }
        }
    }

    /// `w_i` for every basis entry (sine block repeats the cosine frequencies).
    pub fn frequencies(&self) -> Array1<f64> {
        Array1::from_shape_fn(self.len(), |i| self.frequency(i % self.count))
    }

    /// Evaluate one line of a [`LineTable`] at `t`: returns
    /// `(row . b(t), row . b'(t), cross . b(t))` without materialising the
    /// basis. `weighted` is `row` multiplied entrywise by
    /// [`frequencies`](Self::frequencies).
    ///
    /// Four interleaved rotation chains keep the multiply-add latency off the
    /// critical path.
    pub fn line_eval(
        &self,
        t: f64,
        row: &[f64],
        weighted: &[f64],
        cross: &[f64],
    ) -> (f64, f64, f64) {
        debug_assert_eq!(row.len(), self.len());
        debug_assert_eq!(weighted.len(), self.len());
        debug_assert_eq!(cross.len(), self.len());
        let n = self.count;
        let (row_c, row_s) = row.split_at(n);
        let (wr_c, wr_s) = weighted.split_at(n);
        let (cross_c, cross_s) = cross.split_at(n);
        let r1 = unit((self.step * t).sin_cos());
        let r2 = rot(r1, r1);
        let r3 = rot(r2, r1);
        let (r4c, r4s) = rot(r2, r2);
        let mut acc_v = [0.0f64; 4];
        let mut acc_d = [0.0f64; 4];
        let mut acc_x = [0.0f64; 4];
        let mut i0 = 0;
        while i0 < n {
            let end = (i0 + RECURRENCE_ANCHOR).min(n);
            let base = if i0 == 0 && self.offset == 1.0 {
                r1
            } else {
                unit((self.frequency(i0) * t).sin_cos())
            };
            let z = [base, rot(base, r1), rot(base, r2), rot(base, r3)];
            let mut c = z.map(|v| v.0);
            let mut s = z.map(|v| v.1);
            let mut k = i0;
            while k + 4 <= end {
                let rc = lanes(row_c, k);
                let wc = lanes(wr_c, k);
                let xc = lanes(cross_c, k);
                for q in 0..4 {
                    acc_v[q] += rc[q] * c[q];
                }
                for q in 0..4 {
                    acc_d[q] -= wc[q] * s[q];
                }
                for q in 0..4 {
                    acc_x[q] += xc[q] * c[q];
                }
                if self.with_sin {
                    let (rs, ws, xs) = (lanes(row_s, k), lanes(wr_s, k), lanes(cross_s, k));
                    for q in 0..4 {
                        acc_v[q] += rs[q] * s[q];
                        acc_d[q] += ws[q] * c[q];
                        acc_x[q] += xs[q] * s[q];
                    }
                }
                let mut c_next = [0.0; 4];
                for q in 0..4 {
                    c_next[q] = c[q] * r4c - s[q] * r4s;
                }
                for q in 0..4 {
                    s[q] = s[q] * r4c + c[q] * r4s;
                }
                c = c_next;
                k += 4;
            }
            for q in 0..end - k {
                let i = k + q;
                acc_v[q] += row_c[i] * c[q];
                acc_d[q] -= wr_c[i] * s[q];
                acc_x[q] += cross_c[i] * c[q];
                if self.with_sin {
                    acc_v[q] += row_s[i] * s[q];
                    acc_d[q] += wr_s[i] * c[q];
                    acc_x[q] += cross_s[i] * s[q];
                }
            }
            i0 = end;
        }
        let sum = |a: [f64; 4]| (a[0] + a[1]) + (a[2] + a[3]);
        (sum(acc_v), sum(acc_d), sum(acc_x))
    }

    /// `|ts| x len` matrix of basis values, one row per point.
    pub fn matrix(&self, ts: &[f64]) -> Array2<f64> {
        let mut m = Array2::zeros((ts.len(), self.len()));
        for (mut row, &t) in m.rows_mut().into_iter().zip(ts) {
            self.fill(t, row.as_slice_mut().expect("standard layout"));
        }
        m
    }

    /// Value and derivative matrices in one pass using [`fill_fast`](Self::fill_fast).
    pub fn matrices_fast(&self, ts: &[f64]) -> (Array2<f64>, Array2<f64>) {
        let mut m = Array2::zeros((ts.len(), self.len()));
        let mut d = Array2::zeros((ts.len(), self.len()));
        for ((mut row, mut drow), &t) in m.rows_mut().into_iter().zip(d.rows_mut()).zip(ts) {
            self.fill_fast(
                t,
                row.as_slice_mut().expect("standard layout"),
                drow.as_slice_mut().expect("standard layout"),
            );
        }
        (m, d)
    }

    pub fn derivative_matrix(&self, ts: &[f64]) -> Array2<f64> {
        let mut m = Array2::zeros((ts.len(), self.len()));
        for (mut row, &t) in m.rows_mut().into_iter().zip(ts) {
            self.fill_derivative(t, row.as_slice_mut().expect("standard layout"));
        }
        m
    }
}

/// A field `scale * bx(x)^T C by(y)`.
#[derive(Clone, Debug)]
pub struct SeparableField<'a> {
    pub x_basis: AxisBasis,
    pub y_basis: AxisBasis,
    pub coeffs: CowArray<'a, f64, Ix2>,
    pub scale: f64,
}

impl<'a> SeparableField<'a> {
    pub fn new(
        x_basis: AxisBasis,
        y_basis: AxisBasis,
        coeffs: CowArray<'a, f64, Ix2>,
        scale: f64,
    ) -> Result<Self> {
        let (rows, cols) = coeffs.dim();
        if rows != x_basis.len() || cols != y_basis.len() {
            return Err(Error::InvalidArgument(format!(
                "coefficient matrix {rows}x{cols} does not match basis sizes {}x{}",
                x_basis.len(),
                y_basis.len()
            )));
        }
        Ok(Self {
            x_basis,
            y_basis,
            coeffs,
            scale,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut bx = vec![0.0; self.x_basis.len()];
        let mut by = vec![0.0; self.y_basis.len()];
        self.x_basis.fill(x, &mut bx);
        self.y_basis.fill(y, &mut by);
        self.scale * bilinear(&bx, &self.coeffs, &by)
    }

    /// Value and exact gradient at one point.
    pub fn eval_with_grad(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let mut bx = vec![0.0; self.x_basis.len()];
        let mut dbx = vec![0.0; self.x_basis.len()];
        let mut by = vec![0.0; self.y_basis.len()];
        let mut dby = vec![0.0; self.y_basis.len()];
        self.x_basis.fill(x, &mut bx);
        self.x_basis.fill_derivative(x, &mut dbx);
        self.y_basis.fill(y, &mut by);
        self.y_basis.fill_derivative(y, &mut dby);
        let c_by = self.coeffs.dot(&ArrayView1::from(&by[..]));
        let c_dby = self.coeffs.dot(&ArrayView1::from(&dby[..]));
        let v = dot(&bx, c_by.as_slice().unwrap());
        let gx = dot(&dbx, c_by.as_slice().unwrap());
        let gy = dot(&bx, c_dby.as_slice().unwrap());
        (self.scale * v, [self.scale * gx, self.scale * gy])
    }

    /// `|xs| x |ys|` matrix of values, `out[[i, j]] = F(xs[i], ys[j])`.
    pub fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> Result<Array2<f64>> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let bx = self.x_basis.matrix(xs);
        let by = self.y_basis.matrix(ys);
        let rows = self.coeffs.dot(&by.t());
        let mut g = bx.dot(&rows);
        g.mapv_inplace(|v| v * self.scale);
        Ok(g)
    }

    /// Grid values together with the line tables of every grid line, sharing
    /// the basis matrices. This is the kernel behind nodal extraction.
    pub fn eval_grid_with_lines(
        &self,
        xs: &[f64],
        ys: &[f64],
    ) -> Result<(Array2<f64>, LineTable, LineTable)> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let (bx, dbx) = self.x_basis.matrices_fast(xs);
        let (by, dby) = self.y_basis.matrices_fast(ys);
        let ct = self.coeffs.t();
        let h = LineTable::new(by.dot(&ct), dby.dot(&ct), &self.x_basis);
        let mut g = bx.dot(&h.values.t());
        g.mapv_inplace(|v| v * self.scale);
        let v = LineTable::new(bx.dot(&self.coeffs), dbx.dot(&self.coeffs), &self.y_basis);
        Ok((g, h, v))
    }

    /// Contract the coefficients against the y-basis at every `ys[j]`:
    /// row `j` of the result turns `F(x, ys[j])` into a dot product with
    /// `bx(x)`.
    pub fn horizontal_lines(&self, ys: &[f64]) -> LineTable {
        let by = self.y_basis.matrix(ys);
        let dby = self.y_basis.derivative_matrix(ys);
        LineTable::new(
            by.dot(&self.coeffs.t()),
            dby.dot(&self.coeffs.t()),
            &self.x_basis,
        )
    }

    /// Same as [`horizontal_lines`](Self::horizontal_lines) for vertical
    /// lines `x = xs[i]`.
    pub fn vertical_lines(&self, xs: &[f64]) -> LineTable {
        let bx = self.x_basis.matrix(xs);
        let dbx = self.x_basis.derivative_matrix(xs);
        LineTable::new(bx.dot(&self.coeffs), dbx.dot(&self.coeffs), &self.y_basis)
    }
}

/// Per-line contracted coefficient vectors. Row `j` of `values` is
/// `C by(y_j)` (or `C^T bx(x_j)`); `cross_derivs` holds the same contraction
/// against the derivative basis, giving the partial derivative across the line.
#[derive(Clone, Debug)]
pub struct LineTable {
    pub values: Array2<f64>,
    /// `values` times the frequency of each basis entry along the line.
    pub weighted: Array2<f64>,
    pub cross_derivs: Array2<f64>,
}

impl LineTable {
    /// `along` is the basis running along the lines.
    fn new(values: Array2<f64>, cross_derivs: Array2<f64>, along: &AxisBasis) -> Self {
        let weighted = &values * &along.frequencies();
        Self {
            values,
            weighted,
            cross_derivs,
        }
    }

    /// Value, along-line derivative and cross derivative on line `j` at `t`,
    /// before the field's scale factor.
    pub fn eval(&self, along: &AxisBasis, j: usize, t: f64) -> (f64, f64, f64) {
        along.line_eval(
            t,
            self.values.row(j).to_slice().expect("standard layout"),
            self.weighted.row(j).to_slice().expect("standard layout"),
            self.cross_derivs
                .row(j)
                .to_slice()
                .expect("standard layout"),
        )
    }
}

/// `(sin, cos)` as returned by `sin_cos`, reordered to `(cos, sin)`.
#[inline(always)]
fn lanes(v: &[f64], k: usize) -> [f64; 4] {
    v[k..k + 4].try_into().unwrap()
}

#[inline]
fn unit((s, c): (f64, f64)) -> (f64, f64) {
    (c, s)
}

/// Product of two unit complex numbers stored as `(cos, sin)`.
#[inline]
fn rot((c1, s1): (f64, f64), (c2, s2): (f64, f64)) -> (f64, f64) {
    (c1 * c2 - s1 * s2, s1 * c2 + c1 * s2)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bilinear(bx: &[f64], c: &CowArray<'_, f64, Ix2>, by: &[f64]) -> f64 {
    let c_by: Array1<f64> = c.dot(&ArrayView1::from(by));
    dot(bx, c_by.as_slice().unwrap())
}
