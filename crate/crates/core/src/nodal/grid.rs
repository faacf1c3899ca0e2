use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigpoly::Coordinates;

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let r = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        r.validate()?;
        Ok(r)
    }

    /// `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRect {
                x_min: self.x_min,
                x_max: self.x_max,
                y_min: self.y_min,
                y_max: self.y_max,
            })
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.x_min <= other.x_min
            && other.x_max <= self.x_max
            && self.y_min <= other.y_min
            && other.y_max <= self.y_max
    }
}

/// Sampling grid over a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rect: Rect,
    /// Grid step is `1 / samples_per_unit`, rounded so that a whole number of
    /// steps fits in a pi-cell.
    pub samples_per_unit: f64,
    #[serde(default)]
    pub coordinates: Coordinates,
}

impl GridSpec {
    pub fn new(rect: Rect, samples_per_unit: f64, coordinates: Coordinates) -> Result<Self> {
        let g = Self {
            rect,
            samples_per_unit,
            coordinates,
        };
        g.validate()?;
        Ok(g)
    }

    /// `F_n` on `[0, n pi]^2`, eight samples per pi-cell side.
    pub fn global(n: usize) -> Self {
        let side = n as f64 * std::f64::consts::PI;
        Self {
            rect: Rect {
                x_min: 0.0,
                x_max: side,
                y_min: 0.0,
                y_max: side,
            },
            samples_per_unit: 8.0 / std::f64::consts::PI,
            coordinates: Coordinates::Rescaled,
        }
    }

    /// `F_n` on a window, 32 samples per pi-cell side.
    pub fn local(rect: Rect) -> Self {
        Self {
            rect,
            samples_per_unit: 32.0 / std::f64::consts::PI,
            coordinates: Coordinates::Rescaled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rect.validate()?;
        if !(self.samples_per_unit.is_finite() && self.samples_per_unit > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "samples_per_unit must be positive, got {}",
                self.samples_per_unit
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples_per_unit
    }

    /// Grid axes for a degree-`n` polynomial.
    pub fn axes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let cell = self.coordinates.cell_size(n);
        let m = steps_per_cell(cell, self.samples_per_unit);
        (
            aligned_axis(self.rect.x_min, self.rect.x_max, cell, m),
            aligned_axis(self.rect.y_min, self.rect.y_max, cell, m),
        )
    }
}

/// Number of grid steps per pi-cell side closest to the requested density.
pub fn steps_per_cell(cell: f64, samples_per_unit: f64) -> usize {
    ((cell * samples_per_unit).round() as usize).max(1)
}

/// Points of `[lo, hi]` on the lattice `q * cell + r * cell / m`, plus both
/// endpoints. Lattice points are formed from the cell index and the in-cell
/// offset so that cell boundaries are hit exactly.
pub fn aligned_axis(lo: f64, hi: f64, cell: f64, m: usize) -> Vec<f64> {
    let h = cell / m as f64;
    let tol = 1e-9 * h;
    let m = m as i64;
    let mut out = vec![lo];
    let mut t = ((lo + tol) / h).floor() as i64 + 1;
    loop {
        let v = t.div_euclid(m) as f64 * cell + t.rem_euclid(m) as f64 * h;
        if v >= hi - tol {
            break;
        }
        if v > lo + tol {
            out.push(v);
        }
        t += 1;
    }
    out.push(hi);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rect_validation() {
        assert!(Rect::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(matches!(
            Rect::new(1.0, 1.0, 0.0, 1.0),
            Err(Error::InvalidRect { .. })
        ));
        assert!(Rect::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn axis_hits_cell_boundaries_exactly() {
        let n = 7;
        let g = GridSpec::global(n);
        let (xs, _) = g.axes(n);
        assert_eq!(xs.len(), 8 * n + 1);
        for q in 0..=n {
            assert_eq!(xs[8 * q], q as f64 * PI);
        }
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn axis_with_unaligned_window() {
        let xs = aligned_axis(0.3, 2.0, PI, 4);
        assert_eq!(xs.first(), Some(&0.3));
        assert_eq!(xs.last(), Some(&2.0));
        assert!(xs.contains(&(PI / 4.0)));
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn negative_origin() {
        let xs = aligned_axis(-PI, PI, PI, 2);
        assert_eq!(xs, vec![-PI, -PI / 2.0, 0.0, PI / 2.0, PI]);
    }
}
