use ndarray::Array2;

use super::{GridEdge, NodalSet, Segment, Vertex};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Zero level set of `field[[i, j]] = F(xs[i], ys[j])` by marching squares.
///
/// Crossings are placed by linear interpolation along grid edges and shared
/// between neighbouring cells. Exact zeros count as `+1e-300`. In the two
/// saddle configurations the sign of the corner average decides which pair
/// of opposite corners is joined.
pub fn marching_squares(field: Array2<f64>, xs: &[f64], ys: &[f64]) -> Result<NodalSet> {
    let (nx, ny) = field.dim();
    if nx != xs.len() || ny != ys.len() {
        return Err(Error::DimensionMismatch {
            field_rows: nx,
            field_cols: ny,
            grid_rows: xs.len(),
            grid_cols: ys.len(),
        });
    }
    if nx == 0 || ny == 0 {
        return Err(Error::EmptyGrid);
    }
    if xs
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        || ys
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::GridNotIncreasing);
    }

    let field = field.as_standard_layout().into_owned();
    let flat = field.as_slice().expect("standard layout");
    let val = |i: usize, j: usize| {
        let v = flat[i * ny + j];
        if v == 0.0 {
            1e-300
        } else {
            v
        }
    };

    let pos: Vec<bool> = flat.iter().map(|&v| v >= 0.0).collect();
    let mut vertices = Vec::new();
    // Horizontal edge (i, j) lives at h_idx[i * ny + j]; vertical at v_idx[i * (ny - 1) + j].
    let mut h_idx = vec![NONE; nx.saturating_sub(1) * ny];
    let mut v_idx = vec![NONE; nx * ny.saturating_sub(1)];

    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny {
            if pos[i * ny + j] != pos[(i + 1) * ny + j] {
                let (a, b) = (val(i, j), val(i + 1, j));
                let t = a / (a - b);
                h_idx[i * ny + j] = vertices.len() as u32;
                vertices.push(Vertex {
                    point: [xs[i] + t * (xs[i + 1] - xs[i]), ys[j]],
                    grad: None,
                    edge: Some(GridEdge::Horizontal { i, j }),
                });
            }
        }
    }
    for i in 0..nx {
        for j in 0..ny.saturating_sub(1) {
            if pos[i * ny + j] != pos[i * ny + j + 1] {
                let (a, b) = (val(i, j), val(i, j + 1));
                let t = a / (a - b);
                v_idx[i * (ny - 1) + j] = vertices.len() as u32;
                vertices.push(Vertex {
                    point: [xs[i], ys[j] + t * (ys[j + 1] - ys[j])],
                    grad: None,
                    edge: Some(GridEdge::Vertical { i, j }),
                });
            }
        }
    }

    let mut segments = Vec::new();
    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let case = pos[i * ny + j] as u8
                | (pos[(i + 1) * ny + j] as u8) << 1
                | (pos[(i + 1) * ny + j + 1] as u8) << 2
                | (pos[i * ny + j + 1] as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = h_idx[i * ny + j];
            let top = h_idx[i * ny + j + 1];
            let left = v_idx[i * (ny - 1) + j];
            let right = v_idx[(i + 1) * (ny - 1) + j];
            let mut push = |a: u32, b: u32| {
                debug_assert!(a != NONE && b != NONE);
                segments.push(Segment {
                    a: a as usize,
                    b: b as usize,
                    grid_cell: (i, j),
                    cell: None,
                });
            };
            match case {
                // One corner differs from the other three.
                1 | 14 => push(bottom, left),
                2 | 13 => push(bottom, right),
                4 | 11 => push(right, top),
                8 | 7 => push(left, top),
                // Two adjacent corners on each side.
                3 | 12 => push(left, right),
                6 | 9 => push(bottom, top),
                // Saddles: 00 and 11 share a sign, 10 and 01 the other.
                5 | 10 => {
                    let v00 = val(i, j);
                    let centre = 0.25 * (v00 + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                    if (centre > 0.0) == (v00 > 0.0) {
                        push(bottom, right);
                        push(left, top);
                    } else {
                        push(bottom, left);
                        push(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    Ok(NodalSet::from_parts(
        vertices,
        segments,
        xs.to_vec(),
        ys.to_vec(),
        field,
    ))
}
