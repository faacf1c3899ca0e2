use std::fmt::Write as _;
use std::io::Write;

use super::Rect;
use crate::error::Result;

pub const SVG_PX_PER_UNIT: f64 = 40.0;

/// One `<path>` per polyline; the view box is the domain rectangle with the
/// y axis pointing up. Coordinates are printed with six decimals so output is
/// byte-for-byte reproducible.
pub fn write_svg<W: Write>(mut w: W, rect: &Rect, polylines: &[Vec<[f64; 2]>]) -> Result<()> {
    let (width, height) = (rect.width(), rect.height());
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        width * SVG_PX_PER_UNIT,
        height * SVG_PX_PER_UNIT,
        rect.x_min,
        -rect.y_max,
        width,
        height
    )?;
    writeln!(
        w,
        r#"<g transform="scale(1,-1)" fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke">"#
    )?;
    for pl in polylines {
        if pl.len() < 2 {
            continue;
        }
        let mut d = String::with_capacity(pl.len() * 24);
        for (k, p) in pl.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{:.6} {:.6}", p[0], p[1]);
        }
        writeln!(w, r#"<path vector-effect="non-scaling-stroke" d="{d}"/>"#)?;
    }
    writeln!(w, "</g>\n</svg>")?;
    Ok(())
}
