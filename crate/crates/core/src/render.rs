//! SVG 1.1 drawing of a seed triangle and its nested stage triangles.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::lattice_geom::RatTriangle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// Width and height of the square canvas in pixels.
    pub size: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { size: 800 }
    }
}

/// Hue ramp from blue (outer) to red (inner).
fn stage_color(i: usize, n: usize) -> String {
    let hue = if n <= 1 {
        220.0
    } else {
        220.0 - 220.0 * i as f64 / (n - 1) as f64
    };
    format!("hsl({hue:.0},70%,45%)")
}

/// Draws `seed` and `stages`. Nesting is checked on exact coordinates
/// before anything is rounded.
pub fn render_svg(
    seed: &RatTriangle,
    stages: &[RatTriangle],
    opts: &RenderOptions,
) -> Result<String> {
    let mut outer = seed;
    for (k, t) in stages.iter().enumerate() {
        if !outer.strictly_contains_triangle(t) {
            return Err(Error::Invariant {
                stage: k,
                what: "triangle not strictly inside its predecessor".into(),
            });
        }
        outer = t;
    }
    let (xs, ys) = seed.bounding_box();
    let span = std::cmp::max(xs.width(), ys.width());
    let margin = Rat::new(1, 20);
    let px = Rat::from(opts.size as i64);
    let scale = &px * (Rat::one() - Rat::from(2) * &margin) / &span;
    let to_px = |x: &Rat, y: &Rat| -> (f64, f64) {
        let sx = &px * &margin + (x - xs.lo()) * &scale;
        let sy = &px - (&px * &margin + (y - ys.lo()) * &scale);
        (sx.to_f64(), sy.to_f64())
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let all: Vec<&RatTriangle> = std::iter::once(seed).chain(stages.iter()).collect();
    for (i, t) in all.iter().enumerate() {
        let pts: Vec<String> = t
            .vertices()
            .iter()
            .map(|p| {
                let (x, y) = to_px(&p.x, &p.y);
                format!("{x:.4},{y:.4}")
            })
            .collect();
        let color = if i == 0 {
            "black".to_string()
        } else {
            stage_color(i - 1, stages.len())
        };
        let _ = writeln!(
            out,
            r#"  <polygon data-stage="{}" points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
            if i == 0 {
                "seed".to_string()
            } else {
                (i - 1).to_string()
            },
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accessor::construct_expansion;
    use crate::lattice_geom::AngleThreshold;

    #[test]
    fn polygon_count_is_stages_plus_one() {
        let trace =
            construct_expansion(&RatTriangle::unit(), &AngleThreshold::theta_star(), 3).unwrap();
        let tris: Vec<_> = trace.stages.iter().map(|s| s.cone.triangle()).collect();
        let svg = render_svg(&trace.seed, &tris, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 4);
        let empty = render_svg(&trace.seed, &[], &RenderOptions::default()).unwrap();
        assert_eq!(empty.matches("<polygon").count(), 1);
    }

    #[test]
    fn refuses_non_nested_input() {
        let t = RatTriangle::unit();
        assert!(render_svg(&t, std::slice::from_ref(&t), &RenderOptions::default()).is_err());
    }
}
