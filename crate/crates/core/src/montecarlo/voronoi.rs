//! Voronoi cell of the origin by half-plane clipping.

use crate::error::{domain, Error, Result};
use crate::pointproc::PointSample;

type Pt = [f64; 2];

/// Keeps the part of a convex polygon with `x·p ≤ |p|²/2`.
fn clip(poly: &[Pt], p: Pt) -> Vec<Pt> {
    let c = 0.5 * (p[0] * p[0] + p[1] * p[1]);
    let side = |v: &Pt| v[0] * p[0] + v[1] * p[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (k, cur) in poly.iter().enumerate() {
        let next = &poly[(k + 1) % poly.len()];
        let (sc, sn) = (side(cur), side(next));
        if sc <= 0.0 {
            out.push(*cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let s = sc / (sc - sn);
            out.push([cur[0] + s * (next[0] - cur[0]), cur[1] + s * (next[1] - cur[1])]);
        }
    }
    out
}

/// Vertices of the Voronoi cell of the origin, clipped to `[-b, b]²`.
///
/// `points` are the other sites, sorted by distance from the origin. A site
/// farther than twice the current largest vertex distance cannot cut the
/// cell, which ends the scan.
pub fn origin_cell(points: &[Pt], bounding: f64) -> Vec<Pt> {
    let b = bounding;
    let mut poly = vec![[-b, -b], [b, -b], [b, b], [-b, b]];
    let mut reach = b * std::f64::consts::SQRT_2;
    for &p in points {
        if p[0].hypot(p[1]) > 2.0 * reach {
            break;
        }
        poly = clip(&poly, p);
        reach = poly.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    }
    poly
}

/// Circumscribed radius of the Voronoi cell of the origin of a Palm sample.
///
/// The sample must list every point within `2√2 · bounding` of the origin.
/// Fails with [`Error::WindowTooSmall`] when the cell reaches the bounding
/// square, in which case the caller enlarges the window.
pub fn circumscribed_radius(sample: &PointSample, bounding: f64) -> Result<f64> {
    if !sample.is_palm {
        return Err(domain("the circumscribed radius needs a Palm sample"));
    }
    let coords = sample
        .coords
        .as_ref()
        .ok_or_else(|| domain("the circumscribed radius needs point coordinates"))?;
    if !(bounding > 0.0) {
        return Err(domain("bounding half-width must be positive"));
    }
    let cell = origin_cell(coords, bounding);
    let edge = bounding * (1.0 - 1e-12);
    if cell.is_empty() || cell.iter().any(|v| v[0].abs() >= edge || v[1].abs() >= edge) {
        return Err(Error::WindowTooSmall(bounding));
    }
    Ok(cell.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::{lattice_points, Mode};

    fn palm(coords: Vec<Pt>) -> PointSample {
        let mut pts: Vec<(f64, Pt)> = coords.into_iter().map(|c| (c[0].hypot(c[1]), c)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        PointSample {
            dim: 2,
            intensity: 1.0,
            radii: pts.iter().map(|p| p.0).collect(),
            coords: Some(pts.into_iter().map(|p| p.1).collect()),
            window_radius: 100.0,
            is_palm: true,
        }
    }

    #[test]
    fn unit_grid() {
        let s = lattice_points(1.0, [0.0, 0.0], Mode::Palm, 6.0).unwrap();
        let r = circumscribed_radius(&s.sample, 6.0 / (2.0 * std::f64::consts::SQRT_2)).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn four_points_square() {
        let s = palm(vec![[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]]);
        let r = circumscribed_radius(&s, 5.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_point_is_unbounded() {
        let s = palm(vec![[2.0, 0.0]]);
        assert_eq!(circumscribed_radius(&s, 5.0), Err(Error::WindowTooSmall(5.0)));
    }

    #[test]
    fn rectangular_lattice_matches_formula() {
        for &t in &[1.0, 1.7, 4.0, 25.0] {
            let w = 4f64.max(3.0 * t);
            let s = lattice_points(t, [0.0, 0.0], Mode::Palm, w).unwrap();
            let r = circumscribed_radius(&s.sample, w / (2.0 * std::f64::consts::SQRT_2)).unwrap();
            assert!((r * r - (1.0 + t * t) / 4.0).abs() < 1e-9 * t * t, "{t}");
        }
    }

    #[test]
    fn needs_palm_and_coords() {
        let mut s = palm(vec![[1.0, 0.0]]);
        s.is_palm = false;
        assert!(circumscribed_radius(&s, 1.0).is_err());
        let mut s = palm(vec![[1.0, 0.0]]);
        s.coords = None;
        assert!(circumscribed_radius(&s, 1.0).is_err());
    }
}
