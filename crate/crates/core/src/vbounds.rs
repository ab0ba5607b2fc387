//! Tail bounds for the circumscribed radius of the typical Voronoi cell and
//! the seven-petal geometry behind them.
//!
//! Petal 0 is the intersection of the disks of radius `r` centred at polar
//! points `(r, 0)` and `(r, 2π/7)`, cut to the sector between the two rays;
//! petals 1..6 are its rotations by `2πk/7`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, domain, Error, Result};

const SEVENTH: f64 = PI / 7.0;

/// `π/7 + sin(π/7) cos(3π/7)`; the petal area is twice this times `r²`.
fn petal_shape_factor() -> f64 {
    SEVENTH + SEVENTH.sin() * (3.0 * SEVENTH).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PetalGeometry {
    pub r: f64,
    pub area: f64,
    /// Radius `2r cos(2π/7)` of the largest origin sector inside the petal.
    pub sector_inner: f64,
    /// Radius `2r cos(π/7)` of the smallest origin sector containing it.
    pub sector_outer: f64,
}

impl PetalGeometry {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(domain(format!("petal radius must be nonnegative (got {r})")));
        }
        Ok(Self {
            r,
            area: petal_area(r),
            sector_inner: 2.0 * r * (2.0 * SEVENTH).cos(),
            sector_outer: 2.0 * r * SEVENTH.cos(),
        })
    }

    /// Area `(π/7) η²` of the sector of opening `2π/7` and radius `η`.
    pub fn sector_area(eta: f64) -> f64 {
        SEVENTH * eta * eta
    }
}

pub fn petal_area(r: f64) -> f64 {
    2.0 * r * r * petal_shape_factor()
}

/// Petal area by integrating the polar boundary
/// `ρ(φ) = min(2r cos φ, 2r cos(φ - 2π/7))` over the opening.
pub fn petal_area_numeric(r: f64) -> f64 {
    let f = |phi: f64| {
        let rho = (2.0 * r * phi.cos()).min(2.0 * r * (phi - 2.0 * SEVENTH).cos());
        0.5 * rho * rho
    };
    let tol = 1e-14 * r * r.max(1e-300);
    let a = crate::quadrature::gauss_kronrod(f, 0.0, SEVENTH, tol, 1e-13).value;
    let b = crate::quadrature::gauss_kronrod(f, SEVENTH, 2.0 * SEVENTH, tol, 1e-13).value;
    a + b
}

/// Palm mean count of α-Ginibre points in the inscribed sector of the petal.
pub fn u_alpha(alpha: f64, r: f64) -> f64 {
    let q = 4.0 * r * r * (2.0 * SEVENTH).cos().powi(2);
    (q + alpha * (-q / alpha).exp_m1()) / 7.0
}

/// Lower bound on the Palm mean count in the petal from its area minus the
/// Gaussian mass of the circumscribing sector. Negative for small `r`.
pub fn v_alpha(alpha: f64, r: f64) -> f64 {
    let q = 4.0 * r * r * SEVENTH.cos().powi(2);
    2.0 * r * r / PI * petal_shape_factor() + alpha / 7.0 * (-q / alpha).exp_m1()
}

/// `min(1, 7 exp(-max(u_α(r), v_α(r))))`, a bound on `P^o(R(o) > r)` for the
/// α-Ginibre process.
pub fn ginibre_circumradius_bound(alpha: f64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(r >= 0.0) {
        return Err(domain(format!("r must be nonnegative (got {r})")));
    }
    let e = u_alpha(alpha, r).max(v_alpha(alpha, r));
    Ok((7.0 * (-e).exp()).min(1.0))
}

/// First radius in `(0, 2]` where `u_α - v_α` changes sign, to `1e-8`.
pub fn crossing_radius(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let diff = |r: f64| u_alpha(alpha, r) - v_alpha(alpha, r);
    let steps = 400;
    let mut lo = 2.0 / steps as f64;
    let mut f_lo = diff(lo);
    for k in 2..=steps {
        let hi = 2.0 * k as f64 / steps as f64;
        let f_hi = diff(hi);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            return crate::quadrature::bisect(diff, lo, hi, 1e-10);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Numerical(format!("u_alpha - v_alpha has no sign change on (0, 2] for alpha = {alpha}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalkaBound {
    pub value: f64,
    /// Set when `r` lies below `r0_assumed`; the bound is only known to hold
    /// beyond some unspecified radius.
    pub caveat: bool,
    pub r0_assumed: f64,
}

/// `min(1, 4πλr² exp(-πλr²))` for the Poisson-Voronoi circumradius tail,
/// flagged below `r0_assumed` (default `1/√λ`).
pub fn calka_poisson_bound(intensity: f64, r: f64, r0_assumed: Option<f64>) -> Result<CalkaBound> {
    if !(intensity > 0.0) || !(r > 0.0) {
        return Err(domain(format!("need intensity > 0 and r > 0 (got {intensity}, {r})")));
    }
    let r0 = r0_assumed.unwrap_or(1.0 / intensity.sqrt());
    let m = PI * intensity * r * r;
    Ok(CalkaBound { value: (4.0 * m * (-m).exp()).min(1.0), caveat: r < r0, r0_assumed: r0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn petal_area_examples() {
        assert_eq!(petal_area(0.0), 0.0);
        assert!((petal_area(1.0) - 1.09070).abs() < 1e-5);
        assert_relative_eq!(petal_area(2.0), 4.0 * petal_area(1.0), max_relative = 1e-15);
    }

    #[test]
    fn petal_area_matches_polar_integral() {
        for &r in &[0.1, 1.0, 2.5, 10.0] {
            assert!((petal_area_numeric(r) - petal_area(r)).abs() < 1e-6 * r * r);
        }
    }

    #[test]
    fn sectors_sandwich_petal() {
        for &r in &[0.3, 1.0, 4.0] {
            let p = PetalGeometry::new(r).unwrap();
            assert!(PetalGeometry::sector_area(p.sector_inner) <= p.area);
            assert!(p.area <= PetalGeometry::sector_area(p.sector_outer));
        }
    }

    #[test]
    fn ginibre_bound_examples() {
        assert_eq!(ginibre_circumradius_bound(1.0, 0.0).unwrap(), 1.0);
        assert!(u_alpha(1.0, 0.4) > v_alpha(1.0, 0.4));
        assert!(u_alpha(1.0, 0.6) < v_alpha(1.0, 0.6));
        assert!(ginibre_circumradius_bound(1.5, 1.0).is_err());
    }

    #[test]
    fn crossing_radius_examples() {
        let r = crossing_radius(1.0).unwrap();
        assert!((r - 0.5276).abs() < 1e-3, "{r}");
        assert!((u_alpha(1.0, r) - v_alpha(1.0, r)).abs() < 1e-7);
        let r = crossing_radius(0.5).unwrap();
        assert!(r > 0.0 && r < 2.0);
        assert!((u_alpha(0.5, r) - v_alpha(0.5, r)).abs() < 1e-7);
    }

    #[test]
    fn u_nonnegative_increasing_and_exponent_monotone() {
        for &alpha in &[0.25, 0.5, 1.0] {
            let mut prev_u = 0.0;
            let mut prev_e = 0.0;
            for k in 1..=4000 {
                let r = k as f64 * 1e-3;
                let u = u_alpha(alpha, r);
                let e = u.max(v_alpha(alpha, r));
                assert!(u >= prev_u && u >= 0.0);
                assert!(e >= prev_e && e >= 0.0);
                prev_u = u;
                prev_e = e;
            }
        }
    }

    #[test]
    fn v_is_negative_near_origin() {
        assert!(v_alpha(1.0, 0.1) < 0.0);
        assert!(v_alpha(1.0, 3.0) > 0.0);
    }

    #[test]
    fn calka_examples() {
        let b = calka_poisson_bound(1.0, 2.0, None).unwrap();
        assert_relative_eq!(b.value, 16.0 * PI * (-4.0 * PI).exp(), max_relative = 1e-14);
        assert!((b.value - 1.745e-4).abs() < 1e-6);
        assert!(!b.caveat);
        let b = calka_poisson_bound(1.0, 0.1, None).unwrap();
        assert!((b.value - 0.1218).abs() < 1e-4);
        assert!(b.caveat);
        assert!(calka_poisson_bound(1.0, 50.0, None).unwrap().value < 1e-300);
    }
}
