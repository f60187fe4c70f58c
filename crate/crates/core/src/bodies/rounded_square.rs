//! The planar body K(R, eps): the intersection of four disks of radius R
//! centred at (+-(R-1), 0) and (0, +-(R-1)), with corners rounded by
//! eps-arcs.
//!
//! The rounded body equals L + eps B where L is the same intersection with
//! radius R - eps. Its support is therefore piecewise explicit: on the big
//! arcs h = R - (R-1) cos(phi), on the corner arcs h = q (cos phi + |sin phi|) + eps,
//! with phi the normal angle relative to the nearest axis and (q, q) the
//! corner of L.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use super::planar::PlanarSupport;
use crate::error::{GeometryError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedSquare {
    big_radius: f64,
    corner_radius: f64,
    /// Corner of the inner body L in the first quadrant is (q, q).
    q: f64,
    /// Half-width of the normal-angle range covered by each big arc.
    alpha: f64,
}

impl RoundedSquare {
    pub fn new(big_radius: f64, corner_radius: f64) -> Result<Self> {
        if !(big_radius > 1.0 && big_radius.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("R must exceed 1, got {big_radius}")));
        }
        if !(corner_radius > 0.0 && corner_radius < 1.0) {
            return Err(GeometryError::InvalidInput(format!(
                "eps must lie in (0, 1), got {corner_radius}"
            )));
        }
        let shift = big_radius - 1.0;
        let inner = big_radius - corner_radius;
        // (q + R - 1)^2 + q^2 = (R - eps)^2, positive root.
        let q = 0.5 * (-shift + (2.0 * inner * inner - shift * shift).sqrt());
        let alpha = q.atan2(q + shift);
        Ok(Self { big_radius, corner_radius, q, alpha })
    }

    pub fn big_radius(&self) -> f64 {
        self.big_radius
    }

    pub fn corner_radius(&self) -> f64 {
        self.corner_radius
    }

    pub fn arc_half_width(&self) -> f64 {
        self.alpha
    }

    /// Normal angles where the radius of curvature jumps between R and eps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(8);
        for k in 0..4 {
            let axis = k as f64 * FRAC_PI_2;
            out.push(crate::numeric::wrap_angle(axis - self.alpha));
            out.push(axis + self.alpha);
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Splits theta into (phi, on_big_arc, corner_sign) with phi in [-pi/4, pi/4].
    fn local(&self, theta: f64) -> (f64, bool, f64) {
        let k = (theta / FRAC_PI_2).round();
        let phi = (theta - k * FRAC_PI_2).clamp(-FRAC_PI_4, FRAC_PI_4);
        let sign = if phi >= 0.0 { 1.0 } else { -1.0 };
        (phi, phi.abs() <= self.alpha, sign)
    }
}

impl PlanarSupport for RoundedSquare {
    fn h(&self, theta: f64) -> f64 {
        let (phi, arc, sign) = self.local(theta);
        if arc {
            self.big_radius - (self.big_radius - 1.0) * phi.cos()
        } else {
            self.q * (phi.cos() + sign * phi.sin()) + self.corner_radius
        }
    }

    fn dh(&self, theta: f64) -> f64 {
        let (phi, arc, sign) = self.local(theta);
        if arc {
            (self.big_radius - 1.0) * phi.sin()
        } else {
            self.q * (sign * phi.cos() - phi.sin())
        }
    }

    fn d2h(&self, theta: f64) -> f64 {
        let (phi, arc, sign) = self.local(theta);
        if arc {
            (self.big_radius - 1.0) * phi.cos()
        } else {
            -self.q * (phi.cos() + sign * phi.sin())
        }
    }

    fn curvature_radius(&self, theta: f64) -> f64 {
        let (_, arc, _) = self.local(theta);
        if arc {
            self.big_radius
        } else {
            self.corner_radius
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn support_is_continuous_across_breakpoints() {
        let k = RoundedSquare::new(10.0, 0.1).unwrap();
        for b in k.breakpoints() {
            let l = k.h(b - 1e-12);
            let r = k.h(b + 1e-12);
            assert_relative_eq!(l, r, epsilon = 1e-10);
            assert_relative_eq!(k.dh(b - 1e-12), k.dh(b + 1e-12), epsilon = 1e-9);
        }
    }

    #[test]
    fn touches_unit_square_midpoints() {
        let k = RoundedSquare::new(50.0, 0.01).unwrap();
        assert_relative_eq!(k.h(0.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(k.h(FRAC_PI_2), 1.0, epsilon = 1e-14);
        let [x, y] = k.boundary_xy(0.0);
        assert_relative_eq!(x, 1.0, epsilon = 1e-15);
        assert!(y.abs() < 1e-15);
    }

    #[test]
    fn corner_arc_centre_is_inner_corner() {
        let k = RoundedSquare::new(5.0, 0.2).unwrap();
        // Boundary point at the corner normal pi/4 is (q, q) + eps (1, 1)/sqrt 2.
        let [x, y] = k.boundary_xy(FRAC_PI_4);
        let expect = k.q + 0.2 / 2f64.sqrt();
        assert_relative_eq!(x, expect, epsilon = 1e-14);
        assert_relative_eq!(y, expect, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RoundedSquare::new(1.0, 0.5).is_err());
        assert!(RoundedSquare::new(3.0, 1.0).is_err());
        assert!(RoundedSquare::new(3.0, 0.0).is_err());
    }
}
