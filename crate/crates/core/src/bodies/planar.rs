//! Planar bodies described by a support function of the normal angle.

use std::f64::consts::FRAC_PI_2;

use crate::numeric::bracketed_root;

/// A planar convex body given by h(theta) and its first two derivatives.
pub(crate) trait PlanarSupport {
    fn h(&self, theta: f64) -> f64;
    fn dh(&self, theta: f64) -> f64;
    fn d2h(&self, theta: f64) -> f64;

    /// Radius of curvature h + h''.
    fn curvature_radius(&self, theta: f64) -> f64 {
        self.h(theta) + self.d2h(theta)
    }

    /// Boundary point with outer normal (cos theta, sin theta).
    fn boundary_xy(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        let h = self.h(theta);
        let dh = self.dh(theta);
        [h * c - dh * s, h * s + dh * c]
    }

    /// Normal angle of the boundary point lying in polar direction `phi`.
    ///
    /// The polar angle of x(theta) stays within pi/2 of theta because
    /// <x, u_theta> = h > 0, so the root is bracketed by phi -+ pi/2.
    fn normal_angle_toward(&self, phi: f64) -> f64 {
        let (sp, cp) = phi.sin_cos();
        let offset = |theta: f64| {
            let [x, y] = self.boundary_xy(theta);
            (cp * y - sp * x).atan2(cp * x + sp * y)
        };
        bracketed_root(offset, phi - FRAC_PI_2, phi + FRAC_PI_2, 1e-15)
    }

    fn radial_at(&self, phi: f64) -> f64 {
        let theta = self.normal_angle_toward(phi);
        let [x, y] = self.boundary_xy(theta);
        x.hypot(y)
    }
}
