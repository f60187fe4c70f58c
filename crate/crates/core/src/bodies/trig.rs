//! Planar bodies whose support function is a trigonometric polynomial.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::planar::PlanarSupport;
use crate::error::{GeometryError, Result};
use crate::numeric::compensated_sum;

/// h(theta) = a0 + sum_k a_k cos(k theta) + b_k sin(k theta), k = 1..=degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSupport {
    a0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigSupport {
    /// Builds the body and translates its centroid to the origin.
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let mut body = Self::uncentered(a0, a, b)?;
        let c = body.centroid();
        // Translation by -c only changes the first harmonic.
        body.a[0] -= c[0];
        body.b[0] -= c[1];
        body.validate()?;
        Ok(body)
    }

    /// Builds the body as given, keeping the origin where it is.
    pub fn uncentered(a0: f64, mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Self> {
        if !(a0.is_finite() && a.iter().chain(&b).all(|c| c.is_finite())) {
            return Err(GeometryError::InvalidInput("non-finite trig coefficient".into()));
        }
        let degree = a.len().max(b.len()).max(1);
        a.resize(degree, 0.0);
        b.resize(degree, 0.0);
        let body = Self { a0, a, b };
        body.validate()?;
        Ok(body)
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn coefficients(&self) -> (f64, &[f64], &[f64]) {
        (self.a0, &self.a, &self.b)
    }

    /// Grid used for admissibility: h > 0 and h + h'' > 0.
    fn admissibility_grid(&self) -> usize {
        (32 * self.degree()).max(2048)
    }

    fn validate(&self) -> Result<()> {
        let m = self.admissibility_grid();
        for j in 0..m {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let h = self.h(theta);
            if h <= 0.0 {
                return Err(GeometryError::Admissibility(format!(
                    "support {h:.3e} <= 0 at theta = {theta:.6}; origin not interior"
                )));
            }
            let f = self.curvature_radius(theta);
            if f <= 0.0 {
                return Err(GeometryError::Admissibility(format!(
                    "h + h'' = {f:.3e} <= 0 at theta = {theta:.6}"
                )));
            }
        }
        Ok(())
    }

    /// Centroid via the cone decomposition: each boundary element contributes
    /// a triangle of area h ds / 2 with centroid 2x/3.
    fn centroid(&self) -> [f64; 2] {
        let m = (8 * self.degree()).max(64);
        let step = 2.0 * PI / m as f64;
        let samples: Vec<(f64, [f64; 2])> = (0..m)
            .map(|j| {
                let theta = step * j as f64;
                let w = self.h(theta) * self.curvature_radius(theta);
                (w, self.boundary_xy(theta))
            })
            .collect();
        let area = 0.5 * step * compensated_sum(samples.iter().map(|s| s.0));
        let mx = step / 3.0 * compensated_sum(samples.iter().map(|s| s.0 * s.1[0]));
        let my = step / 3.0 * compensated_sum(samples.iter().map(|s| s.0 * s.1[1]));
        [mx / area, my / area]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            a0: self.a0 * lambda,
            a: self.a.iter().map(|c| c * lambda).collect(),
            b: self.b.iter().map(|c| c * lambda).collect(),
        }
    }

    /// Least-squares fit (exact DFT projection) of samples on an equispaced
    /// grid of `m` angles, truncated to `degree` harmonics.
    pub(crate) fn fit_samples(samples: &[f64], degree: usize) -> (f64, Vec<f64>, Vec<f64>) {
        let m = samples.len();
        let step = 2.0 * PI / m as f64;
        let a0 = compensated_sum(samples.iter().copied()) / m as f64;
        let mut a = Vec::with_capacity(degree);
        let mut b = Vec::with_capacity(degree);
        for k in 1..=degree {
            let kf = k as f64;
            let ak = compensated_sum(
                samples.iter().enumerate().map(|(j, g)| g * (kf * step * j as f64).cos()),
            ) * 2.0
                / m as f64;
            let bk = compensated_sum(
                samples.iter().enumerate().map(|(j, g)| g * (kf * step * j as f64).sin()),
            ) * 2.0
                / m as f64;
            a.push(ak);
            b.push(bk);
        }
        (a0, a, b)
    }
}

impl PlanarSupport for TrigSupport {
    fn h(&self, theta: f64) -> f64 {
        let mut acc = self.a0;
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let (s, c) = ((k + 1) as f64 * theta).sin_cos();
            acc += ak * c + bk * s;
        }
        acc
    }

    fn dh(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc += kf * (bk * c - ak * s);
        }
        acc
    }

    fn d2h(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc -= kf * kf * (ak * c + bk * s);
        }
        acc
    }

    fn curvature_radius(&self, theta: f64) -> f64 {
        // Closed form (1 - k^2) weighting avoids cancellation between h and h''.
        let mut acc = self.a0;
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc += (1.0 - kf * kf) * (ak * c + bk * s);
        }
        acc
    }
}
