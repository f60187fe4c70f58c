//! Convex bodies represented through evaluable geometric oracles: support,
//! curvature function (reciprocal Gauss curvature as a function of the
//! normal), boundary point, radial function and polar.
//!
//! Every body has the origin in its interior. User-facing constructors
//! translate the centroid to the origin; polars and linear images keep the
//! origin where it is.

mod planar;
mod polygon;
mod rounded_square;
mod trig;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};

pub use polygon::Polygon;
pub use rounded_square::RoundedSquare;
pub use trig::TrigSupport;

use crate::error::{GeometryError, Result};
use crate::numeric::wrap_angle;
use planar::PlanarSupport;

/// A unit vector in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(DVector<f64>);

impl Direction {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(GeometryError::InvalidInput(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self(v / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Unit vector (cos theta, sin theta).
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(DVector::from_column_slice(&[c, s]))
    }

    pub(crate) fn from_unit(v: DVector<f64>) -> Self {
        debug_assert!((v.norm() - 1.0).abs() <= 1e-12, "not a unit vector: {}", v.norm());
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// Polar angle in [0, 2pi); only meaningful in the plane.
    pub fn angle(&self) -> f64 {
        wrap_angle(self.0[1].atan2(self.0[0]))
    }

    pub fn dot(&self, other: &DVector<f64>) -> f64 {
        self.0.dot(other)
    }
}

/// A boundary point together with its outer unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub x: DVector<f64>,
    pub normal: Direction,
    pub support_value: f64,
}

/// The centred ellipsoid T B^n for an invertible T.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl Ellipsoid {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (inverse, det) = invert(&matrix)?;
        Ok(Self { matrix, inverse, det })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn support(&self, u: &DVector<f64>) -> f64 {
        self.matrix.tr_mul(u).norm()
    }

    fn curvature(&self, u: &DVector<f64>) -> f64 {
        let n = self.dim() as i32;
        self.det * self.det / self.matrix.tr_mul(u).norm().powi(n + 1)
    }

    fn boundary_point(&self, u: &DVector<f64>) -> DVector<f64> {
        let tu = self.matrix.tr_mul(u);
        let norm = tu.norm();
        &self.matrix * tu / norm
    }

    fn radial(&self, u: &DVector<f64>) -> f64 {
        1.0 / (&self.inverse * u).norm()
    }

    fn normal_toward(&self, u: &DVector<f64>) -> DVector<f64> {
        self.inverse.tr_mul(&(&self.inverse * u))
    }
}

/// The image T K of another body under an invertible linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    base: Box<BodyModel>,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl LinearImage {
    pub fn base(&self) -> &BodyModel {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Maps a normal v of T K to the normal u of K with the same boundary
    /// point; returns (u, ||T^t v||).
    fn pull_normal(&self, v: &DVector<f64>) -> (Direction, f64) {
        let tv = self.matrix.tr_mul(v);
        let norm = tv.norm();
        (Direction::from_unit(tv / norm), norm)
    }
}

/// A convex body through its oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyModel {
    Ball { dim: usize, radius: f64 },
    Ellipsoid(Ellipsoid),
    TrigSupport2D(TrigSupport),
    RoundedSquare2D(RoundedSquare),
    Polygon2D(Polygon),
    LinearImage(LinearImage),
}

impl BodyModel {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(GeometryError::InvalidInput(format!("dimension must be >= 2, got {dim}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::Ball { dim, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::Ball { dim, radius: 1.0 }
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() < 2 {
            return Err(GeometryError::InvalidInput("ellipsoid dimension must be >= 2".into()));
        }
        Ok(Self::Ellipsoid(Ellipsoid::new(matrix)?))
    }

    pub fn ellipsoid_diag(semi_axes: &[f64]) -> Result<Self> {
        Self::ellipsoid(DMatrix::from_diagonal(&DVector::from_column_slice(semi_axes)))
    }

    pub fn trig(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Ok(Self::TrigSupport2D(TrigSupport::new(a0, a, b)?))
    }

    pub fn rounded_square(big_radius: f64, corner_radius: f64) -> Result<Self> {
        Ok(Self::RoundedSquare2D(RoundedSquare::new(big_radius, corner_radius)?))
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Ok(Self::Polygon2D(Polygon::new(vertices)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { dim, .. } => *dim,
            Self::Ellipsoid(e) => e.dim(),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) | Self::Polygon2D(_) => 2,
            Self::LinearImage(l) => l.matrix.nrows(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Ball { .. } => "ball",
            Self::Ellipsoid(_) => "ellipsoid",
            Self::TrigSupport2D(_) => "trig-support",
            Self::RoundedSquare2D(_) => "rounded-square",
            Self::Polygon2D(_) => "polygon",
            Self::LinearImage(_) => "linear-image",
        }
    }

    /// True for bodies with a globally C2 boundary and positive curvature.
    pub fn is_c2_plus(&self) -> bool {
        match self {
            Self::Ball { .. } | Self::Ellipsoid(_) | Self::TrigSupport2D(_) => true,
            Self::RoundedSquare2D(_) | Self::Polygon2D(_) => false,
            Self::LinearImage(l) => l.base.is_c2_plus(),
        }
    }

    /// True when a curvature function exists (possibly piecewise).
    pub fn has_curvature(&self) -> bool {
        match self {
            Self::Polygon2D(_) => false,
            Self::LinearImage(l) => l.base.has_curvature(),
            _ => true,
        }
    }

    fn check_dim(&self, u: &Direction) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        Ok(())
    }

    fn require_curvature(&self, op: &'static str) -> Result<()> {
        if self.has_curvature() {
            Ok(())
        } else {
            Err(GeometryError::UnsupportedKind { op, kind: self.kind_name() })
        }
    }

    fn planar(&self) -> Option<&dyn PlanarSupport> {
        match self {
            Self::TrigSupport2D(t) => Some(t),
            Self::RoundedSquare2D(r) => Some(r),
            _ => None,
        }
    }

    /// Support function h_K(u).
    pub fn support(&self, u: &Direction) -> Result<f64> {
        self.check_dim(u)?;
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &Direction) -> f64 {
        match self {
            Self::Ball { radius, .. } => *radius,
            Self::Ellipsoid(e) => e.support(&u.0),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => {
                self.planar().expect("planar").h(u.angle())
            }
            Self::Polygon2D(p) => p.support([u.0[0], u.0[1]]),
            Self::LinearImage(l) => {
                let (pulled, scale) = l.pull_normal(&u.0);
                scale * l.base.support_unchecked(&pulled)
            }
        }
    }

    /// Curvature function f_K(u): the reciprocal Gauss curvature at the
    /// boundary point with outer normal u.
    pub fn curvature_function(&self, u: &Direction) -> Result<f64> {
        self.check_dim(u)?;
        self.require_curvature("curvature_function")?;
        let f = self.curvature_unchecked(u);
        if !(f > 0.0 && f.is_finite()) {
            return Err(GeometryError::Admissibility(format!(
                "curvature function {f} at u = {:?}",
                u.coords()
            )));
        }
        Ok(f)
    }

    pub(crate) fn curvature_unchecked(&self, u: &Direction) -> f64 {
        match self {
            Self::Ball { dim, radius } => radius.powi(*dim as i32 - 1),
            Self::Ellipsoid(e) => e.curvature(&u.0),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => {
                self.planar().expect("planar").curvature_radius(u.angle())
            }
            Self::Polygon2D(_) => f64::NAN,
            Self::LinearImage(l) => {
                // f_{TK}(v) = det(T)^2 f_K(u) / ||T^t v||^{n+1}, u = T^t v / ||T^t v||.
                let (pulled, scale) = l.pull_normal(&u.0);
                let n = self.dim() as i32;
                l.det * l.det * l.base.curvature_unchecked(&pulled) / scale.powi(n + 1)
            }
        }
    }

    /// The boundary point with outer normal u.
    pub fn boundary_point(&self, u: &Direction) -> Result<BoundaryPoint> {
        self.check_dim(u)?;
        self.require_curvature("boundary_point")?;
        let x = self.boundary_unchecked(u);
        let support_value = x.dot(&u.0);
        Ok(BoundaryPoint { x, normal: u.clone(), support_value })
    }

    pub(crate) fn boundary_unchecked(&self, u: &Direction) -> DVector<f64> {
        match self {
            Self::Ball { radius, .. } => &u.0 * *radius,
            Self::Ellipsoid(e) => e.boundary_point(&u.0),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => {
                let [x, y] = self.planar().expect("planar").boundary_xy(u.angle());
                DVector::from_column_slice(&[x, y])
            }
            Self::Polygon2D(_) => DVector::from_element(2, f64::NAN),
            Self::LinearImage(l) => {
                let (pulled, _) = l.pull_normal(&u.0);
                &l.matrix * l.base.boundary_unchecked(&pulled)
            }
        }
    }

    /// Radial function rho_K(u) = max { t >= 0 : t u in K }.
    pub fn radial(&self, u: &Direction) -> Result<f64> {
        self.check_dim(u)?;
        Ok(self.radial_unchecked(u))
    }

    pub(crate) fn radial_unchecked(&self, u: &Direction) -> f64 {
        match self {
            Self::Ball { radius, .. } => *radius,
            Self::Ellipsoid(e) => e.radial(&u.0),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => {
                self.planar().expect("planar").radial_at(u.angle())
            }
            Self::Polygon2D(p) => p.radial([u.0[0], u.0[1]]),
            Self::LinearImage(l) => {
                let w = &l.inverse * &u.0;
                let norm = w.norm();
                l.base.radial_unchecked(&Direction::from_unit(w / norm)) / norm
            }
        }
    }

    /// Support function of the polar body, 1 / rho_K(u).
    pub fn polar_support(&self, u: &Direction) -> Result<f64> {
        Ok(1.0 / self.radial(u)?)
    }

    /// Outer normal at the boundary point rho_K(u) u.
    pub fn normal_toward(&self, u: &Direction) -> Result<Direction> {
        self.check_dim(u)?;
        self.require_curvature("normal_toward")?;
        Ok(self.normal_toward_unchecked(u))
    }

    pub(crate) fn normal_toward_unchecked(&self, u: &Direction) -> Direction {
        match self {
            Self::Ball { .. } => u.clone(),
            Self::Ellipsoid(e) => Direction::new(e.normal_toward(&u.0)).expect("nonzero normal"),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => {
                Direction::from_angle(self.planar().expect("planar").normal_angle_toward(u.angle()))
            }
            Self::Polygon2D(_) => u.clone(),
            Self::LinearImage(l) => {
                let w = &l.inverse * &u.0;
                let norm = w.norm();
                let base_normal = l.base.normal_toward_unchecked(&Direction::from_unit(w / norm));
                Direction::new(l.inverse.tr_mul(&base_normal.0)).expect("nonzero normal")
            }
        }
    }

    /// Whether x lies in K (boundary included).
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if let Self::Polygon2D(p) = self {
            return Ok(p.contains([x[0], x[1]]));
        }
        let v = DVector::from_column_slice(x);
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(true);
        }
        let rho = self.radial_unchecked(&Direction::from_unit(v / norm));
        Ok(norm <= rho * (1.0 + 4.0 * f64::EPSILON))
    }

    /// Normal angles (planar bodies) where the curvature function jumps.
    pub fn curvature_breakpoints(&self) -> Vec<f64> {
        match self {
            Self::RoundedSquare2D(r) => r.breakpoints(),
            Self::LinearImage(l) if self.dim() == 2 => {
                let mut out: Vec<f64> = l
                    .base
                    .curvature_breakpoints()
                    .into_iter()
                    .map(|theta| {
                        let u = Direction::from_angle(theta);
                        Direction::new(l.inverse.tr_mul(&u.0)).expect("nonzero").angle()
                    })
                    .collect();
                out.sort_by(f64::total_cmp);
                out
            }
            _ => Vec::new(),
        }
    }

    /// The polar body K°.
    pub fn polar_body(&self) -> Result<Self> {
        match self {
            Self::Ball { dim, radius } => Self::ball(*dim, 1.0 / radius),
            Self::Ellipsoid(e) => Self::ellipsoid(e.inverse.transpose()),
            Self::TrigSupport2D(t) => Ok(Self::TrigSupport2D(fit_polar(t)?)),
            Self::Polygon2D(p) => Ok(Self::Polygon2D(p.polar()?)),
            Self::RoundedSquare2D(_) => Err(GeometryError::UnsupportedKind {
                op: "polar_body",
                kind: "rounded-square",
            }),
            Self::LinearImage(l) => {
                // (T K)° = T^{-t} K°.
                let base = l.base.polar_body()?;
                base.linear_image(&l.inverse.transpose())
            }
        }
    }

    /// The image T K.
    pub fn linear_image(&self, t: &DMatrix<f64>) -> Result<Self> {
        if t.nrows() != self.dim() || t.ncols() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: t.nrows() });
        }
        let (inverse, det) = invert(t)?;
        match self {
            Self::Ball { radius, .. } => Self::ellipsoid(t * *radius),
            Self::Ellipsoid(e) => Self::ellipsoid(t * &e.matrix),
            Self::Polygon2D(p) => Ok(Self::Polygon2D(
                p.transformed([[t[(0, 0)], t[(0, 1)]], [t[(1, 0)], t[(1, 1)]]])?,
            )),
            Self::LinearImage(l) => l.base.linear_image(&(t * &l.matrix)),
            Self::TrigSupport2D(_) | Self::RoundedSquare2D(_) => Ok(Self::LinearImage(LinearImage {
                base: Box::new(self.clone()),
                matrix: t.clone(),
                inverse,
                det,
            })),
        }
    }

    /// The dilate lambda K.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("dilation factor must be positive, got {lambda}")));
        }
        match self {
            Self::Ball { dim, radius } => Self::ball(*dim, radius * lambda),
            Self::TrigSupport2D(t) => Ok(Self::TrigSupport2D(t.scaled(lambda))),
            _ => self.linear_image(&(DMatrix::identity(self.dim(), self.dim()) * lambda)),
        }
    }
}

impl fmt::Display for BodyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ball { dim, radius } => write!(f, "ball(n={dim},r={radius})"),
            Self::Ellipsoid(e) => write!(f, "ellipsoid(T={:?})", e.matrix.as_slice()),
            Self::TrigSupport2D(t) => {
                let (a0, a, b) = t.coefficients();
                write!(f, "trig(a0={a0},a={a:?},b={b:?})")
            }
            Self::RoundedSquare2D(r) => {
                write!(f, "rounded-square(R={},eps={})", r.big_radius(), r.corner_radius())
            }
            Self::Polygon2D(p) => write!(f, "polygon({:?})", p.vertices()),
            Self::LinearImage(l) => write!(f, "image(T={:?},{})", l.matrix.as_slice(), l.base),
        }
    }
}

fn invert(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    if !m.is_square() {
        return Err(GeometryError::InvalidInput("matrix must be square".into()));
    }
    let det = m.determinant();
    let scale = m.norm().powi(m.nrows() as i32);
    if !(det.abs() > 1e-12 * scale) || !det.is_finite() {
        return Err(GeometryError::InvalidInput(format!("matrix is singular (det = {det:e})")));
    }
    let inverse = m
        .clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::InvalidInput("matrix is not invertible".into()))?;
    Ok((inverse, det))
}

const POLAR_FIT_TOLERANCE: f64 = 1e-8;

/// Fits the polar of a planar body as a trigonometric support, using
/// h_{K°} = 1 / rho_K sampled on a doubling grid until the residual on the
/// interleaved grid meets the relative tolerance.
fn fit_polar(body: &TrigSupport) -> Result<TrigSupport> {
    let mut residual = f64::INFINITY;
    let mut m = 64;
    while m <= 4096 {
        let step = 2.0 * PI / m as f64;
        let samples: Vec<f64> = (0..m).map(|j| 1.0 / body.radial_at(step * j as f64)).collect();
        let degree = m / 2 - 1;
        let (a0, mut a, mut b) = TrigSupport::fit_samples(&samples, degree);
        // Drop the negligible tail so later evaluations stay cheap.
        let cutoff = 1e-15 * a0.abs();
        while a.len() > 1 && a.last().unwrap().abs() < cutoff && b.last().unwrap().abs() < cutoff {
            a.pop();
            b.pop();
        }
        let candidate = TrigSupport::uncentered(a0, a, b);
        if let Ok(fit) = candidate {
            residual = (0..m)
                .map(|j| {
                    let theta = step * (j as f64 + 0.5);
                    let exact = 1.0 / body.radial_at(theta);
                    ((fit.h(theta) - exact) / exact).abs()
                })
                .fold(0.0, f64::max);
            if residual <= POLAR_FIT_TOLERANCE {
                return Ok(fit);
            }
        }
        m *= 2;
    }
    Err(GeometryError::Approximation { residual, tolerance: POLAR_FIT_TOLERANCE })
}
