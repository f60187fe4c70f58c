use std::f64::consts::PI;

use crate::bodies::{BodyModel, Direction};
use crate::error::{GeometryError, Result};
use crate::functionals::POLE_GUARD;

/// A nonnegative density f on the boundary of the host body.
///
/// Smooth-body weights are evaluated at the boundary point with a given
/// outer normal; `PiecewiseEdge` is only meaningful on polygons.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightField {
    Constant(f64),
    /// One density per polygon edge, in edge order.
    PiecewiseEdge(Vec<f64>),
    /// Densities on the four coordinate quadrants of the boundary point,
    /// counter-clockwise from the positive quadrant.
    QuadrantDisk([f64; 4]),
    /// kappa^{(n+2p-np)/(2(n+p))} <x, N>^{n(n-1)(p-1)/(2(n+p))}
    GpWeight(f64),
    /// sqrt(kappa)
    SqrtKappa,
    /// Weight whose limit functional is the mixed p-affine surface area of
    /// `bodies` (one per dimension).
    MixedWeight { bodies: Vec<BodyModel>, p: f64 },
}

impl WeightField {
    /// Quadrant densities for which K^{f,1/64} of the unit disk is not convex.
    pub fn nonconvex_disk() -> Self {
        Self::QuadrantDisk([1.0 / (4.0 * PI), 23.0 / (16.0 * PI), 1.0 / (4.0 * PI), 1.0 / (16.0 * PI)])
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::PiecewiseEdge(_) => "piecewise-edge",
            Self::QuadrantDisk(_) => "quadrant-disk",
            Self::GpWeight(_) => "gp",
            Self::SqrtKappa => "sqrt-kappa",
            Self::MixedWeight { .. } => "mixed",
        }
    }

    /// A positive lower bound, when one is known without evaluation.
    pub fn lower_bound(&self) -> Option<f64> {
        match self {
            Self::Constant(c) => Some(*c),
            Self::PiecewiseEdge(v) => v.iter().copied().reduce(f64::min),
            Self::QuadrantDisk(v) => v.iter().copied().reduce(f64::min),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, body: &BodyModel) -> Result<()> {
        let n = body.dim();
        let positive = |vals: &[f64]| -> Result<()> {
            match vals.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                Some(v) => Err(GeometryError::InvalidInput(format!("weight values must be positive, got {v}"))),
                None => Ok(()),
            }
        };
        let c2_host = |what: &'static str| -> Result<()> {
            if body.is_c2_plus() {
                Ok(())
            } else {
                Err(GeometryError::UnsupportedKind { op: what, kind: body.kind_name() })
            }
        };
        let pole = |p: f64| -> Result<()> {
            if !p.is_finite() || (n as f64 + p).abs() < POLE_GUARD {
                return Err(GeometryError::InvalidInput(format!("weight exponent p = {p} is not admissible for n = {n}")));
            }
            Ok(())
        };
        match self {
            Self::Constant(c) => positive(&[*c]),
            Self::PiecewiseEdge(v) => {
                let BodyModel::Polygon2D(poly) = body else {
                    return Err(GeometryError::UnsupportedKind { op: "piecewise-edge weight", kind: body.kind_name() });
                };
                if v.len() != poly.edge_count() {
                    return Err(GeometryError::InvalidInput(format!(
                        "{} edge weights for a polygon with {} edges",
                        v.len(),
                        poly.edge_count()
                    )));
                }
                positive(v)
            }
            Self::QuadrantDisk(v) => {
                if n != 2 || !body.has_curvature() {
                    return Err(GeometryError::UnsupportedKind { op: "quadrant weight", kind: body.kind_name() });
                }
                positive(v)
            }
            Self::GpWeight(p) => {
                c2_host("gp weight")?;
                pole(*p)
            }
            Self::SqrtKappa => c2_host("sqrt-kappa weight"),
            Self::MixedWeight { bodies, p } => {
                c2_host("mixed weight")?;
                pole(*p)?;
                if bodies.len() != n {
                    return Err(GeometryError::InvalidInput(format!(
                        "mixed weight needs {n} bodies, got {}",
                        bodies.len()
                    )));
                }
                for b in bodies {
                    if b.dim() != n {
                        return Err(GeometryError::DimensionMismatch { expected: n, got: b.dim() });
                    }
                    if !b.has_curvature() {
                        return Err(GeometryError::UnsupportedKind { op: "mixed weight", kind: b.kind_name() });
                    }
                }
                Ok(())
            }
        }
    }

    /// Density at the boundary point of `body` with outer normal u.
    pub(crate) fn at_normal(&self, body: &BodyModel, u: &Direction) -> f64 {
        let n = body.dim() as f64;
        match self {
            Self::Constant(c) => *c,
            Self::PiecewiseEdge(_) => f64::NAN,
            Self::QuadrantDisk(v) => {
                let x = body.boundary_unchecked(u);
                v[quadrant(x[0], x[1])]
            }
            Self::GpWeight(p) => {
                let a = (n + 2.0 * p - n * p) / (2.0 * (n + p));
                let b = n * (n - 1.0) * (p - 1.0) / (2.0 * (n + p));
                let f = body.curvature_unchecked(u);
                let h = body.support_unchecked(u);
                (b * h.ln() - a * f.ln()).exp()
            }
            Self::SqrtKappa => body.curvature_unchecked(u).powf(-0.5),
            Self::MixedWeight { bodies, p } => {
                let e = (1.0 - n) / (2.0 * (n + p));
                let log: f64 = bodies
                    .iter()
                    .map(|b| e * ((1.0 - p) * b.support_unchecked(u).ln() + b.curvature_unchecked(u).ln()))
                    .sum();
                (0.5 * (n - 2.0) * body.curvature_unchecked(u).ln() + log).exp()
            }
        }
    }

    /// Normal angles at which the planar density may jump.
    pub(crate) fn planar_breaks(&self, body: &BodyModel) -> Vec<f64> {
        match self {
            Self::QuadrantDisk(_) => (0..4)
                .map(|k| {
                    let axis = Direction::from_angle(k as f64 * PI / 2.0);
                    body.normal_toward_unchecked(&axis).angle()
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Density on edge i of a polygon.
    pub(crate) fn edge_density(&self, i: usize) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::PiecewiseEdge(v) => v[i],
            _ => f64::NAN,
        }
    }
}

fn quadrant(x: f64, y: f64) -> usize {
    match (x >= 0.0, y >= 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}
