//! Illumination surface bodies
//! K^{f,s} = { x : mu_f(boundary of K visible from x) <= s }.
//!
//! Planar bodies are handled exactly: the visible part of a smooth boundary
//! is a single arc of normal angles whose endpoints are root-found, and a
//! polygon sees whole edges. In higher dimensions the visible measure is an
//! indicator sum over a fixed Monte Carlo rule.

mod limit;
mod weights;

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

pub use limit::{scaling_constant, ConvergenceRecord, ConvergenceStudy, LimitMethod};
pub use weights::WeightField;

use crate::bodies::{BodyModel, Direction};
use crate::error::{GeometryError, Result};
use crate::numeric::{bracketed_root, compensated_sum, gauss_legendre_on, wrap_angle, CompensatedSum};
use crate::quadrature::{QuadratureRule, DEFAULT_MC_SAMPLES};

/// Rays are searched up to t = SEARCH_CAP * t0 before being declared unbounded.
pub const SEARCH_CAP: f64 = 1e6;
/// Relative resolution of t_s - t0 in the planar bisection.
pub const SCALE_REL_TOL: f64 = 1e-9;

const ROOT_TOL: f64 = 1e-14;
const PANEL_NODES: usize = 16;
const MAX_PANEL: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Outside,
}

/// The point where a ray leaves K^{f,s}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlluminationSample {
    pub direction: Vec<f64>,
    /// rho_K along the ray.
    pub t0: f64,
    /// None when the ray stays inside K^{f,s} up to the search cap.
    pub t_s: Option<f64>,
    /// t_s - t0, resolved without cancellation.
    pub excess: Option<f64>,
    /// <x_s - x, N_K(x)> for bodies with a unique normal at x.
    pub delta: Option<f64>,
    /// Illuminated measure at t_s (or at the cap).
    pub measure: f64,
}

#[derive(Debug, Clone)]
struct IndicatorNode {
    u: DVector<f64>,
    h: f64,
    mass: f64,
}

#[derive(Debug, Clone)]
enum Mode {
    PlanarSmooth,
    Polygon,
    Indicator { nodes: Vec<IndicatorNode>, total_mass: f64, descriptor: String },
}

/// A host body with a boundary weight.
#[derive(Debug, Clone)]
pub struct IlluminationModel {
    body: BodyModel,
    weight: WeightField,
    mode: Mode,
}

impl IlluminationModel {
    /// Uses the default Monte Carlo rule (seed 0) for n >= 3.
    pub fn new(body: BodyModel, weight: WeightField) -> Result<Self> {
        if body.dim() == 2 {
            return Self::planar(body, weight);
        }
        let rule = QuadratureRule::monte_carlo(body.dim(), DEFAULT_MC_SAMPLES, 0)?;
        Self::with_rule(body, weight, &rule)
    }

    /// `rule` drives the indicator quadrature for n >= 3; planar models
    /// integrate exactly and ignore it.
    pub fn with_rule(body: BodyModel, weight: WeightField, rule: &QuadratureRule) -> Result<Self> {
        if body.dim() == 2 {
            return Self::planar(body, weight);
        }
        if rule.dim() != body.dim() {
            return Err(GeometryError::DimensionMismatch { expected: body.dim(), got: rule.dim() });
        }
        weight.validate(&body)?;
        if !body.has_curvature() {
            return Err(GeometryError::UnsupportedKind { op: "illumination", kind: body.kind_name() });
        }
        let nodes: Vec<IndicatorNode> = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(u, w)| IndicatorNode {
                u: u.as_vector().clone(),
                h: body.support_unchecked(u),
                mass: w * weight.at_normal(&body, u) * body.curvature_unchecked(u),
            })
            .collect();
        if let Some(bad) = nodes.iter().find(|nd| !(nd.mass >= 0.0 && nd.mass.is_finite())) {
            return Err(GeometryError::InvalidInput(format!("weight mass {} is not finite and nonnegative", bad.mass)));
        }
        let total_mass = compensated_sum(nodes.iter().map(|nd| nd.mass));
        let descriptor = rule.descriptor();
        Ok(Self { body, weight, mode: Mode::Indicator { nodes, total_mass, descriptor } })
    }

    fn planar(body: BodyModel, weight: WeightField) -> Result<Self> {
        weight.validate(&body)?;
        let mode = match &body {
            BodyModel::Polygon2D(_) => {
                if !matches!(weight, WeightField::Constant(_) | WeightField::PiecewiseEdge(_)) {
                    return Err(GeometryError::UnsupportedKind { op: "polygon illumination weight", kind: weight.name() });
                }
                Mode::Polygon
            }
            b if b.has_curvature() => Mode::PlanarSmooth,
            b => return Err(GeometryError::UnsupportedKind { op: "illumination", kind: b.kind_name() }),
        };
        Ok(Self { body, weight, mode })
    }

    pub fn body(&self) -> &BodyModel {
        &self.body
    }

    pub fn weight(&self) -> &WeightField {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// mu_f of the part of the boundary seen from z, for z outside K.
    pub fn illuminated_measure(&self, z: &[f64]) -> Result<f64> {
        if self.body.contains(z)? {
            return Err(GeometryError::InvalidInput(format!("point {z:?} lies in the body")));
        }
        Ok(self.measure_unchecked(z))
    }

    /// Whether x lies in K^{f,s}.
    pub fn membership(&self, s: f64, x: &[f64]) -> Result<Membership> {
        check_s(s)?;
        if self.body.contains(x)? || self.measure_unchecked(x) <= s {
            Ok(Membership::Inside)
        } else {
            Ok(Membership::Outside)
        }
    }

    /// The scale t_s at which the ray through `direction` leaves K^{f,s}.
    pub fn boundary_scale(&self, s: f64, direction: &Direction) -> Result<IlluminationSample> {
        check_s(s)?;
        let t0 = self.body.radial(direction)?;
        let (excess, measure) = self.solve_excess(s, direction.as_vector(), t0);
        let cos_normal = match self.mode {
            Mode::Polygon => None,
            _ => Some(self.body.normal_toward_unchecked(direction).dot(direction.as_vector())),
        };
        Ok(IlluminationSample {
            direction: direction.coords().to_vec(),
            t0,
            t_s: excess.map(|e| t0 + e),
            excess,
            delta: excess.zip(cos_normal).map(|(e, c)| e * c),
            measure,
        })
    }

    fn measure_unchecked(&self, z: &[f64]) -> f64 {
        match &self.mode {
            Mode::PlanarSmooth => self.planar_smooth_measure(z[0], z[1]),
            Mode::Polygon => {
                let BodyModel::Polygon2D(poly) = &self.body else { unreachable!("polygon mode") };
                compensated_sum((0..poly.edge_count()).filter_map(|i| {
                    let nrm = poly.edge_normal(i);
                    let visible = z[0] * nrm[0] + z[1] * nrm[1] > poly.edge_offset(i);
                    visible.then(|| self.weight.edge_density(i) * poly.edge_length(i))
                }))
            }
            Mode::Indicator { nodes, .. } => compensated_sum(nodes.iter().filter_map(|nd| {
                let dot: f64 = nd.u.iter().zip(z).map(|(a, b)| a * b).sum();
                (dot > nd.h).then_some(nd.mass)
            })),
        }
    }

    fn planar_smooth_measure(&self, z0: f64, z1: f64) -> f64 {
        let r = z0.hypot(z1);
        if r == 0.0 {
            return 0.0;
        }
        let xhat = Direction::from_unit(DVector::from_column_slice(&[z0 / r, z1 / r]));
        let theta0 = self.body.normal_toward_unchecked(&xhat).angle();
        let g = |theta: f64| {
            let (s, c) = theta.sin_cos();
            z0 * c + z1 * s - self.body.support_unchecked(&Direction::from_angle(theta))
        };
        if !(g(theta0) > 0.0) {
            return 0.0;
        }
        let hi = arc_end(&g, theta0, 1.0);
        let lo = arc_end(&g, theta0, -1.0);
        self.planar_integral(lo, hi)
    }

    /// int_a^b f(theta) f_K(theta) d theta, split at density and curvature jumps.
    fn planar_integral(&self, a: f64, b: f64) -> f64 {
        let mut cuts: Vec<f64> = self
            .body
            .curvature_breakpoints()
            .into_iter()
            .chain(self.weight.planar_breaks(&self.body))
            .map(|beta| a + wrap_angle(beta - a))
            .filter(|beta| *beta > a && *beta < b)
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        let mut acc = CompensatedSum::new();
        for w in cuts.windows(2) {
            let panels = ((w[1] - w[0]) / MAX_PANEL).ceil().max(1.0) as usize;
            let step = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let left = w[0] + step * k as f64;
                for (theta, wt) in gauss_legendre_on(PANEL_NODES, left, left + step) {
                    let u = Direction::from_angle(theta);
                    acc.add(wt * self.weight.at_normal(&self.body, &u) * self.body.curvature_unchecked(&u));
                }
            }
        }
        acc.value()
    }

    /// t_s - t0 along the unit vector xhat (None if unbounded), and the
    /// measure there.
    fn solve_excess(&self, s: f64, xhat: &DVector<f64>, t0: f64) -> (Option<f64>, f64) {
        if s == 0.0 {
            return (Some(0.0), 0.0);
        }
        let cap = (SEARCH_CAP - 1.0) * t0;
        match &self.mode {
            Mode::Indicator { nodes, total_mass, .. } => indicator_excess(nodes, *total_mass, s, xhat, t0, cap),
            _ => {
                let measure = |e: f64| {
                    let t = t0 + e;
                    self.measure_unchecked(&[t * xhat[0], t * xhat[1]])
                };
                let mut lo = 0.0;
                let mut hi = t0 * 1e-12;
                loop {
                    if measure(hi) > s {
                        break;
                    }
                    lo = hi;
                    if hi >= cap {
                        return (None, measure(cap));
                    }
                    hi = (2.0 * hi).min(cap);
                }
                while hi - lo > SCALE_REL_TOL * lo && hi - lo > 1e-15 * t0 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if measure(mid) <= s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (Some(lo), measure(lo))
            }
        }
    }

    fn indicator_info(&self) -> Option<(usize, f64, &str)> {
        match &self.mode {
            Mode::Indicator { nodes, total_mass, descriptor } => Some((nodes.len(), *total_mass, descriptor)),
            _ => None,
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && !s.is_nan() {
        Ok(())
    } else {
        Err(GeometryError::InvalidInput(format!("s must be nonnegative, got {s}")))
    }
}

/// Endpoint of the visible arc of normal angles, walking from theta0 in
/// direction `sign` with doubling steps until the visibility test fails.
fn arc_end<G: Fn(f64) -> f64>(g: &G, theta0: f64, sign: f64) -> f64 {
    let mut inside = theta0;
    let mut step: f64 = 1e-3;
    loop {
        let trial = theta0 + sign * step.min(PI);
        if g(trial) <= 0.0 {
            return bracketed_root(g, inside, trial, ROOT_TOL);
        }
        if step >= PI {
            return trial;
        }
        inside = trial;
        step *= 2.0;
    }
}

/// Node i becomes visible from t xhat once t exceeds h_i / <xhat, u_i>; the
/// boundary scale is the first threshold at which the accumulated mass
/// exceeds s.
fn indicator_excess(
    nodes: &[IndicatorNode],
    total_mass: f64,
    s: f64,
    xhat: &DVector<f64>,
    t0: f64,
    cap: f64,
) -> (Option<f64>, f64) {
    let mut cand: Vec<(f64, f64)> = nodes
        .iter()
        .filter_map(|nd| {
            let d = xhat.dot(&nd.u);
            if d <= 0.0 {
                return None;
            }
            let e = (nd.h / d - t0).max(0.0);
            (e <= cap).then_some((e, nd.mass))
        })
        .collect();
    let order = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
    let mean_mass = total_mass / nodes.len().max(1) as f64;
    let mut k = ((1.5 * s / mean_mass) as usize + 64).min(cand.len());
    loop {
        if k == 0 {
            return (None, 0.0);
        }
        if k < cand.len() {
            cand.select_nth_unstable_by(k - 1, order);
        }
        cand[..k].sort_by(order);
        let mut acc = CompensatedSum::new();
        for &(e, m) in &cand[..k] {
            let before = acc.value();
            acc.add(m);
            if acc.value() > s {
                return (Some(e), before);
            }
        }
        if k == cand.len() {
            return (None, acc.value());
        }
        k = (2 * k).min(cand.len());
    }
}
