//! Volume differences |K^{f,s}| - |K| and their rescaled limit as s -> 0.

use std::sync::Mutex;

use serde::Serialize;

use super::{check_s, IlluminationModel, Mode, SCALE_REL_TOL};
use crate::bodies::Direction;
use crate::error::{GeometryError, Result};
use crate::numeric::{bracketed_root, unit_ball_volume};
use crate::quadrature::{FunctionalValue, QuadratureRule};

/// c_n = 2 |B^{n-1}|^{2/(n-1)}: 8 in the plane, 2 pi in space.
pub fn scaling_constant(n: usize) -> f64 {
    let m = (n - 1) as f64;
    2.0 * unit_ball_volume(n - 1).powf(2.0 / m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub s: f64,
    pub volume_diff: f64,
    pub volume_diff_error: f64,
    /// c_n (|K^{f,s}| - |K|) / s^{2/(n-1)}
    pub scaled_ratio: f64,
    pub rhs: f64,
    /// |scaled_ratio - rhs| / rhs
    pub rel_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum LimitMethod {
    /// Three-point extrapolation with a fitted order.
    Richardson { order: f64 },
    /// The smallest-s ratio, used when no plausible order could be fitted.
    RawSmallest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub records: Vec<ConvergenceRecord>,
    pub rhs: FunctionalValue,
    pub c_n: f64,
    pub limit_estimate: f64,
    pub method: LimitMethod,
    /// |limit_estimate - rhs| / rhs
    pub limit_rel_dev: f64,
}

impl IlluminationModel {
    /// |K^{f,s}| - |K| from the radial formula, with rays through the
    /// boundary points whose normals are the nodes of `rule` (the rule's
    /// nodes are the rays themselves for polygons).
    pub fn volume_difference(&self, s: f64, rule: &QuadratureRule) -> Result<FunctionalValue> {
        check_s(s)?;
        let n = self.dim();
        if rule.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: rule.dim() });
        }
        let nf = n as f64;
        let unbounded: Mutex<Option<Vec<f64>>> = Mutex::new(None);
        let record = |xhat: &Direction| {
            let mut slot = unbounded.lock().expect("lock");
            let c = xhat.coords().to_vec();
            if slot.as_ref().is_none_or(|old| lex_less(&c, old)) {
                *slot = Some(c);
            }
            f64::NAN
        };
        let polygon = matches!(self.mode, Mode::Polygon);
        let rule = rule.split_at(&self.body.curvature_breakpoints())?;
        let result = rule.integrate(|u| {
            if polygon {
                let t0 = self.body.radial_unchecked(u);
                match self.solve_excess(s, u.as_vector(), t0).0 {
                    Some(e) => t0.powi(n as i32) * grow(nf, e / t0) / nf,
                    None => record(u),
                }
            } else {
                let x = self.body.boundary_unchecked(u);
                let t0 = x.norm();
                let xhat = x / t0;
                match self.solve_excess(s, &xhat, t0).0 {
                    Some(e) => {
                        self.body.support_unchecked(u) * self.body.curvature_unchecked(u) * grow(nf, e / t0) / nf
                    }
                    None => record(&Direction::from_unit(xhat)),
                }
            }
        });
        if let Some(direction) = unbounded.into_inner().expect("lock") {
            return Err(GeometryError::UnboundedBody { s, direction });
        }
        let mut v = result?;
        v.abs_error += v.value.abs() * nf * SCALE_REL_TOL;
        if let Some((samples, total_mass, descriptor)) = self.indicator_info() {
            // Relative noise of the visible mass, carried through vd ~ s^{2/(n-1)}.
            let visible = (s * samples as f64 / total_mass).max(1.0);
            v.abs_error += v.value.abs() * (2.0 / (nf - 1.0)) / visible.sqrt();
            v.rule_descriptor = format!("{} + indicator {}", v.rule_descriptor, descriptor);
        }
        Ok(v)
    }

    /// int_{S^{n-1}} f_K^{(n-2)/(n-1)} / f(N^{-1}(u))^{2/(n-1)} d sigma, the
    /// limit of the scaled volume difference.
    pub fn rhs_functional(&self, rule: &QuadratureRule) -> Result<FunctionalValue> {
        let n = self.dim();
        if !self.body.has_curvature() {
            return Err(GeometryError::UnsupportedKind { op: "rhs_functional", kind: self.body.kind_name() });
        }
        if rule.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: rule.dim() });
        }
        let mut breaks = self.body.curvature_breakpoints();
        breaks.extend(self.weight.planar_breaks(&self.body));
        let rule = rule.split_at(&breaks)?;
        let min_weight = rule
            .nodes()
            .iter()
            .map(|u| self.weight.at_normal(&self.body, u))
            .fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) });
        if !(min_weight > 0.0) {
            return Err(GeometryError::InvalidInput(format!("weight is not bounded below by a positive constant (min {min_weight})")));
        }
        let m = (n - 1) as f64;
        rule.integrate(|u| {
            let f = self.body.curvature_unchecked(u);
            let w = self.weight.at_normal(&self.body, u);
            ((n as f64 - 2.0) / m * f.ln() - 2.0 / m * w.ln()).exp()
        })
    }

    /// Scaled volume differences along a decreasing list of s, with a
    /// Richardson estimate of the limit from the last three records.
    pub fn convergence_study(&self, s_list: &[f64], rule: &QuadratureRule) -> Result<ConvergenceStudy> {
        if s_list.is_empty() {
            return Err(GeometryError::InvalidInput("empty s list".into()));
        }
        if s_list.iter().any(|s| !(*s > 0.0 && s.is_finite())) || s_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(GeometryError::InvalidInput("s list must be positive and strictly decreasing".into()));
        }
        let n = self.dim();
        let rhs = self.rhs_functional(rule)?;
        let c_n = scaling_constant(n);
        let power = 2.0 / (n - 1) as f64;
        let mut records = Vec::with_capacity(s_list.len());
        for &s in s_list {
            let vd = self.volume_difference(s, rule)?;
            let scaled_ratio = c_n * vd.value / s.powf(power);
            records.push(ConvergenceRecord {
                s,
                volume_diff: vd.value,
                volume_diff_error: vd.abs_error,
                scaled_ratio,
                rhs: rhs.value,
                rel_dev: (scaled_ratio - rhs.value).abs() / rhs.value,
            });
        }
        let (limit_estimate, method) = extrapolate(&records);
        Ok(ConvergenceStudy {
            limit_rel_dev: (limit_estimate - rhs.value).abs() / rhs.value,
            records,
            rhs,
            c_n,
            limit_estimate,
            method,
        })
    }
}

/// (1 + x)^n - 1 without cancellation.
fn grow(n: f64, x: f64) -> f64 {
    (n * x.ln_1p()).exp_m1()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
}

/// Fits R(s) = L + C s^a through the last three records. Orders below 0.1
/// (or no consistent fit) fall back to the smallest-s ratio.
fn extrapolate(records: &[ConvergenceRecord]) -> (f64, LimitMethod) {
    let last = records.last().expect("nonempty").scaled_ratio;
    if records.len() < 3 {
        return (last, LimitMethod::RawSmallest);
    }
    let [a, b, c] = [&records[records.len() - 3], &records[records.len() - 2], &records[records.len() - 1]];
    let (d1, d2) = (a.scaled_ratio - b.scaled_ratio, b.scaled_ratio - c.scaled_ratio);
    if d2 == 0.0 || d1 * d2 <= 0.0 {
        return (last, LimitMethod::RawSmallest);
    }
    let rho = d1 / d2;
    let model = |order: f64| (a.s.powf(order) - b.s.powf(order)) / (b.s.powf(order) - c.s.powf(order)) - rho;
    let (lo, hi) = (0.1, 12.0);
    if model(lo) * model(hi) > 0.0 {
        return (last, LimitMethod::RawSmallest);
    }
    let order = bracketed_root(model, lo, hi, 1e-12);
    let coef = d2 / (b.s.powf(order) - c.s.powf(order));
    (c.scaled_ratio - coef * c.s.powf(order), LimitMethod::Richardson { order })
}
