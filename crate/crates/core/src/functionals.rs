//! Scalar functionals of convex bodies evaluated by spherical quadrature:
//! mixed and L_p affine surface areas, their p = -n analogues, dual mixed
//! volumes, the i-th mixed variants, volume and surface area.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bodies::{BodyModel, Direction};
use crate::error::{GeometryError, Result};
use crate::numeric::golden_section_max;
use crate::quadrature::QuadratureRule;

pub use crate::quadrature::FunctionalValue;

/// Distance to the pole p = -n below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-6;

/// The exponent p, with the two infinite limits as distinct values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    PosInf,
    NegInf,
}

impl Exponent {
    pub fn is_infinite(&self) -> bool {
        !matches!(self, Self::Finite(_))
    }

    /// The value as an f64 (with infinities).
    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Finite(p) => *p,
            Self::PosInf => f64::INFINITY,
            Self::NegInf => f64::NEG_INFINITY,
        }
    }

    fn check_pole(&self, n: usize) -> Result<()> {
        if let Self::Finite(p) = self {
            if !p.is_finite() {
                return Err(GeometryError::InvalidInput(format!("exponent must be finite or ±inf, got {p}")));
            }
            if (p + n as f64).abs() < POLE_GUARD {
                return Err(GeometryError::ExponentPole { p: *p, route: "mixed_minus_n" });
            }
        }
        Ok(())
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            Self::PosInf
        } else if p == f64::NEG_INFINITY {
            Self::NegInf
        } else {
            Self::Finite(p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::PosInf => f.write_str("inf"),
            Self::NegInf => f.write_str("-inf"),
        }
    }
}

/// f_p(K, u) = h_K(u)^{1-p} f_K(u).
pub fn f_p(body: &BodyModel, p: f64, u: &Direction) -> Result<f64> {
    let h = body.support(u)?;
    let f = body.curvature_function(u)?;
    Ok(h.powf(1.0 - p) * f)
}

fn common_dim(bodies: &[&BodyModel]) -> Result<usize> {
    let n = bodies
        .first()
        .ok_or_else(|| GeometryError::InvalidInput("at least one body is required".into()))?
        .dim();
    for b in bodies {
        if b.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: b.dim() });
        }
    }
    Ok(n)
}

fn require_curvature(bodies: &[&BodyModel], op: &'static str) -> Result<()> {
    for b in bodies {
        if !b.has_curvature() {
            return Err(GeometryError::UnsupportedKind { op, kind: b.kind_name() });
        }
    }
    Ok(())
}

fn check_rule(rule: &QuadratureRule, n: usize) -> Result<()> {
    if rule.dim() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: rule.dim() });
    }
    Ok(())
}

/// Splits a planar rule at the curvature breakpoints of piecewise bodies.
fn adapted(rule: &QuadratureRule, bodies: &[&BodyModel]) -> Result<QuadratureRule> {
    let breaks: Vec<f64> = bodies.iter().flat_map(|b| b.curvature_breakpoints()).collect();
    rule.split_at(&breaks)
}

/// log h and log f of each body at u.
fn log_hf(body: &BodyModel, u: &Direction) -> (f64, f64) {
    (body.support_unchecked(u).ln(), body.curvature_unchecked(u).ln())
}

/// Weighted product integrand prod_k f_p(K_k, u)^{e_k / (n + p)} in log space,
/// or prod_k h_{K_k}(u)^{-e_k} at p = ±inf.
fn weighted_integral(
    factors: &[(&BodyModel, f64)],
    n: usize,
    p: Exponent,
    rule: &QuadratureRule,
) -> Result<FunctionalValue> {
    let bodies: Vec<&BodyModel> = factors.iter().map(|(b, _)| *b).collect();
    let rule = adapted(rule, &bodies)?;
    match p {
        Exponent::Finite(p) => {
            let denom = n as f64 + p;
            rule.integrate(|u| {
                let log: f64 = factors
                    .iter()
                    .filter(|(_, e)| *e != 0.0)
                    .map(|(b, e)| {
                        let (lh, lf) = log_hf(b, u);
                        e * ((1.0 - p) * lh + lf)
                    })
                    .sum();
                (log / denom).exp()
            })
        }
        Exponent::PosInf | Exponent::NegInf => rule.integrate(|u| {
            let log: f64 = factors
                .iter()
                .filter(|(_, e)| *e != 0.0)
                .map(|(b, e)| -e * b.support_unchecked(u).ln())
                .sum();
            log.exp()
        }),
    }
}

/// Mixed p-affine surface area as_p(K_1, ..., K_n).
pub fn mixed_p_affine(bodies: &[BodyModel], p: Exponent, rule: &QuadratureRule) -> Result<FunctionalValue> {
    let refs: Vec<&BodyModel> = bodies.iter().collect();
    let n = common_dim(&refs)?;
    if bodies.len() != n {
        return Err(GeometryError::InvalidInput(format!(
            "mixed p-affine surface area needs n = {n} bodies, got {}",
            bodies.len()
        )));
    }
    p.check_pole(n)?;
    check_rule(rule, n)?;
    require_curvature(&refs, "mixed_p_affine")?;
    let factors: Vec<(&BodyModel, f64)> = bodies.iter().map(|b| (b, 1.0)).collect();
    weighted_integral(&factors, n, p, rule)
}

/// L_p affine surface area as_p(K).
pub fn lp_affine(body: &BodyModel, p: Exponent, rule: &QuadratureRule) -> Result<FunctionalValue> {
    let n = body.dim();
    p.check_pole(n)?;
    check_rule(rule, n)?;
    require_curvature(&[body], "lp_affine")?;
    weighted_integral(&[(body, n as f64)], n, p, rule)
}

/// i-th mixed p-affine surface area as_{p,i}(K, L); i may be any real.
pub fn ith_mixed(
    k: &BodyModel,
    l: &BodyModel,
    p: Exponent,
    i: f64,
    rule: &QuadratureRule,
) -> Result<FunctionalValue> {
    let n = common_dim(&[k, l])?;
    if !i.is_finite() {
        return Err(GeometryError::InvalidInput(format!("index i must be finite, got {i}")));
    }
    p.check_pole(n)?;
    check_rule(rule, n)?;
    require_curvature(&[k, l], "ith_mixed")?;
    weighted_integral(&[(k, n as f64 - i), (l, i)], n, p, rule)
}

/// Dual mixed volume (1/n) int prod rho_{L_k} of the listed bodies.
pub fn dual_mixed_volume(bodies: &[BodyModel], rule: &QuadratureRule) -> Result<FunctionalValue> {
    let refs: Vec<&BodyModel> = bodies.iter().collect();
    let n = common_dim(&refs)?;
    if bodies.len() != n {
        return Err(GeometryError::InvalidInput(format!(
            "dual mixed volume needs n = {n} bodies, got {}",
            bodies.len()
        )));
    }
    check_rule(rule, n)?;
    let v = rule.integrate(|u| bodies.iter().map(|b| b.radial_unchecked(u)).product())?;
    Ok(v.scale(1.0 / n as f64))
}

/// (1/n) int h_K^{-(n-i)} h_L^{-i}, the i-th dual mixed volume of the polars.
pub fn dual_mixed_volume_i(k: &BodyModel, l: &BodyModel, i: f64, rule: &QuadratureRule) -> Result<FunctionalValue> {
    let n = common_dim(&[k, l])?;
    check_rule(rule, n)?;
    let nf = n as f64;
    let v = rule.integrate(|u| {
        (-(nf - i) * k.support_unchecked(u).ln() - i * l.support_unchecked(u).ln()).exp()
    })?;
    Ok(v.scale(1.0 / nf))
}

/// Planar mixed volume V(K, L) = (1/2) int h_K f_L.
pub fn mixed_volume_2d(k: &BodyModel, l: &BodyModel, rule: &QuadratureRule) -> Result<FunctionalValue> {
    let n = common_dim(&[k, l])?;
    if n != 2 {
        return Err(GeometryError::UnsupportedDimension {
            n,
            reason: "mixed volumes of distinct bodies are only implemented in the plane",
        });
    }
    check_rule(rule, n)?;
    require_curvature(&[l], "mixed_volume_2d")?;
    let rule = adapted(rule, &[k, l])?;
    let v = rule.integrate(|u| k.support_unchecked(u) * l.curvature_unchecked(u))?;
    Ok(v.scale(0.5))
}

/// Volume (1/n) int h f; polygons use the shoelace formula.
pub fn volume(body: &BodyModel, rule: &QuadratureRule) -> Result<FunctionalValue> {
    if let BodyModel::Polygon2D(p) = body {
        return Ok(FunctionalValue::exact(p.area(), "shoelace"));
    }
    let n = body.dim();
    check_rule(rule, n)?;
    let rule = adapted(rule, &[body])?;
    let v = rule.integrate(|u| body.support_unchecked(u) * body.curvature_unchecked(u))?;
    Ok(v.scale(1.0 / n as f64))
}

/// Volume via the radial formula (1/n) int rho^n.
pub fn volume_radial(body: &BodyModel, rule: &QuadratureRule) -> Result<FunctionalValue> {
    let n = body.dim();
    check_rule(rule, n)?;
    let v = rule.integrate(|u| body.radial_unchecked(u).powi(n as i32))?;
    Ok(v.scale(1.0 / n as f64))
}

/// Surface area int f; polygons use the perimeter.
pub fn surface_area(body: &BodyModel, rule: &QuadratureRule) -> Result<FunctionalValue> {
    if let BodyModel::Polygon2D(p) = body {
        return Ok(FunctionalValue::exact(p.perimeter(), "perimeter"));
    }
    check_rule(rule, body.dim())?;
    let rule = adapted(rule, &[body])?;
    rule.integrate(|u| body.curvature_unchecked(u))
}

/// Mixed (-n)-affine surface area: the maximum over the sphere of
/// prod_k f_{K_k}^{1/2n} h_{K_k}^{(n+1)/2n}.
pub fn mixed_minus_n(bodies: &[BodyModel]) -> Result<FunctionalValue> {
    let refs: Vec<&BodyModel> = bodies.iter().collect();
    let n = common_dim(&refs)?;
    if bodies.len() != n {
        return Err(GeometryError::InvalidInput(format!(
            "mixed (-n)-affine surface area needs n = {n} bodies, got {}",
            bodies.len()
        )));
    }
    require_curvature(&refs, "mixed_minus_n")?;
    let factors: Vec<(&BodyModel, f64)> = bodies.iter().map(|b| (b, 1.0)).collect();
    maximize_product(&factors, n)
}

/// i-th mixed (-n)-affine surface area.
pub fn ith_mixed_minus_n(k: &BodyModel, l: &BodyModel, i: f64) -> Result<FunctionalValue> {
    let n = common_dim(&[k, l])?;
    if !i.is_finite() {
        return Err(GeometryError::InvalidInput(format!("index i must be finite, got {i}")));
    }
    require_curvature(&[k, l], "ith_mixed_minus_n")?;
    maximize_product(&[(k, n as f64 - i), (l, i)], n)
}

const MAXIMIZER_TOLERANCE: f64 = 1e-8;

/// max_u prod_k (f_k h_k^{n+1})^{e_k / 2n}, searched in log space.
fn maximize_product(factors: &[(&BodyModel, f64)], n: usize) -> Result<FunctionalValue> {
    let scale = 1.0 / (2.0 * n as f64);
    let objective = |u: &Direction| -> f64 {
        let log: f64 = factors
            .iter()
            .filter(|(_, e)| *e != 0.0)
            .map(|(b, e)| {
                let (lh, lf) = log_hf(b, u);
                e * (lf + (n as f64 + 1.0) * lh)
            })
            .sum();
        scale * log
    };
    let bodies: Vec<&BodyModel> = factors.iter().map(|(b, _)| *b).collect();
    let (best, descriptor) = if n == 2 {
        let breaks: Vec<f64> = bodies.iter().flat_map(|b| b.curvature_breakpoints()).collect();
        (maximize_circle(&objective, &breaks), "scan(4096)+golden")
    } else {
        (maximize_sphere(&objective, n)?, "scan+ascent")
    };
    if !best.is_finite() {
        return Err(GeometryError::Evaluation { node: 0, value: best });
    }
    let value = best.exp();
    Ok(FunctionalValue { value, abs_error: MAXIMIZER_TOLERANCE * value, rule_descriptor: descriptor.into() })
}

fn maximize_circle(objective: &impl Fn(&Direction) -> f64, breaks: &[f64]) -> f64 {
    const SCAN: usize = 4096;
    let step = 2.0 * std::f64::consts::PI / SCAN as f64;
    let g = |theta: f64| objective(&Direction::from_angle(theta));
    let (j, _) = (0..SCAN)
        .map(|j| (j, g(step * j as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    let centre = step * j as f64;
    let (_, refined) = golden_section_max(g, centre - step, centre + step, 1e-10);
    // Piecewise bodies can peak exactly at a breakpoint.
    breaks.iter().map(|b| g(*b)).fold(refined, f64::max)
}

fn maximize_sphere(objective: &(impl Fn(&Direction) -> f64 + Sync), n: usize) -> Result<f64> {
    let grid = if n == 3 {
        QuadratureRule::sphere3(32)?
    } else {
        QuadratureRule::monte_carlo(n, 20_000, 0)?
    };
    let mut scored: Vec<(f64, usize)> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, u)| (objective(u), k))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let spacing = if n == 3 { 0.1 } else { 0.5 };
    let mut best = f64::NEG_INFINITY;
    // Ascend from the few best grid points to guard against secondary peaks.
    for &(_, k) in scored.iter().take(6) {
        best = best.max(pattern_ascent(objective, grid.nodes()[k].as_vector().clone(), spacing));
    }
    Ok(best)
}

/// Compass search on the sphere: try +-step along each coordinate, renormalize,
/// halve the step when no move improves.
fn pattern_ascent(objective: &impl Fn(&Direction) -> f64, start: DVector<f64>, mut step: f64) -> f64 {
    let n = start.len();
    let mut x = Direction::new(start).expect("unit start");
    let mut fx = objective(&x);
    while step > 1e-10 {
        let mut moved = false;
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut v = x.as_vector().clone();
                v[k] += sign * step;
                if let Ok(cand) = Direction::new(v) {
                    let fc = objective(&cand);
                    if fc > fx {
                        x = cand;
                        fx = fc;
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    fx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::unit_ball_volume;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle() -> QuadratureRule {
        QuadratureRule::circle(256).unwrap()
    }

    #[test]
    fn ball_normalization_in_plane() {
        let b = BodyModel::unit_ball(2);
        for p in [-10.0, -0.5, 0.0, 1.0, 2.0, 10.0] {
            let v = lp_affine(&b, Exponent::Finite(p), &circle()).unwrap();
            assert_relative_eq!(v.value, 2.0 * PI, max_relative = 1e-13);
        }
        let v = mixed_p_affine(&[b.clone(), b], Exponent::PosInf, &circle()).unwrap();
        assert_relative_eq!(v.value, 2.0 * PI, max_relative = 1e-13);
    }

    #[test]
    fn pole_is_rejected() {
        let b = BodyModel::unit_ball(2);
        let err = lp_affine(&b, Exponent::Finite(-2.0), &circle()).unwrap_err();
        assert_eq!(err, GeometryError::ExponentPole { p: -2.0, route: "mixed_minus_n" });
        assert!(lp_affine(&b, Exponent::Finite(-2.0 + 5e-7), &circle()).is_err());
    }

    #[test]
    fn body_count_must_match_dimension() {
        let b = BodyModel::unit_ball(3);
        let rule = QuadratureRule::sphere3(8).unwrap();
        assert!(matches!(
            mixed_p_affine(&[b.clone(), b], Exponent::Finite(1.0), &rule),
            Err(GeometryError::InvalidInput(_))
        ));
    }

    #[test]
    fn dual_mixed_volume_of_two_balls() {
        let v = dual_mixed_volume_i(&BodyModel::ball(2, 2.0).unwrap(), &BodyModel::unit_ball(2), 0.0, &circle())
            .unwrap();
        assert_relative_eq!(v.value, PI / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn volume_and_surface_of_balls() {
        let r3 = QuadratureRule::sphere3(16).unwrap();
        assert_relative_eq!(volume(&BodyModel::unit_ball(3), &r3).unwrap().value, unit_ball_volume(3), max_relative = 1e-13);
        assert_relative_eq!(surface_area(&BodyModel::unit_ball(3), &r3).unwrap().value, 4.0 * PI, max_relative = 1e-13);
        let e = BodyModel::ellipsoid_diag(&[2.0, 3.0]).unwrap();
        assert_relative_eq!(volume(&e, &circle()).unwrap().value, 6.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn mixed_volume_rejects_three_dimensions() {
        let b = BodyModel::unit_ball(3);
        let r3 = QuadratureRule::sphere3(8).unwrap();
        assert!(matches!(mixed_volume_2d(&b, &b, &r3), Err(GeometryError::UnsupportedDimension { n: 3, .. })));
    }

    #[test]
    fn minus_n_of_balls() {
        let r = 1.7;
        for n in [2, 3] {
            let b = BodyModel::ball(n, r).unwrap();
            let v = mixed_minus_n(&vec![b; n]).unwrap();
            assert_relative_eq!(v.value, r.powi(n as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn rounded_square_functionals_use_arc_rule() {
        let k = BodyModel::rounded_square(4.0, 0.2).unwrap();
        let rule = QuadratureRule::circle(512).unwrap();
        let by_support = volume(&k, &rule).unwrap();
        let by_radial = volume_radial(&k, &QuadratureRule::circle(4096).unwrap()).unwrap();
        assert_relative_eq!(by_support.value, by_radial.value, max_relative = 1e-6);
        // Perimeter = 4 big arcs of angle 2 alpha plus a full eps circle.
        let alpha = match &k {
            BodyModel::RoundedSquare2D(r) => r.arc_half_width(),
            _ => unreachable!(),
        };
        let per = 4.0 * 2.0 * alpha * 4.0 + 2.0 * PI * 0.2 * (1.0 - 4.0 * 2.0 * alpha / (2.0 * PI));
        assert_relative_eq!(surface_area(&k, &rule).unwrap().value, per, max_relative = 1e-12);
    }
}
