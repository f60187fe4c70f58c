//! Rounded squares K(R, eps) whose p-affine surface area tends to zero.

use serde::Serialize;

use crate::bodies::BodyModel;
use crate::error::{GeometryError, Result};
use crate::functionals::{lp_affine, Exponent};
use crate::quadrature::{QuadratureRule, DEFAULT_CIRCLE_NODES};

/// (R, eps) pairs with R growing and eps shrinking.
pub const DEFAULT_SCHEDULE: [(f64, f64); 4] = [(10.0, 0.1), (1e2, 1e-2), (1e3, 1e-3), (1e4, 1e-4)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateRow {
    pub big_radius: f64,
    pub eps: f64,
    pub as_p: f64,
    pub abs_error: f64,
    /// 16 / R^{p/(2+p)} + 4 pi eps^{2/(2+p)}
    pub bound: f64,
    pub holds: bool,
    /// as_p is strictly below the previous row's value (true on the first row).
    pub decreasing: bool,
}

pub fn degenerate_bound(p: f64, big_radius: f64, eps: f64) -> f64 {
    16.0 / big_radius.powf(p / (2.0 + p)) + 4.0 * std::f64::consts::PI * eps.powf(2.0 / (2.0 + p))
}

/// as_p of each K(R, eps) against the closed-form upper bound.
pub fn degenerate_sequence_study(p: f64, pairs: &[(f64, f64)]) -> Result<Vec<DegenerateRow>> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(GeometryError::InvalidInput(format!("p must be positive and finite, got {p}")));
    }
    let rule = QuadratureRule::circle(DEFAULT_CIRCLE_NODES)?;
    let mut rows: Vec<DegenerateRow> = Vec::with_capacity(pairs.len());
    for &(big_radius, eps) in pairs {
        let body = BodyModel::rounded_square(big_radius, eps)?;
        let v = lp_affine(&body, Exponent::Finite(p), &rule)?;
        let bound = degenerate_bound(p, big_radius, eps);
        let decreasing = rows.last().is_none_or(|prev| v.value < prev.as_p);
        rows.push(DegenerateRow {
            big_radius,
            eps,
            as_p: v.value,
            abs_error: v.abs_error,
            bound,
            holds: v.value <= bound,
            decreasing,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_decreases_under_bound() {
        let rows = degenerate_sequence_study(1.0, &DEFAULT_SCHEDULE).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.holds && r.decreasing), "{rows:?}");
    }

    #[test]
    fn rejects_nonpositive_p() {
        assert!(degenerate_sequence_study(0.0, &DEFAULT_SCHEDULE).is_err());
        assert!(degenerate_sequence_study(1.0, &[(0.5, 0.1)]).is_err());
    }
}
