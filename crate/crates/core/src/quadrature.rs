//! Quadrature rules on S^{n-1} with a-posteriori error estimates.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::Direction;
use crate::error::{GeometryError, Result};
use crate::numeric::{compensated_sum, gauss_legendre, gauss_legendre_on, unit_sphere_area, wrap_angle};

pub const DEFAULT_CIRCLE_NODES: usize = 512;
pub const DEFAULT_SPHERE_LEVEL: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 200_000;

/// A computed scalar with an absolute error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub abs_error: f64,
    pub rule_descriptor: String,
}

impl FunctionalValue {
    pub fn exact(value: f64, rule_descriptor: impl Into<String>) -> Self {
        Self { value, abs_error: 0.0, rule_descriptor: rule_descriptor.into() }
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_error
        } else {
            self.abs_error / self.value.abs()
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { value: self.value * factor, abs_error: self.abs_error * factor.abs(), ..self }
    }
}

impl fmt::Display for FunctionalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e} ± {:.3e} [{}]", self.value, self.abs_error, self.rule_descriptor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleKind {
    /// Equispaced angles on S^1.
    Circle { m: usize },
    /// Gauss-Legendre sub-rules on the arcs between sorted break angles.
    Arcs { breaks: Vec<f64>, per_arc: usize },
    /// Gauss-Legendre in z times uniform azimuth on S^2.
    Sphere3 { level: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Nodes and positive weights on S^{n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    kind: RuleKind,
    nodes: Vec<Direction>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// m equispaced angles with weight 2pi/m.
    pub fn circle(m: usize) -> Result<Self> {
        if m < 4 {
            return Err(GeometryError::InvalidInput(format!("circle rule needs m >= 4, got {m}")));
        }
        let step = 2.0 * PI / m as f64;
        let nodes = (0..m).map(|j| Direction::from_angle(step * j as f64)).collect();
        Ok(Self { dim: 2, kind: RuleKind::Circle { m }, nodes, weights: vec![step; m] })
    }

    /// Piecewise Gauss-Legendre on the arcs cut out by `breaks` (angles).
    /// Exact for integrands that are polynomial in theta of degree
    /// < 2 per_arc on every arc.
    pub fn arcs(breaks: &[f64], per_arc: usize) -> Result<Self> {
        if per_arc < 2 {
            return Err(GeometryError::InvalidInput("arc rule needs >= 2 nodes per arc".into()));
        }
        let mut cuts: Vec<f64> = breaks.iter().map(|b| wrap_angle(*b)).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        if cuts.is_empty() {
            cuts.push(0.0);
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (k, &a) in cuts.iter().enumerate() {
            let b = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + 2.0 * PI };
            for (x, w) in gauss_legendre_on(per_arc, a, b) {
                nodes.push(Direction::from_angle(x));
                weights.push(w);
            }
        }
        Ok(Self { dim: 2, kind: RuleKind::Arcs { breaks: cuts, per_arc }, nodes, weights })
    }

    /// Product rule on S^2, exact for spherical polynomials of degree <= 2 level - 1.
    pub fn sphere3(level: usize) -> Result<Self> {
        if level < 4 {
            return Err(GeometryError::InvalidInput(format!("sphere rule needs level >= 4, got {level}")));
        }
        let (z, wz) = gauss_legendre(level);
        let azimuths = 2 * level;
        let step = 2.0 * PI / azimuths as f64;
        let mut nodes = Vec::with_capacity(level * azimuths);
        let mut weights = Vec::with_capacity(level * azimuths);
        for (zi, wi) in z.iter().zip(&wz) {
            let r = (1.0 - zi * zi).max(0.0).sqrt();
            for k in 0..azimuths {
                let (s, c) = (step * k as f64).sin_cos();
                let v = DVector::from_column_slice(&[r * c, r * s, *zi]);
                nodes.push(Direction::new(v)?);
                weights.push(wi * step);
            }
        }
        Ok(Self { dim: 3, kind: RuleKind::Sphere3 { level }, nodes, weights })
    }

    /// N normalized Gaussian samples; deterministic for a fixed seed.
    pub fn monte_carlo(n: usize, samples: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::InvalidInput(format!("dimension must be >= 2, got {n}")));
        }
        if samples < 1000 {
            return Err(GeometryError::InvalidInput(format!("Monte Carlo rule needs N >= 1000, got {samples}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = Vec::with_capacity(samples);
        while nodes.len() < samples {
            let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            if let Ok(d) = Direction::new(v) {
                nodes.push(d);
            }
        }
        let w = unit_sphere_area(n) / samples as f64;
        Ok(Self { dim: n, kind: RuleKind::MonteCarlo { samples, seed }, nodes, weights: vec![w; samples] })
    }

    /// Default rule for dimension n: m=512 on S^1, level 64 on S^2, N=2e5 beyond.
    pub fn default_for(n: usize, seed: u64) -> Result<Self> {
        Self::with_size(n, None, seed)
    }

    /// Rule for dimension n with an optional size override (m, level or N).
    pub fn with_size(n: usize, size: Option<usize>, seed: u64) -> Result<Self> {
        match n {
            2 => Self::circle(size.unwrap_or(DEFAULT_CIRCLE_NODES)),
            3 => Self::sphere3(size.unwrap_or(DEFAULT_SPHERE_LEVEL)),
            _ => Self::monte_carlo(n, size.unwrap_or(DEFAULT_MC_SAMPLES), seed),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.kind, RuleKind::MonteCarlo { .. })
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            RuleKind::Circle { m } => format!("circle(m={m})"),
            RuleKind::Arcs { breaks, per_arc } => format!("arcs(k={},per={per_arc})", breaks.len()),
            RuleKind::Sphere3 { level } => format!("sphere3(level={level})"),
            RuleKind::MonteCarlo { samples, seed } => {
                format!("mc(n={},N={samples},seed={seed})", self.dim)
            }
        }
    }

    /// The next finer deterministic rule; None for Monte Carlo.
    pub fn refined(&self) -> Option<Self> {
        match &self.kind {
            RuleKind::Circle { m } => Self::circle(2 * m).ok(),
            RuleKind::Arcs { breaks, per_arc } => Self::arcs(breaks, 2 * per_arc).ok(),
            RuleKind::Sphere3 { level } => Self::sphere3(2 * level).ok(),
            RuleKind::MonteCarlo { .. } => None,
        }
    }

    /// A planar rule adapted to integrands with jumps at `breaks`: an
    /// equispaced rule becomes piecewise Gauss-Legendre with a comparable
    /// node count. Other rules are returned unchanged.
    pub fn split_at(&self, breaks: &[f64]) -> Result<Self> {
        if breaks.is_empty() || self.dim != 2 {
            return Ok(self.clone());
        }
        let total = match &self.kind {
            RuleKind::Circle { m } => *m,
            RuleKind::Arcs { breaks: old, per_arc } => old.len() * per_arc,
            _ => return Ok(self.clone()),
        };
        let mut all: Vec<f64> = breaks.to_vec();
        if let RuleKind::Arcs { breaks: old, .. } = &self.kind {
            all.extend_from_slice(old);
        }
        Self::arcs(&all, (total / all.len()).max(16))
    }

    /// Weighted sum of node values, evaluated in parallel and summed in
    /// node order.
    pub fn sum<F>(&self, g: F) -> Result<f64>
    where
        F: Fn(&Direction) -> f64 + Sync,
    {
        let values = self.values(&g)?;
        Ok(compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w)))
    }

    fn values<F>(&self, g: &F) -> Result<Vec<f64>>
    where
        F: Fn(&Direction) -> f64 + Sync,
    {
        let values: Vec<f64> = self.nodes.par_iter().map(g).collect();
        if let Some((node, value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GeometryError::Evaluation { node, value: *value });
        }
        Ok(values)
    }

    /// Integral of g with an error estimate: the difference to the next
    /// finer rule (deterministic) or the sample standard error (Monte Carlo).
    pub fn integrate<F>(&self, g: F) -> Result<FunctionalValue>
    where
        F: Fn(&Direction) -> f64 + Sync,
    {
        let values = self.values(&g)?;
        let value = compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w));
        let abs_error = match self.refined() {
            Some(fine) => (fine.sum(&g)? - value).abs(),
            None => {
                let n = values.len() as f64;
                let mean = compensated_sum(values.iter().copied()) / n;
                let var = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
                unit_sphere_area(self.dim) * (var / n).sqrt()
            }
        };
        Ok(FunctionalValue { value, abs_error, rule_descriptor: self.descriptor() })
    }
}
