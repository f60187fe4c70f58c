//! Seeded inequality suites over generated body families.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::registry::{run_check, CheckContext, CheckId, CheckParams};
use super::{InequalityReport, Verdict, DEFAULT_TOLERANCE_FLOOR};
use crate::bodies::BodyModel;
use crate::error::{GeometryError, Result};
use crate::functionals::Exponent;
use crate::quadrature::QuadratureRule;

/// Generators of body tuples. Every family yields tuples of n bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodyFamily {
    /// Independent ellipsoids Q diag(lambda) Q^t with lambda in [0.5, 2].
    RandomEllipsoids { dim: usize, count: usize },
    /// Planar trig-support bodies, |a_k|, |b_k| <= 0.3 / k^3 for k = 2..=degree.
    RandomTrig { count: usize, degree: usize },
    /// Dilates (1, 1.6, 0.7, ...) of one random ellipsoid.
    DilatedEllipsoids { dim: usize, count: usize },
    /// Balls of radii (1, 1.5, 0.8, ...).
    DilatedBalls { dim: usize },
}

impl BodyFamily {
    fn dim(&self) -> usize {
        match self {
            Self::RandomEllipsoids { dim, .. } | Self::DilatedEllipsoids { dim, .. } | Self::DilatedBalls { dim } => *dim,
            Self::RandomTrig { .. } => 2,
        }
    }

    /// Whether every check with an "equality if dilates/ellipsoids" clause
    /// is saturated on this family.
    fn is_equality_family(&self) -> bool {
        matches!(self, Self::DilatedEllipsoids { .. } | Self::DilatedBalls { .. })
    }

    fn tuples(&self, rng: &mut ChaCha8Rng) -> Result<Vec<(String, Vec<BodyModel>)>> {
        let n = self.dim();
        if n < 2 {
            return Err(GeometryError::InvalidInput(format!("family dimension must be >= 2, got {n}")));
        }
        let mut out = Vec::new();
        match self {
            Self::RandomEllipsoids { count, .. } => {
                for t in 0..*count {
                    let bodies = (0..n).map(|_| random_ellipsoid(n, rng)).collect::<Result<_>>()?;
                    out.push((format!("ellipsoids-n{n}#{t}"), bodies));
                }
            }
            Self::RandomTrig { count, degree } => {
                for t in 0..*count {
                    let bodies = (0..2).map(|_| random_trig(*degree, rng)).collect::<Result<_>>()?;
                    out.push((format!("trig-d{degree}#{t}"), bodies));
                }
            }
            Self::DilatedEllipsoids { count, .. } => {
                for t in 0..*count {
                    let e = random_ellipsoid(n, rng)?;
                    let bodies = DILATION_FACTORS.iter().cycle().take(n).map(|f| e.dilate(*f)).collect::<Result<_>>()?;
                    out.push((format!("dilated-ellipsoids-n{n}#{t}"), bodies));
                }
            }
            Self::DilatedBalls { .. } => {
                let bodies = BALL_RADII.iter().cycle().take(n).map(|r| BodyModel::ball(n, *r)).collect::<Result<_>>()?;
                out.push((format!("balls-n{n}"), bodies));
            }
        }
        Ok(out)
    }
}

const DILATION_FACTORS: [f64; 3] = [1.0, 1.6, 0.7];
const BALL_RADII: [f64; 3] = [1.0, 1.5, 0.8];

/// Symmetric positive definite T = Q diag(lambda) Q^t, lambda uniform in [0.5, 2].
pub(crate) fn random_ellipsoid(n: usize, rng: &mut ChaCha8Rng) -> Result<BodyModel> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let lambda = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    BodyModel::ellipsoid(&q * DMatrix::from_diagonal(&lambda) * q.transpose())
}

/// Random admissible trig-support body, by rejection.
pub(crate) fn random_trig(degree: usize, rng: &mut ChaCha8Rng) -> Result<BodyModel> {
    let degree = degree.max(2);
    for _ in 0..100 {
        let mut a = vec![0.0; degree];
        let mut b = vec![0.0; degree];
        for k in 2..=degree {
            let bound = 0.3 / (k as f64).powi(3);
            a[k - 1] = rng.random_range(-bound..bound);
            b[k - 1] = rng.random_range(-bound..bound);
        }
        if let Ok(body) = BodyModel::trig(1.0, a, b) {
            return Ok(body);
        }
    }
    Err(GeometryError::Admissibility("no admissible trig body after 100 draws".into()))
}

/// Declarative description of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub checks: Vec<CheckId>,
    pub families: Vec<BodyFamily>,
    /// Exponent grid for p (and r, s in pair checks).
    pub exponents: Vec<Exponent>,
    /// (p, r, s) triples for the three-exponent interpolation; always
    /// reported, including when the precondition fails.
    pub triples: Vec<[f64; 3]>,
    /// Index grid for the i-th mixed checks.
    pub indices: Vec<f64>,
    pub tolerance_floor: f64,
    pub rule_size: Option<usize>,
    /// Restrict to equality families and the checks saturated on them.
    pub equality_only: bool,
}

impl SuiteConfig {
    /// Nothing to run.
    pub fn empty(seed: u64) -> Self {
        Self {
            seed,
            checks: Vec::new(),
            families: Vec::new(),
            exponents: Vec::new(),
            triples: Vec::new(),
            indices: Vec::new(),
            tolerance_floor: DEFAULT_TOLERANCE_FLOOR,
            rule_size: None,
            equality_only: false,
        }
    }

    /// The standard corpus: random and dilated ellipsoids in R^2 and R^3,
    /// random trig bodies, and balls, over every registered check.
    pub fn standard(seed: u64) -> Self {
        Self {
            checks: CheckId::ALL.to_vec(),
            families: vec![
                BodyFamily::RandomEllipsoids { dim: 2, count: 2 },
                BodyFamily::RandomTrig { count: 3, degree: 5 },
                BodyFamily::DilatedEllipsoids { dim: 2, count: 1 },
                BodyFamily::DilatedBalls { dim: 2 },
                BodyFamily::RandomEllipsoids { dim: 3, count: 1 },
                BodyFamily::DilatedEllipsoids { dim: 3, count: 1 },
                BodyFamily::DilatedBalls { dim: 3 },
            ],
            exponents: standard_exponents(),
            triples: standard_triples(),
            indices: vec![-1.0, 0.0, 1.0, 1.5, 2.0, 3.0, 4.0],
            ..Self::empty(seed)
        }
    }

    /// Only dilated families, only checks whose equality clause applies.
    pub fn equality_cases(seed: u64) -> Self {
        Self { equality_only: true, ..Self::standard(seed) }
    }
}

pub fn standard_exponents() -> Vec<Exponent> {
    let mut v: Vec<Exponent> = [-10.0, -4.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 10.0]
        .into_iter()
        .map(Exponent::Finite)
        .collect();
    v.push(Exponent::PosInf);
    v
}

/// One triple for each ordering allowed by the Hölder condition in the
/// plane, plus one violating it.
pub fn standard_triples() -> Vec<[f64; 3]> {
    vec![
        [1.0, 3.0, 0.0],
        [2.0, 0.5, -3.0],
        [-5.0, -3.0, 1.0],
        [-5.0, -10.0, -3.0],
        [-5.0, -3.0, -10.0],
        [-10.0, 1.0, -3.0],
        [2.0, -3.0, 0.0],
        [1.0, 0.0, 3.0],
        [0.0, 1.0, 2.0],
    ]
}

/// Checks whose stated equality case covers dilated ellipsoids (and balls).
fn saturated_on_dilates(check: CheckId) -> bool {
    !matches!(
        check,
        CheckId::EllipsoidDom
            | CheckId::HolderChain
            | CheckId::HolderDual
            | CheckId::MonoDual
            | CheckId::MonoZero
            | CheckId::MinusNInterp
            | CheckId::IthIsoI
            | CheckId::IthIsoII
            | CheckId::IthIsoIII
            | CheckId::IthIsoIV
            | CheckId::IthIsoV
    )
}

/// Checks saturated by a tuple of balls.
fn saturated_on_balls(check: CheckId) -> bool {
    !matches!(check, CheckId::EllipsoidDom | CheckId::IthIsoIV)
}

/// Parameter sets to run for a check in dimension n; the flag marks
/// instances that are reported even when their precondition fails.
fn instances(check: CheckId, n: usize, config: &SuiteConfig) -> Vec<(CheckParams, bool)> {
    let base = CheckParams::default();
    let nf = n as f64;
    let finite: Vec<f64> = config.exponents.iter().filter_map(|e| match e {
        Exponent::Finite(v) => Some(*v),
        _ => None,
    }).collect();
    let pairs = || {
        let mut out = Vec::new();
        for &p in &finite {
            for &r in &finite {
                if p != r {
                    out.push((p, r));
                }
            }
        }
        out
    };
    let mut indices = config.indices.clone();
    indices.sort_by(f64::total_cmp);
    indices.dedup();
    match check {
        CheckId::AfMixed => config
            .exponents
            .iter()
            .flat_map(|&p| (1..=n).map(move |m| (CheckParams { p, m, ..base }, false)))
            .collect(),
        CheckId::AfMinusN => (1..=n).map(|m| (CheckParams { m, ..base }, false)).collect(),
        CheckId::IsoI | CheckId::IsoII | CheckId::IsoIII | CheckId::EllipsoidDom | CheckId::SantaloMixed => {
            config.exponents.iter().map(|&p| (CheckParams { p, ..base }, false)).collect()
        }
        CheckId::HolderChain => config
            .triples
            .iter()
            .map(|t| (CheckParams { p: t[0].into(), r: t[1].into(), s: t[2].into(), ..base }, true))
            .collect(),
        CheckId::HolderDual | CheckId::MonoDual | CheckId::MonoZero => pairs()
            .into_iter()
            .map(|(p, r)| (CheckParams { p: p.into(), r: r.into(), ..base }, false))
            .collect(),
        CheckId::MinusNInterp => pairs()
            .into_iter()
            .map(|(p, s)| (CheckParams { p: p.into(), s: s.into(), ..base }, false))
            .collect(),
        CheckId::IthHolder => {
            let mut ps = config.exponents.clone();
            ps.push(Exponent::Finite(-nf));
            let mut out = Vec::new();
            for p in ps {
                for a in 0..indices.len() {
                    for b in a + 1..indices.len() {
                        for c in b + 1..indices.len() {
                            let params = CheckParams { p, j: indices[a], i: indices[b], k: indices[c], ..base };
                            out.push((params, false));
                        }
                    }
                }
            }
            out
        }
        CheckId::IthSantalo | CheckId::IthIsoI | CheckId::IthIsoII | CheckId::IthIsoIII | CheckId::IthIsoIV => config
            .exponents
            .iter()
            .flat_map(|&p| indices.iter().map(move |&i| (CheckParams { p, i, ..base }, false)))
            .collect(),
        CheckId::IthIsoV => indices.iter().map(|&i| (CheckParams { i, ..base }, false)).collect(),
    }
}

/// Runs the configured checks. Reports are sorted by check id, inputs and
/// part, so the list is identical for a fixed configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<InequalityReport>> {
    if !(config.tolerance_floor >= 0.0) {
        return Err(GeometryError::InvalidInput(format!(
            "tolerance must be nonnegative, got {}",
            config.tolerance_floor
        )));
    }
    if config.checks.is_empty() {
        return Ok(Vec::new());
    }
    let mut tuples = Vec::new();
    for (idx, family) in config.families.iter().enumerate() {
        if config.equality_only && !family.is_equality_family() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(idx as u64));
        for (label, bodies) in family.tuples(&mut rng)? {
            tuples.push((family.clone(), label, bodies));
        }
    }
    let per_tuple: Vec<Result<Vec<InequalityReport>>> = tuples
        .into_par_iter()
        .map(|(family, label, bodies)| {
            let n = bodies[0].dim();
            let rule = QuadratureRule::with_size(n, config.rule_size, config.seed)?;
            let ctx = CheckContext::new(bodies, label, rule, config.tolerance_floor)?;
            let balls = matches!(family, BodyFamily::DilatedBalls { .. });
            let mut out = Vec::new();
            for &check in &config.checks {
                if config.equality_only {
                    let saturated = if balls { saturated_on_balls(check) } else { saturated_on_dilates(check) };
                    if !saturated {
                        continue;
                    }
                }
                for (params, always) in instances(check, n, config) {
                    for report in run_check(check, &params, &ctx)? {
                        let keep = always || report.verdict != Verdict::SkippedPrecondition;
                        if keep && !(config.equality_only && report.verdict == Verdict::SkippedPrecondition) {
                            out.push(report);
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut reports = Vec::new();
    for r in per_tuple {
        reports.extend(r?);
    }
    reports.sort_by(|a, b| {
        (a.check_id.as_str(), a.inputs.as_str(), a.part.as_str()).cmp(&(b.check_id.as_str(), b.inputs.as_str(), b.part.as_str()))
    });
    Ok(reports)
}

/// Verdict counts of a report list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub report_only: usize,
    pub equality: usize,
}

pub fn summarize(reports: &[InequalityReport]) -> SuiteSummary {
    let mut s = SuiteSummary { total: reports.len(), ..Default::default() };
    for r in reports {
        match r.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::SkippedPrecondition => s.skipped += 1,
            Verdict::ReportOnly => s.report_only += 1,
        }
        if r.equality_flag {
            s.equality += 1;
        }
    }
    s
}
