use std::f64::consts::PI;

use mpas_core::functionals::{
    dual_mixed_volume, dual_mixed_volume_i, ith_mixed, ith_mixed_minus_n, lp_affine, mixed_minus_n,
    mixed_p_affine, mixed_volume_2d, surface_area, volume,
};
use mpas_core::illumination::{IlluminationModel, LimitMethod, Membership, WeightField};
use mpas_core::inequality::{degenerate_sequence_study, run_suite, summarize, Verdict, DEFAULT_SCHEDULE};
use mpas_core::quadrature::DEFAULT_MC_SAMPLES;
use mpas_core::{BodyModel, Direction, Exponent, FunctionalValue, GeometryError, QuadratureRule};

use crate::config::{ComputeConfig, Functional, IlluminateConfig, IlluminateMode, VerifyConfig};
use crate::output::{Cell, Table};
use crate::CliError;

/// Planar ray rule size for illumination when no --rule-size is given.
pub const ILLUMINATE_CIRCLE_NODES: usize = 128;
/// Sphere rule level for illumination rays in space.
pub const ILLUMINATE_SPHERE_LEVEL: usize = 8;
/// Largest acceptable relative deviation of a planar limit study.
pub const LIMIT_TOLERANCE: f64 = 0.02;

/// Options shared by all commands after merging config and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub rule_size: Option<usize>,
    pub tolerance: f64,
}

/// A rendered table plus, when a check failed, the reason for exit code 1.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, failure: None }
    }
}

pub fn compute(cfg: &ComputeConfig, settings: &Settings) -> Result<Outcome, CliError> {
    let bodies: Vec<BodyModel> = cfg.bodies.iter().map(|b| b.build()).collect::<Result<_, _>>()?;
    let first = bodies.first().ok_or_else(|| CliError::Input("compute needs at least one body".into()))?;
    let n = first.dim();
    let rule = QuadratureRule::with_size(n, settings.rule_size, settings.seed)?;
    let p = cfg.p.map(Exponent::from);
    let need_p = || p.ok_or_else(|| CliError::Input("this functional needs p".into()));
    let need_i = || cfg.i.ok_or_else(|| CliError::Input("this functional needs i".into()));
    let count = |k: usize| -> Result<(), CliError> {
        if bodies.len() == k {
            Ok(())
        } else {
            Err(CliError::Input(format!("{} needs {k} bodies, got {}", cfg.functional.name(), bodies.len())))
        }
    };
    let value: FunctionalValue = match cfg.functional {
        Functional::LpAffine => {
            count(1)?;
            lp_affine(first, need_p()?, &rule)?
        }
        Functional::MixedPAffine => {
            count(n)?;
            mixed_p_affine(&bodies, need_p()?, &rule)?
        }
        Functional::IthMixed => {
            count(2)?;
            ith_mixed(&bodies[0], &bodies[1], need_p()?, need_i()?, &rule)?
        }
        Functional::DualMixedVolume => {
            count(n)?;
            dual_mixed_volume(&bodies, &rule)?
        }
        Functional::DualMixedVolumeI => {
            count(2)?;
            dual_mixed_volume_i(&bodies[0], &bodies[1], need_i()?, &rule)?
        }
        Functional::MixedVolume => {
            count(2)?;
            mixed_volume_2d(&bodies[0], &bodies[1], &rule)?
        }
        Functional::Volume => {
            count(1)?;
            volume(first, &rule)?
        }
        Functional::SurfaceArea => {
            count(1)?;
            surface_area(first, &rule)?
        }
        Functional::MixedMinusN => {
            count(n)?;
            mixed_minus_n(&bodies)?
        }
        Functional::IthMixedMinusN => {
            count(2)?;
            ith_mixed_minus_n(&bodies[0], &bodies[1], need_i()?)?
        }
    };
    let mut t = Table::new("mpas-compute/1", &["functional", "bodies", "p", "i", "value", "abs_error", "rule"]);
    let names: Vec<String> = bodies.iter().map(|b| b.to_string()).collect();
    t.push(vec![
        cfg.functional.name().into(),
        names.join(" | ").into(),
        p.map_or_else(String::new, |p| p.to_string()).into(),
        Cell::from(cfg.i),
        value.value.into(),
        value.abs_error.into(),
        value.rule_descriptor.into(),
    ]);
    Ok(Outcome::ok(t))
}

pub fn verify(cfg: &VerifyConfig, settings: &Settings) -> Result<Outcome, CliError> {
    let mut suite = cfg.suite(settings.seed)?;
    suite.tolerance_floor = settings.tolerance;
    suite.rule_size = settings.rule_size;
    let reports = run_suite(&suite)?;
    let summary = summarize(&reports);
    let mut t = Table::new(
        "mpas-verify/1",
        &["check_id", "part", "inputs", "relation", "lhs", "rhs", "margin", "tolerance", "verdict", "equality_flag", "note"],
    );
    t.meta("seed", settings.seed as usize);
    t.meta("tolerance_floor", settings.tolerance);
    t.meta("total", summary.total);
    t.meta("pass", summary.pass);
    t.meta("fail", summary.fail);
    t.meta("skipped", summary.skipped);
    t.meta("report_only", summary.report_only);
    t.meta("equality", summary.equality);
    for r in &reports {
        let relation = match r.relation {
            mpas_core::inequality::Relation::Le => "<=",
            mpas_core::inequality::Relation::Ge => ">=",
        };
        t.push(vec![
            r.check_id.clone().into(),
            r.part.clone().into(),
            r.inputs.clone().into(),
            relation.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.margin.into(),
            r.tolerance.into(),
            r.verdict.to_string().into(),
            r.equality_flag.into(),
            r.note.clone().into(),
        ]);
    }
    let failure = (summary.fail > 0).then(|| {
        let first = reports.iter().find(|r| r.verdict == Verdict::Fail).expect("a failing report");
        format!("{} check(s) failed, first: {} {} ({})", summary.fail, first.check_id, first.part, first.inputs)
    });
    Ok(Outcome { table: t, failure })
}

fn ray_rule(n: usize, settings: &Settings) -> Result<QuadratureRule, CliError> {
    let size = settings.rule_size.unwrap_or(if n == 2 { ILLUMINATE_CIRCLE_NODES } else { ILLUMINATE_SPHERE_LEVEL });
    Ok(QuadratureRule::with_size(n, Some(size), settings.seed)?)
}

fn model(body: BodyModel, weight: WeightField, samples: Option<usize>, seed: u64) -> Result<IlluminationModel, CliError> {
    let n = body.dim();
    if n == 2 {
        return Ok(IlluminationModel::new(body, weight)?);
    }
    let rule = QuadratureRule::monte_carlo(n, samples.unwrap_or(DEFAULT_MC_SAMPLES), seed)?;
    Ok(IlluminationModel::with_rule(body, weight, &rule)?)
}

pub fn illuminate(cfg: &IlluminateConfig, settings: &Settings) -> Result<Outcome, CliError> {
    let body = cfg.body.build()?;
    let weight = cfg.weight.build()?;
    let m = model(body, weight, cfg.measure_samples, settings.seed)?;
    match cfg.mode {
        IlluminateMode::Convergence => convergence_table("mpas-illuminate-convergence/1", &[("", &m)], &cfg.s, settings),
        IlluminateMode::Membership => membership_table("mpas-illuminate-membership/1", &m, &cfg.s, &cfg.points),
        IlluminateMode::Trace => trace_table(&m, &cfg.s, &cfg.angles, &cfg.points),
    }
}

fn convergence_table(
    schema: &'static str,
    studies: &[(&str, &IlluminationModel)],
    s_list: &[f64],
    settings: &Settings,
) -> Result<Outcome, CliError> {
    let mut t = Table::new(
        schema,
        &["study", "s", "volume_diff", "volume_diff_error", "scaled_ratio", "rhs", "rel_dev", "status"],
    );
    let mut failure = None;
    for (label, m) in studies {
        let rule = ray_rule(m.dim(), settings)?;
        let prefix = if label.is_empty() { String::new() } else { format!("{label}.") };
        match m.convergence_study(s_list, &rule) {
            Ok(study) => {
                for r in &study.records {
                    t.push(vec![
                        (*label).into(),
                        r.s.into(),
                        r.volume_diff.into(),
                        r.volume_diff_error.into(),
                        r.scaled_ratio.into(),
                        r.rhs.into(),
                        r.rel_dev.into(),
                        "ok".into(),
                    ]);
                }
                t.meta(format!("{prefix}c_n"), study.c_n);
                t.meta(format!("{prefix}rhs"), study.rhs.value);
                t.meta(format!("{prefix}rhs_error"), study.rhs.abs_error);
                t.meta(format!("{prefix}limit_estimate"), study.limit_estimate);
                let (method, order) = match study.method {
                    LimitMethod::Richardson { order } => ("richardson", order),
                    LimitMethod::RawSmallest => ("raw-smallest", f64::NAN),
                };
                t.meta(format!("{prefix}limit_method"), method);
                t.meta(format!("{prefix}fitted_order"), order);
                t.meta(format!("{prefix}limit_rel_dev"), study.limit_rel_dev);
            }
            Err(GeometryError::UnboundedBody { .. } | GeometryError::UnsupportedKind { op: "rhs_functional", .. }) => {
                // Redo the list one s at a time so the table shows where it
                // breaks; bodies without curvature get no limit value.
                let rhs = m.rhs_functional(&rule).map(|v| v.value).unwrap_or(f64::NAN);
                for &s in s_list {
                    match m.volume_difference(s, &rule) {
                        Ok(vd) => {
                            let ratio = mpas_core::illumination::scaling_constant(m.dim()) * vd.value
                                / s.powf(2.0 / (m.dim() - 1) as f64);
                            t.push(vec![
                                (*label).into(),
                                s.into(),
                                vd.value.into(),
                                vd.abs_error.into(),
                                ratio.into(),
                                rhs.into(),
                                ((ratio - rhs).abs() / rhs).into(),
                                "ok".into(),
                            ]);
                        }
                        Err(GeometryError::UnboundedBody { direction, .. }) => {
                            let inf = Cell::Float(f64::INFINITY);
                            t.push(vec![
                                (*label).into(),
                                s.into(),
                                inf.clone(),
                                Cell::Float(f64::NAN),
                                inf.clone(),
                                rhs.into(),
                                inf,
                                format!("unbounded along {direction:?}").into(),
                            ]);
                            failure.get_or_insert_with(|| format!("K^{{f,s}} is unbounded at s = {s}"));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome { table: t, failure })
}

fn point_columns(n: usize) -> Result<&'static [&'static str], CliError> {
    match n {
        2 => Ok(&["s", "x1", "x2", "membership", "measure"]),
        3 => Ok(&["s", "x1", "x2", "x3", "membership", "measure"]),
        _ => Err(CliError::Input(format!("membership tables support n = 2 or 3, got {n}"))),
    }
}

fn membership_table(schema: &'static str, m: &IlluminationModel, s_list: &[f64], points: &[Vec<f64>]) -> Result<Outcome, CliError> {
    let n = m.dim();
    let mut t = Table::new(schema, point_columns(n)?);
    for &s in s_list {
        for x in points {
            if x.len() != n {
                return Err(CliError::Input(format!("point {x:?} is not in R^{n}")));
            }
            let inside_body = m.body().contains(x)?;
            let measure = if inside_body { 0.0 } else { m.illuminated_measure(x)? };
            let verdict = m.membership(s, x)?;
            let mut row: Vec<Cell> = vec![s.into()];
            row.extend(x.iter().map(|c| Cell::Float(*c)));
            row.push(membership_name(verdict).into());
            row.push(measure.into());
            t.push(row);
        }
    }
    Ok(Outcome::ok(t))
}

fn membership_name(m: Membership) -> &'static str {
    match m {
        Membership::Inside => "inside",
        Membership::Outside => "outside",
    }
}

fn trace_table(m: &IlluminationModel, s_list: &[f64], angles: &[f64], points: &[Vec<f64>]) -> Result<Outcome, CliError> {
    let n = m.dim();
    let mut directions: Vec<(f64, Direction)> = Vec::new();
    if n == 2 {
        directions.extend(angles.iter().map(|a| (*a, Direction::from_angle(*a))));
    }
    for x in points {
        let d = Direction::from_slice(x)?;
        let angle = if n == 2 { d.angle() } else { f64::NAN };
        directions.push((angle, d));
    }
    let mut t = Table::new(
        "mpas-illuminate-trace/1",
        &["s", "angle", "direction", "t0", "t_s", "excess", "delta", "measure", "status"],
    );
    let mut failure = None;
    for &s in s_list {
        for (angle, d) in &directions {
            let sample = m.boundary_scale(s, d)?;
            let status = if sample.t_s.is_some() { "ok" } else { "unbounded" };
            if sample.t_s.is_none() {
                failure.get_or_insert_with(|| format!("ray {:?} is unbounded at s = {s}", d.coords()));
            }
            let dir: Vec<String> = d.coords().iter().map(|c| crate::output::float(*c)).collect();
            t.push(vec![
                s.into(),
                (*angle).into(),
                dir.join(" ").into(),
                sample.t0.into(),
                sample.t_s.into(),
                sample.excess.into(),
                sample.delta.into(),
                sample.measure.into(),
                status.into(),
            ]);
        }
    }
    Ok(Outcome { table: t, failure })
}

pub const EXAMPLE_S: [f64; 5] = [0.1, 0.2, 0.4, 0.55, 0.7];
pub const EXAMPLE_PROBES: [[f64; 2]; 12] = [
    [0.0, 5.0],
    [0.0, -5.0],
    [5.0, 0.0],
    [-5.0, 0.0],
    [5.0, 5.0],
    [-2.0, 2.0],
    [-2.0, -2.0],
    [-2.0, 0.5],
    [2.0, 0.5],
    [0.5, 0.5],
    [2.0, 2.0],
    [-5.0, -5.0],
];

/// The square [-1, 1]^2 with density 1/12 on the right and top edges and
/// 1/6 on the others.
pub fn weighted_square() -> Result<IlluminationModel, CliError> {
    let square = BodyModel::polygon(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])?;
    let w = WeightField::PiecewiseEdge(vec![1.0 / 12.0, 1.0 / 12.0, 1.0 / 6.0, 1.0 / 6.0]);
    Ok(IlluminationModel::new(square, w)?)
}

pub fn demo_weighted_square() -> Result<Outcome, CliError> {
    let m = weighted_square()?;
    let points: Vec<Vec<f64>> = EXAMPLE_PROBES.iter().map(|p| p.to_vec()).collect();
    let mut out = membership_table("mpas-demo-weighted-square/1", &m, &EXAMPLE_S, &points)?;
    out.table.meta("edge_densities", "1/12 1/12 1/6 1/6 (right top left bottom)");
    Ok(out)
}

/// Angle offset of the two boundary points straddling the re-entrant corner.
pub const CORNER_OFFSET: f64 = 0.03;

pub fn demo_nonconvex_disk() -> Result<Outcome, CliError> {
    let s = 1.0 / 64.0;
    let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::nonconvex_disk())?;
    let mut t = Table::new("mpas-demo-nonconvex-disk/1", &["item", "angle", "radius", "expected", "x1", "x2", "membership"]);
    let mut point = |item: &str, angle: f64, expected: f64| -> Result<[f64; 2], CliError> {
        let sample = m.boundary_scale(s, &Direction::from_angle(angle))?;
        let r = sample.t_s.ok_or_else(|| CliError::Failed(format!("ray at angle {angle} is unbounded")))?;
        let x = [r * angle.cos(), r * angle.sin()];
        t.push(vec![item.into(), angle.into(), r.into(), expected.into(), x[0].into(), x[1].into(), "boundary".into()]);
        Ok(x)
    };
    let sec = |a: f64| 1.0 / a.cos();
    let axis = point("axis", 0.0, sec(PI / 20.0))?;
    let diagonal = point("diagonal", PI / 4.0, sec(PI / 32.0))?;
    let below = point("corner-below", PI / 32.0 - CORNER_OFFSET, f64::NAN)?;
    let above = point("corner-above", PI / 32.0 + CORNER_OFFSET, sec(PI / 32.0))?;
    let mid = [0.5 * (below[0] + above[0]), 0.5 * (below[1] + above[1])];
    let verdict = m.membership(s, &mid)?;
    t.push(vec![
        "midpoint".into(),
        mid[1].atan2(mid[0]).into(),
        mid[0].hypot(mid[1]).into(),
        Cell::Float(f64::NAN),
        mid[0].into(),
        mid[1].into(),
        membership_name(verdict).into(),
    ]);
    let axis_err = (axis[0] - sec(PI / 20.0)).abs();
    let diag_err = (diagonal[0].hypot(diagonal[1]) - sec(PI / 32.0)).abs();
    let tangent_test = sec(PI / 32.0).powi(2) < sec(PI / 20.0);
    t.meta("s", s);
    t.meta("axis_error", axis_err);
    t.meta("diagonal_error", diag_err);
    t.meta("sec2_pi_32", sec(PI / 32.0).powi(2));
    t.meta("sec_pi_20", sec(PI / 20.0));
    t.meta("tangent_line_test", tangent_test);
    let nonconvex = verdict == Membership::Outside;
    t.meta("nonconvex_certified", nonconvex);
    let ok = nonconvex && tangent_test && axis_err < 1e-6 && diag_err < 1e-6;
    Ok(Outcome { table: t, failure: (!ok).then(|| "non-convexity certificate failed".to_owned()) })
}

pub fn demo_degenerate() -> Result<Outcome, CliError> {
    let rows = degenerate_sequence_study(1.0, &DEFAULT_SCHEDULE)?;
    let mut t = Table::new("mpas-demo-degenerate/1", &["big_radius", "eps", "as_p", "abs_error", "bound", "holds", "decreasing"]);
    t.meta("p", 1.0);
    for r in &rows {
        t.push(vec![
            r.big_radius.into(),
            r.eps.into(),
            r.as_p.into(),
            r.abs_error.into(),
            r.bound.into(),
            r.holds.into(),
            r.decreasing.into(),
        ]);
    }
    let ok = rows.iter().all(|r| r.holds && r.decreasing);
    Ok(Outcome { table: t, failure: (!ok).then(|| "bound or monotonicity violated".to_owned()) })
}

/// s = 0.1 * 2^{-k}, k = 0..=6.
pub fn limit_schedule() -> Vec<f64> {
    (0..=6).map(|k| 0.1 * 0.5f64.powi(k)).collect()
}

pub fn demo_limit(settings: &Settings) -> Result<Outcome, CliError> {
    let ball = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::Constant(1.0))?;
    let ellipse = BodyModel::ellipsoid_diag(&[1.0, 2.0])?;
    let gp: Vec<(String, IlluminationModel)> = [0.0, 1.0, 2.0]
        .iter()
        .map(|p| Ok((format!("ellipse-gp{p}"), IlluminationModel::new(ellipse.clone(), WeightField::GpWeight(*p))?)))
        .collect::<Result<_, CliError>>()?;
    let sqrt_kappa = IlluminationModel::new(ellipse, WeightField::SqrtKappa)?;
    let mut studies: Vec<(&str, &IlluminationModel)> = vec![("ball-constant", &ball)];
    studies.extend(gp.iter().map(|(l, m)| (l.as_str(), m)));
    studies.push(("ellipse-sqrt-kappa", &sqrt_kappa));
    let mut out = convergence_table("mpas-demo-limit/1", &studies, &limit_schedule(), settings)?;
    let worst = out
        .table
        .rows
        .iter()
        .filter(|r| matches!(r[1], Cell::Float(s) if s == *limit_schedule().last().expect("nonempty")))
        .filter_map(|r| match r[6] {
            Cell::Float(v) => Some(v),
            _ => None,
        })
        .fold(0.0, f64::max);
    out.table.meta("worst_final_rel_dev", worst);
    if worst > LIMIT_TOLERANCE && out.failure.is_none() {
        out.failure = Some(format!("final relative deviation {worst} exceeds {LIMIT_TOLERANCE}"));
    }
    Ok(out)
}
