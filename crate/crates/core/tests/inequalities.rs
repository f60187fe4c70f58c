//! Inequality checks on seeded corpora, the degeneracy study, and
//! property-based invariants.

use mpas_core::functionals::{dual_mixed_volume, lp_affine, mixed_p_affine};
use mpas_core::illumination::{IlluminationModel, WeightField};
use mpas_core::inequality::{
    degenerate_sequence_study, run_check, run_suite, summarize, BodyFamily, CheckContext, CheckId, CheckParams,
    SuiteConfig, Verdict, DEFAULT_SCHEDULE,
};
use mpas_core::numeric::unit_ball_volume;
use mpas_core::{BodyModel, Direction, Exponent, QuadratureRule};
use proptest::prelude::*;

fn small_suite(seed: u64) -> SuiteConfig {
    SuiteConfig {
        checks: CheckId::ALL.to_vec(),
        families: vec![
            BodyFamily::RandomTrig { count: 1, degree: 4 },
            BodyFamily::RandomEllipsoids { dim: 2, count: 1 },
            BodyFamily::DilatedBalls { dim: 2 },
        ],
        exponents: [-1.0, 0.0, 1.0, 3.0].into_iter().map(Exponent::Finite).collect(),
        triples: vec![[0.5, 1.0, 2.0], [1.0, 0.0, 4.0]],
        indices: vec![0.0, 1.0, 1.5, 3.0],
        ..SuiteConfig::empty(seed)
    }
}

#[test]
fn small_suite_has_no_failures() {
    let reports = run_suite(&small_suite(5)).unwrap();
    let summary = summarize(&reports);
    assert!(summary.total > 100, "{summary:?}");
    for r in &reports {
        assert_ne!(r.verdict, Verdict::Fail, "{r:?}");
        if r.verdict == Verdict::Pass {
            assert!(r.margin >= -r.tolerance, "{r:?}");
        }
    }
}

#[test]
fn suite_is_deterministic() {
    let a = run_suite(&small_suite(9)).unwrap();
    let b = run_suite(&small_suite(9)).unwrap();
    // Skipped instances carry NaN, so compare the printed form.
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn equality_probes_on_balls() {
    let cfg = SuiteConfig { equality_only: true, ..small_suite(1) };
    let reports = run_suite(&cfg).unwrap();
    let equality: Vec<_> = reports.iter().filter(|r| r.equality_flag).collect();
    assert!(!equality.is_empty());
    for r in equality {
        assert!(r.margin.abs() <= r.tolerance, "{r:?}");
    }
}

#[test]
fn af_mixed_on_explicit_pair() {
    let bodies = vec![
        BodyModel::ellipsoid_diag(&[2.0, 0.5]).unwrap(),
        BodyModel::trig(1.0, vec![0.0, 0.03], vec![0.0, 0.01]).unwrap(),
    ];
    let ctx = CheckContext::new(bodies, "pair", QuadratureRule::circle(512).unwrap(), 1e-8).unwrap();
    let params = CheckParams { p: Exponent::Finite(1.0), ..CheckParams::default() };
    let reports = run_check(CheckId::AfMixed, &params, &ctx).unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r.verdict == Verdict::Pass && r.margin > 0.0), "{reports:?}");
}

#[test]
fn degenerate_sequence_decreases_under_bound() {
    let rows = degenerate_sequence_study(1.0, &DEFAULT_SCHEDULE).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        // 16 / R^{1/3} + 4 pi eps^{2/3}
        let bound = 16.0 / r.big_radius.powf(1.0 / 3.0) + 4.0 * std::f64::consts::PI * r.eps.powf(2.0 / 3.0);
        assert!((r.bound - bound).abs() < 1e-12 * bound);
        assert!(r.as_p <= bound && r.holds);
    }
    assert!(rows.windows(2).all(|w| w[1].as_p < w[0].as_p));
}

fn ellipse_strategy() -> impl Strategy<Value = BodyModel> {
    (0.3f64..3.0, 0.3f64..3.0, -0.8f64..0.8).prop_map(|(a, b, shear)| {
        BodyModel::ellipsoid(nalgebra::DMatrix::from_row_slice(2, 2, &[a, shear, 0.0, b])).unwrap()
    })
}

fn trig_strategy() -> impl Strategy<Value = BodyModel> {
    prop::collection::vec(-1.0f64..1.0, 6).prop_filter_map("admissible", |c| {
        let a = vec![0.0, 0.03 * c[0], 0.01 * c[1], 0.004 * c[2]];
        let b = vec![0.0, 0.03 * c[3], 0.01 * c[4], 0.004 * c[5]];
        BodyModel::trig(1.0, a, b).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ellipse_as_p_closed_form(body in ellipse_strategy(), p in -1.5f64..6.0) {
        let BodyModel::Ellipsoid(e) = &body else { unreachable!() };
        let det = e.det().abs();
        let v = lp_affine(&body, Exponent::Finite(p), &QuadratureRule::circle(512).unwrap()).unwrap().value;
        let expected = 2.0 * std::f64::consts::PI * det.powf((2.0 - p) / (2.0 + p));
        prop_assert!((v - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn dilation_homogeneity(body in trig_strategy(), lambda in 0.3f64..3.0, p in -1.0f64..4.0) {
        let rule = QuadratureRule::circle(256).unwrap();
        let base = lp_affine(&body, Exponent::Finite(p), &rule).unwrap().value;
        let scaled = lp_affine(&body.dilate(lambda).unwrap(), Exponent::Finite(p), &rule).unwrap().value;
        let expected = base * lambda.powf(2.0 * (2.0 - p) / (2.0 + p));
        prop_assert!((scaled - expected).abs() / expected < 1e-9);
    }

    /// Hoelder: as_p(K, L)^2 <= as_p(K) as_p(L) for p >= 0.
    #[test]
    fn mixed_cauchy_schwarz(k in trig_strategy(), l in ellipse_strategy(), p in 0.0f64..5.0) {
        let rule = QuadratureRule::circle(256).unwrap();
        let p = Exponent::Finite(p);
        let mixed = mixed_p_affine(&[k.clone(), l.clone()], p, &rule).unwrap().value;
        let bound = lp_affine(&k, p, &rule).unwrap().value * lp_affine(&l, p, &rule).unwrap().value;
        prop_assert!(mixed * mixed <= bound * (1.0 + 1e-9));
    }

    /// Dual mixed volume of a body with itself is its volume.
    #[test]
    fn dual_mixed_volume_diagonal(body in trig_strategy()) {
        let rule = QuadratureRule::circle(512).unwrap();
        let v = dual_mixed_volume(&[body.clone(), body.clone()], &rule).unwrap().value;
        let vol = mpas_core::functionals::volume(&body, &rule).unwrap().value;
        prop_assert!((v - vol).abs() / vol < 1e-9);
    }

    /// The illuminated measure grows along every ray leaving the body.
    #[test]
    fn measure_monotone_along_rays(body in trig_strategy(), angle in 0.0f64..6.283, t1 in 1.01f64..3.0, dt in 0.01f64..2.0) {
        let m = IlluminationModel::new(body.clone(), WeightField::Constant(1.0)).unwrap();
        let u = Direction::from_angle(angle);
        let rho = body.radial(&u).unwrap();
        let at = |t: f64| [rho * t * angle.cos(), rho * t * angle.sin()];
        let a = m.illuminated_measure(&at(t1)).unwrap();
        let b = m.illuminated_measure(&at(t1 + dt)).unwrap();
        prop_assert!(a <= b + 1e-12);
        prop_assert!(b <= mpas_core::functionals::surface_area(&body, &QuadratureRule::circle(256).unwrap()).unwrap().value);
    }
}

#[test]
fn unit_ball_volumes() {
    assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
    assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
}
