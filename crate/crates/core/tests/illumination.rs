//! Illumination surface bodies: exact planar cases, structural properties
//! and the volume-difference limit.

use std::f64::consts::PI;

use mpas_core::functionals::lp_affine;
use mpas_core::illumination::{IlluminationModel, Membership, WeightField};
use mpas_core::{BodyModel, Direction, Exponent, GeometryError, QuadratureRule};

fn square_model() -> IlluminationModel {
    let square = BodyModel::polygon(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap();
    let weight = WeightField::PiecewiseEdge(vec![1.0 / 12.0, 1.0 / 12.0, 1.0 / 6.0, 1.0 / 6.0]);
    IlluminationModel::new(square, weight).unwrap()
}

/// The region table for the weighted square, written out case by case.
fn square_region(s: f64, x: [f64; 2]) -> bool {
    let [x1, x2] = x;
    let band = |v: f64| (-1.0..=1.0).contains(&v);
    if s < 1.0 / 6.0 {
        band(x1) && band(x2)
    } else if s < 1.0 / 3.0 {
        (x1 >= -1.0 && band(x2)) || (x2 >= -1.0 && band(x1))
    } else if s < 0.5 {
        (x1 >= -1.0 && x2 >= -1.0) || (x1 <= -1.0 && band(x2)) || (x2 <= -1.0 && band(x1))
    } else if s < 2.0 / 3.0 {
        x1 >= -1.0 || x2 >= -1.0
    } else {
        true
    }
}

#[test]
fn weighted_square_matches_region_table() {
    let m = square_model();
    let mut checked = 0;
    for s in [0.05, 0.1, 0.2, 0.3, 0.4, 0.55, 0.6, 0.7, 1.0] {
        for i in -12..=12 {
            for j in -12..=12 {
                // Grid offset keeps probes off the lines x_i = +-1.
                let x = [0.37 * i as f64 + 0.01, 0.37 * j as f64 + 0.02];
                let got = m.membership(s, &x).unwrap() == Membership::Inside;
                assert_eq!(got, square_region(s, x), "s={s} x={x:?}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 9 * 25 * 25);
}

#[test]
fn weighted_square_edge_masses() {
    let m = square_model();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-15;
    assert!(close(m.illuminated_measure(&[0.0, 5.0]).unwrap(), 1.0 / 6.0));
    assert!(close(m.illuminated_measure(&[5.0, 5.0]).unwrap(), 1.0 / 3.0));
    assert!(close(m.illuminated_measure(&[-5.0, -5.0]).unwrap(), 2.0 / 3.0));
    assert!(m.illuminated_measure(&[0.5, 0.5]).is_err());
}

#[test]
fn unbounded_square_body_is_reported() {
    let m = square_model();
    let err = m.volume_difference(0.2, &QuadratureRule::circle(64).unwrap()).unwrap_err();
    assert!(matches!(err, GeometryError::UnboundedBody { .. }), "{err}");
}

/// A point at distance d from the centre of the unit disk sees an arc of
/// angular width 2 arccos(1/d).
#[test]
fn disk_cap_measure() {
    for c in [1.0, 0.25] {
        let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::Constant(c)).unwrap();
        for (d, angle) in [(1.5, 0.3), (3.0, 2.0), (1.01, -1.0), (40.0, 4.0)] {
            let z = [d * f64::cos(angle), d * f64::sin(angle)];
            let got = m.illuminated_measure(&z).unwrap();
            let expected = 2.0 * c * (1.0 / d).acos();
            assert!((got - expected).abs() < 1e-10, "c={c} d={d}: {got} vs {expected}");
        }
    }
}

#[test]
fn disk_boundary_scale_is_secant() {
    let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::Constant(1.0)).unwrap();
    for s in [0.01, 0.1, 0.5, 1.0, 2.0] {
        for k in 0..7 {
            let sample = m.boundary_scale(s, &Direction::from_angle(0.9 * k as f64)).unwrap();
            let expected = 1.0 / (0.5 * s).cos();
            let t = sample.t_s.unwrap();
            assert!((t - expected).abs() / expected < 1e-8, "s={s}: {t} vs {expected}");
        }
    }
}

/// The unit ball in R^3 seen from distance d: a cap of area 2 pi (1 - 1/d).
#[test]
fn ball_cap_measure_monte_carlo() {
    let m = IlluminationModel::new(BodyModel::unit_ball(3), WeightField::Constant(1.0)).unwrap();
    for d in [1.2, 2.0, 5.0] {
        let got = m.illuminated_measure(&[0.0, d * 0.6, d * 0.8]).unwrap();
        let expected = 2.0 * PI * (1.0 - 1.0 / d);
        assert!((got - expected).abs() / expected < 0.02, "d={d}: {got} vs {expected}");
    }
}

fn trig_body() -> BodyModel {
    BodyModel::trig(1.0, vec![0.0, 0.04, 0.01], vec![0.0, -0.02, 0.005]).unwrap()
}

#[test]
fn bodies_are_nested_in_s() {
    let m = IlluminationModel::new(trig_body(), WeightField::SqrtKappa).unwrap();
    let s_grid = [0.01, 0.05, 0.2, 0.6, 1.5];
    for k in 0..16 {
        let u = Direction::from_angle(0.4 * k as f64 + 0.1);
        let ts: Vec<f64> = s_grid.iter().map(|s| m.boundary_scale(*s, &u).unwrap().t_s.unwrap()).collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]), "{ts:?}");
        assert!(ts[0] > m.body().radial(&u).unwrap());
    }
}

#[test]
fn star_convex_about_origin() {
    let m = IlluminationModel::new(trig_body(), WeightField::Constant(1.0)).unwrap();
    let s = 0.3;
    for k in 0..24 {
        let u = Direction::from_angle(0.26 * k as f64);
        let t = m.boundary_scale(s, &u).unwrap().t_s.unwrap();
        for frac in [0.0, 0.2, 0.5, 0.9, 0.999] {
            let x: Vec<f64> = u.coords().iter().map(|c| c * t * frac).collect();
            assert_eq!(m.membership(s, &x).unwrap(), Membership::Inside, "frac={frac}");
        }
    }
}

#[test]
fn boundary_scale_is_consistent_with_measure() {
    let ellipse = BodyModel::ellipsoid_diag(&[1.0, 2.0]).unwrap();
    let m = IlluminationModel::new(ellipse, WeightField::GpWeight(1.0)).unwrap();
    for s in [0.02, 0.2] {
        for k in 0..12 {
            let u = Direction::from_angle(0.5 * k as f64 + 0.05);
            let sample = m.boundary_scale(s, &u).unwrap();
            let t = sample.t_s.unwrap();
            let at = |scale: f64| -> Vec<f64> { u.coords().iter().map(|c| c * scale).collect() };
            assert!((sample.measure - s).abs() <= 1e-8 * s.max(1.0), "measure {}", sample.measure);
            let measured = m.illuminated_measure(&at(t)).unwrap();
            assert!((measured - s).abs() <= 1e-8, "s={s}: {measured}");
            let excess = sample.excess.unwrap();
            assert_eq!(m.membership(s, &at(t - 1e-3 * excess)).unwrap(), Membership::Inside);
            assert_eq!(m.membership(s, &at(t + 1e-3 * excess)).unwrap(), Membership::Outside);
        }
    }
}

/// For the unit disk with f = 1, t_s = sec(s/2), so
/// |K^{f,s}| - |K| = pi (sec^2(s/2) - 1) = pi tan^2(s/2).
#[test]
fn disk_volume_difference_closed_form() {
    let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::Constant(1.0)).unwrap();
    let rule = QuadratureRule::circle(64).unwrap();
    for s in [0.1, 0.4] {
        let v = m.volume_difference(s, &rule).unwrap();
        let expected = PI * (0.5 * s).tan().powi(2);
        assert!((v.value - expected).abs() < 1e-6 * expected.max(1e-3), "s={s}: {} vs {expected}", v.value);
    }
}

#[test]
fn disk_limit_is_perimeter() {
    let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::Constant(1.0)).unwrap();
    let rule = QuadratureRule::circle(64).unwrap();
    let s_list: Vec<f64> = (0..=6).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let study = m.convergence_study(&s_list, &rule).unwrap();
    assert_eq!(study.c_n, 8.0);
    let last = study.records.last().unwrap();
    assert!(last.rel_dev <= 0.02, "{}", last.rel_dev);
    assert!((study.limit_estimate - 2.0 * PI).abs() / (2.0 * PI) < 1e-6);
    for r in &study.records {
        let oracle = 8.0 * PI * (0.5 * r.s).tan().powi(2) / (r.s * r.s);
        assert!((r.scaled_ratio - oracle).abs() / oracle < 1e-6, "s={}: {}", r.s, r.scaled_ratio);
    }
}

#[test]
fn gp_weight_limits_recover_lp_affine() {
    let body = BodyModel::ellipsoid_diag(&[1.0, 2.0]).unwrap();
    let rule = QuadratureRule::circle(64).unwrap();
    let s_list: Vec<f64> = (0..=4).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    for p in [0.0, 1.0, 2.0] {
        let m = IlluminationModel::new(body.clone(), WeightField::GpWeight(p)).unwrap();
        let study = m.convergence_study(&s_list, &rule).unwrap();
        let target = lp_affine(&body, Exponent::Finite(p), &QuadratureRule::circle(512).unwrap()).unwrap().value;
        assert!((study.limit_estimate - target).abs() / target < 0.02, "p={p}: {} vs {target}", study.limit_estimate);
        assert!(study.records.last().unwrap().rel_dev < 0.02);
    }
}

#[test]
fn sqrt_kappa_limit_is_surface_area_on_trig_body() {
    let body = trig_body();
    let m = IlluminationModel::new(body.clone(), WeightField::SqrtKappa).unwrap();
    let rule = QuadratureRule::circle(128).unwrap();
    let study = m.convergence_study(&[0.08, 0.04, 0.02, 0.01], &rule).unwrap();
    // The perimeter of a trig body is 2 pi a0.
    assert!((study.limit_estimate - 2.0 * PI).abs() / (2.0 * PI) < 0.02, "{}", study.limit_estimate);
}

#[test]
fn nonconvex_disk_certificate() {
    let m = IlluminationModel::new(BodyModel::unit_ball(2), WeightField::nonconvex_disk()).unwrap();
    let s = 1.0 / 64.0;
    let sec = |a: f64| 1.0 / a.cos();
    let t_axis = m.boundary_scale(s, &Direction::from_angle(0.0)).unwrap().t_s.unwrap();
    assert!((t_axis - sec(PI / 20.0)).abs() < 1e-6, "{t_axis}");
    let t_diag = m.boundary_scale(s, &Direction::from_angle(PI / 4.0)).unwrap().t_s.unwrap();
    assert!((t_diag - sec(PI / 32.0)).abs() < 1e-6, "{t_diag}");

    let point = |angle: f64| {
        let t = m.boundary_scale(s, &Direction::from_angle(angle)).unwrap().t_s.unwrap();
        [t * angle.cos(), t * angle.sin()]
    };
    let (a, b) = (point(PI / 32.0 - 0.03), point(PI / 32.0 + 0.03));
    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    assert_eq!(m.membership(s, &mid).unwrap(), Membership::Outside);
}
