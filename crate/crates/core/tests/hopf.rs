mod common;

use std::sync::OnceLock;

use common::*;
use grn_hopf::hopf::{
    adjoint, amplitude_evolve, analyze, eigenfunction, find_critical, hopf_coefficient_b, normal_form_intermediates,
    pairing, AmplitudeParams, Criticality, HopfPoint, NormalFormIntermediates, DEFAULT_BRACKETS,
};
use grn_hopf::kinetics::cyto_indicator;
use grn_hopf::Error;
use num_complex::Complex64;

struct Point {
    hopf: HopfPoint,
    nfi: NormalFormIntermediates,
}

fn points() -> &'static [Point; 2] {
    static CELL: OnceLock<[Point; 2]> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = defaults();
        let make = |j: usize| {
            let hopf = analyze(&p, j as u8 + 1, DEFAULT_BRACKETS[j]).unwrap();
            let nfi = normal_form_intermediates(&p, &hopf.critical).unwrap();
            Point { hopf, nfi }
        };
        [make(0), make(1)]
    })
}

#[test]
fn critical_points_match_reported_values() {
    let [a, b] = points();
    assert!(rel_err(a.hopf.critical.d_c, D1C) < 1e-4);
    assert!(rel_err(b.hopf.critical.d_c, D2C) < 1e-4);
    assert!(rel_err(a.hopf.critical.omega_c, OMEGA1C) < 1e-4);
    assert!(rel_err(b.hopf.critical.omega_c, OMEGA2C) < 1e-4);
    for pt in [a, b] {
        assert!(pt.hopf.critical.lambda_c.re.abs() < 1e-8);
        assert!(pt.hopf.critical.relative_width < 1e-9);
    }
}

#[test]
fn second_order_corrections_match_boundary_value_solves() {
    let p = defaults();
    for pt in points() {
        let n = &pt.nfi;
        let w2 = second_harmonic_at_gene(&p, &pt.hopf.critical, n.fprime, n.fsecond, 4001);
        let wt2 = mean_correction_at_gene(&p, &pt.hopf.critical, n.fprime, n.fsecond, 4001);
        assert!(crel_err(n.w2_at_xm, w2) < 1e-4, "w2: {} vs {w2}", n.w2_at_xm);
        assert!(rel_err(n.wtilde2_at_xm, wt2) < 1e-4, "w~2: {} vs {wt2}", n.wtilde2_at_xm);
    }
}

#[test]
fn eigenfunction_pairing_is_normalised_under_independent_quadrature() {
    let p = defaults();
    for pt in points() {
        let cp = &pt.hopf.critical;
        let val = gauss_legendre(
            |x| {
                let u = eigenfunction(&p, cp, x).unwrap();
                let v = adjoint(&p, cp, &pt.nfi, x).unwrap();
                u.0 * v.0.conj() + u.1 * v.1.conj()
            },
            &[0.0, p.x_m, p.l, 1.0],
            400,
        );
        assert!((val - 1.0).norm() < 1e-8, "pairing {val}");
    }
}

/// `D u″` by second differences of a closed-form function.
fn second_diff<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

#[test]
fn eigenfunction_and_adjoint_satisfy_their_equations_away_from_kinks() {
    let p = defaults();
    for pt in points() {
        let cp = &pt.hopf.critical;
        let (d, lam) = (cp.d_c, cp.lambda_c);
        let h = 1e-4;
        for &x in &[0.05, 0.3, 0.45, 0.7, 0.9] {
            let g = cyto_indicator(x, p.l);
            let e = |x| eigenfunction(&p, cp, x).unwrap();
            let a = |x| adjoint(&p, cp, &pt.nfi, x).unwrap();
            let (e1, e2) = e(x);
            let r1 = d * second_diff(|y| e(y).0, x, h) - (p.mu + lam) * e1;
            let r2 = d * second_diff(|y| e(y).1, x, h) - (p.mu + lam) * e2 + p.alpha_p * g * e1;
            let (a1, a2) = a(x);
            let s1 = d * second_diff(|y| a(y).0, x, h) - (p.mu + lam.conj()) * a1 + p.alpha_p * g * a2;
            let s2 = d * second_diff(|y| a(y).1, x, h) - (p.mu + lam.conj()) * a2;
            let scale_e = e1.norm() + e2.norm();
            let scale_a = a1.norm() + a2.norm();
            assert!(r1.norm() + r2.norm() < 1e-5 * scale_e * (p.mu + lam.norm()), "eigen x={x}");
            assert!(s1.norm() + s2.norm() < 1e-5 * scale_a * (p.mu + lam.norm()), "adjoint x={x}");
        }
    }
}

#[test]
fn cubic_coefficient_is_stable_under_quadrature_refinement() {
    let p = defaults();
    for pt in points() {
        let cp = &pt.hopf.critical;
        let shape = |x| grn_hopf::hopf::adjoint_shape(&p, cp, x);
        let fine = pairing(&p, |x| eigenfunction(&p, cp, x), shape, 40_000).unwrap();
        let refined = NormalFormIntermediates {
            adjoint_scale: (1.0 / fine).conj(),
            xi1_star_at_xm: shape(p.x_m).unwrap().0 * (1.0 / fine).conj(),
            ..pt.nfi
        };
        let b = hopf_coefficient_b(&p, &refined);
        assert!((b - pt.hopf.b).norm() < 1e-3);
        assert_eq!(Criticality::from_b(b), pt.hopf.classification);
    }
}

#[test]
fn first_cubic_coefficient_and_classification() {
    let [a, b] = points();
    assert!((a.hopf.b.re - -0.041).abs() < 0.005 && (a.hopf.b.im - -0.015).abs() < 0.005);
    assert_eq!(a.hopf.classification, Criticality::Supercritical);
    assert_eq!(b.hopf.classification, Criticality::Supercritical);
    assert!(b.hopf.b.re < 0.0);
}

#[test]
fn bifurcation_directions_point_into_unstable_window() {
    let [a, b] = points();
    assert_eq!(a.hopf.nu, 1.0);
    assert_eq!(b.hopf.nu, -1.0);
    for pt in points() {
        assert!((pt.hopf.a * pt.hopf.nu).re > 0.0);
        assert_eq!(pt.hopf.a, pt.hopf.critical.transversality.dlambda_dd);
    }
}

#[test]
fn overlapping_brackets_agree() {
    let p = defaults();
    let a = points()[0].hopf.critical.d_c;
    let b = find_critical(&p, (2e-4, 5e-4)).unwrap().d_c;
    assert!(rel_err(b, a) < 1e-9);
}

#[test]
fn bracket_without_crossing_is_an_error() {
    let err = find_critical(&defaults(), (1e-6, 1e-5)).unwrap_err();
    assert!(matches!(err, Error::Bracket { .. }));
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn amplitude_saturates_at_predicted_modulus() {
    let pt = &points()[0].hopf;
    let ap = AmplitudeParams::from_hopf(pt);
    let target = (-(ap.a * ap.nu).re / ap.b.re).sqrt();
    assert!((ap.equilibrium_modulus().unwrap() - target).abs() < 1e-12 * target);
    let dt = 0.05 / (ap.a * ap.nu).norm();
    let tr = amplitude_evolve(&ap, c(1e-2, 0.0), 40.0 / (ap.a * ap.nu).re, dt).unwrap();
    let last = tr.a.last().unwrap().norm();
    assert!((last - target).abs() < 1e-6 * target, "{last} vs {target}");
}

#[test]
fn amplitude_decays_on_stable_side() {
    let pt = &points()[1].hopf;
    let ap = AmplitudeParams { nu: -pt.nu, ..AmplitudeParams::from_hopf(pt) };
    let dt = 0.05 / ap.a.norm();
    let tr = amplitude_evolve(&ap, c(1e-3, 0.0), 30.0 / ap.a.re.abs(), dt).unwrap();
    assert!(tr.a.last().unwrap().norm() < 1e-12);
    assert!(ap.equilibrium_modulus().is_none());
}

#[test]
fn amplitude_step_limit_is_enforced() {
    let ap = AmplitudeParams::from_hopf(&points()[0].hopf);
    let dt = 0.2 / (ap.a * ap.nu).norm();
    assert!(amplitude_evolve(&ap, c(1e-2, 0.0), 10.0 * dt, dt).is_err());
}
