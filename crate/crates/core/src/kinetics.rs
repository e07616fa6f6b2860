//! Pointwise kinetic functions: Hill repression, cytoplasm indicator, Dirac sequence.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Repression function `f(p) = 1 / (1 + p^h)`.
pub fn hill(p: f64, h: u32) -> Result<f64> {
    check_nonneg(p)?;
    Ok(hill_unchecked(p, h))
}

#[inline]
pub(crate) fn hill_unchecked(p: f64, h: u32) -> f64 {
    1.0 / (1.0 + p.powi(h as i32))
}

/// First three derivatives of the Hill function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillDerivs {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Closed-form `(f', f'', f''')` of `1 / (1 + p^h)`.
pub fn hill_derivs(p: f64, h: u32) -> Result<HillDerivs> {
    check_nonneg(p)?;
    Ok(hill_derivs_unchecked(p, h))
}

pub(crate) fn hill_derivs_unchecked(p: f64, h: u32) -> HillDerivs {
    // f = 1/u with u = 1 + p^h
    let hf = h as f64;
    let pw = |coef: f64, k: i32| -> f64 {
        if coef == 0.0 {
            0.0
        } else {
            coef * p.powi(h as i32 - k)
        }
    };
    let u = 1.0 + p.powi(h as i32);
    let u1 = pw(hf, 1);
    let u2 = pw(hf * (hf - 1.0), 2);
    let u3 = pw(hf * (hf - 1.0) * (hf - 2.0), 3);
    let inv = 1.0 / u;
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    HillDerivs {
        d1: -u1 * inv2,
        d2: -u2 * inv2 + 2.0 * u1 * u1 * inv3,
        d3: -u3 * inv2 + 6.0 * u1 * u2 * inv3 - 6.0 * u1 * u1 * u1 * inv3 * inv,
    }
}

fn check_nonneg(p: f64) -> Result<()> {
    if p >= 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Hill function requires a finite p >= 0, got {p}"
        )))
    }
}

/// Translation indicator: 0 in the nucleus `[0, l)`, 1 in the cytoplasm `[l, 1]`.
#[inline]
pub fn cyto_indicator(x: f64, l: f64) -> f64 {
    if x < l {
        0.0
    } else {
        1.0
    }
}

/// Raised-cosine approximation of the Dirac mass at `x_m` with half-width `epsilon`.
#[inline]
pub fn dirac_eps(x: f64, x_m: f64, epsilon: f64) -> f64 {
    let d = x - x_m;
    if d.abs() < epsilon {
        (1.0 + (PI * d / epsilon).cos()) / (2.0 * epsilon)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::simpson;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hill_values() {
        assert_eq!(hill(0.0, 5).unwrap(), 1.0);
        for h in 1..8 {
            assert_eq!(hill(1.0, h).unwrap(), 0.5);
        }
        assert_relative_eq!(hill(2.0, 5).unwrap(), 1.0 / 33.0, max_relative = 1e-15);
        assert!(matches!(hill(-0.1, 5), Err(Error::Domain(_))));
        assert!(hill(f64::NAN, 5).is_err());
    }

    #[test]
    fn hill_derivs_at_zero() {
        let d = hill_derivs(0.0, 5).unwrap();
        assert_eq!(d.d1, 0.0);
        assert_eq!(d.d2, 0.0);
        // h = 1 and 2 exercise the vanishing-coefficient branches
        let d1 = hill_derivs(0.0, 1).unwrap();
        assert_eq!(d1.d1, -1.0);
        assert_eq!(d1.d2, 2.0);
        assert_eq!(d1.d3, -6.0);
        let d2 = hill_derivs(0.0, 2).unwrap();
        assert_eq!(d2.d2, -2.0);
        assert!(d2.d3.is_finite());
    }

    #[test]
    fn first_derivative_bounded_by_five() {
        // |f'| = h p^{h-1} / (1+p^h)^2 <= 5 for h = 5
        let sup = (0..200_000)
            .map(|i| hill_derivs(i as f64 * 5e-5, 5).unwrap().d1.abs())
            .fold(0.0, f64::max);
        assert!(sup <= 5.0, "sup |f'| = {sup}");
        assert!(sup > 1.0);
    }

    #[test]
    fn second_derivative_matches_finite_difference_at_1_2() {
        let step = 1e-5;
        let p = 1.2;
        let fd = (hill_derivs(p + step, 5).unwrap().d1 - hill_derivs(p - step, 5).unwrap().d1)
            / (2.0 * step);
        assert_relative_eq!(hill_derivs(p, 5).unwrap().d2, fd, max_relative = 1e-6);
    }

    #[test]
    fn indicator_steps_at_membrane() {
        assert_eq!(cyto_indicator(0.25, 0.5), 0.0);
        assert_eq!(cyto_indicator(0.5, 0.5), 1.0);
        assert_eq!(cyto_indicator(0.75, 0.5), 1.0);
    }

    #[test]
    fn dirac_peak_and_support() {
        let (xm, eps) = (0.1, 1e-3);
        assert_relative_eq!(dirac_eps(xm, xm, eps), 1.0 / eps, max_relative = 1e-15);
        assert_eq!(dirac_eps(xm + eps, xm, eps), 0.0);
        assert_eq!(dirac_eps(xm - eps, xm, eps), 0.0);
        assert_eq!(dirac_eps(0.5, xm, eps), 0.0);
    }

    #[test]
    fn dirac_has_unit_mass() {
        let xm = 0.1;
        for eps in [1e-2, 1e-3, 1e-4] {
            // 64 panels across the support, breakpoints at its ends
            let mass = simpson(|x| dirac_eps(x, xm, eps), &[0.0, xm - eps, xm + eps, 1.0], 64);
            assert!((mass - 1.0).abs() < 1e-10, "eps = {eps}: mass = {mass}");
        }
    }

    proptest! {
        #[test]
        fn hill_strictly_decreasing(a in 0.0f64..20.0, gap in 1e-6f64..5.0, h in 1u32..9) {
            let b = a + gap;
            prop_assert!(hill(b, h).unwrap() < hill(a, h).unwrap());
            let v = hill(a, h).unwrap();
            prop_assert!(v > 0.0 && v <= 1.0);
        }

        #[test]
        fn derivatives_match_finite_differences(p in 0.05f64..10.0) {
            let h = 5;
            let step = 1e-5 * p.max(1.0);
            let f = |q: f64| hill(q, h).unwrap();
            let d = |q: f64| hill_derivs(q, h).unwrap();
            let fd1 = (f(p + step) - f(p - step)) / (2.0 * step);
            let fd2 = (d(p + step).d1 - d(p - step).d1) / (2.0 * step);
            let fd3 = (d(p + step).d2 - d(p - step).d2) / (2.0 * step);
            let got = d(p);
            // absolute floor for points where a derivative crosses zero
            let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-6 * a.abs().max(scale);
            prop_assert!(close(got.d1, fd1, 1e-3), "f' {} vs {}", got.d1, fd1);
            prop_assert!(close(got.d2, fd2, 1e-3), "f'' {} vs {}", got.d2, fd2);
            prop_assert!(close(got.d3, fd3, 1e-2), "f''' {} vs {}", got.d3, fd3);
        }
    }
}
