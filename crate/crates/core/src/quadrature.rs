//! Composite quadrature rules.

use num_complex::Complex64;

/// Composite Simpson rule over consecutive segments `[b[k], b[k+1]]`, each split into
/// `panels` panels (rounded up to an even count). Breakpoints let callers place integrand
/// kinks on segment ends.
pub fn simpson<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    breakpoints
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if b == a {
                return 0.0;
            }
            let h = (b - a) / n as f64;
            let mut odd = 0.0;
            let mut even = 0.0;
            for k in 1..n {
                let v = f(a + h * k as f64);
                if k % 2 == 1 {
                    odd += v;
                } else {
                    even += v;
                }
            }
            h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
        })
        .sum()
}

/// Complex-valued counterpart of [`simpson`].
pub fn simpson_complex<F: Fn(f64) -> Complex64>(f: F, breakpoints: &[f64], panels: usize) -> Complex64 {
    let re = simpson(|x| f(x).re, breakpoints, panels);
    let im = simpson(|x| f(x).im, breakpoints, panels);
    Complex64::new(re, im)
}

/// Trapezoid rule for samples on a uniform grid of spacing `dx`.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dx * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}
