//! Reference computations that avoid the library's closed-form kernels: finite-difference
//! boundary-value solves, Gauss-Legendre quadrature, overflow-safe real Green's functions and
//! difference quotients.
#![allow(dead_code)]

use grn_hopf::hopf::CriticalPoint;
use grn_hopf::ModelParams;
use num_complex::Complex64;

/// Critical values reported for the default parameter set.
pub const D1C: f64 = 3.117109e-4;
pub const D2C: f64 = 7.884712e-3;
pub const OMEGA1C: f64 = 0.0176411537;
pub const OMEGA2C: f64 = 0.0512345925;

pub fn defaults() -> ModelParams {
    ModelParams::default()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn crel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `cosh(a) cosh(b) / sinh(c)` for real `a, b ≥ 0`, `c > 0` without overflow.
fn cc_over_s(a: f64, b: f64, c: f64) -> f64 {
    let num = (1.0 + (-2.0 * a).exp()) * (1.0 + (-2.0 * b).exp());
    let den = 2.0 * (1.0 - (-2.0 * c).exp());
    (a + b - c).exp() * num / den
}

/// Neumann Green's function of `D u'' − μ u = −δ_x` on `[0, 1]`, real shift.
pub fn green_real(d: f64, mu: f64, y: f64, x: f64) -> f64 {
    let th = (mu / d).sqrt();
    let (lo, hi) = if y <= x { (y, x) } else { (x, y) };
    cc_over_s(th * lo, th * (1.0 - hi), th) / (d * th)
}

/// Cytoplasm translation weight for node `i` of a uniform grid, averaged over its cell.
fn cell_cyto(i: usize, n: usize, l: f64) -> f64 {
    let dx = 1.0 / (n - 1) as f64;
    let x = i as f64 * dx;
    let lo = (x - 0.5 * dx).max(0.0);
    let hi = (x + 0.5 * dx).min(1.0);
    ((hi - lo.max(l)).max(0.0) / (hi - lo)).min(1.0)
}

/// Complex tridiagonal solve (Thomas). `sub[0]` and `sup[n-1]` are ignored.
pub fn thomas(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut cp = vec![Complex64::default(); n];
    let mut dp = vec![Complex64::default(); n];
    cp[0] = sup[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * cp[i - 1];
        cp[i] = if i + 1 < n { sup[i] / den } else { Complex64::default() };
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den;
    }
    let mut u = vec![Complex64::default(); n];
    u[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = dp[i] - cp[i] * u[i + 1];
    }
    u
}

/// Solves `D u'' − shift·u = −rhs` with reflecting ghost nodes on `n` uniform nodes.
pub fn neumann_solve(d: f64, shift: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let h2 = {
        let dx = 1.0 / (n - 1) as f64;
        dx * dx
    };
    let k = Complex64::new(d / h2, 0.0);
    let diag = vec![shift + 2.0 * k; n];
    let mut sub = vec![-k; n];
    let mut sup = vec![-k; n];
    sup[0] = -2.0 * k;
    sub[n - 1] = -2.0 * k;
    thomas(&sub, &diag, &sup, rhs)
}

/// Finite-difference point-source pair at shift `s`: `u₁` solves the mRNA equation with a unit
/// Dirac mass at `x_M`, `u₂` the protein equation driven by `α_p g u₁`.
pub fn point_source_pair(params: &ModelParams, d: f64, shift: Complex64, n: usize) -> (Vec<Complex64>, Vec<Complex64>, usize) {
    let dx = 1.0 / (n - 1) as f64;
    let im = (params.x_m / dx).round() as usize;
    assert!((im as f64 * dx - params.x_m).abs() < 1e-12, "x_M must be a grid node");
    let mut src = vec![Complex64::default(); n];
    src[im] = Complex64::new(1.0 / dx, 0.0);
    let u1 = neumann_solve(d, shift, &src);
    let drive: Vec<Complex64> = (0..n)
        .map(|i| u1[i] * (params.alpha_p * cell_cyto(i, n, params.l)))
        .collect();
    let u2 = neumann_solve(d, shift, &drive);
    (u1, u2, im)
}

/// Gene-site value of the second component of the second-order harmonic problem at
/// `shift = μ + 2λ_c`, solved on an `n`-node grid by superposition of the linear response.
pub fn second_harmonic_at_gene(params: &ModelParams, cp: &CriticalPoint, fp: f64, fpp: f64, n: usize) -> Complex64 {
    let (_, u2, im) = point_source_pair(params, cp.d_c, params.mu + 2.0 * cp.lambda_c, n);
    // w = c u with c = α_m [f′ w₂(x_M) + f″/2]
    let coef = 0.5 * params.alpha_m * fpp / (1.0 - params.alpha_m * fp * u2[im]);
    coef * u2[im]
}

/// Gene-site value of the second component of the mean-correction problem at `shift = μ`.
pub fn mean_correction_at_gene(params: &ModelParams, cp: &CriticalPoint, fp: f64, fpp: f64, n: usize) -> f64 {
    let (_, u2, im) = point_source_pair(params, cp.d_c, Complex64::new(params.mu, 0.0), n);
    let coef = params.alpha_m * fpp / (1.0 - params.alpha_m * fp * u2[im]);
    (coef * u2[im]).re
}

const GL5_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss-Legendre over each segment between consecutive breakpoints.
pub fn gauss_legendre<F: Fn(f64) -> Complex64>(f: F, breakpoints: &[f64], panels: usize) -> Complex64 {
    let mut total = Complex64::default();
    for seg in breakpoints.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        for k in 0..panels {
            let mid = seg[0] + (k as f64 + 0.5) * h;
            for (x, w) in GL5_X.iter().zip(GL5_W) {
                total += f(mid + 0.5 * h * x) * (0.5 * h * w);
            }
        }
    }
    total
}

pub fn gauss_legendre_real<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], panels: usize) -> f64 {
    gauss_legendre(|x| Complex64::new(f(x), 0.0), breakpoints, panels).re
}

/// Composite Simpson over each segment, real integrand.
pub fn simpson_real<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let mut total = 0.0;
    for seg in breakpoints.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        let mut s = f(seg[0]) + f(seg[1]);
        for k in 1..panels {
            s += f(seg[0] + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    total
}

/// Protein profile of the point-source steady state by direct quadrature of
/// `α_m α_p f(p) ∫_l^1 G(x, y) G(y, x_M) dy`.
pub fn protein_profile_quadrature(params: &ModelParams, d: f64, hill_at_gene: f64, x: f64, panels: usize) -> f64 {
    let mut bp = vec![params.l, 1.0];
    if x > params.l && x < 1.0 {
        bp.insert(1, x);
    }
    let integral = simpson_real(
        |y| green_real(d, params.mu, x, y) * green_real(d, params.mu, y, params.x_m),
        &bp,
        panels,
    );
    params.alpha_m * params.alpha_p * hill_at_gene * integral
}

pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Complex derivative of an analytic function by a central difference along the real axis.
pub fn complex_diff<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, h: f64) -> Complex64 {
    (f(z + h) - f(z - h)) / (2.0 * h)
}
