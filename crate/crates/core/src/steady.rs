//! Stationary solutions.
//!
//! In the point-source limit the whole steady state is fixed by the protein level at the gene,
//! `p = f(p) · C(D)` with `C(D) = α_p α_m K_μ(x_M)`, where `K_μ` is the cytoplasm double kernel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{KernelContext, Scaled};
use crate::grid::{dirac_weights, SpatialGrid};
use crate::kinetics::{hill_derivs_unchecked, hill_unchecked};
use crate::params::ModelParams;

/// Steady profiles on a grid plus the gene-site protein level.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSolution {
    pub d: f64,
    pub p_at_gene: f64,
    pub x: Vec<f64>,
    pub m_profile: Vec<f64>,
    pub p_profile: Vec<f64>,
    /// Sup-norm residual of the equation that defines the solution.
    pub residual: f64,
}

/// `C(D) = α_p α_m K_μ(x_M)`.
pub fn gene_coefficient(params: &ModelParams, d: f64) -> Result<f64> {
    let ctx = KernelContext::real(d, params.mu)?;
    Ok(params.alpha_p * params.alpha_m * ctx.cyto_kernel(params.x_m, params.x_m, params.l)?.re)
}

/// `d ln C / dD`.
pub fn gene_coefficient_log_derivative(params: &ModelParams, d: f64) -> Result<f64> {
    let th = (params.mu / d).sqrt();
    let (xm, w) = (params.x_m, 1.0 - params.l);
    let thc = Complex64::new(th, 0.0);
    // I = w/2 + sinh(2θw)/(4θ) and I' = w cosh(2θw)/(2θ) − sinh(2θw)/(4θ²)
    let sh = Scaled::sinh(thc * (2.0 * w));
    let ch = Scaled::cosh(thc * (2.0 * w));
    let i = Scaled::real(0.5 * w) + sh.scale(Complex64::new(0.25 / th, 0.0));
    let di = ch.scale(Complex64::new(0.5 * w / th, 0.0))
        - sh.scale(Complex64::new(0.25 / (th * th), 0.0));
    let coth = Scaled::cosh(thc).ratio(Scaled::sinh(thc)).re;
    let dln_dtheta = 2.0 * xm * (th * xm).tanh() + di.ratio(i).re + 2.0 / th - 2.0 * coth;
    Ok(dln_dtheta * (-th / (2.0 * d)))
}

/// Scalar residual `p − f(p) C(D)`.
pub fn gene_residual(params: &ModelParams, c: f64, p: f64) -> f64 {
    p - hill_unchecked(p, params.h) * c
}

/// Unique positive root of `p = f(p) C(D)` by bisection on `[0, C]` and one Newton polish.
pub fn solve_p_at_gene(params: &ModelParams, d: f64) -> Result<f64> {
    let c = gene_coefficient(params, d)?;
    solve_with_coefficient(params, c)
}

fn solve_with_coefficient(params: &ModelParams, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Bracket { lo: 0.0, hi: c });
    }
    let (mut lo, mut hi) = (0.0, c);
    let mut iterations = 0;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if gene_residual(params, c, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                what: "gene-site bisection",
                iterations,
                residual: hi - lo,
            });
        }
    }
    let mut p = 0.5 * (lo + hi);
    let slope = 1.0 - c * hill_derivs_unchecked(p, params.h).d1;
    let polished = p - gene_residual(params, c, p) / slope;
    if polished > 0.0 && gene_residual(params, c, polished).abs() <= gene_residual(params, c, p).abs() {
        p = polished;
    }
    let res = gene_residual(params, c, p).abs();
    if res >= 1e-12 * (1.0 + p) {
        return Err(Error::NonConvergence {
            what: "gene-site root",
            iterations,
            residual: res,
        });
    }
    Ok(p)
}

/// Damped Newton iteration on the gene-site equation, started from `C(D)`.
pub fn solve_p_at_gene_newton(params: &ModelParams, d: f64) -> Result<f64> {
    let c = gene_coefficient(params, d)?;
    let mut p = c;
    for it in 0..200 {
        let r = gene_residual(params, c, p);
        if r.abs() < 1e-14 * (1.0 + p) {
            return Ok(p);
        }
        let step = r / (1.0 - c * hill_derivs_unchecked(p, params.h).d1);
        let mut t = 1.0;
        let mut next = p - step;
        while (next <= 0.0 || gene_residual(params, c, next).abs() > r.abs()) && t > 1e-12 {
            t *= 0.5;
            next = p - t * step;
        }
        if it > 0 && next == p {
            return Ok(p);
        }
        p = next;
    }
    Err(Error::NonConvergence {
        what: "gene-site Newton",
        iterations: 200,
        residual: gene_residual(params, c, p).abs(),
    })
}

/// Root of the well-mixed limit `p = α_p α_m (1 − l) f(p) / μ²`.
pub fn well_mixed_p(params: &ModelParams) -> Result<f64> {
    let c = params.alpha_p * params.alpha_m * (1.0 - params.l) / (params.mu * params.mu);
    solve_with_coefficient(params, c)
}

/// Point-source steady profiles on `grid`, with the gene site snapped to its nearest node.
pub fn reconstruct_profiles(
    params: &ModelParams,
    d: f64,
    p_at_gene: f64,
    grid: &SpatialGrid,
) -> Result<SteadyStateSolution> {
    let x_m = grid.x(grid.nearest(params.x_m));
    let ctx = KernelContext::real(d, params.mu)?;
    let fp = hill_unchecked(p_at_gene, params.h);
    let x = grid.nodes();
    let mut m_profile = Vec::with_capacity(x.len());
    let mut p_profile = Vec::with_capacity(x.len());
    for &xi in &x {
        m_profile.push(params.alpha_m * fp * ctx.green(xi, x_m)?.re);
        p_profile.push(params.alpha_m * params.alpha_p * fp * ctx.cyto_kernel(xi, x_m, params.l)?.re);
    }
    let residual = gene_residual(params, gene_coefficient(params, d)?, p_at_gene).abs();
    Ok(SteadyStateSolution {
        d,
        p_at_gene,
        x,
        m_profile,
        p_profile,
        residual,
    })
}

/// Solves `p_at_gene` and reconstructs the profiles in one go.
pub fn steady_state(params: &ModelParams, d: f64, grid: &SpatialGrid) -> Result<SteadyStateSolution> {
    let p = solve_p_at_gene(params, d)?;
    reconstruct_profiles(params, d, p, grid)
}

/// Options for [`solve_eps_fixed_point`].
#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Steady state for the regularised source, by damped Picard iteration of the discrete
/// double-resolvent map `p ↦ (μ − DΔ)⁻¹ α_p g (μ − DΔ)⁻¹ α_m f(p) δ^ε`. The damping factor is
/// halved whenever the update grows. Once the update drops below `tol` the iteration is
/// continued down to rounding level so the discrete equations hold to near machine precision.
pub fn solve_eps_fixed_point(
    params: &ModelParams,
    d: f64,
    grid: &SpatialGrid,
    opts: FixedPointOptions,
) -> Result<SteadyStateSolution> {
    params.validate()?;
    if !(d > 0.0) {
        return Err(Error::Config(format!("D must be positive, got {d}")));
    }
    let n = grid.n_nodes();
    let op = NeumannResolvent::new(grid, d, params.mu);
    let weights = dirac_weights(grid, params);
    let cyto = grid.cyto_weights(params.l);

    let mrna = |p: &[f64]| {
        let mut rhs = vec![0.0; n];
        for &(i, w) in &weights {
            rhs[i] = params.alpha_m * hill_unchecked(p[i].max(0.0), params.h) * w;
        }
        op.solve(&rhs)
    };
    let picard = |p: &[f64]| {
        let m = mrna(p);
        let rhs: Vec<f64> = m.iter().zip(&cyto).map(|(mi, g)| params.alpha_p * g * mi).collect();
        op.solve(&rhs)
    };

    let mut p = vec![0.0; n];
    let mut omega = opts.damping;
    let mut last_defect = f64::INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let k = picard(&p);
        let defect = p.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if defect < opts.tol {
            converged = true;
            break;
        }
        if defect > last_defect {
            omega *= 0.5;
        }
        last_defect = defect;
        for (pi, ki) in p.iter_mut().zip(&k) {
            *pi += omega * (ki - *pi);
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "regularised fixed point",
            iterations: opts.max_iter,
            residual: last_defect,
        });
    }
    let floor = 4.0 * f64::EPSILON * (1.0 + p.iter().fold(0.0, |a: f64, b| a.max(b.abs())));
    for _ in 0..200 {
        let k = picard(&p);
        let defect = p.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        for (pi, ki) in p.iter_mut().zip(&k) {
            *pi += omega * (ki - *pi);
        }
        if defect < floor {
            break;
        }
    }

    let m = mrna(&p);
    let mut m_src = vec![0.0; n];
    for &(i, w) in &weights {
        m_src[i] = params.alpha_m * hill_unchecked(p[i], params.h) * w;
    }
    let p_src: Vec<f64> = m.iter().zip(&cyto).map(|(mi, g)| params.alpha_p * g * mi).collect();
    let residual = op.residual(&m, &m_src).max(op.residual(&p, &p_src));
    let p_at_gene = p[grid.nearest(params.x_m)];
    Ok(SteadyStateSolution {
        d,
        p_at_gene,
        x: grid.nodes(),
        m_profile: m,
        p_profile: p,
        residual,
    })
}

/// Tridiagonal finite-difference operator `μ − D Δ_h` with reflecting ghost nodes.
pub(crate) struct NeumannResolvent {
    diag: f64,
    off: f64,
    n: usize,
}

impl NeumannResolvent {
    pub(crate) fn new(grid: &SpatialGrid, d: f64, mu: f64) -> Self {
        let k = d / (grid.dx() * grid.dx());
        Self {
            diag: mu + 2.0 * k,
            off: -k,
            n: grid.n_nodes(),
        }
    }

    /// Off-diagonal entries of row `i`: (left, right).
    fn offs(&self, i: usize) -> (f64, f64) {
        if i == 0 {
            (0.0, 2.0 * self.off)
        } else if i + 1 == self.n {
            (2.0 * self.off, 0.0)
        } else {
            (self.off, self.off)
        }
    }

    pub(crate) fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (a, c) = self.offs(i);
                let left = if i > 0 { a * u[i - 1] } else { 0.0 };
                let right = if i + 1 < self.n { c * u[i + 1] } else { 0.0 };
                self.diag * u[i] + left + right
            })
            .collect()
    }

    pub(crate) fn residual(&self, u: &[f64], rhs: &[f64]) -> f64 {
        self.apply(u)
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Thomas algorithm.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let (_, c0) = self.offs(0);
        cp[0] = c0 / self.diag;
        dp[0] = rhs[0] / self.diag;
        for i in 1..n {
            let (a, c) = self.offs(i);
            let denom = self.diag - a * cp[i - 1];
            cp[i] = c / denom;
            dp[i] = (rhs[i] - a * dp[i - 1]) / denom;
        }
        let mut u = vec![0.0; n];
        u[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            u[i] = dp[i] - cp[i] * u[i + 1];
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn gene_coefficient_is_positive_and_decreasing_towards_small_d() {
        let p = params();
        let c_small = gene_coefficient(&p, 1e-7).unwrap();
        let c_mid = gene_coefficient(&p, 1e-3).unwrap();
        assert!(c_small > 0.0 && c_small < 1e-150);
        assert!(c_mid > c_small);
    }

    #[test]
    fn root_has_tiny_residual_across_the_range() {
        let p = params();
        for k in 0..20 {
            let d = 1e-7 * 10f64.powf(6.0 * k as f64 / 19.0);
            let c = gene_coefficient(&p, d).unwrap();
            let root = solve_p_at_gene(&p, d).unwrap();
            assert!(root > 0.0);
            assert!(gene_residual(&p, c, root).abs() < 1e-12 * (1.0 + root));
        }
    }

    #[test]
    fn large_diffusion_tends_to_well_mixed_value() {
        let p = params();
        let lim = well_mixed_p(&p).unwrap();
        let far = solve_p_at_gene(&p, 1e4).unwrap();
        assert_relative_eq!(far, lim, max_relative = 1e-4);
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let p = params();
        for d in [1e-6, 3e-4, 1e-3, 8e-3, 0.1] {
            let h = d * 1e-6;
            let fd = (gene_coefficient(&p, d + h).unwrap().ln()
                - gene_coefficient(&p, d - h).unwrap().ln())
                / (2.0 * h);
            assert_relative_eq!(gene_coefficient_log_derivative(&p, d).unwrap(), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn profile_reproduces_gene_value() {
        let p = params();
        let grid = SpatialGrid::new(2001).unwrap();
        let sol = steady_state(&p, 1e-3, &grid).unwrap();
        assert_relative_eq!(sol.p_profile[200], sol.p_at_gene, max_relative = 1e-10);
        assert!(sol.m_profile.iter().chain(&sol.p_profile).all(|&v| v >= 0.0));
    }

    #[test]
    fn resolvent_solve_is_exact_inverse() {
        let grid = SpatialGrid::new(101).unwrap();
        let op = NeumannResolvent::new(&grid, 1e-3, 0.03);
        let rhs: Vec<f64> = (0..101).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = op.solve(&rhs);
        assert!(op.residual(&u, &rhs) < 1e-12);
    }
}
