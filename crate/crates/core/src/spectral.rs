//! Characteristic function of the point-source linearisation and its roots.
//!
//! With `s = μ + λ`, `θ = (s/D)^{1/2}`, `A = α_p α_m f'(p*)`,
//! `J(θ) = θ(1 − l)/2 + sinh(2θ(1 − l))/4`:
//!
//! `R(λ) = A cosh²(θ x_M) J(θ) − θ D s sinh²θ`.
//!
//! `R` is odd in `θ` and carries a factor `θ` that vanishes at `λ = −μ`. Newton's method runs on
//! the entire function `R/θ` rescaled by `e^{−2θ}`, which has the same roots in the search box
//! and stays bounded for small `D`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{principal_sqrt, Scaled};
use crate::kinetics::hill_derivs_unchecked;
use crate::params::ModelParams;
use crate::steady::{gene_coefficient, gene_coefficient_log_derivative, solve_p_at_gene};

/// Real-part range of the seed box.
pub const BOX_RE: (f64, f64) = (-5.0, 35.0);
/// Imaginary-part range of the seed box (upper half; conjugates are implied).
pub const BOX_IM: (f64, f64) = (0.0, 35.0);
/// Spacing of the coarse seed grid.
pub const SEED_STEP: f64 = 0.25;
/// Two roots closer than this are the same root.
pub const DEDUP_TOL: f64 = 1e-6;
/// Relative residual `|R| / max(|A cosh² J|, |θ D s sinh²θ|)` accepted for a root.
pub const ROOT_TOL: f64 = 1e-10;

const NEWTON_MAX_ITER: usize = 60;

/// Inputs of `R`: the steady state at the gene site for one diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicContext {
    pub params: ModelParams,
    pub d: f64,
    pub p_at_gene: f64,
    pub fprime_at_gene: f64,
    pub fsecond_at_gene: f64,
}

/// The pieces of `R` and its derivatives at one `λ`, kept in scaled form.
#[derive(Debug, Clone, Copy)]
struct Terms {
    theta: Complex64,
    kinetic: Scaled,
    transport: Scaled,
    r: Scaled,
    r_lambda: Scaled,
    /// `A [2 x_M cosh sinh(θ x_M) J + cosh²(θ x_M) J']`, shared by `R_λ` and `R_D`.
    kinetic_theta: Scaled,
    sinh_sq: Scaled,
    sinh_cosh: Scaled,
}

/// One eigenvalue with its residual and `R'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub lambda: Complex64,
    /// Relative residual (see [`ROOT_TOL`]).
    pub residual: f64,
    pub r_prime: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub d: f64,
    /// Roots with `Im λ ≥ 0`, sorted by decreasing real part.
    pub roots: Vec<Root>,
}

impl RootSet {
    /// Largest real part, `-inf` for an empty set.
    pub fn max_real_part(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.lambda.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn leading(&self) -> Option<&Root> {
        self.roots.first()
    }

    /// Number of roots with positive real part (upper half plane only).
    pub fn unstable_count(&self) -> usize {
        self.roots.iter().filter(|r| r.lambda.re > 0.0).count()
    }
}

/// Parameter derivatives at a simple root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalityData {
    pub dlambda_dd: Complex64,
    pub dpstar_dd: f64,
}

impl CharacteristicContext {
    pub fn new(params: &ModelParams, d: f64) -> Result<Self> {
        let p = solve_p_at_gene(params, d)?;
        Ok(Self::with_p_at_gene(params, d, p))
    }

    pub fn with_p_at_gene(params: &ModelParams, d: f64, p_at_gene: f64) -> Self {
        let hd = hill_derivs_unchecked(p_at_gene, params.h);
        Self {
            params: *params,
            d,
            p_at_gene,
            fprime_at_gene: hd.d1,
            fsecond_at_gene: hd.d2,
        }
    }

    fn theta(&self, lambda: Complex64) -> Result<Complex64> {
        let s = self.params.mu + lambda;
        if s == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularPoint);
        }
        Ok(principal_sqrt(s / self.d))
    }

    fn terms(&self, lambda: Complex64, theta: Complex64) -> Terms {
        let p = &self.params;
        let s = p.mu + lambda;
        let d = self.d;
        let w = 1.0 - p.l;
        let a = p.alpha_p * p.alpha_m * self.fprime_at_gene;
        let c = |v: f64| Complex64::new(v, 0.0);

        let ch_m = Scaled::cosh(theta * p.x_m);
        let sh_m = Scaled::sinh(theta * p.x_m);
        let j = Scaled::new(theta * (0.5 * w)) + Scaled::sinh(theta * (2.0 * w)).scale(c(0.25));
        let dj = Scaled::real(0.5 * w) + Scaled::cosh(theta * (2.0 * w)).scale(c(0.5 * w));
        let sh = Scaled::sinh(theta);
        let chh = Scaled::cosh(theta);
        let sinh_sq = sh * sh;
        let sinh_cosh = sh * chh;

        let kinetic = (ch_m * ch_m * j).scale(c(a));
        let transport = sinh_sq.scale(theta * d * s);
        let kinetic_theta =
            (ch_m * sh_m * j).scale(c(2.0 * p.x_m * a)) + (ch_m * ch_m * dj).scale(c(a));
        let r_lambda = kinetic_theta.scale((2.0 * d * theta).inv())
            - sinh_sq.scale(1.5 * d * theta)
            - sinh_cosh.scale(s);
        Terms {
            theta,
            kinetic,
            transport,
            r: kinetic - transport,
            r_lambda,
            kinetic_theta,
            sinh_sq,
            sinh_cosh,
        }
    }

    /// `R(λ)` in scaled form.
    pub fn char_fn_scaled(&self, lambda: Complex64) -> Result<Scaled> {
        Ok(self.terms(lambda, self.theta(lambda)?).r)
    }

    /// `R(λ)` on the principal branch of `θ`.
    pub fn char_fn(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.char_fn_scaled(lambda)?.value())
    }

    /// `R(λ)` evaluated with `θ` replaced by `−θ`. Equals `−R(λ)`.
    pub fn char_fn_negated_branch(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.char_fn_negated_branch_scaled(lambda)?.value())
    }

    pub fn char_fn_negated_branch_scaled(&self, lambda: Complex64) -> Result<Scaled> {
        Ok(self.terms(lambda, -self.theta(lambda)?).r)
    }

    /// `dR/dλ`.
    pub fn char_fn_deriv(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.terms(lambda, self.theta(lambda)?).r_lambda.value())
    }

    /// `|R(λ)|` relative to the larger of its two terms.
    pub fn relative_residual(&self, lambda: Complex64) -> Result<f64> {
        let t = self.terms(lambda, self.theta(lambda)?);
        Ok(rel_residual(&t))
    }

    /// Newton from `seed` on the rescaled function. Returns the converged point, if any.
    pub fn newton(&self, seed: Complex64) -> Option<Complex64> {
        let mut lambda = seed;
        let mut t = self.terms(lambda, self.theta(lambda).ok()?);
        let mut log_f = log_reduced(&t);
        for _ in 0..NEWTON_MAX_ITER {
            if rel_residual(&t) < 1e-14 {
                break;
            }
            // F = R e^{-2θ} / θ,  F'/F = R_λ/R − θ_λ (1/θ + 2),  θ_λ = 1/(2 D θ)
            let th = t.theta;
            let corr = (2.0 * self.d * th).inv() * (th.inv() + 2.0);
            let den = t.r_lambda - t.r.scale(corr);
            let step = t.r.ratio(den);
            if !(step.re.is_finite() && step.im.is_finite()) {
                return None;
            }
            let mut damp = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = lambda - step * damp;
                if let Ok(th_c) = self.theta(cand) {
                    let tc = self.terms(cand, th_c);
                    let lf = log_reduced(&tc);
                    if lf.is_finite() && lf <= log_f {
                        lambda = cand;
                        t = tc;
                        log_f = lf;
                        accepted = true;
                        break;
                    }
                    if lf == f64::NEG_INFINITY {
                        return Some(cand);
                    }
                }
                damp *= 0.5;
            }
            if !accepted || step.norm() * damp <= 1e-16 * (1.0 + lambda.norm()) {
                break;
            }
            if lambda.norm() > 1e4 {
                return None;
            }
        }
        (rel_residual(&t) < ROOT_TOL).then_some(lambda)
    }

    /// All distinct roots in the search box with `Re λ > −μ`, upper half plane.
    pub fn find_roots(&self) -> Result<RootSet> {
        self.find_roots_with_step(SEED_STEP)
    }

    /// [`find_roots`](Self::find_roots) with a custom coarse seed spacing.
    pub fn find_roots_with_step(&self, step: f64) -> Result<RootSet> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::Config(format!("seed step must lie in (0, 1], got {step}")));
        }
        let mut found: Vec<Complex64> = Vec::new();
        let coarse = seed_lattice(BOX_RE, BOX_IM, step);
        let mut log_grid = Vec::with_capacity(coarse.len());
        for &seed in &coarse {
            if let Some(r) = self.newton(seed) {
                self.accept(r, &mut found);
            }
            log_grid.push(
                self.theta(seed)
                    .map(|th| log_reduced(&self.terms(seed, th)))
                    .unwrap_or(f64::INFINITY),
            );
        }
        // refine around interior local minima of |F| on the coarse lattice
        let n_re = lattice_len(BOX_RE, step);
        let n_im = lattice_len(BOX_IM, step);
        for i in 1..n_re - 1 {
            for k in 1..n_im - 1 {
                let v = log_grid[i * n_im + k];
                let is_min = (-1i64..=1)
                    .flat_map(|di| (-1i64..=1).map(move |dk| (di, dk)))
                    .filter(|&o| o != (0, 0))
                    .all(|(di, dk)| {
                        v <= log_grid[(i as i64 + di) as usize * n_im + (k as i64 + dk) as usize]
                    });
                if !is_min {
                    continue;
                }
                let centre = coarse[i * n_im + k];
                for off in [(0.25, 0.25), (0.25, -0.25), (-0.25, 0.25), (-0.25, -0.25)] {
                    let seed = centre + Complex64::new(off.0, off.1) * step;
                    if let Some(r) = self.newton(seed) {
                        self.accept(r, &mut found);
                    }
                }
            }
        }
        // fine patch around the origin, where the slow modes live
        for seed in seed_lattice((-0.1, 0.5), (0.0, 0.5), 0.01) {
            if let Some(r) = self.newton(seed) {
                self.accept(r, &mut found);
            }
        }

        let mut roots = found
            .into_iter()
            .map(|lambda| {
                let t = self.terms(lambda, self.theta(lambda)?);
                Ok(Root {
                    lambda,
                    residual: rel_residual(&t),
                    r_prime: t.r_lambda.value(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        roots.sort_by(|a, b| b.lambda.re.total_cmp(&a.lambda.re));
        Ok(RootSet { d: self.d, roots })
    }

    fn accept(&self, root: Complex64, found: &mut Vec<Complex64>) {
        let mu = self.params.mu;
        let mut r = root;
        if r.im < 0.0 {
            r = r.conj();
        }
        if r.im.abs() < 1e-12 {
            r.im = 0.0;
        }
        let inside = r.re > -mu + 1e-9
            && r.re >= BOX_RE.0
            && r.re <= BOX_RE.1
            && r.im <= BOX_IM.1;
        if inside && found.iter().all(|f| (f - r).norm() > DEDUP_TOL) {
            found.push(r);
        }
    }

    /// Largest real part over [`find_roots`](Self::find_roots); `-inf` if there are no roots.
    pub fn max_real_part(&self) -> Result<f64> {
        Ok(self.find_roots()?.max_real_part())
    }

    /// `dλ/dD = −R_D / R_λ` at a simple root `λ`.
    pub fn dlambda_dd(&self, lambda: Complex64) -> Result<TransversalityData> {
        let t = self.terms(lambda, self.theta(lambda)?);
        if t.r_lambda.ln_norm() < (1e-10f64).ln() {
            return Err(Error::SimplicityViolation(t.r_lambda.norm()));
        }
        let p = &self.params;
        let s = p.mu + lambda;
        let th = t.theta;
        let dp = dpstar_dd(p, self.d, self.p_at_gene)?;
        let a2 = p.alpha_p * p.alpha_m * self.fsecond_at_gene * dp;
        let c = |v: f64| Complex64::new(v, 0.0);
        let ch_m = Scaled::cosh(th * p.x_m);
        let w = 1.0 - p.l;
        let j = Scaled::new(th * (0.5 * w)) + Scaled::sinh(th * (2.0 * w)).scale(c(0.25));
        let r_d = (ch_m * ch_m * j).scale(c(a2)) + t.kinetic_theta.scale(-th / (2.0 * self.d))
            - (t.sinh_sq.scale(th * 0.5) - t.sinh_cosh.scale(th * th)).scale(s);
        Ok(TransversalityData {
            dlambda_dd: -r_d.ratio(t.r_lambda),
            dpstar_dd: dp,
        })
    }
}

/// One row of a stability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub max_re: f64,
    /// Unstable roots in the upper half plane.
    pub unstable: usize,
}

/// Stability indicator at `count` log-spaced diffusion coefficients in `[d_min, d_max]`.
pub fn stability_sweep(params: &ModelParams, d_min: f64, d_max: f64, count: usize) -> Result<Vec<SweepRow>> {
    if count == 0 || !(d_min > 0.0 && d_max >= d_min) || (count > 1 && d_max == d_min) {
        return Err(Error::Config(format!(
            "empty sweep: {count} points over [{d_min:e}, {d_max:e}]"
        )));
    }
    (0..count)
        .map(|k| {
            let d = if count == 1 {
                d_min
            } else {
                d_min * (d_max / d_min).powf(k as f64 / (count - 1) as f64)
            };
            let set = CharacteristicContext::new(params, d)?.find_roots()?;
            Ok(SweepRow {
                d,
                max_re: set.max_real_part(),
                unstable: set.unstable_count(),
            })
        })
        .collect()
}

/// `∂p*(x_M, D)/∂D` from implicit differentiation of the gene-site equation.
pub fn dpstar_dd(params: &ModelParams, d: f64, p_at_gene: f64) -> Result<f64> {
    let c = gene_coefficient(params, d)?;
    let dc = c * gene_coefficient_log_derivative(params, d)?;
    let ph = p_at_gene.powi(params.h as i32);
    Ok(dc / (1.0 + (params.h as f64 + 1.0) * ph))
}

fn rel_residual(t: &Terms) -> f64 {
    let scale = t.kinetic.ln_norm().max(t.transport.ln_norm());
    (t.r.ln_norm() - scale).exp()
}

/// `ln |R e^{−2θ} / θ|` for the principal branch.
fn log_reduced(t: &Terms) -> f64 {
    t.r.ln_norm() - 2.0 * t.theta.re - t.theta.norm().ln()
}

fn lattice_len(range: (f64, f64), step: f64) -> usize {
    ((range.1 - range.0) / step).round() as usize + 1
}

/// Row-major lattice: outer index runs over the real part.
fn seed_lattice(re: (f64, f64), im: (f64, f64), step: f64) -> Vec<Complex64> {
    let (n_re, n_im) = (lattice_len(re, step), lattice_len(im, step));
    (0..n_re)
        .flat_map(|i| {
            (0..n_im).map(move |k| Complex64::new(re.0 + i as f64 * step, im.0 + k as f64 * step))
        })
        .collect()
}
