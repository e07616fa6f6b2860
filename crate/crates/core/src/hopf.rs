//! Hopf points, weakly nonlinear coefficients and the amplitude equation.
//!
//! At a critical pair `λ = ±iω` the eigenfunction normalised by `ξ₂(x_M) = 1` is
//! `ξ₁ = α_m f' G_{μ+λ}(·, x_M)`, `ξ₂ = α_p α_m f' K_{μ+λ}`; the adjoint pair is
//! `ξ₁* = c* α_p α_m f' K_{μ+λ̄}`, `ξ₂* = c* α_m f' G_{μ+λ̄}(·, x_M)` with `c*` fixed by
//! `∫ ξ₁ conj(ξ₁*) + ξ₂ conj(ξ₂*) = 1`. The cubic coefficient is
//! `b = α_m [f''(w₂ + w̃₂) + f'''/2] conj(ξ₁*(x_M))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::KernelContext;
use crate::grid::SpatialGrid;
use crate::kinetics::hill_derivs_unchecked;
use crate::params::ModelParams;
use crate::quadrature::simpson_complex;
use crate::simulator::{classify, protein_amplitude, simulate, AttractorKind, SimulationConfig};
use crate::spectral::{CharacteristicContext, TransversalityData};

/// Brackets containing the lower and upper critical diffusion coefficients for default parameters.
pub const DEFAULT_BRACKETS: [(f64, f64); 2] = [(1e-4, 1e-3), (5e-3, 2e-2)];

/// Relative bracket width at which full root searches hand over to root tracking.
const TRACK_SWITCH: f64 = 1e-3;
/// Final relative bracket width.
const BRACKET_TOL: f64 = 1e-13;
/// Panels per segment of the normalisation quadrature.
pub const NORMALISATION_PANELS: usize = 10_000;

/// Stability change located on the diffusion axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub d_c: f64,
    pub lambda_c: Complex64,
    pub omega_c: f64,
    pub p_at_gene: f64,
    pub r_prime: Complex64,
    pub transversality: TransversalityData,
    /// Final bracket width relative to `d_c`.
    pub relative_width: f64,
}

impl CriticalPoint {
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Supercritical,
    Subcritical,
}

impl Criticality {
    pub fn from_b(b: Complex64) -> Self {
        if b.re < 0.0 {
            Criticality::Supercritical
        } else {
            Criticality::Subcritical
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Criticality::Supercritical => "supercritical",
            Criticality::Subcritical => "subcritical",
        }
    }
}

/// Quantities entering `b` at a critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormIntermediates {
    /// `K_{μ+2λ}(x_M)`.
    pub g1_at_xm: Complex64,
    /// `K_μ(x_M)`.
    pub g2_at_xm: f64,
    pub w2_at_xm: Complex64,
    pub wtilde2_at_xm: f64,
    /// `ξ₁*(x_M)` after normalisation.
    pub xi1_star_at_xm: Complex64,
    /// `c*`, the factor multiplying the unnormalised adjoint.
    pub adjoint_scale: Complex64,
    pub fprime: f64,
    pub fsecond: f64,
    pub fthird: f64,
}

/// Complete description of one Hopf point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    pub j: u8,
    pub critical: CriticalPoint,
    /// Linear coefficient of the amplitude equation, identified with `dλ/dD`.
    pub a: Complex64,
    pub b: Complex64,
    /// Direction of the unstable side: `D = D_c + ν δ²`.
    pub nu: f64,
    pub classification: Criticality,
}

/// Bisection on the sign of the largest real part of the spectrum.
pub fn find_critical(params: &ModelParams, bracket: (f64, f64)) -> Result<CriticalPoint> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("invalid bracket [{lo:e}, {hi:e}]")));
    }
    let max_re = |d: f64| -> Result<f64> { CharacteristicContext::new(params, d)?.max_real_part() };
    let lo_unstable = max_re(lo)? > 0.0;
    let hi_unstable = max_re(hi)? > 0.0;
    if lo_unstable == hi_unstable {
        return Err(Error::Bracket { lo, hi });
    }

    while (hi - lo) > TRACK_SWITCH * hi {
        let mid = 0.5 * (lo + hi);
        if (max_re(mid)? > 0.0) == lo_unstable {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mid = 0.5 * (lo + hi);
    let mut lambda = CharacteristicContext::new(params, mid)?
        .find_roots()?
        .leading()
        .map(|r| r.lambda)
        .ok_or(Error::Bracket { lo, hi })?;
    let mut iterations = 0;
    while (hi - lo) > BRACKET_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let ctx = CharacteristicContext::new(params, mid)?;
        lambda = ctx.newton(lambda).ok_or(Error::NonConvergence {
            what: "critical root tracking",
            iterations,
            residual: hi - lo,
        })?;
        if (lambda.re > 0.0) == lo_unstable {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let d_c = 0.5 * (lo + hi);
    let ctx = CharacteristicContext::new(params, d_c)?;
    let roots = ctx.find_roots()?;
    let leading = roots.leading().ok_or(Error::Bracket { lo, hi })?;
    let tracked = ctx.newton(lambda).unwrap_or(leading.lambda);
    if (tracked - leading.lambda).norm() > 1e-6 {
        return Err(Error::NonConvergence {
            what: "critical root identification",
            iterations,
            residual: (tracked - leading.lambda).norm(),
        });
    }
    let lambda_c = leading.lambda;
    let transversality = ctx.dlambda_dd(lambda_c)?;
    Ok(CriticalPoint {
        d_c,
        lambda_c,
        omega_c: lambda_c.im,
        p_at_gene: ctx.p_at_gene,
        r_prime: leading.r_prime,
        transversality,
        relative_width: (hi - lo) / d_c,
    })
}

/// Unnormalised eigenfunction `(ξ₁, ξ₂)(x)` with `ξ₂(x_M) = 1`.
pub fn eigenfunction(params: &ModelParams, cp: &CriticalPoint, x: f64) -> Result<(Complex64, Complex64)> {
    let fp = hill_derivs_unchecked(cp.p_at_gene, params.h).d1;
    let k = KernelContext::new(cp.d_c, params.mu + cp.lambda_c)?;
    Ok((
        k.green(x, params.x_m)? * (params.alpha_m * fp),
        k.cyto_kernel(x, params.x_m, params.l)? * (params.alpha_p * params.alpha_m * fp),
    ))
}

/// Adjoint eigenfunction before scaling by `c*`, normalised so its first component is 1 at `x_M`.
pub fn adjoint_shape(params: &ModelParams, cp: &CriticalPoint, x: f64) -> Result<(Complex64, Complex64)> {
    let fp = hill_derivs_unchecked(cp.p_at_gene, params.h).d1;
    let k = KernelContext::new(cp.d_c, params.mu + cp.lambda_c.conj())?;
    Ok((
        k.cyto_kernel(x, params.x_m, params.l)? * (params.alpha_p * params.alpha_m * fp),
        k.green(x, params.x_m)? * (params.alpha_m * fp),
    ))
}

/// Normalised adjoint eigenfunction `(ξ₁*, ξ₂*)(x)`.
pub fn adjoint(
    params: &ModelParams,
    cp: &CriticalPoint,
    nfi: &NormalFormIntermediates,
    x: f64,
) -> Result<(Complex64, Complex64)> {
    let (a, b) = adjoint_shape(params, cp, x)?;
    Ok((a * nfi.adjoint_scale, b * nfi.adjoint_scale))
}

/// `∫₀¹ u₁ conj(v₁) + u₂ conj(v₂) dx` for closed-form pairs, split at `x_M` and `l`.
pub fn pairing<U, V>(params: &ModelParams, u: U, v: V, panels: usize) -> Result<Complex64>
where
    U: Fn(f64) -> Result<(Complex64, Complex64)>,
    V: Fn(f64) -> Result<(Complex64, Complex64)>,
{
    let err = std::cell::RefCell::new(None);
    let val = simpson_complex(
        |x| match (u(x), v(x)) {
            (Ok(a), Ok(b)) => a.0 * b.0.conj() + a.1 * b.1.conj(),
            (Err(e), _) | (_, Err(e)) => {
                err.borrow_mut().get_or_insert(e.to_string());
                Complex64::new(f64::NAN, f64::NAN)
            }
        },
        &[0.0, params.x_m, params.l, 1.0],
        panels,
    );
    match err.into_inner() {
        Some(e) => Err(Error::Domain(e)),
        None => Ok(val),
    }
}

pub fn normal_form_intermediates(params: &ModelParams, cp: &CriticalPoint) -> Result<NormalFormIntermediates> {
    let ctx = CharacteristicContext::with_p_at_gene(params, cp.d_c, cp.p_at_gene);
    for (label, lam) in [("2λ", 2.0 * cp.lambda_c), ("0", Complex64::new(0.0, 0.0))] {
        let res = ctx.relative_residual(lam)?;
        if res < 1e-6 {
            return Err(Error::DegenerateResonance(format!(
                "{label} is numerically an eigenvalue (relative residual {res:e})"
            )));
        }
    }
    let hd = hill_derivs_unchecked(cp.p_at_gene, params.h);
    let amp = params.alpha_p * params.alpha_m;
    let (xm, l) = (params.x_m, params.l);

    let g1 = KernelContext::new(cp.d_c, params.mu + 2.0 * cp.lambda_c)?.cyto_kernel(xm, xm, l)?;
    let g2 = KernelContext::real(cp.d_c, params.mu)?.cyto_kernel(xm, xm, l)?.re;
    let den1 = 1.0 - amp * hd.d1 * g1;
    let den2 = 1.0 - amp * hd.d1 * g2;
    if den1.norm() < 1e-8 || den2.abs() < 1e-8 {
        return Err(Error::DegenerateResonance(format!(
            "resolvent denominators {den1}, {den2} vanish"
        )));
    }
    let w2 = 0.5 * amp * hd.d2 * g1 / den1;
    let wt2 = amp * hd.d2 * g2 / den2;

    let norm = pairing(
        params,
        |x| eigenfunction(params, cp, x),
        |x| adjoint_shape(params, cp, x),
        NORMALISATION_PANELS,
    )?;
    // ⟨ξ, c* φ⟩ = conj(c*) ⟨ξ, φ⟩ = 1
    let adjoint_scale = (1.0 / norm).conj();
    let xi1_star_at_xm = adjoint_shape(params, cp, xm)?.0 * adjoint_scale;
    Ok(NormalFormIntermediates {
        g1_at_xm: g1,
        g2_at_xm: g2,
        w2_at_xm: w2,
        wtilde2_at_xm: wt2,
        xi1_star_at_xm,
        adjoint_scale,
        fprime: hd.d1,
        fsecond: hd.d2,
        fthird: hd.d3,
    })
}

/// Cubic coefficient of the amplitude equation.
pub fn hopf_coefficient_b(params: &ModelParams, nfi: &NormalFormIntermediates) -> Complex64 {
    params.alpha_m
        * (nfi.fsecond * (nfi.w2_at_xm + nfi.wtilde2_at_xm) + 0.5 * nfi.fthird)
        * nfi.xi1_star_at_xm.conj()
}

/// Locates the critical point in `bracket` and assembles its amplitude-equation coefficients.
pub fn analyze(params: &ModelParams, j: u8, bracket: (f64, f64)) -> Result<HopfPoint> {
    let critical = find_critical(params, bracket)?;
    let nfi = normal_form_intermediates(params, &critical)?;
    let b = hopf_coefficient_b(params, &nfi);
    let a = critical.transversality.dlambda_dd;
    if a.re == 0.0 {
        return Err(Error::SimplicityViolation(0.0));
    }
    Ok(HopfPoint {
        j,
        critical,
        a,
        b,
        nu: a.re.signum(),
        classification: Criticality::from_b(b),
    })
}

/// Coefficients of `dA/dT = a ν A + b A |A|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeParams {
    pub a: Complex64,
    pub b: Complex64,
    pub nu: f64,
}

impl AmplitudeParams {
    pub fn from_hopf(h: &HopfPoint) -> Self {
        Self {
            a: h.a,
            b: h.b,
            nu: h.nu,
        }
    }

    /// Limit-cycle modulus `sqrt(−ν Re a / Re b)` when it exists.
    pub fn equilibrium_modulus(&self) -> Option<f64> {
        let sq = -self.nu * self.a.re / self.b.re;
        (sq > 0.0 && sq.is_finite()).then(|| sq.sqrt())
    }

    fn rhs(&self, z: Complex64) -> Complex64 {
        self.a * self.nu * z + self.b * z * z.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub t: Vec<f64>,
    pub a: Vec<Complex64>,
}

/// Fixed-step classical Runge–Kutta integration of the amplitude equation.
pub fn amplitude_evolve(ap: &AmplitudeParams, a0: Complex64, t_end: f64, dt: f64) -> Result<AmplitudeTrajectory> {
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Error::Config("t_end and dT must be positive".into()));
    }
    if (ap.a * ap.nu).norm() * dt >= 0.1 {
        return Err(Error::Config(format!(
            "step {dt} too large for linear rate {}",
            (ap.a * ap.nu).norm()
        )));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let mut t = Vec::with_capacity(steps + 1);
    let mut a = Vec::with_capacity(steps + 1);
    let mut z = a0;
    t.push(0.0);
    a.push(z);
    for k in 1..=steps {
        let k1 = ap.rhs(z);
        let k2 = ap.rhs(z + 0.5 * h * k1);
        let k3 = ap.rhs(z + 0.5 * h * k2);
        let k4 = ap.rhs(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let tk = k as f64 * h;
        if !(z.norm() <= 1e6) {
            return Err(Error::Divergence {
                t: tk,
                reason: "amplitude exceeded 1e6".into(),
            });
        }
        t.push(tk);
        a.push(z);
    }
    Ok(AmplitudeTrajectory { t, a })
}

/// Settings for [`predict_vs_simulate`].
#[derive(Debug, Clone)]
pub struct OnsetStudy {
    /// Offsets `δ²` as fractions of `D_c`.
    pub offsets: Vec<f64>,
    pub grid: SpatialGrid,
    pub t_end: f64,
    /// Trailing fraction of the run used to measure the amplitude.
    pub window_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetRow {
    pub offset: f64,
    pub d: f64,
    /// Peak-to-trough range of `P(t)` in the window.
    pub amplitude: f64,
    pub kind: AttractorKind,
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnsetReport {
    pub rows: Vec<OnsetRow>,
    /// Least-squares slope of `ln amplitude` against `ln δ²`.
    pub exponent: f64,
    /// Rows of the mirror runs on the stable side.
    pub stable_side: Vec<OnsetRow>,
}

/// Runs the PDE at `D = D_c + ν δ²` for each offset and fits the amplitude exponent; also
/// runs `D = D_c − ν δ²` for comparison.
pub fn predict_vs_simulate(params: &ModelParams, hopf: &HopfPoint, study: &OnsetStudy) -> Result<OnsetReport> {
    if study.offsets.len() < 2 {
        return Err(Error::Config("need at least two offsets".into()));
    }
    let run = |sign: f64, off: f64| -> Result<OnsetRow> {
        let d = hopf.critical.d_c * (1.0 + sign * hopf.nu * off);
        let mut cfg = SimulationConfig::new(d, study.t_end, study.grid.clone());
        cfg.sample_every = 0.5;
        let traj = simulate(params, &cfg)?;
        let class = classify(&traj, study.window_fraction)?;
        Ok(OnsetRow {
            offset: off,
            d,
            amplitude: protein_amplitude(&traj, study.window_fraction),
            kind: class.kind,
            period: class.period,
        })
    };
    let rows = study
        .offsets
        .iter()
        .map(|&o| run(1.0, o))
        .collect::<Result<Vec<_>>>()?;
    let stable_side = study
        .offsets
        .iter()
        .map(|&o| run(-1.0, o))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.offset * hopf.critical.d_c).ln(), r.amplitude.ln()))
        .collect();
    Ok(OnsetReport {
        exponent: slope(&pts),
        rows,
        stable_side,
    })
}

/// Least-squares slope.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
