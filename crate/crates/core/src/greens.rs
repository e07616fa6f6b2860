//! Neumann Green's function of `D d²/dx² − s` on `[0, 1]` and the kernels built from it.
//!
//! With `θ = (s/D)^{1/2}`,
//! `G_s(y, x) = cosh(θ y) cosh(θ(1 − x)) / (D θ sinh θ)` for `y ≤ x`, symmetric otherwise,
//! so that `D ∂²_y G − s G = −δ(y − x)`. Hyperbolic factors are carried as [`Scaled`]
//! values so that `|Re θ|` in the hundreds (small `D`) does not overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitude of `Re z` above which hyperbolic functions switch to scaled evaluation.
const DIRECT_LIMIT: f64 = 30.0;

/// Threshold on `|sinh θ|` below which the kernel is declared singular.
pub const SINGULAR_SINH: f64 = 1e-14;

/// Complex number stored as `mant · exp(exp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp: f64,
}

impl Scaled {
    pub fn new(v: Complex64) -> Self {
        Self { mant: v, exp: 0.0 }
    }

    pub fn real(v: f64) -> Self {
        Self::new(Complex64::new(v, 0.0))
    }

    /// `exp(z)` without forming the magnitude.
    pub fn exp_of(z: Complex64) -> Self {
        Self {
            mant: Complex64::from_polar(1.0, z.im),
            exp: z.re,
        }
    }

    pub fn cosh(z: Complex64) -> Self {
        if z.re.abs() <= DIRECT_LIMIT {
            Self::new(z.cosh())
        } else if z.re > 0.0 {
            // cosh z = e^z (1 + e^{-2z}) / 2
            Self {
                mant: Complex64::from_polar(0.5, z.im) * (1.0 + (-2.0 * z).exp()),
                exp: z.re,
            }
        } else {
            Self::cosh(-z)
        }
    }

    pub fn sinh(z: Complex64) -> Self {
        if z.re.abs() <= DIRECT_LIMIT {
            Self::new(z.sinh())
        } else if z.re > 0.0 {
            Self {
                mant: Complex64::from_polar(0.5, z.im) * (1.0 - (-2.0 * z).exp()),
                exp: z.re,
            }
        } else {
            -Self::sinh(-z)
        }
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_norm(self) -> f64 {
        self.mant.norm().ln() + self.exp
    }

    pub fn norm(self) -> f64 {
        self.mant.norm() * self.exp.exp()
    }

    /// Collapses to an ordinary complex number (may overflow to infinity or underflow to zero).
    pub fn value(self) -> Complex64 {
        if self.mant == Complex64::new(0.0, 0.0) {
            return self.mant;
        }
        self.mant * self.exp.exp()
    }

    pub fn conj(self) -> Self {
        Self {
            mant: self.mant.conj(),
            exp: self.exp,
        }
    }

    pub fn recip(self) -> Self {
        Self {
            mant: self.mant.inv(),
            exp: -self.exp,
        }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self {
            mant: self.mant * k,
            exp: self.exp,
        }
    }

    pub fn powi(self, n: i32) -> Self {
        Self {
            mant: self.mant.powi(n),
            exp: self.exp * n as f64,
        }
    }

    /// Ratio `self / other` collapsed to an ordinary complex number.
    pub fn ratio(self, other: Scaled) -> Complex64 {
        (self * other.recip()).value()
    }

    fn is_zero(self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }
}

impl std::ops::Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled {
            mant: self.mant * rhs.mant,
            exp: self.exp + rhs.exp,
        }
    }
}

impl std::ops::Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let e = self.exp.max(rhs.exp);
        Scaled {
            mant: self.mant * (self.exp - e).exp() + rhs.mant * (rhs.exp - e).exp(),
            exp: e,
        }
    }
}

impl std::ops::Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl std::ops::Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

/// Square root with `Re w ≥ 0`; on the imaginary axis the root with `Im w ≥ 0` is chosen.
/// Zero maps to zero.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        -w
    } else {
        w
    }
}

/// Diffusion coefficient, complex shift `s` and `θ = (s/D)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext {
    pub d: f64,
    pub shift: Complex64,
    pub theta: Complex64,
}

impl KernelContext {
    pub fn new(d: f64, shift: Complex64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Config(format!("diffusion coefficient must be positive, got {d}")));
        }
        if !(shift.re.is_finite() && shift.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite shift {shift}")));
        }
        if shift == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularPoint);
        }
        Ok(Self {
            d,
            shift,
            theta: principal_sqrt(shift / d),
        })
    }

    pub fn real(d: f64, shift: f64) -> Result<Self> {
        Self::new(d, Complex64::new(shift, 0.0))
    }

    /// Same operator with `θ` replaced by `−θ`; every kernel value is unchanged.
    pub fn negated_branch(self) -> Self {
        Self {
            theta: -self.theta,
            ..self
        }
    }

    /// `D θ sinh θ`, the common denominator, after the singularity check.
    fn denominator(&self) -> Result<Scaled> {
        let sh = Scaled::sinh(self.theta);
        if sh.ln_norm() < SINGULAR_SINH.ln() {
            return Err(Error::SingularKernel {
                shift_re: self.shift.re,
                shift_im: self.shift.im,
                modulus: sh.norm(),
            });
        }
        Ok(sh.scale(self.d * self.theta))
    }

    /// `G_s(y, x)`.
    pub fn green(&self, y: f64, x: f64) -> Result<Complex64> {
        Ok(self.green_scaled(y, x)?.value())
    }

    pub fn green_scaled(&self, y: f64, x: f64) -> Result<Scaled> {
        let (lo, hi) = if y <= x { (y, x) } else { (x, y) };
        let th = self.theta;
        let num = Scaled::cosh(th * lo) * Scaled::cosh(th * (1.0 - hi));
        Ok(num * self.denominator()?.recip())
    }

    /// Double kernel `K_s(x) = ∫_l^1 G_s(x, y) G_s(y, x_m) dy` for a source at `x_m < l`.
    pub fn cyto_kernel(&self, x: f64, x_m: f64, l: f64) -> Result<Complex64> {
        Ok(self.cyto_kernel_scaled(x, x_m, l)?.value())
    }

    pub fn cyto_kernel_scaled(&self, x: f64, x_m: f64, l: f64) -> Result<Scaled> {
        let th = self.theta;
        let den = self.denominator()?;
        let pref = Scaled::cosh(th * x_m) * (den * den).recip();
        let a = x.max(l);
        let half = Complex64::new(0.5, 0.0);
        let two_th = 2.0 * th;

        // ∫_l^a cosh(θy) cosh(θ(1−y)) dy
        //   = ½[(a − l) cosh θ − (sinh(θ(1−2a)) − sinh(θ(1−2l))) / (2θ)]
        let inner = if a > l {
            let s_diff = Scaled::sinh(th * (1.0 - 2.0 * a)) - Scaled::sinh(th * (1.0 - 2.0 * l));
            (Scaled::cosh(th).scale(Complex64::new(a - l, 0.0)) - s_diff.scale(two_th.inv()))
                .scale(half)
        } else {
            Scaled::real(0.0)
        };
        // ∫_a^1 cosh²(θ(1−y)) dy = ½[(1 − a) + sinh(2θ(1−a)) / (2θ)]
        let outer = (Scaled::real(1.0 - a) + Scaled::sinh(two_th * (1.0 - a)).scale(two_th.inv()))
            .scale(half);

        let near = pref * Scaled::cosh(th * (1.0 - x)) * inner;
        let far = pref * Scaled::cosh(th * x) * outer;
        // collapse each term before summing so that both stay representable
        Ok(Scaled::new(near.value() + far.value()))
    }
}
