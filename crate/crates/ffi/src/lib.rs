//! C ABI for the `grn-hopf` solver.
//!
//! Every fallible entry point returns a [`GrnStatus`]; on failure the message is available
//! from [`grn_last_error_message`] on the calling thread. Root sets and trajectories are
//! opaque heap handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grn_hopf::grid::SpatialGrid;
use grn_hopf::hopf::{self, Criticality};
use grn_hopf::simulator::{self, AttractorKind, SimulationConfig, Trajectory};
use grn_hopf::spectral::{CharacteristicContext, RootSet};
use grn_hopf::steady;
use grn_hopf::{Error, ModelParams};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Divergence = 3,
    NoBracket = 4,
    NonConvergence = 5,
    Singular = 6,
    Degenerate = 7,
    InsufficientData = 8,
    OutOfRange = 9,
    Io = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrnParams {
    pub alpha_m: f64,
    pub alpha_p: f64,
    pub mu: f64,
    pub h: u32,
    pub l: f64,
    pub x_m: f64,
    pub epsilon: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GrnComplex {
    pub re: f64,
    pub im: f64,
}

/// Summary of one Hopf point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GrnHopfReport {
    pub d_c: f64,
    pub omega_c: f64,
    pub r_prime: GrnComplex,
    pub dlambda_dd: GrnComplex,
    pub b: GrnComplex,
    pub nu: f64,
    /// 1 for supercritical, 0 for subcritical.
    pub supercritical: i32,
}

/// Opaque list of eigenvalues.
pub struct GrnRootSet(RootSet);

/// Opaque simulation result.
pub struct GrnTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GrnStatus {
    match e {
        Error::Domain(_) | Error::Config(_) => GrnStatus::InvalidArgument,
        Error::Divergence { .. } => GrnStatus::Divergence,
        Error::Bracket { .. } => GrnStatus::NoBracket,
        Error::NonConvergence { .. } => GrnStatus::NonConvergence,
        Error::SingularKernel { .. } | Error::SingularPoint | Error::SimplicityViolation(_) => GrnStatus::Singular,
        Error::DegenerateResonance(_) | Error::NotSteady => GrnStatus::Degenerate,
        Error::InsufficientData { .. } => GrnStatus::InsufficientData,
        Error::Io(_) => GrnStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status and recording the message.
fn guard<F: FnOnce() -> Result<(), GrnFailure>>(f: F) -> GrnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrnStatus::Ok,
        Ok(Err(GrnFailure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GrnStatus::Panic
        }
    }
}

struct GrnFailure(GrnStatus, String);

impl From<Error> for GrnFailure {
    fn from(e: Error) -> Self {
        GrnFailure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> GrnFailure {
    GrnFailure(GrnStatus::NullPointer, format!("{what} is null"))
}

fn to_params(p: *const GrnParams) -> Result<ModelParams, GrnFailure> {
    let p = unsafe { p.as_ref() }.ok_or_else(|| null("params"))?;
    let mp = ModelParams {
        alpha_m: p.alpha_m,
        alpha_p: p.alpha_p,
        mu: p.mu,
        h: p.h,
        l: p.l,
        x_m: p.x_m,
        epsilon: p.epsilon,
    };
    mp.validate()?;
    Ok(mp)
}

fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, GrnFailure> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

fn cx(z: Complex64) -> GrnComplex {
    GrnComplex { re: z.re, im: z.im }
}

/// Message of the most recent failure on this thread, or null. The pointer stays valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn grn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn grn_params_default() -> GrnParams {
    let p = ModelParams::default();
    GrnParams {
        alpha_m: p.alpha_m,
        alpha_p: p.alpha_p,
        mu: p.mu,
        h: p.h,
        l: p.l,
        x_m: p.x_m,
        epsilon: p.epsilon,
    }
}

/// # Safety
/// `params` must be null or point to a valid `GrnParams`.
#[no_mangle]
pub unsafe extern "C" fn grn_params_validate(params: *const GrnParams) -> GrnStatus {
    guard(|| to_params(params).map(|_| ()))
}

/// Protein level at the gene site in the point-source steady state.
///
/// # Safety
/// `params` must point to a valid `GrnParams`; `out_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grn_solve_p_at_gene(params: *const GrnParams, d: f64, out_p: *mut f64) -> GrnStatus {
    guard(|| {
        let mp = to_params(params)?;
        *out(out_p, "out_p")? = steady::solve_p_at_gene(&mp, d)?;
        Ok(())
    })
}

/// Characteristic function `R(λ)` at diffusion `d`.
///
/// # Safety
/// `params` must point to a valid `GrnParams`; `out_r` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grn_char_fn(
    params: *const GrnParams,
    d: f64,
    lambda: GrnComplex,
    out_r: *mut GrnComplex,
) -> GrnStatus {
    guard(|| {
        let mp = to_params(params)?;
        let ctx = CharacteristicContext::new(&mp, d)?;
        *out(out_r, "out_r")? = cx(ctx.char_fn(Complex64::new(lambda.re, lambda.im))?);
        Ok(())
    })
}

/// Eigenvalues with nonnegative imaginary part, sorted by descending real part.
///
/// # Safety
/// `params` must point to a valid `GrnParams`; `out_set` must be writable. The handle must
/// be released with [`grn_root_set_free`].
#[no_mangle]
pub unsafe extern "C" fn grn_find_roots(
    params: *const GrnParams,
    d: f64,
    out_set: *mut *mut GrnRootSet,
) -> GrnStatus {
    guard(|| {
        let slot = out(out_set, "out_set")?;
        *slot = ptr::null_mut();
        let mp = to_params(params)?;
        let set = CharacteristicContext::new(&mp, d)?.find_roots()?;
        *slot = Box::into_raw(Box::new(GrnRootSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a live handle from [`grn_find_roots`].
#[no_mangle]
pub unsafe extern "C" fn grn_root_set_len(set: *const GrnRootSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.roots.len())
}

/// # Safety
/// `set` must be a live handle; `out_lambda` must be writable; `out_residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn grn_root_set_get(
    set: *const GrnRootSet,
    index: usize,
    out_lambda: *mut GrnComplex,
    out_residual: *mut f64,
) -> GrnStatus {
    guard(|| {
        let s = set.as_ref().ok_or_else(|| null("set"))?;
        let r = s.0.roots.get(index).ok_or_else(|| {
            GrnFailure(
                GrnStatus::OutOfRange,
                format!("index {index} out of range for {} roots", s.0.roots.len()),
            )
        })?;
        *out(out_lambda, "out_lambda")? = cx(r.lambda);
        if let Some(res) = out_residual.as_mut() {
            *res = r.residual;
        }
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from [`grn_find_roots`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grn_root_set_free(set: *mut GrnRootSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Locates the stability change in `[lo, hi]` and computes its amplitude-equation coefficients.
///
/// # Safety
/// `params` must point to a valid `GrnParams`; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grn_hopf_analyze(
    params: *const GrnParams,
    lo: f64,
    hi: f64,
    out_report: *mut GrnHopfReport,
) -> GrnStatus {
    guard(|| {
        let mp = to_params(params)?;
        let slot = out(out_report, "out_report")?;
        let h = hopf::analyze(&mp, 1, (lo, hi))?;
        *slot = GrnHopfReport {
            d_c: h.critical.d_c,
            omega_c: h.critical.omega_c,
            r_prime: cx(h.critical.r_prime),
            dlambda_dd: cx(h.a),
            b: cx(h.b),
            nu: h.nu,
            supercritical: (h.classification == Criticality::Supercritical) as i32,
        };
        Ok(())
    })
}

/// Integrates the PDE from zero data on `nodes` uniform nodes, sampling once per time unit.
///
/// # Safety
/// `params` must point to a valid `GrnParams`; `out_traj` must be writable. The handle must
/// be released with [`grn_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn grn_simulate(
    params: *const GrnParams,
    d: f64,
    t_end: f64,
    nodes: usize,
    out_traj: *mut *mut GrnTrajectory,
) -> GrnStatus {
    guard(|| {
        let slot = out(out_traj, "out_traj")?;
        *slot = ptr::null_mut();
        let mp = to_params(params)?;
        let cfg = SimulationConfig::new(d, t_end, SpatialGrid::new(nodes)?);
        let traj = simulator::simulate(&mp, &cfg)?;
        *slot = Box::into_raw(Box::new(GrnTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a live handle from [`grn_simulate`].
#[no_mangle]
pub unsafe extern "C" fn grn_trajectory_len(traj: *const GrnTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.times.len())
}

/// Sample `index` of the integrated concentrations `(t, M, P)`.
///
/// # Safety
/// `traj` must be a live handle; the three output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn grn_trajectory_sample(
    traj: *const GrnTrajectory,
    index: usize,
    out_t: *mut f64,
    out_m: *mut f64,
    out_p: *mut f64,
) -> GrnStatus {
    guard(|| {
        let tr = &traj.as_ref().ok_or_else(|| null("traj"))?.0;
        if index >= tr.times.len() {
            return Err(GrnFailure(
                GrnStatus::OutOfRange,
                format!("index {index} out of range for {} samples", tr.times.len()),
            ));
        }
        *out(out_t, "out_t")? = tr.times[index];
        *out(out_m, "out_m")? = tr.mass_m[index];
        *out(out_p, "out_p")? = tr.mass_p[index];
        Ok(())
    })
}

/// Classifies the trailing `window_fraction` of the run. `out_period` receives NaN when the
/// run is steady.
///
/// # Safety
/// `traj` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn grn_trajectory_classify(
    traj: *const GrnTrajectory,
    window_fraction: f64,
    out_oscillatory: *mut i32,
    out_period: *mut f64,
) -> GrnStatus {
    guard(|| {
        let tr = &traj.as_ref().ok_or_else(|| null("traj"))?.0;
        let class = simulator::classify(tr, window_fraction)?;
        *out(out_oscillatory, "out_oscillatory")? = (class.kind == AttractorKind::Oscillatory) as i32;
        *out(out_period, "out_period")? = class.period.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from [`grn_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grn_trajectory_free(traj: *mut GrnTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
