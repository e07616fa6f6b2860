//! Explicit finite-difference integration of the full nonlinear system
//!
//! `m_t = D m_xx + α_m f(p) δ^ε(x − x_M) − μ m`,
//! `p_t = D p_xx + α_p g(x) m − μ p`,
//!
//! with zero-flux boundaries imposed by ghost-node reflection.

use crate::error::{Error, Result};
use crate::grid::{dirac_weights, SpatialGrid};
use crate::kinetics::hill_unchecked;
use crate::params::ModelParams;

/// Stability safety factor on `dx² / (2D)`.
pub const CFL_FACTOR: f64 = 0.8;
/// Largest time step used regardless of the diffusion limit.
pub const DT_MAX: f64 = 0.05;
/// Relative peak-to-trough amplitude above which a window counts as oscillating.
pub const OSCILLATION_THRESHOLD: f64 = 1e-3;
/// Minimum ratio of late-half to early-half amplitude for a sustained oscillation.
pub const SUSTAIN_RATIO: f64 = 0.5;
const MIN_WINDOW_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationState {
    pub t: f64,
    pub m: Vec<f64>,
    pub p: Vec<f64>,
}

impl ConcentrationState {
    pub fn zeros(grid: &SpatialGrid) -> Self {
        Self {
            t: 0.0,
            m: vec![0.0; grid.n_nodes()],
            p: vec![0.0; grid.n_nodes()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub d: f64,
    pub t_end: f64,
    pub grid: SpatialGrid,
    /// Interval between recorded `(M, P)` samples.
    pub sample_every: f64,
    /// Times at which full field snapshots are kept (the final state is always kept).
    pub snapshot_times: Vec<f64>,
    /// Starting fields; zero when absent.
    pub initial: Option<ConcentrationState>,
}

impl SimulationConfig {
    pub fn new(d: f64, t_end: f64, grid: SpatialGrid) -> Self {
        Self {
            d,
            t_end,
            grid,
            sample_every: 1.0,
            snapshot_times: Vec::new(),
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub d: f64,
    pub dt: f64,
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// `∫ m dx` per sample.
    pub mass_m: Vec<f64>,
    /// `∫ p dx` per sample.
    pub mass_p: Vec<f64>,
    pub snapshots: Vec<ConcentrationState>,
    pub final_state: ConcentrationState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorKind {
    Steady,
    Oscillatory,
}

impl AttractorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttractorKind::Steady => "steady",
            AttractorKind::Oscillatory => "oscillatory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorClass {
    pub kind: AttractorKind,
    /// Peak-to-trough range of `M` over the window divided by its mean.
    pub relative_amplitude: f64,
    /// Range over the late half of the window divided by the range over the early half.
    pub sustain_ratio: f64,
    /// Mean spacing of `M` maxima; present for oscillatory windows.
    pub period: Option<f64>,
}

/// Stable time step for `grid` and `d`.
pub fn stable_dt(grid: &SpatialGrid, d: f64) -> f64 {
    (CFL_FACTOR * grid.dx() * grid.dx() / (2.0 * d)).min(DT_MAX)
}

/// Precomputed update coefficients.
struct Stepper {
    n: usize,
    centre: f64,
    side: f64,
    source: Vec<(usize, f64)>,
    h: u32,
    translate: f64,
    /// Nodes from here to `n − 2` translate with full weight.
    first_cyto: usize,
    /// Fractional cytoplasm weights below `first_cyto`.
    partial_cyto: Vec<(usize, f64)>,
    last_cyto: f64,
    m_max: f64,
    p_max: f64,
}

impl Stepper {
    fn new(params: &ModelParams, d: f64, dt: f64, grid: &SpatialGrid) -> Result<Self> {
        params.validate()?;
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Config(format!("D must be positive, got {d}")));
        }
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let limit = CFL_FACTOR * grid.dx() * grid.dx() / (2.0 * d);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "time step {dt:e} exceeds the stability limit {limit:e}"
            )));
        }
        let side = d * dt / (grid.dx() * grid.dx());
        let centre = 1.0 - 2.0 * side - params.mu * dt;
        if centre < 0.0 {
            return Err(Error::Config(format!(
                "time step {dt:e} too large for decay rate {}",
                params.mu
            )));
        }
        let n = grid.n_nodes();
        let cyto = grid.cyto_weights(params.l);
        let mut first_cyto = n - 1;
        while first_cyto > 1 && cyto[first_cyto - 1] == 1.0 {
            first_cyto -= 1;
        }
        let partial_cyto = (0..first_cyto)
            .filter(|&i| cyto[i] > 0.0)
            .map(|i| (i, cyto[i]))
            .collect();
        let weights = dirac_weights(grid, params);
        let w_max = weights.iter().map(|w| w.1).fold(0.0, f64::max);
        Ok(Self {
            n,
            centre,
            side,
            source: weights
                .into_iter()
                .map(|(i, w)| (i, dt * params.alpha_m * w))
                .collect(),
            h: params.h,
            translate: dt * params.alpha_p,
            first_cyto,
            partial_cyto,
            last_cyto: cyto[n - 1],
            m_max: params.mrna_bound(w_max),
            p_max: params.protein_bound(w_max),
        })
    }

    /// One step in place; false if any value leaves its invariant interval.
    fn advance(&self, m: &mut Vec<f64>, p: &mut Vec<f64>, m_next: &mut Vec<f64>, p_next: &mut Vec<f64>) -> bool {
        let (a, c, n) = (self.centre, self.side, self.n);
        let (mb, pb) = (self.m_max, self.p_max);
        let mut bad = false;

        m_next[0] = a * m[0] + 2.0 * c * m[1];
        m_next[n - 1] = a * m[n - 1] + 2.0 * c * m[n - 2];
        for (o, w) in m_next[1..n - 1].iter_mut().zip(m.windows(3)) {
            *o = a * w[1] + c * (w[0] + w[2]);
        }
        for &(i, w) in &self.source {
            m_next[i] += w * hill_unchecked(p[i].max(0.0), self.h);
        }

        let tr = self.translate;
        let split = self.first_cyto;
        p_next[0] = a * p[0] + 2.0 * c * p[1];
        p_next[n - 1] = a * p[n - 1] + 2.0 * c * p[n - 2] + tr * self.last_cyto * m[n - 1];
        for (o, w) in p_next[1..split].iter_mut().zip(p.windows(3)) {
            *o = a * w[1] + c * (w[0] + w[2]);
        }
        for ((o, w), &mi) in p_next[split..n - 1]
            .iter_mut()
            .zip(p[split - 1..].windows(3))
            .zip(&m[split..n - 1])
        {
            *o = a * w[1] + c * (w[0] + w[2]) + tr * mi;
        }
        for &(i, g) in &self.partial_cyto {
            p_next[i] += tr * g * m[i];
        }

        for (&u, &v) in m_next.iter().zip(p_next.iter()) {
            // NaN fails both comparisons
            bad |= !(u >= 0.0) | (u > mb) | !(v >= 0.0) | (v > pb);
        }
        std::mem::swap(m, m_next);
        std::mem::swap(p, p_next);
        !bad
    }
}

#[inline]
fn in_bounds(u: &[f64], bound: f64) -> bool {
    // NaN fails both comparisons
    u.iter().fold(true, |ok, &v| ok & (v >= 0.0) & (v <= bound))
}

/// One forward-Euler step.
pub fn step(
    state: &ConcentrationState,
    params: &ModelParams,
    d: f64,
    dt: f64,
    grid: &SpatialGrid,
) -> Result<ConcentrationState> {
    if state.m.len() != grid.n_nodes() || state.p.len() != grid.n_nodes() {
        return Err(Error::Config("state does not match the grid".into()));
    }
    let stepper = Stepper::new(params, d, dt, grid)?;
    let mut m = state.m.clone();
    let mut p = state.p.clone();
    let mut mn = vec![0.0; m.len()];
    let mut pn = vec![0.0; p.len()];
    let within = stepper.advance(&mut m, &mut p, &mut mn, &mut pn);
    let t = state.t + dt;
    if m.iter().chain(&p).any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            t,
            reason: "non-finite concentration".into(),
        });
    }
    if !within && state_in_bounds(state, &stepper) {
        return Err(Error::Divergence {
            t,
            reason: "left the invariant region".into(),
        });
    }
    Ok(ConcentrationState { t, m, p })
}

fn state_in_bounds(s: &ConcentrationState, st: &Stepper) -> bool {
    in_bounds(&s.m, st.m_max) && in_bounds(&s.p, st.p_max)
}

/// Integrates from the configured initial state (zero by default) to `t_end`.
pub fn simulate(params: &ModelParams, cfg: &SimulationConfig) -> Result<Trajectory> {
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(Error::Config(format!("t_end must be positive, got {}", cfg.t_end)));
    }
    if !(cfg.sample_every > 0.0) {
        return Err(Error::Config("sample interval must be positive".into()));
    }
    let grid = &cfg.grid;
    let dt0 = stable_dt(grid, cfg.d);
    let steps = (cfg.t_end / dt0).ceil() as u64;
    let dt = cfg.t_end / steps as f64;
    let stepper = Stepper::new(params, cfg.d, dt, grid)?;

    let init = match &cfg.initial {
        Some(s) => {
            if s.m.len() != grid.n_nodes() || s.p.len() != grid.n_nodes() {
                return Err(Error::Config("initial state does not match the grid".into()));
            }
            if s.m.iter().chain(&s.p).any(|&v| !(v >= 0.0)) {
                return Err(Error::Config("initial state must be nonnegative".into()));
            }
            s.clone()
        }
        None => ConcentrationState::zeros(grid),
    };
    let start_inside = state_in_bounds(&init, &stepper);
    let mut m = init.m;
    let mut p = init.p;
    let mut mn = vec![0.0; m.len()];
    let mut pn = vec![0.0; p.len()];

    let stride = ((cfg.sample_every / dt).round() as u64).max(1);
    let mut snaps: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|&t| t >= 0.0).collect();
    snaps.sort_by(f64::total_cmp);
    let mut next_snap = 0;

    let mut times = vec![0.0];
    let mut mass_m = vec![grid.integrate(&m)];
    let mut mass_p = vec![grid.integrate(&p)];
    let mut snapshots = Vec::new();
    while next_snap < snaps.len() && snaps[next_snap] <= 0.0 {
        snapshots.push(ConcentrationState { t: 0.0, m: m.clone(), p: p.clone() });
        next_snap += 1;
    }

    for k in 1..=steps {
        let ok = stepper.advance(&mut m, &mut p, &mut mn, &mut pn);
        let t = k as f64 * dt;
        if !ok {
            let finite = m.iter().chain(&p).all(|v| v.is_finite());
            if !finite || start_inside {
                return Err(Error::Divergence {
                    t,
                    reason: if finite {
                        "left the invariant region".into()
                    } else {
                        "non-finite concentration".into()
                    },
                });
            }
        }
        if k % stride == 0 || k == steps {
            times.push(t);
            mass_m.push(grid.integrate(&m));
            mass_p.push(grid.integrate(&p));
        }
        while next_snap < snaps.len() && snaps[next_snap] <= t + 0.5 * dt {
            snapshots.push(ConcentrationState { t, m: m.clone(), p: p.clone() });
            next_snap += 1;
        }
    }

    Ok(Trajectory {
        d: cfg.d,
        dt,
        x: grid.nodes(),
        times,
        mass_m,
        mass_p,
        snapshots,
        final_state: ConcentrationState { t: cfg.t_end, m, p },
    })
}

/// Classifies the last `window_fraction` of the `M(t)` record.
pub fn classify(traj: &Trajectory, window_fraction: f64) -> Result<AttractorClass> {
    classify_series(&traj.times, &traj.mass_m, window_fraction)
}

/// [`classify`] for a bare time series.
pub fn classify_series(times: &[f64], values: &[f64], window_fraction: f64) -> Result<AttractorClass> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "window fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    let n = values.len().min(times.len());
    let start = n - ((n as f64 * window_fraction).floor() as usize).min(n);
    let (t, v) = (&times[start..n], &values[start..n]);
    if v.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientData {
            samples: v.len(),
            needed: MIN_WINDOW_SAMPLES,
        });
    }
    let range = |s: &[f64]| {
        let (lo, hi) = s
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    };
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let total = range(v);
    let relative_amplitude = if mean.abs() > 0.0 { total / mean.abs() } else if total > 0.0 { f64::INFINITY } else { 0.0 };
    let half = v.len() / 2;
    let early = range(&v[..half]);
    let late = range(&v[half..]);
    let sustain_ratio = if early > 0.0 { late / early } else if late > 0.0 { f64::INFINITY } else { 0.0 };

    let peaks = peak_times(t, v);
    let period = (peaks.len() >= 2)
        .then(|| (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64);
    let oscillatory = relative_amplitude > OSCILLATION_THRESHOLD
        && sustain_ratio >= SUSTAIN_RATIO
        && period.is_some();
    Ok(AttractorClass {
        kind: if oscillatory {
            AttractorKind::Oscillatory
        } else {
            AttractorKind::Steady
        },
        relative_amplitude,
        sustain_ratio,
        period: if oscillatory { period } else { None },
    })
}

/// Times of strict interior maxima, refined by a parabola through the three samples.
fn peak_times(t: &[f64], v: &[f64]) -> Vec<f64> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .map(|i| {
            let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
            let den = y0 - 2.0 * y1 + y2;
            let h = 0.5 * (t[i + 1] - t[i - 1]);
            if den != 0.0 {
                t[i] + 0.5 * h * (y0 - y2) / den
            } else {
                t[i]
            }
        })
        .collect()
}

/// Peak-to-trough range of `P` over the last `window_fraction` of the record.
pub fn protein_amplitude(traj: &Trajectory, window_fraction: f64) -> f64 {
    let n = traj.mass_p.len();
    let start = n - ((n as f64 * window_fraction).floor() as usize).min(n);
    let w = &traj.mass_p[start..];
    let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Final fields of a run whose late window is steady.
pub fn late_time_profile(traj: &Trajectory, window_fraction: f64) -> Result<ConcentrationState> {
    match classify(traj, window_fraction)?.kind {
        AttractorKind::Steady => Ok(traj.final_state.clone()),
        AttractorKind::Oscillatory => Err(Error::NotSteady),
    }
}
