mod common;

use common::*;
use grn_hopf::grid::{dirac_weights, SpatialGrid};
use grn_hopf::simulator::{
    classify, late_time_profile, simulate, stable_dt, step, AttractorKind, ConcentrationState, SimulationConfig,
};
use grn_hopf::steady::steady_state;
use grn_hopf::{Error, ModelParams};
use proptest::prelude::*;

fn run(params: &ModelParams, d: f64, t_end: f64, n: usize) -> grn_hopf::simulator::Trajectory {
    simulate(params, &SimulationConfig::new(d, t_end, SpatialGrid::new(n).unwrap())).unwrap()
}

fn bounds(params: &ModelParams, grid: &SpatialGrid) -> (f64, f64) {
    let w = dirac_weights(grid, params).iter().map(|w| w.1).fold(0.0, f64::max);
    (params.mrna_bound(w), params.protein_bound(w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_steps_stay_in_the_invariant_region(
        ld in -7.0f64..-1.0,
        seed in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 201),
    ) {
        let p = defaults();
        let grid = SpatialGrid::new(201).unwrap();
        let d = 10f64.powf(ld);
        let (mb, pb) = bounds(&p, &grid);
        let mut s = ConcentrationState {
            t: 0.0,
            m: seed.iter().map(|v| v.0 * mb).collect(),
            p: seed.iter().map(|v| v.1 * pb).collect(),
        };
        let dt = stable_dt(&grid, d);
        for _ in 0..20 {
            s = step(&s, &p, d, dt, &grid).unwrap();
            prop_assert!(s.m.iter().all(|&v| (0.0..=mb).contains(&v)));
            prop_assert!(s.p.iter().all(|&v| (0.0..=pb).contains(&v)));
        }
    }
}

#[test]
fn every_step_of_a_full_run_stays_bounded() {
    let p = defaults();
    let grid = SpatialGrid::new(401).unwrap();
    let (mb, pb) = bounds(&p, &grid);
    let d = 1e-3;
    let dt = stable_dt(&grid, d);
    let mut s = ConcentrationState::zeros(&grid);
    for _ in 0..(2000.0 / dt) as usize {
        s = step(&s, &p, d, dt, &grid).unwrap();
        assert!(s.m.iter().all(|&v| (0.0..=mb).contains(&v)));
        assert!(s.p.iter().all(|&v| (0.0..=pb).contains(&v)));
    }
}

#[test]
fn unsourced_mass_decays_exponentially() {
    let p = ModelParams { alpha_m: 0.0, ..defaults() };
    let grid = SpatialGrid::new(201).unwrap();
    let m0: Vec<f64> = grid.nodes().iter().map(|x| 1.0 + (3.0 * x).cos()).collect();
    let cfg = SimulationConfig {
        initial: Some(ConcentrationState { t: 0.0, m: m0, p: vec![0.0; 201] }),
        ..SimulationConfig::new(1e-3, 100.0, grid)
    };
    let tr = simulate(&p, &cfg).unwrap();
    for (t, m) in tr.times.iter().zip(&tr.mass_m) {
        let want = tr.mass_m[0] * (-p.mu * t).exp();
        assert!(rel_err(*m, want) < 5e-3, "t={t}");
    }
}

#[test]
fn late_mass_is_grid_converged() {
    let p = defaults();
    let a = run(&p, 3e-4, 4000.0, 501);
    let b = run(&p, 3e-4, 4000.0, 1001);
    let (ma, mb) = (a.mass_m.last().unwrap(), b.mass_m.last().unwrap());
    assert!(rel_err(*ma, *mb) < 0.01, "{ma} vs {mb}");
}

#[test]
fn small_diffusion_keeps_mrna_near_the_gene() {
    let p = defaults();
    let tr = run(&p, 1e-6, 500.0, 2001);
    let s = &tr.final_state;
    let total: f64 = s.m.iter().sum();
    let near: f64 = tr.x.iter().zip(&s.m).filter(|(x, _)| (*x - p.x_m).abs() < 0.05).map(|(_, m)| m).sum();
    assert!(near > 0.99 * total);
    assert!(s.p.iter().all(|&v| v < 1e-3));
}

#[test]
fn large_diffusion_flattens_fields() {
    let p = defaults();
    let tr = run(&p, 100.0, 500.0, 21);
    for f in [&tr.final_state.m, &tr.final_state.p] {
        let hi = f.iter().cloned().fold(0.0, f64::max);
        let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((hi - lo) < 0.01 * hi);
    }
}

#[test]
fn oscillation_period_matches_linear_frequency() {
    let p = defaults();
    let tr = run(&p, 7.5e-3, 12_000.0, 501);
    let cls = classify(&tr, 0.5).unwrap();
    assert_eq!(cls.kind, AttractorKind::Oscillatory);
    let want = 2.0 * std::f64::consts::PI / OMEGA2C;
    let got = cls.period.unwrap();
    assert!(rel_err(got, want) < 0.25, "period {got} vs {want}");
    assert!(matches!(late_time_profile(&tr, 0.5), Err(Error::NotSteady)));
}

#[test]
fn steady_run_relaxes_to_the_steady_profile() {
    let p = defaults();
    let n = 1001;
    let tr = run(&p, 1e-4, 8000.0, n);
    let late = late_time_profile(&tr, 0.5).unwrap();
    let ss = steady_state(&p, 1e-4, &SpatialGrid::new(n).unwrap()).unwrap();
    let scale = ss.p_profile.iter().cloned().fold(0.0, f64::max);
    assert!(sup_dist(&late.p, &ss.p_profile) < 0.02 * scale);
}

#[test]
fn invalid_runs_are_rejected() {
    let p = defaults();
    let g = SpatialGrid::new(11).unwrap();
    assert!(matches!(simulate(&p, &SimulationConfig::new(1e-3, -1.0, g.clone())), Err(Error::Config(_))));
    let short = simulate(&p, &SimulationConfig::new(1e-3, 3.0, g)).unwrap();
    assert!(matches!(classify(&short, 0.5), Err(Error::InsufficientData { .. })));
}
