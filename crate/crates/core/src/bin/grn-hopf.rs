use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use grn_hopf::export::{self, Json};
use grn_hopf::grid::SpatialGrid;
use grn_hopf::hopf::{self, AmplitudeParams, HopfPoint, OnsetStudy, DEFAULT_BRACKETS};
use grn_hopf::params::{ModelParams, ParamFile};
use grn_hopf::simulator::{self, SimulationConfig};
use grn_hopf::spectral::{stability_sweep, CharacteristicContext};
use grn_hopf::steady;
use grn_hopf::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "grn-hopf", version, about = "Spatial Hes1 feedback model: steady states, spectra, Hopf points, simulation")]
struct Cli {
    /// Flat `key = value` parameter file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true)]
    alpha_m: Option<f64>,
    #[arg(long, global = true)]
    alpha_p: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    h: Option<u32>,
    #[arg(long, global = true)]
    l: Option<f64>,
    #[arg(long = "x-m", global = true)]
    x_m: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Reserved; no computation is randomised.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the PDE from zero data and classify the late-time behaviour.
    Simulate {
        #[arg(long = "D")]
        d: Option<f64>,
        #[arg(long, default_value_t = 2e4, allow_negative_numbers = true)]
        t_end: f64,
        #[arg(long, default_value_t = SpatialGrid::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = 1.0)]
        sample_every: f64,
        /// Extra snapshot times (repeatable).
        #[arg(long)]
        snapshot: Vec<f64>,
        /// Trailing fraction of the record used for classification.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
    },
    /// Point-source steady state profiles.
    Steady {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: Option<f64>,
        #[arg(long, default_value_t = SpatialGrid::DEFAULT_NODES)]
        nodes: usize,
    },
    /// Roots of the characteristic function at one diffusion coefficient.
    Roots {
        #[arg(long = "D")]
        d: Option<f64>,
    },
    /// Stability map over log-spaced diffusion coefficients.
    Sweep {
        #[arg(long, default_value_t = 1e-7)]
        d_min: f64,
        #[arg(long, default_value_t = 0.1)]
        d_max: f64,
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
    /// Critical diffusion coefficients and amplitude-equation coefficients.
    Hopf {
        /// Search a single bracket instead of the two default ones.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        /// Also run PDE simulations near each point and fit the amplitude exponent.
        #[arg(long)]
        verify_amplitude: bool,
        #[arg(long, default_value_t = 4e4)]
        amplitude_t_end: f64,
        #[arg(long, default_value_t = 1001)]
        amplitude_nodes: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn log(stage: &str) {
    eprintln!("[grn-hopf] {stage}");
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => ParamFile::load(p)?,
        None => ParamFile::default(),
    };
    let params = apply_overrides(file.params, &cli.overrides)?;
    let need_d = |flag: Option<f64>| -> Result<f64> {
        let d = flag
            .or(file.diffusion)
            .ok_or_else(|| Error::Config("diffusion coefficient required (--D or `D` in config)".into()))?;
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Config(format!("D must be positive, got {d}")));
        }
        Ok(d)
    };
    let out = cli.out.as_path();
    std::fs::create_dir_all(out)?;

    match cli.command {
        Command::Simulate {
            d,
            t_end,
            nodes,
            sample_every,
            snapshot,
            window,
        } => {
            let d = need_d(d)?;
            if !(t_end > 0.0) {
                return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
            }
            let grid = SpatialGrid::new(nodes)?;
            let mut cfg = SimulationConfig::new(d, t_end, grid);
            cfg.sample_every = sample_every;
            cfg.snapshot_times = snapshot;
            log(&format!("simulate D={d:e} t_end={t_end:e} nodes={nodes}"));
            let traj = simulator::simulate(&params, &cfg)?;
            export::write_trajectory(&out.join("trajectory.csv"), &traj)?;
            for (k, s) in traj.snapshots.iter().enumerate() {
                export::write_snapshot(&out.join(format!("snapshot_{k}.csv")), &traj.x, s)?;
            }
            export::write_snapshot(&out.join("snapshot_final.csv"), &traj.x, &traj.final_state)?;
            let class = simulator::classify(&traj, window)?;
            println!("{}", export::classification_json(d, &class));
        }
        Command::Steady { d, nodes } => {
            let d = need_d(d)?;
            let grid = SpatialGrid::new(nodes)?;
            log(&format!("steady D={d:e}"));
            let sol = steady::steady_state(&params, d, &grid)?;
            export::write_profile(&out.join("steady_profile.csv"), &sol)?;
            let row = export::steady_summary_row(&sol);
            std::fs::write(
                out.join("steady_summary.csv"),
                format!("{}\n{row}\n", export::STEADY_SUMMARY_HEADER),
            )?;
            println!("{}\n{row}", export::STEADY_SUMMARY_HEADER);
        }
        Command::Roots { d } => {
            let d = need_d(d)?;
            log(&format!("roots D={d:e}"));
            let set = CharacteristicContext::new(&params, d)?.find_roots()?;
            export::write_roots(&out.join("roots.csv"), std::slice::from_ref(&set))?;
            println!("{} roots, max Re = {}", set.roots.len(), export::num(set.max_real_part()));
        }
        Command::Sweep { d_min, d_max, count } => {
            log(&format!("sweep {count} points over [{d_min:e}, {d_max:e}]"));
            let rows = stability_sweep(&params, d_min, d_max, count)?;
            export::write_sweep(&out.join("sweep.csv"), &rows)?;
            for r in &rows {
                println!("{},{},{}", export::num(r.d), export::num(r.max_re), r.unstable);
            }
        }
        Command::Hopf {
            bracket,
            verify_amplitude,
            amplitude_t_end,
            amplitude_nodes,
        } => {
            let brackets: Vec<(f64, f64)> = match bracket {
                Some(b) => vec![(b[0], b[1])],
                None => DEFAULT_BRACKETS.to_vec(),
            };
            let mut docs = Vec::new();
            for (k, br) in brackets.iter().enumerate() {
                let j = k as u8 + 1;
                log(&format!("hopf point {j} in [{:e}, {:e}]", br.0, br.1));
                let h = hopf::analyze(&params, j, *br)?;
                write_amplitude_run(out, &h)?;
                let mut fields = export::hopf_fields(&h);
                if verify_amplitude {
                    log(&format!("amplitude scaling runs near point {j}"));
                    let study = OnsetStudy {
                        offsets: vec![0.01, 0.02, 0.04],
                        grid: SpatialGrid::new(amplitude_nodes)?,
                        t_end: amplitude_t_end,
                        window_fraction: 0.25,
                    };
                    let report = hopf::predict_vs_simulate(&params, &h, &study)?;
                    export::write_onset(&out.join(format!("onset_{j}.csv")), &report)?;
                    fields.push(("amplitude_exponent", Json::Num(report.exponent)));
                }
                docs.push(export::json_object(&fields));
            }
            let text = format!("[\n  {}\n]\n", docs.join(",\n  "));
            std::fs::write(out.join("hopf.json"), &text)?;
            print!("{text}");
        }
    }
    Ok(())
}

/// Integrates the amplitude equation from a small seed up to saturation.
fn write_amplitude_run(out: &Path, h: &HopfPoint) -> Result<()> {
    let ap = AmplitudeParams::from_hopf(h);
    let rate = (ap.a * ap.nu).norm();
    let dt = 0.05 / rate;
    let t_end = 20.0 / (ap.a.re.abs());
    let traj = hopf::amplitude_evolve(&ap, Complex64::new(1e-2, 0.0), t_end, dt)?;
    export::write_amplitude(&out.join(format!("amplitude_{}.csv", h.j)), &traj)
}

fn apply_overrides(mut p: ModelParams, o: &Overrides) -> Result<ModelParams> {
    let _ = o.seed;
    if let Some(v) = o.alpha_m {
        p.alpha_m = v;
    }
    if let Some(v) = o.alpha_p {
        p.alpha_p = v;
    }
    if let Some(v) = o.mu {
        p.mu = v;
    }
    if let Some(v) = o.h {
        p.h = v;
    }
    if let Some(v) = o.l {
        p.l = v;
    }
    if let Some(v) = o.x_m {
        p.x_m = v;
    }
    if let Some(v) = o.epsilon {
        p.epsilon = v;
    }
    p.validate()?;
    Ok(p)
}
