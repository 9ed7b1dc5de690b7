//! Command-line interface. Every subcommand prints deterministic output
//! (full-precision JSON or fixed-format tables, no timestamps), so repeated
//! runs are byte-identical.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::algebra::LieAlgebraData;
use crate::asymptotics;
use crate::error::{Result, SolvError};
use crate::flow;
use crate::integrate::{EventKind, IntegrateOptions, Trajectory};
use crate::monitor;
use crate::noscal;
use crate::params::{self, preset, SolvsolitonParams};
use crate::reconstruct;
use crate::report;
use crate::shoot::{self, ShotConfig};
use crate::verify;

#[derive(Parser)]
#[command(
    name = "solvflow",
    about = "Expanding solitons from solvable groups: a shooting method for the reduced phase flow",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List shipped presets, or print one (name or algebra JSON file) as
    /// normalized parameters
    Preset {
        /// preset name (heisenberg3, heisenberg:N, abelian:N) or a path to
        /// an algebra JSON file
        name: Option<String>,
        /// print the Lie algebra structure constants (the JSON exchange
        /// format) instead of the normalized parameters
        #[arg(long)]
        algebra: bool,
    },
    /// Stationary points and the unstable eigenstructure at gamma_s
    Stationary {
        #[arg(long, default_value = "heisenberg3")]
        preset: String,
    },
    /// Shoot one family member from the unstable manifold of gamma_s
    Shoot {
        #[arg(long, default_value = "heisenberg3")]
        preset: String,
        /// angle in the unstable plane; admissible range is (-pi/2, theta0)
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// seed offset along the chosen direction (default: largest offset
        /// the capture analysis allows for the preset, at most 1e-6)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 100.0)]
        smax: f64,
        #[arg(long, default_value_t = -60.0)]
        sback: f64,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        #[arg(long, default_value_t = 1e-8)]
        capture_radius: f64,
        /// write the merged trajectory as CSV (s,x,y,z,w + margins + phi)
        #[arg(long)]
        dump: Option<PathBuf>,
        /// write the reconstructed metric profile as CSV
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Integrate the gamma_s -> gamma_h Einstein connection
    Einstein {
        #[arg(long, default_value = "heisenberg3")]
        preset: String,
        /// write the embedded 4D trajectory as CSV
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Integrate the scalar-flat 2D subsystem (y, w)
    Noscal {
        /// take lambda from a preset
        #[arg(long)]
        preset: Option<String>,
        /// explicit lambda in (-1, 0); overrides --preset
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 200.0)]
        smax: f64,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        /// write the trajectory as CSV (s,y,w)
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the verification battery; exits nonzero if any check fails
    Verify {
        /// preset(s) to verify (repeatable)
        #[arg(long = "preset", default_values_t = [String::from("heisenberg3")])]
        presets: Vec<String>,
        /// verify every shipped preset
        #[arg(long)]
        all: bool,
    },
    /// Shoot a grid of angles across the admissible range and fit the cone
    /// opening alpha of each member
    Sweep {
        #[arg(long, default_value = "heisenberg3")]
        preset: String,
        #[arg(long, default_value_t = 9)]
        count: usize,
        /// emit rows as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Fit tail rates of a dumped trajectory CSV
    Asymptotics {
        /// trajectory CSV as written by `shoot --dump`
        file: PathBuf,
        #[arg(long, default_value = "heisenberg3")]
        preset: String,
        /// also write a gnuplot-ready compensated-quantity table
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct EventSummary {
    kind: String,
    s: f64,
    terminal: bool,
}

fn event_summaries(traj: &Trajectory<4>) -> Vec<EventSummary> {
    traj.events
        .iter()
        .map(|e| EventSummary {
            kind: match &e.kind {
                EventKind::OmegaExit(face) => format!("omega_exit:{face:?}"),
                EventKind::WMinusNxSignChange => "w_minus_nx_sign_change".into(),
                EventKind::Blowup => "blowup".into(),
                EventKind::Captured(l) => format!("captured:{l}"),
                EventKind::MaxTime => "max_time".into(),
            },
            s: e.s,
            terminal: e.terminal,
        })
        .collect()
}

#[derive(Serialize)]
struct ShotReport {
    preset: String,
    theta: f64,
    delta: f64,
    admissible: bool,
    seed: Vec<f64>,
    s_range: (f64, f64),
    samples: usize,
    capture_s: Option<f64>,
    capture_distance: Option<f64>,
    events: Vec<EventSummary>,
    omega: monitor::OmegaReport,
    phi_sup_residual: Option<f64>,
    phi_min: Option<[f64; 3]>,
    soliton_residual_sup: Option<f64>,
}

#[derive(Serialize)]
struct EinsteinReport {
    preset: String,
    capture_s: f64,
    capture_distance: f64,
    z_drift: f64,
    k_min_margins: [f64; 4],
    x_nondecreasing: bool,
    y_nonincreasing: bool,
    log_c_slope: f64,
    log_c_slope_expected: f64,
}

#[derive(Serialize)]
struct NoscalReport {
    lambda: f64,
    mu_plus: f64,
    delta: f64,
    s_end: f64,
    end_y: f64,
    end_w: f64,
    w_compensated: f64,
    y_compensated: f64,
    samples: usize,
}

fn load_params(name: &str) -> Result<(LieAlgebraData, SolvsolitonParams)> {
    if params::preset_names().contains(&name)
        || name.starts_with("heisenberg:")
        || name.starts_with("abelian:")
        || name == "heisenberg3"
    {
        return preset(name);
    }
    // not a known preset: treat as a path to an algebra JSON file
    let text = fs::read_to_string(name).map_err(|e| {
        SolvError::UnknownPreset(format!("{name} (not a preset, and reading it failed: {e})"))
    })?;
    let alg = LieAlgebraData::from_json(&text)?;
    let (lambda0, d) = alg.detect_solvsoliton()?;
    let p = params::normalize(&alg.name.clone(), lambda0, &d, alg.dim)?;
    Ok((alg, p))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", report::to_json_pretty(value)?);
    Ok(())
}

fn cmd_preset(name: Option<String>, algebra: bool) -> Result<()> {
    match name {
        None => {
            for n in params::preset_names() {
                println!("{n}");
            }
            Ok(())
        }
        Some(n) => {
            let (alg, p) = load_params(&n)?;
            if algebra {
                println!("{}", alg.to_json());
                Ok(())
            } else {
                print_json(&p)
            }
        }
    }
}

#[derive(Serialize)]
struct StationaryReport {
    preset: String,
    points: flow::StationaryPoints,
    eigen: flow::EigenData,
    admissible_range: (f64, f64),
}

fn cmd_stationary(preset_name: &str) -> Result<()> {
    let (_, p) = load_params(preset_name)?;
    let points = flow::stationary_points(&p)?;
    let eigen = flow::unstable_eigendata(&p)?;
    let admissible_range = flow::admissible_range(&eigen);
    print_json(&StationaryReport { preset: preset_name.into(), points, eigen, admissible_range })
}

#[allow(clippy::too_many_arguments)]
fn cmd_shoot(
    preset_name: &str,
    theta: f64,
    delta: Option<f64>,
    smax: f64,
    sback: f64,
    rtol: f64,
    atol: f64,
    capture_radius: f64,
    dump: Option<PathBuf>,
    profile_path: Option<PathBuf>,
) -> Result<()> {
    let (_, p) = load_params(preset_name)?;
    let eig = flow::unstable_eigendata(&p)?;
    let mut cfg = ShotConfig {
        s_forward: smax,
        s_backward: sback,
        capture_radius,
        opts: IntegrateOptions::with_tol(rtol, atol),
        ..ShotConfig::default()
    };
    cfg = match delta {
        Some(d) => ShotConfig { delta: d, ..cfg },
        None => cfg.adapted(&eig),
    };

    let (admissible, traj, capture) = match shoot::shoot_family(&p, theta, &cfg) {
        Ok(shot) => {
            let cap = (shot.capture_s, shot.capture_distance);
            (true, shot.trajectory, Some(cap))
        }
        Err(SolvError::OutsideAdmissibleRange { theta, lo, hi }) => {
            eprintln!(
                "warning: theta = {theta} is outside the admissible range \
                 ({lo:.6}, {hi:.6}); integrating without admissibility assertions"
            );
            let traj = shoot::integrate_family_raw(&p, theta, &cfg)?;
            (false, traj, None)
        }
        Err(e) => return Err(e),
    };

    let omega = monitor::monitor_omega(&traj, &p);
    let phi = monitor::monitor_phi(&traj, &p).ok();
    let profile = reconstruct::reconstruct(&traj, &p).ok();
    let residual_sup = match &profile {
        Some(pr) => reconstruct::soliton_residual(pr, &traj, &p)
            .ok()
            .map(|r| r.iter().fold(0.0f64, |a, &b| a.max(b))),
        None => None,
    };

    if let Some(path) = dump {
        let f = fs::File::create(&path).map_err(|e| SolvError::Io(e.to_string()))?;
        report::write_trajectory_csv(
            io::BufWriter::new(f),
            &traj,
            Some(&p),
            phi.as_ref().map(|r| r.phi_cap.as_slice()),
        )?;
    }
    if let Some(path) = profile_path {
        match &profile {
            Some(pr) => {
                let f = fs::File::create(&path).map_err(|e| SolvError::Io(e.to_string()))?;
                report::write_profile_csv(io::BufWriter::new(f), pr)?;
            }
            None => eprintln!("warning: no metric profile (z changes sign); profile not written"),
        }
    }

    let seed = shoot::seed_unstable(&p, &eig, theta, cfg.delta)?;
    print_json(&ShotReport {
        preset: preset_name.into(),
        theta,
        delta: cfg.delta,
        admissible,
        seed: seed.iter().copied().collect(),
        s_range: (traj.start_time(), traj.end_time()),
        samples: traj.len(),
        capture_s: capture.map(|c| c.0),
        capture_distance: capture.map(|c| c.1),
        events: event_summaries(&traj),
        omega,
        phi_sup_residual: phi.as_ref().map(|r| r.sup_residual),
        phi_min: phi.as_ref().map(|r| [r.min_phi, r.min_dphi, r.min_ddphi]),
        soliton_residual_sup: residual_sup,
    })
}

fn cmd_einstein(preset_name: &str, dump: Option<PathBuf>) -> Result<()> {
    let (_, p) = load_params(preset_name)?;
    let shot = shoot::shoot_einstein(&p, &ShotConfig::einstein_default())?;
    let slope = asymptotics::einstein_log_c_slope(&shot.embedded, &p)?;
    if let Some(path) = dump {
        let f = fs::File::create(&path).map_err(|e| SolvError::Io(e.to_string()))?;
        report::write_trajectory_csv(io::BufWriter::new(f), &shot.embedded, Some(&p), None)?;
    }
    print_json(&EinsteinReport {
        preset: preset_name.into(),
        capture_s: shot.capture_s,
        capture_distance: shot.capture_distance,
        z_drift: shot.z_drift,
        k_min_margins: shot.k_min_margins,
        x_nondecreasing: shot.x_nondecreasing,
        y_nonincreasing: shot.y_nonincreasing,
        log_c_slope: slope,
        log_c_slope_expected: (-p.lambda / p.nf()).sqrt(),
    })
}

fn cmd_noscal(
    preset_name: Option<String>,
    lambda: Option<f64>,
    smax: f64,
    delta: f64,
    dump: Option<PathBuf>,
) -> Result<()> {
    let lam = match (lambda, preset_name) {
        (Some(l), _) => l,
        (None, Some(name)) => load_params(&name)?.1.lambda,
        (None, None) => preset("heisenberg3")?.1.lambda,
    };
    let cfg = ShotConfig { delta, s_forward: smax, ..ShotConfig::noscal_default() };
    let traj = shoot::shoot_noscal(lam, &cfg)?;
    if let Some(path) = dump {
        let mut f =
            io::BufWriter::new(fs::File::create(&path).map_err(|e| SolvError::Io(e.to_string()))?);
        writeln!(f, "s,y,w").map_err(|e| SolvError::Io(e.to_string()))?;
        for (i, &s) in traj.times.iter().enumerate() {
            writeln!(f, "{:.16e},{:.16e},{:.16e}", s, traj.states[i][0], traj.states[i][1])
                .map_err(|e| SolvError::Io(e.to_string()))?;
        }
    }
    let q = traj.end_state();
    let s_end = traj.end_time();
    print_json(&NoscalReport {
        lambda: lam,
        mu_plus: noscal::noscal_mu_plus(lam),
        delta,
        s_end,
        end_y: q[0],
        end_w: q[1],
        w_compensated: q[1] / (-lam * s_end),
        y_compensated: q[0] * (-lam * s_end),
        samples: traj.len(),
    })
}

fn cmd_verify(presets: Vec<String>, all: bool) -> Result<i32> {
    let names: Vec<String> = if all {
        params::preset_names().iter().map(|s| s.to_string()).collect()
    } else {
        presets
    };
    let mut passed = 0usize;
    let mut failed = 0usize;
    for name in &names {
        println!("== {name} ==");
        let results = verify::run_all(name)?;
        for c in &results {
            println!("{}", verify::format_line(c));
            if c.passed {
                passed += 1;
            } else {
                failed += 1;
            }
        }
    }
    println!("{passed} passed, {failed} failed");
    Ok(if failed > 0 { 1 } else { 0 })
}

fn cmd_sweep(preset_name: &str, count: usize, json: bool) -> Result<i32> {
    let (_, p) = load_params(preset_name)?;
    let eig = flow::unstable_eigendata(&p)?;
    let thetas = shoot::sweep_grid(&eig, count);
    let cfg = ShotConfig::rates_default().adapted(&eig);
    let rows = shoot::run_sweep(&p, &thetas, &cfg);

    let mut ok_rows = Vec::new();
    let mut bad = 0usize;
    for (theta, row) in thetas.iter().zip(rows) {
        match row {
            Ok(r) => ok_rows.push(r),
            Err(e) => {
                eprintln!("theta = {theta:+.6}: {e}");
                bad += 1;
            }
        }
    }
    if json {
        print_json(&ok_rows)?;
    } else {
        println!(
            "{:>12} {:>12} {:>10} {:>12} {:>14} {:>6}",
            "theta", "alpha", "sup_x", "capture_s", "capture_dist", "omega"
        );
        for r in &ok_rows {
            println!(
                "{:>12.6} {:>12.6} {:>10.6} {:>12.4} {:>14.3e} {:>6}",
                r.theta,
                r.alpha,
                r.sup_x,
                r.capture_s,
                r.capture_distance,
                if r.omega_clean { "clean" } else { "DIRTY" }
            );
        }
    }
    Ok(if bad > 0 { 1 } else { 0 })
}

fn cmd_asymptotics(file: PathBuf, preset_name: &str, table: Option<PathBuf>) -> Result<()> {
    let (_, p) = load_params(preset_name)?;
    let f = fs::File::open(&file).map_err(|e| SolvError::Io(e.to_string()))?;
    let traj = report::read_trajectory_csv(BufReader::new(f), &p)?;
    let rates = asymptotics::fit_rates(&traj, &p)?;
    if let Some(path) = table {
        let out = fs::File::create(&path).map_err(|e| SolvError::Io(e.to_string()))?;
        report::write_compensated_table(
            io::BufWriter::new(out),
            &traj,
            &p,
            rates.anchor_offset,
            400,
        )?;
    }
    print_json(&rates)
}

/// Parses std::env::args and dispatches; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome: Result<i32> = match cli.command {
        Command::Preset { name, algebra } => cmd_preset(name, algebra).map(|()| 0),
        Command::Stationary { preset } => cmd_stationary(&preset).map(|()| 0),
        Command::Shoot {
            preset,
            theta,
            delta,
            smax,
            sback,
            rtol,
            atol,
            capture_radius,
            dump,
            profile,
        } => cmd_shoot(
            &preset, theta, delta, smax, sback, rtol, atol, capture_radius, dump, profile,
        )
        .map(|()| 0),
        Command::Einstein { preset, dump } => cmd_einstein(&preset, dump).map(|()| 0),
        Command::Noscal { preset, lambda, smax, delta, dump } => {
            cmd_noscal(preset, lambda, smax, delta, dump).map(|()| 0)
        }
        Command::Verify { presets, all } => cmd_verify(presets, all),
        Command::Sweep { preset, count, json } => cmd_sweep(&preset, count, json),
        Command::Asymptotics { file, preset, table } => {
            cmd_asymptotics(file, &preset, table).map(|()| 0)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
