//! Invariant-set monitoring along full-system trajectories: margins of the
//! region Omega = {0 < y < nx, s0 < z < 0}, sign tracking of w - nx, capture
//! events at the stationary points, and the potential function Phi with its
//! conservation-law residual.

use serde::Serialize;

use crate::error::{Result, SolvError};
use crate::flow::{self, PhasePoint};
use crate::integrate::{CrossingDir, EventKind, EventSpec, OmegaFace, Trajectory, cumtrapz_corrected};
use crate::params::SolvsolitonParams;

/// Margins of the four Omega inequalities at a point, in face order
/// [y, nx - y, z - s0, -z]; all positive iff the point is inside Omega.
pub fn omega_margins(params: &SolvsolitonParams, p: &PhasePoint) -> [f64; 4] {
    let n = params.nf();
    [p[1], n * p[0] - p[1], p[2] - params.s0, -p[2]]
}

pub fn in_omega(params: &SolvsolitonParams, p: &PhasePoint) -> bool {
    omega_margins(params, p).iter().all(|&m| m > 0.0)
}

/// Non-terminal monitoring events: one Down event per Omega face plus an
/// any-sign event on w - nx. Theorem shots must never fire any of them.
pub fn omega_event_specs(params: &SolvsolitonParams) -> Vec<EventSpec<4>> {
    let n = params.nf();
    let s0 = params.s0;
    let faces: [(OmegaFace, Box<dyn Fn(f64, &PhasePoint) -> f64 + Send + Sync>); 4] = [
        (OmegaFace::Y, Box::new(|_, p: &PhasePoint| p[1])),
        (OmegaFace::NxMinusY, Box::new(move |_, p: &PhasePoint| n * p[0] - p[1])),
        (OmegaFace::ZMinusS0, Box::new(move |_, p: &PhasePoint| p[2] - s0)),
        (OmegaFace::MinusZ, Box::new(|_, p: &PhasePoint| -p[2])),
    ];
    let mut specs: Vec<EventSpec<4>> = faces
        .into_iter()
        .map(|(face, g)| EventSpec {
            kind: EventKind::OmegaExit(face),
            terminal: false,
            direction: CrossingDir::Down,
            g,
        })
        .collect();
    specs.push(EventSpec {
        kind: EventKind::WMinusNxSignChange,
        terminal: false,
        direction: CrossingDir::AnySign,
        g: Box::new(move |_, p: &PhasePoint| p[3] - n * p[0]),
    });
    specs
}

/// Terminal capture events at all four stationary points.
pub fn capture_specs(params: &SolvsolitonParams, radius: f64) -> Result<Vec<EventSpec<4>>> {
    let pts = flow::stationary_points(params)?;
    Ok(pts
        .labeled()
        .into_iter()
        .map(|(label, target)| EventSpec::capture(label, target, radius))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    /// per-face minimum margin over the whole trajectory
    pub min_margins: [f64; 4],
    /// sample time where each minimum is attained
    pub argmin_s: [f64; 4],
    pub omega_exits: usize,
    pub wnx_crossings: usize,
    /// z is strictly increasing sample-to-sample (the flow forces this
    /// inside Omega)
    pub z_strictly_increasing: bool,
}

pub fn monitor_omega(traj: &Trajectory<4>, params: &SolvsolitonParams) -> OmegaReport {
    let mut min_margins = [f64::INFINITY; 4];
    let mut argmin_s = [f64::NAN; 4];
    for (i, p) in traj.states.iter().enumerate() {
        let m = omega_margins(params, p);
        for k in 0..4 {
            if m[k] < min_margins[k] {
                min_margins[k] = m[k];
                argmin_s[k] = traj.times[i];
            }
        }
    }
    let dir = traj.direction();
    let z_strictly_increasing = traj
        .states
        .windows(2)
        .all(|w| (w[1][2] - w[0][2]) * dir > 0.0);
    OmegaReport {
        min_margins,
        argmin_s,
        omega_exits: traj.count_events(|k| matches!(k, EventKind::OmegaExit(_))),
        wnx_crossings: traj.count_events(|k| matches!(k, EventKind::WMinusNxSignChange)),
        z_strictly_increasing,
    }
}

/// Phi and the residual of its conservation law along a trajectory that
/// emerges from gamma_s (backward-captured).
#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub s: Vec<f64>,
    /// Phi(s): cumulative integral of phi = w - nx from the captured end,
    /// with the (-inf, s_capture] tail taken as phi(s_capture)/eps_plus
    pub phi_cap: Vec<f64>,
    /// Phi' = phi = w - nx
    pub dphi: Vec<f64>,
    /// Phi'' = w' - nx' straight from the vector field
    pub ddphi: Vec<f64>,
    /// Phi'' + w Phi' + 2 lambda Phi, identically zero for exact solutions
    pub residual: Vec<f64>,
    pub sup_residual: f64,
    pub min_phi: f64,
    pub min_dphi: f64,
    pub min_ddphi: f64,
}

/// How close the anchored end must be to gamma_s for the exponential-tail
/// estimate to make sense.
const PHI_ANCHOR_TOL: f64 = 1e-6;

pub fn monitor_phi(traj: &Trajectory<4>, params: &SolvsolitonParams) -> Result<PhiReport> {
    params.require_flow()?;
    let pts = flow::stationary_points(params)?;
    let first = traj.states[0];
    let dist = (first - pts.gamma_s_plus)
        .norm()
        .min((first - pts.gamma_s_minus).norm());
    let captured_event = traj
        .events
        .iter()
        .any(|e| matches!(&e.kind, EventKind::Captured(l) if l.starts_with("gamma_s")));
    if dist > PHI_ANCHOR_TOL && !captured_event {
        return Err(SolvError::NotCaptured);
    }

    let n = params.nf();
    let (eps_plus, _) = flow::eps_closed_form(params);
    let dphi: Vec<f64> = traj.states.iter().map(|p| p[3] - n * p[0]).collect();
    let ddphi: Vec<f64> = traj.derivs.iter().map(|d| d[3] - n * d[0]).collect();
    let tail = dphi[0] / eps_plus;
    let phi_cap: Vec<f64> = cumtrapz_corrected(&traj.times, &dphi, &ddphi)
        .into_iter()
        .map(|v| v + tail)
        .collect();

    let mut residual = Vec::with_capacity(traj.len());
    let mut sup_residual = 0.0f64;
    for i in 0..traj.len() {
        let r = ddphi[i] + traj.states[i][3] * dphi[i] + 2.0 * params.lambda * phi_cap[i];
        sup_residual = sup_residual.max(r.abs());
        residual.push(r);
    }

    let fold_min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PhiReport {
        s: traj.times.clone(),
        min_phi: fold_min(&phi_cap),
        min_dphi: fold_min(&dphi),
        min_ddphi: fold_min(&ddphi),
        phi_cap,
        dphi,
        ddphi,
        residual,
        sup_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{IntegrateOptions, solve};
    use crate::params::preset;
    use nalgebra::Vector4;

    #[test]
    fn margins_hand_values() {
        let (_, params) = preset("heisenberg3").unwrap();
        // s0 = -1/8; at (0.1, 0.2, -0.05, 0.7): [0.2, 0.1, 0.075, 0.05]
        let m = omega_margins(&params, &Vector4::new(0.1, 0.2, -0.05, 0.7));
        assert!((m[0] - 0.2).abs() < 1e-15);
        assert!((m[1] - 0.1).abs() < 1e-15);
        assert!((m[2] - 0.075).abs() < 1e-15);
        assert!((m[3] - 0.05).abs() < 1e-15);
        assert!(in_omega(&params, &Vector4::new(0.1, 0.2, -0.05, 0.7)));
        assert!(!in_omega(&params, &Vector4::new(0.1, 1.0, -0.0625, 0.0)));
    }

    #[test]
    fn start_outside_omega_flags_immediately() {
        let (_, params) = preset("heisenberg3").unwrap();
        let specs = omega_event_specs(&params);
        // y = 1 > nx = 0.3: NxMinusY face violated at the start
        let p0 = Vector4::new(0.1, 1.0, params.s0 / 2.0, 0.0);
        let f = {
            let params = params.clone();
            move |_: f64, p: &PhasePoint| crate::flow::field(&params, p).unwrap()
        };
        let traj = solve(f, (0.0, 1.0), p0, &IntegrateOptions::default(), &specs);
        assert!(traj
            .events
            .iter()
            .any(|e| matches!(e.kind, EventKind::OmegaExit(OmegaFace::NxMinusY)) && e.s == 0.0));
        let report = monitor_omega(&traj, &params);
        assert!(report.omega_exits >= 1);
        assert!(report.min_margins[1] < 0.0);
    }

    #[test]
    fn capture_at_stationary_seed() {
        let (_, params) = preset("heisenberg3").unwrap();
        let specs = capture_specs(&params, 1e-8).unwrap();
        let pts = flow::stationary_points(&params).unwrap();
        let f = {
            let params = params.clone();
            move |_: f64, p: &PhasePoint| crate::flow::field(&params, p).unwrap()
        };
        let traj = solve(f, (0.0, 10.0), pts.gamma_s_plus, &IntegrateOptions::default(), &specs);
        assert_eq!(traj.len(), 1);
        assert!(matches!(
            &traj.events[0].kind,
            EventKind::Captured(l) if l == "gamma_s_plus"
        ));
    }

    #[test]
    fn phi_requires_capture() {
        let (_, params) = preset("heisenberg3").unwrap();
        let f = {
            let params = params.clone();
            move |_: f64, p: &PhasePoint| crate::flow::field(&params, p).unwrap()
        };
        // start well inside Omega but far from gamma_s
        let traj = solve(
            f,
            (0.0, 1.0),
            Vector4::new(0.2, 0.3, -0.05, 0.9),
            &IntegrateOptions::default(),
            &[],
        );
        assert!(matches!(monitor_phi(&traj, &params), Err(SolvError::NotCaptured)));
    }

    #[test]
    fn random_in_omega_starts_stay_in_omega() {
        use rand::{Rng, SeedableRng};
        let (_, params) = preset("heisenberg3").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = params.nf();
        let f = {
            let params = params.clone();
            move |_: f64, p: &PhasePoint| crate::flow::field(&params, p).unwrap()
        };
        let opts = IntegrateOptions::default();
        for trial in 0..20 {
            // sample strictly inside Omega: x > 0, 0 < y < nx, s0 < z < 0
            let x = rng.gen_range(0.05..1.0);
            let y = rng.gen_range(0.05 * n * x..0.95 * n * x);
            let z = rng.gen_range(0.95 * params.s0..0.05 * params.s0);
            let w = rng.gen_range(-0.5..2.0);
            let p0 = Vector4::new(x, y, z, w);
            assert!(in_omega(&params, &p0));
            let specs = omega_event_specs(&params);
            let traj = solve(&f, (0.0, 50.0), p0, &opts, &specs);
            assert!(traj.abort.is_none(), "trial {trial} aborted");
            let report = monitor_omega(&traj, &params);
            assert_eq!(report.omega_exits, 0, "trial {trial} exited Omega at p0={p0:?}");
            assert!(report.z_strictly_increasing, "trial {trial}");
            assert!(report.min_margins.iter().all(|&m| m > 0.0));
        }
    }
}
