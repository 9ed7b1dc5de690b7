// Shoot members of the soliton family: start on the unstable manifold of
// gamma_S at angle theta, integrate forward through Omega and backward into
// the capture ball, then check the invariants along the orbit.

use solvflow::monitor;
use solvflow::params::preset;
use solvflow::reconstruct;
use solvflow::shoot::{self, ShotConfig};

fn main() -> solvflow::Result<()> {
    let (_, p) = preset("heisenberg3")?;
    let eig = solvflow::flow::unstable_eigendata(&p)?;
    let cfg = ShotConfig::default().adapted(&eig); // delta shrunk to keep the capture floor low
    println!("shooting with delta = {:.3e}, capture radius = {:.1e}", cfg.delta, cfg.capture_radius);

    for theta in [-1.2, -0.4, 0.0, eig.theta0 / 2.0] {
        let shot = shoot::shoot_family(&p, theta, &cfg)?;
        let omega = monitor::monitor_omega(&shot.trajectory, &p);
        let phi = monitor::monitor_phi(&shot.trajectory, &p)?;
        let res = reconstruct::soliton_residual(&shot.profile, &shot.trajectory, &p)?;
        let sup_res = res.iter().cloned().fold(0.0f64, f64::max);

        println!("\ntheta = {:+.6}", theta);
        println!(
            "  span s in [{:.2}, {:.2}]  ({} dense samples)",
            shot.trajectory.start_time(),
            shot.trajectory.end_time(),
            shot.trajectory.len()
        );
        println!(
            "  capture at s = {:.4}, distance to gamma_S = {:.2e}",
            shot.capture_s, shot.capture_distance
        );
        println!(
            "  Omega: exits {}  w-nx crossings {}  z increasing {}  min margins {:?}",
            omega.omega_exits,
            omega.wnx_crossings,
            omega.z_strictly_increasing,
            omega.min_margins.map(|m| (m * 1e4).round() / 1e4)
        );
        println!(
            "  potential: sup |Phi'' + w Phi' + 2 lambda Phi| = {:.2e}, min(Phi, Phi', Phi'') = ({:.2e}, {:.2e}, {:.2e})",
            phi.sup_residual, phi.min_phi, phi.min_dphi, phi.min_ddphi
        );
        println!("  soliton residual sup = {:.2e}", sup_res);
    }

    // an angle outside (-pi/2, theta0) has no Omega-interior direction
    let bad = eig.theta0 + 0.2;
    match shoot::shoot_family(&p, bad, &cfg) {
        Err(e) => println!("\ntheta = {:+.4} rejected: {}", bad, e),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
