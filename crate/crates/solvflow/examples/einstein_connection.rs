// The theta = theta0 endpoint of the family: the Einstein orbit. The flow
// restricts to the invariant plane {y = x tan, z locked}; the heteroclinic
// runs from gamma_S to gamma_H inside the cone K, with z an exact invariant.

use solvflow::asymptotics;
use solvflow::einstein;
use solvflow::params::preset;
use solvflow::shoot::{self, ShotConfig};

fn main() -> solvflow::Result<()> {
    let (_, p) = preset("heisenberg3")?;

    let gs = einstein::gamma_s_restricted(&p);
    let gh = einstein::gamma_h_restricted(&p);
    println!("restricted endpoints (x, y):");
    println!("  gamma_S = ({:+.6}, {:+.6})", gs[0], gs[1]);
    println!("  gamma_H = ({:+.6}, {:+.6})   [sqrt(-lambda/n) = {:.6}]", gh[0], gh[1], (-p.lambda / p.nf()).sqrt());

    let dir = einstein::unstable_direction(&p)?;
    println!("unstable direction at gamma_S: ({:+.6}, {:+.6})", dir[0], dir[1]);

    let shot = shoot::shoot_einstein(&p, &ShotConfig::einstein_default())?;
    println!("\nheteroclinic shot:");
    println!("  capture at s = {:.4}, distance to gamma_H = {:.2e}", shot.capture_s, shot.capture_distance);
    println!("  conserved z drift = {:.2e}", shot.z_drift);
    println!("  x nondecreasing {}  y nonincreasing {}", shot.x_nondecreasing, shot.y_nonincreasing);
    println!("  cone K min margins = {:?}", shot.k_min_margins.map(|m| (m * 1e6).round() / 1e6));

    // lifting (x, y) back to the 4d phase space must land on the invariant set
    let mut worst = 0.0f64;
    let n_samples = 200;
    for k in 0..=n_samples {
        let s = shot.traj.start_time()
            + (shot.traj.end_time() - shot.traj.start_time()) * k as f64 / n_samples as f64;
        let q3 = shot.traj.sample(s);
        let q = nalgebra::Vector2::new(q3[0], q3[1]);
        worst = worst.max(einstein::embedding_residual(&p, &q)?);
    }
    println!("  embedding residual sup = {:.2e} over {} samples", worst, n_samples + 1);

    // far side: metric opens up like hyperbolic space of curvature lambda/n,
    // so log c grows linearly with slope sqrt(-lambda/n)
    let slope = asymptotics::einstein_log_c_slope(&shot.embedded, &p)?;
    let target = (-p.lambda / p.nf()).sqrt();
    println!(
        "\nlog c tail slope = {:.6}  (hyperbolic value {:.6}, rel err {:.2e})",
        slope,
        target,
        (slope - target).abs() / target
    );
    Ok(())
}
