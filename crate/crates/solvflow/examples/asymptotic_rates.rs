// Forward asymptotics of a family member: anchor the orbit at its emergence
// time, then fit the compensated quantities w/(-lambda s), x s, y s^2, z s^2
// and classify the z-limit. The flow spends its late life on a centre
// manifold of the degenerate point (0, 0, z0, w -> infinity).

use solvflow::asymptotics;
use solvflow::params::preset;
use solvflow::shoot::{self, ShotConfig};

fn main() -> solvflow::Result<()> {
    let (_, p) = preset("heisenberg3")?;
    let eig = solvflow::flow::unstable_eigendata(&p)?;
    let cfg = ShotConfig::rates_default().adapted(&eig);
    let shot = shoot::shoot_family(&p, 0.0, &cfg)?;

    // anchor: the last crossing of x = 1/(2n), minus a fixed lead. Shots at
    // different delta differ by a time shift only, so anchored quantities
    // are delta-invariant.
    let sigma = asymptotics::emergence_anchor(&shot.trajectory, &p)?;
    let traj = shot.trajectory.truncated_at(sigma + 100.0);
    println!("emergence anchor sigma = {:.4}; fitting on anchored span [0, 100]", sigma);

    let rates = asymptotics::fit_rates(&traj, &p)?;
    println!("\n{:<16} {:>12} {:>12} {:>10}", "quantity", "fitted", "limit", "rel err");
    for f in &rates.fits {
        println!(
            "{:<16} {:>12.6} {:>12} {:>10}",
            f.quantity,
            f.fitted_value,
            f.predicted_limit.map_or("-".into(), |v| format!("{v:.6}")),
            f.relative_error.map_or("-".into(), |e| format!("{e:.2e}")),
        );
    }

    println!("\nalpha = {:.6} (z s^2 -> -alpha); windows ({:.6}, {:.6})", rates.alpha, rates.alpha_windows.0, rates.alpha_windows.1);
    if let (Some(a), Some(b), Some(r)) = (rates.y_s2_at_20, rates.y_s2_at_100, rates.y_decay_ratio) {
        println!("y s^2: {:.4e} at s=20  ->  {:.4e} at s=100  (decay x{:.0})", a, b, r);
    }

    let (z0, gap) = asymptotics::classify_z_limit(&traj, &p)?;
    println!("z-limit classified as {} (terminal gap {:.2e}); candidates are 0 and s0 = {}", z0, gap, p.s0);

    // on the centre manifold the eta-coordinates are slaved to xi quadratics
    let coords = asymptotics::centre_coords(&traj, z0, &p)?;
    let last = coords.last().unwrap();
    println!(
        "\ncentre coordinates at the end: xi2 = {:.4e}, eta1 = {:.4e}, eta2 = {:.4e}",
        last.xi2, last.eta1, last.eta2
    );

    // geometric meaning of alpha: the orbit closes up on a metric cone,
    // c^2 / s_hat^2 -> |s0| / alpha
    let cone = asymptotics::cone_profile(&shot.profile, rates.alpha, sigma, &p)?;
    println!(
        "cone check: c^2/s_hat^2 window ratios ({:.4}, {:.4}) vs target {:.6}, spread {:.2e}",
        cone.window_ratios.0, cone.window_ratios.1, cone.target, cone.spread
    );
    Ok(())
}
