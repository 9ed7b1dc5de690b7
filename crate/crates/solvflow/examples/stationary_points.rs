// The four stationary points of the reduced flow and the linearization at
// gamma_S: closed-form eigenvalues, the unstable plane, and the admissible
// shooting sector.

use solvflow::flow;
use solvflow::params::preset;

fn main() -> solvflow::Result<()> {
    let (_, p) = preset("heisenberg3")?;

    let pts = flow::stationary_points(&p)?;
    println!("stationary points (x, y, z, w):");
    for (label, q) in pts.labeled() {
        let r = flow::field(&p, &q)?.norm();
        println!(
            "  {:<10} ({:+.6}, {:+.6}, {:+.6}, {:+.6})   |F| = {:.2e}",
            label, q[0], q[1], q[2], q[3], r
        );
    }

    // eigenvalues of J(gamma_S) come from eps^2 + eps + 2 lambda = 0,
    // each a double root
    let (ep, em) = flow::eps_closed_form(&p);
    println!("\nclosed-form eigenvalues: eps_plus = {}   eps_minus = {}", ep, em);

    let eig = flow::unstable_eigendata(&p)?;
    println!("eigen residual |J w - eps_plus w| = {:.2e}", flow::eigen_residual(&p, &eig)?);
    println!("unstable basis:");
    println!("  w0 = ({:+.6}, {:+.6}, {:+.6}, {:+.6})", eig.w0[0], eig.w0[1], eig.w0[2], eig.w0[3]);
    println!("  w1 = ({:+.6}, {:+.6}, {:+.6}, {:+.6})", eig.w1[0], eig.w1[1], eig.w1[2], eig.w1[3]);

    // theta parametrizes unit directions in the unstable plane by their
    // xz-angle; theta0 is the angle of the Einstein direction w0, and w1 is
    // the zero-z combination sitting at the -pi/2 end
    let (lo, hi) = flow::admissible_range(&eig);
    println!("\ntheta0 = {:.12}", eig.theta0);
    println!("admissible sector: ({:.6}, {:.6})", lo, hi);
    for theta in [lo + 1e-3, 0.0, hi - 1e-3] {
        let u = flow::direction_from_angle(&eig, theta)?;
        println!(
            "  theta {:+.4} -> unit direction ({:+.4}, {:+.4}, {:+.4}, {:+.4})",
            theta, u[0], u[1], u[2], u[3]
        );
    }

    // inside the sector the direction is a positive combination of w0 and
    // w1; past either end one coefficient goes negative, the orbit leaves
    // Omega, and the shooting layer refuses the angle
    match solvflow::shoot::shoot_family(&p, hi + 0.05, &Default::default()) {
        Err(e) => println!("\nshoot_family at theta0 + 0.05: {}", e),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
