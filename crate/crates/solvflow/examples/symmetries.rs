// Three exact symmetries of the reduced flow, each checked by comparing
// trajectories at matched times: the Z2 reflection (x,y,z,w) -> (-x,-y,z,-w)
// conjugating forward and backward orbits, the lambda-rescaling conjugacy,
// and shift covariance in the shooting parameter delta.

use nalgebra::Vector4;

use solvflow::asymptotics;
use solvflow::flow;
use solvflow::integrate::{solve, IntegrateOptions};
use solvflow::params::preset;
use solvflow::shoot::{self, ShotConfig};

fn main() -> solvflow::Result<()> {
    let (_, p) = preset("heisenberg3")?;
    let eig = flow::unstable_eigendata(&p)?;
    let lam = p.lambda;

    // drive the integrator directly: fixed lambda, tight tolerance so the
    // comparisons below resolve 1e-7 sup distances
    let tight = IntegrateOptions::with_tol(1e-12, 1e-14);
    let f = |_: f64, q: &Vector4<f64>| flow::field_with_lambda(&p, lam, q);
    let seed = shoot::seed_unstable(&p, &eig, 0.0, 1e-6)?;
    let span = 50.0;
    let base = solve(f, (0.0, span), seed, &tight, &[]);

    // 1. reflection: R gamma(-s) solves the same system, so integrating
    // R(seed) backwards must retrace the forward orbit reflected
    let refl = solve(f, (0.0, -span), flow::reflect(&seed), &tight, &[]);
    let mut sup = 0.0f64;
    for k in 0..=500 {
        let s = span * k as f64 / 500.0;
        sup = sup.max((flow::reflect(&base.sample(s)) - refl.sample(-s)).norm());
    }
    println!("reflection: sup distance over 500 matched times = {:.2e}", sup);

    // 2. rescaling lambda -> lambda' maps orbits to orbits under the
    // conjugation (q, s) -> (k q, s / k), k = sqrt(lambda'/lambda)
    let lam2 = lam / 2.0;
    let f2 = |_: f64, q: &Vector4<f64>| flow::field_with_lambda(&p, lam2, q);
    let (seed2, _) = flow::rescale_lambda(&seed, 0.0, lam, lam2)?;
    let k = (lam2 / lam).sqrt();
    let resc = solve(f2, (0.0, span / k + 1.0), seed2, &tight, &[]);
    let mut sup = 0.0f64;
    for j in 0..=500 {
        let s = span * j as f64 / 500.0;
        let (q_expect, s2) = flow::rescale_lambda(&base.sample(s), s, lam, lam2)?;
        sup = sup.max((resc.sample(s2) - q_expect).norm());
    }
    println!("rescale to lambda = {:.4}: sup distance = {:.2e}", lam2, sup);

    // 3. halving delta shifts the orbit by log(2)/eps_plus in s and changes
    // nothing else; align on the emergence anchor and superpose
    let cfg = ShotConfig::default().adapted(&eig);
    let cfg_half = ShotConfig { delta: cfg.delta / 2.0, ..cfg.clone() };
    let shot = shoot::shoot_family(&p, 0.0, &cfg)?;
    let shot_half = shoot::shoot_family(&p, 0.0, &cfg_half)?;
    let a1 = asymptotics::emergence_anchor(&shot.trajectory, &p)?;
    let a2 = asymptotics::emergence_anchor(&shot_half.trajectory, &p)?;
    let shift = a2 - a1;
    let expected = 2.0f64.ln() / eig.eps_plus;
    println!(
        "delta/2 shift = {:.7} vs log(2)/eps_plus = {:.7} (rel err {:.2e})",
        shift,
        expected,
        (shift - expected).abs() / expected
    );
    let span = (shot.trajectory.end_time() - a1).min(shot_half.trajectory.end_time() - a2) - 0.1;
    let mut sup = 0.0f64;
    for j in 0..=400 {
        let u = span * j as f64 / 400.0;
        sup = sup.max((shot.trajectory.sample(a1 + u) - shot_half.trajectory.sample(a2 + u)).norm());
    }
    println!("aligned orbits: sup distance over anchored [0, {:.0}] = {:.2e}", span, sup);
    Ok(())
}
