//! Acceptance battery: one test per advertised guarantee, each printing a
//! pass/fail line per sub-check (run with `--nocapture` to see them on
//! success; they are shown automatically on failure).
//!
//! Everything here goes through the public `verify` checks so the gates are
//! the same ones `solvflow verify` applies.

use solvflow::params::{preset, SolvsolitonParams};
use solvflow::verify::{self, format_line, CheckResult};

fn h3() -> SolvsolitonParams {
    preset("heisenberg3").expect("heisenberg3 preset").1
}

fn h5() -> SolvsolitonParams {
    preset("heisenberg:5").expect("heisenberg:5 preset").1
}

/// Assert one named check passed, echoing its formatted line.
fn require(checks: &[CheckResult], name: &str) {
    let c = checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("check `{name}` missing from battery"));
    println!("{}", format_line(c));
    assert!(c.passed, "{}", format_line(c));
}

/// Assert every check whose name matches `pred` passed; there must be
/// exactly `expect` of them.
fn require_matching(checks: &[CheckResult], expect: usize, pred: impl Fn(&str) -> bool) {
    let hits: Vec<&CheckResult> = checks.iter().filter(|c| pred(&c.name)).collect();
    assert_eq!(hits.len(), expect, "expected {expect} matching checks");
    for c in hits {
        println!("{}", format_line(c));
        assert!(c.passed, "{}", format_line(c));
    }
}

#[test]
fn criterion_01_stationarity() {
    // |F| <= 1e-13 at all four stationary points, for both Heisenberg presets.
    for params in [h3(), h5()] {
        let c = verify::check_stationarity(&params).unwrap();
        println!("[{}] {}", params.name, format_line(&c));
        assert!(c.passed, "[{}] {}", params.name, format_line(&c));
    }
}

#[test]
fn criterion_02_eigenvalue_exactness() {
    let params = h3();
    let checks = verify::check_eigenstructure(&params).unwrap();
    require(&checks, "flow.eigenvalues");
    require(&checks, "flow.identities");

    // heisenberg3 closed forms are exactly 1/2 and -3/2
    let eig = solvflow::flow::unstable_eigendata(&params).unwrap();
    assert!((eig.eps_plus - 0.5).abs() <= 1e-10, "eps_plus = {}", eig.eps_plus);
    assert!((eig.eps_minus + 1.5).abs() <= 1e-10, "eps_minus = {}", eig.eps_minus);
}

#[test]
fn criterion_03_jacobian_finite_difference() {
    // analytic Jacobian vs central differences at 100 random points in [-2,2]^4
    let c = verify::check_jacobian_fd(&h3()).unwrap();
    println!("{}", format_line(&c));
    assert!(c.passed, "{}", format_line(&c));
}

#[test]
fn criterion_04_lie_algebra_oracle() {
    let checks = verify::check_algebra("heisenberg3").unwrap();
    require(&checks, "algebra.ricci"); // diag(-1/2, -1/2, 1/2) to 1e-14
    require(&checks, "algebra.lambda0"); // detected lambda_0 = -3/2
    require(&checks, "algebra.derivation"); // [D, ad] residual <= 1e-10
}

#[test]
fn criterion_05_omega_invariance() {
    // four family shots stay in Omega: no OmegaExit, no WMinusNX crossing
    let checks = verify::check_family(&h3()).unwrap();
    require_matching(&checks, 4, |n| n.starts_with("family[") && n.ends_with(".omega_clean"));
}

#[test]
fn criterion_06_potential_identity() {
    // sup |Phi'' + w Phi' + 2 lambda Phi| <= 1e-6 and Phi, Phi', Phi'' > 0
    let checks = verify::check_family(&h3()).unwrap();
    require_matching(&checks, 4, |n| n.starts_with("family[") && n.ends_with(".phi_residual"));
    require_matching(&checks, 4, |n| n.starts_with("family[") && n.ends_with(".phi_positive"));
}

#[test]
fn criterion_07_reduction_oracle() {
    // pointwise soliton residual <= 1e-9 on every shot; mutated system > 1e-2
    let checks = verify::check_family(&h3()).unwrap();
    require_matching(&checks, 4, |n| {
        n.starts_with("family[") && n.ends_with(".soliton_residual")
    });
    require(&checks, "family.mutation_detected");
}

#[test]
fn criterion_08_einstein_heteroclinic() {
    let checks = verify::check_einstein(&h3()).unwrap();
    require(&checks, "einstein.capture"); // within 1e-6 of (sqrt(-lambda/n), 0)
    require(&checks, "einstein.z_drift"); // conserved z drifts <= 1e-9
    require(&checks, "einstein.monotone"); // x up, y down throughout
}

#[test]
fn criterion_09_hyperbolic_log_slope() {
    // d(log c)/ds on the Einstein tail = sqrt(-lambda/n) = 0.353553 +- 2%
    let checks = verify::check_einstein(&h3()).unwrap();
    require(&checks, "einstein.log_c_slope");
}

#[test]
fn criterion_10_forward_asymptotics() {
    let checks = verify::check_rates(&h3()).unwrap();
    require(&checks, "rates.w_over_lambda_s"); // w/(-lambda s) = 1 +- 5%
    require(&checks, "rates.x_s"); // x s = 1 +- 5%
    require(&checks, "rates.alpha_positive"); // z s^2 limit is negative
    require(&checks, "rates.alpha_windows"); // two-window variation <= 10%
    require(&checks, "rates.y_decay"); // y s^2 drops >= 10x from s=20 to s=100
    require(&checks, "rates.z_limit_zero"); // limit classified as z = 0
}

#[test]
fn criterion_11_noscal_rates() {
    // (1,1) shot to s = 200: w/(-lambda s) = 1 +- 5%, y(-lambda s) = 1 +- 10%
    let checks = verify::check_noscal(&h3()).unwrap();
    require(&checks, "noscal.w_rate");
    require(&checks, "noscal.y_rate");
}

#[test]
fn criterion_12_reflection_and_rescale() {
    let checks = verify::check_symmetries(&h3()).unwrap();
    require(&checks, "symmetry.reflection"); // sup distance <= 1e-7, matched times
    require(&checks, "symmetry.rescale"); // lambda-rescaled orbit, sup <= 1e-7
}

#[test]
fn criterion_13_shift_covariance() {
    let checks = verify::check_symmetries(&h3()).unwrap();
    require(&checks, "symmetry.shift_value"); // shift = log 2 / eps_plus +- 1%
    require(&checks, "symmetry.shift_alignment"); // aligned orbits within 1e-5
}

#[test]
fn criterion_14_family_distinctness() {
    // 9-point theta sweep: fitted alphas pairwise distinct by >= 1%
    let checks = verify::check_sweep(&h3(), 9).unwrap();
    require(&checks, "sweep.all_members");
    require(&checks, "sweep.alpha_distinct");
}
