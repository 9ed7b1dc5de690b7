//! The reduced 4D vector field, its Jacobian, stationary points, the
//! eigen-structure of the unstable subspace at gamma^S, and the discrete
//! symmetries (Z2 reflection, lambda rescaling).

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::Serialize;

use crate::einstein;
use crate::error::{Result, SolvError};
use crate::params::SolvsolitonParams;

/// Phase point (x, y, z, w):
///   x — mean curvature / n,
///   y — automorphism-direction speed h',
///   z — orbit scalar curvature (z <= 0 in geometric use),
///   w — dilation mean curvature n x + f'.
pub type PhasePoint = Vector4<f64>;

const NULLSPACE_RANK_TOL: f64 = 1e-8;

/// Right-hand side of the reduced flow:
///   x' = z/n - lambda - w x
///   y' = z/s0 - w y
///   z' = 2 z (tr D * y / n - x)
///   w' = -lambda - n x^2 - tr D0^2 y^2
pub fn field(params: &SolvsolitonParams, p: &PhasePoint) -> Result<PhasePoint> {
    params.require_flow()?;
    Ok(field_with_lambda(params, params.lambda, p))
}

/// Same field with the expander normalization lambda overridden. The family
/// of systems differing only in this slot is what `rescale_lambda` maps
/// between; s0 and tr D0^2 stay those of `params`.
pub fn field_with_lambda(params: &SolvsolitonParams, lambda: f64, p: &PhasePoint) -> PhasePoint {
    let n = params.nf();
    let (x, y, z, w) = (p[0], p[1], p[2], p[3]);
    Vector4::new(
        z / n - lambda - w * x,
        z / params.s0 - w * y,
        2.0 * z * (params.tr_d * y / n - x),
        -lambda - n * x * x - params.tr_d0_sq * y * y,
    )
}

/// Analytic Jacobian of `field` at p.
pub fn jacobian(params: &SolvsolitonParams, p: &PhasePoint) -> Result<Matrix4<f64>> {
    params.require_flow()?;
    let n = params.nf();
    let (x, y, z, w) = (p[0], p[1], p[2], p[3]);
    #[rustfmt::skip]
    let j = Matrix4::new(
        -w,                          0.0,                      1.0 / n,                          -x,
        0.0,                         -w,                       1.0 / params.s0,                  -y,
        -2.0 * z,                    2.0 * z * params.tr_d / n, 2.0 * (params.tr_d * y / n - x), 0.0,
        -2.0 * n * x,                -2.0 * params.tr_d0_sq * y, 0.0,                            0.0,
    );
    Ok(j)
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryPoints {
    pub gamma_s_plus: PhasePoint,
    pub gamma_s_minus: PhasePoint,
    pub gamma_h_plus: PhasePoint,
    pub gamma_h_minus: PhasePoint,
}

impl StationaryPoints {
    pub fn labeled(&self) -> [(&'static str, PhasePoint); 4] {
        [
            ("gamma_s_plus", self.gamma_s_plus),
            ("gamma_s_minus", self.gamma_s_minus),
            ("gamma_h_plus", self.gamma_h_plus),
            ("gamma_h_minus", self.gamma_h_minus),
        ]
    }
}

/// gamma^S± = (±1/n, ±1, s0, ±1), gamma^H± = ±(sqrt(-lambda/n), 0, 0, sqrt(-lambda n)).
pub fn stationary_points(params: &SolvsolitonParams) -> Result<StationaryPoints> {
    params.require_flow()?;
    let n = params.nf();
    let s0 = params.s0;
    let xh = (-params.lambda / n).sqrt();
    let wh = (-params.lambda * n).sqrt();
    Ok(StationaryPoints {
        gamma_s_plus: Vector4::new(1.0 / n, 1.0, s0, 1.0),
        gamma_s_minus: Vector4::new(-1.0 / n, -1.0, s0, -1.0),
        gamma_h_plus: Vector4::new(xh, 0.0, 0.0, wh),
        gamma_h_minus: Vector4::new(-xh, 0.0, 0.0, -wh),
    })
}

/// Eigen-structure of the unstable subspace W at gamma^S+.
///
/// eps_plus is doubly degenerate; the basis stored here is the geometrically
/// meaningful one:
///   w0 — the direction tangent to the Einstein locus E (positive z-component),
///   w1 — the direction with zero z-component, proportional to (-a, -na, 0, n).
#[derive(Clone, Debug, Serialize)]
pub struct EigenData {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub w0: PhasePoint,
    pub w1: PhasePoint,
    /// xz-plane angle of w0 measured from the positive z-axis toward
    /// positive x; the admissible shooting range is (-pi/2, theta0).
    pub theta0: f64,
}

/// eps± = -1/2 ± sqrt(8 + n - 8 s0) / (2 sqrt(n)).
pub fn eps_closed_form(params: &SolvsolitonParams) -> (f64, f64) {
    let n = params.nf();
    let r = (8.0 + n - 8.0 * params.s0).sqrt() / (2.0 * n.sqrt());
    (-0.5 + r, -0.5 - r)
}

/// Null space of (J - eps I) at gamma^S+ via SVD with a rank tolerance.
/// Returns the columns of V whose singular values fall below the tolerance.
pub(crate) fn eigen_null_space(
    params: &SolvsolitonParams,
    eps: f64,
) -> Result<Vec<PhasePoint>> {
    let gs = stationary_points(params)?.gamma_s_plus;
    let j = jacobian(params, &gs)?;
    let m = j - Matrix4::identity() * eps;
    let svd = m.svd(true, true);
    let vt = svd.v_t.ok_or(SolvError::DegenerateEigenspace)?;
    let smax = svd.singular_values.max();
    let tol = NULLSPACE_RANK_TOL * smax.max(1.0);
    let mut basis = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= tol {
            basis.push(vt.row(i).transpose());
        }
    }
    Ok(basis)
}

pub fn unstable_eigendata(params: &SolvsolitonParams) -> Result<EigenData> {
    params.require_flow()?;
    let (eps_plus, eps_minus) = eps_closed_form(params);
    let null = eigen_null_space(params, eps_plus)?;
    if null.len() != 2 {
        return Err(SolvError::DegenerateEigenspace);
    }

    // w1: the combination with exactly zero z-component, oriented w > 0.
    let (u, v) = (null[0], null[1]);
    let mut w1 = u * v[2] - v * u[2];
    if w1.norm() < 1e-10 {
        return Err(SolvError::DegenerateEigenspace);
    }
    w1[2] = 0.0;
    w1.normalize_mut();
    if w1[3] < 0.0 {
        w1 = -w1;
    }

    // w0: the Einstein-tangent direction. Its (x, y)-part is the unstable
    // eigenvector of the restricted field at (1/n, 1); the z-component is the
    // derivative of the conservation law along it, the w-component is n*x.
    let dir2 = einstein::unstable_direction(params)?;
    let n = params.nf();
    let zx = 2.0 * (n - 1.0); // d(einstein_z)/dx at x = 1/n
    let zy = -2.0 * params.tr_d0_sq; // d(einstein_z)/dy at y = 1
    let mut w0 = Vector4::new(
        dir2[0],
        dir2[1],
        zx * dir2[0] + zy * dir2[1],
        n * dir2[0],
    );
    w0.normalize_mut();
    if w0[2] <= 0.0 {
        return Err(SolvError::DegenerateEigenspace);
    }
    let theta0 = w0[0].atan2(w0[2]);
    Ok(EigenData { eps_plus, eps_minus, w0, w1, theta0 })
}

/// Max eigen-residual ||(J - eps+ I) v|| over the stored basis (diagnostic).
pub fn eigen_residual(params: &SolvsolitonParams, eig: &EigenData) -> Result<f64> {
    let gs = stationary_points(params)?.gamma_s_plus;
    let j = jacobian(params, &gs)?;
    let m = j - Matrix4::identity() * eig.eps_plus;
    Ok((m * eig.w0).norm().max((m * eig.w1).norm()))
}

/// Admissible shooting range for theta.
pub fn admissible_range(eig: &EigenData) -> (f64, f64) {
    (-std::f64::consts::FRAC_PI_2, eig.theta0)
}

/// The unique unit vector in W whose xz-projection is proportional to
/// (sin theta, cos theta) — the angle measured from the positive z-axis
/// toward positive x. Solved as a 2x2 system in the (w0, w1) basis.
pub fn direction_from_angle(eig: &EigenData, theta: f64) -> Result<PhasePoint> {
    let m = Matrix2::new(eig.w0[0], eig.w1[0], eig.w0[2], eig.w1[2]);
    let rhs = Vector2::new(theta.sin(), theta.cos());
    let c = m
        .lu()
        .solve(&rhs)
        .ok_or(SolvError::DegenerateEigenspace)?;
    let v = eig.w0 * c[0] + eig.w1 * c[1];
    Ok(v / v.norm())
}

/// Z2 symmetry (x, y, z, w) -> (-x, -y, z, -w); together with time reversal
/// it maps integral curves to integral curves.
pub fn reflect(p: &PhasePoint) -> PhasePoint {
    Vector4::new(-p[0], -p[1], p[2], -p[3])
}

/// Equivalence of expander normalizations: with k = sqrt(lambda2/lambda1),
/// (x, y, z, w)(s) on the lambda1 system maps to (kx, ky, k^2 z, kw) at time
/// s/k on the lambda2 system (same s0 and tr D0^2 slots).
pub fn rescale_lambda(
    p: &PhasePoint,
    s: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<(PhasePoint, f64)> {
    if lambda1 >= 0.0 {
        return Err(SolvError::NonNegativeLambda(lambda1));
    }
    if lambda2 >= 0.0 {
        return Err(SolvError::NonNegativeLambda(lambda2));
    }
    let k = (lambda2 / lambda1).sqrt();
    let q = Vector4::new(k * p[0], k * p[1], k * k * p[2], k * p[3]);
    Ok((q, s / k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::preset;

    fn h3() -> SolvsolitonParams {
        preset("heisenberg3").unwrap().1
    }

    #[test]
    fn field_hand_values() {
        let p = h3();
        let at_origin = field(&p, &Vector4::zeros()).unwrap();
        assert_eq!(at_origin, Vector4::new(0.375, 0.0, 0.0, 0.375));
        let gs = Vector4::new(1.0 / 3.0, 1.0, -0.125, 1.0);
        assert!(field(&p, &gs).unwrap().norm() <= 1e-15);
        let gh = Vector4::new(0.125f64.sqrt(), 0.0, 0.0, 1.125f64.sqrt());
        assert!(field(&p, &gh).unwrap().norm() <= 1e-15);
    }

    #[test]
    fn stationary_points_are_stationary() {
        for name in ["heisenberg3", "heisenberg:5"] {
            let p = preset(name).unwrap().1;
            let pts = stationary_points(&p).unwrap();
            for (label, q) in pts.labeled() {
                let f = field(&p, &q).unwrap();
                assert!(f.norm() <= 1e-13, "{name} {label}: |F| = {:e}", f.norm());
            }
        }
    }

    #[test]
    fn eps_closed_form_h3() {
        let (ep, em) = eps_closed_form(&h3());
        assert!((ep - 0.5).abs() <= 1e-14);
        assert!((em + 1.5).abs() <= 1e-14);
    }

    #[test]
    fn eigendata_invariants() {
        for name in ["heisenberg3", "heisenberg:5"] {
            let p = preset(name).unwrap().1;
            let eig = unstable_eigendata(&p).unwrap();
            assert!(eigen_residual(&p, &eig).unwrap() <= 1e-8);
            assert_eq!(eig.w1[2], 0.0, "{name}: w1 z-component");
            assert!(eig.w0[2] > 0.0, "{name}: w0 z-component");
            assert!(eig.theta0 > 0.0 && eig.theta0 < std::f64::consts::FRAC_PI_2);
            // identity eps+^2 + eps+ + 2 lambda = 0 for detected presets
            let r = eig.eps_plus * eig.eps_plus + eig.eps_plus + 2.0 * p.lambda;
            assert!(r.abs() <= 1e-12, "{name}: eigenvalue identity");
        }
    }

    #[test]
    fn w1_matches_closed_form_ratio() {
        // w1 ∝ (-a, -na, 0, n) with a = 1/(1 + eps+); for n = 3, a = 2/3,
        // so x : y : w = -1 : -3 : 3 up to scale.
        let p = h3();
        let eig = unstable_eigendata(&p).unwrap();
        let scale = eig.w1[3] / 3.0;
        let a = 1.0 / (1.0 + eig.eps_plus);
        assert!((eig.w1[0] - (-a) * scale).abs() <= 1e-10);
        assert!((eig.w1[1] - (-3.0 * a) * scale).abs() <= 1e-10);
        assert!(eig.w1[0] < 0.0 && eig.w1[3] > 0.0);
    }

    #[test]
    fn w0_is_exact_eigenvector_h3() {
        // embedded Einstein direction for n=3: proportional to (1, -42, 7.5, 3)
        let p = h3();
        let eig = unstable_eigendata(&p).unwrap();
        let expect = Vector4::new(1.0, -42.0, 7.5, 3.0).normalize();
        assert!((eig.w0 - expect).norm() <= 1e-12);
        assert!((eig.theta0 - 1.0f64.atan2(7.5)).abs() <= 1e-14);
    }

    #[test]
    fn direction_angles() {
        let p = h3();
        let eig = unstable_eigendata(&p).unwrap();
        // theta0 returns w0 itself
        let v = direction_from_angle(&eig, eig.theta0).unwrap();
        assert!((v - eig.w0).norm() <= 1e-12);
        // -pi/2 returns -w1 direction (x < 0, z = 0)
        let v = direction_from_angle(&eig, -std::f64::consts::FRAC_PI_2).unwrap();
        assert!(v[2].abs() <= 1e-12);
        assert!(v[0] < 0.0);
        assert!((v.abs() - eig.w1.abs()).norm() <= 1e-12);
        // theta = 0: x-component 0, z > 0
        let v = direction_from_angle(&eig, 0.0).unwrap();
        assert!(v[0].abs() <= 1e-12);
        assert!(v[2] > 0.0);
        // projection proportionality at a generic angle
        let th = -0.9;
        let v = direction_from_angle(&eig, th).unwrap();
        assert!((v[0] * th.cos() - v[2] * th.sin()).abs() <= 1e-12);
    }

    #[test]
    fn reflect_maps_stationary_points() {
        let pts = stationary_points(&h3()).unwrap();
        assert_eq!(reflect(&pts.gamma_s_plus), pts.gamma_s_minus);
        assert_eq!(reflect(&pts.gamma_h_plus), pts.gamma_h_minus);
        let fixed = Vector4::new(0.0, 0.0, -0.3, 0.0);
        assert_eq!(reflect(&fixed), fixed);
    }

    #[test]
    fn reflect_conjugates_the_field() {
        // F(R p) = -R F(p): reflection + time reversal preserves the flow
        let p = h3();
        let q = Vector4::new(0.21, -0.4, -0.07, 0.9);
        let lhs = field(&p, &reflect(&q)).unwrap();
        let rhs = -reflect(&field(&p, &q).unwrap());
        assert!((lhs - rhs).norm() <= 1e-15);
    }

    #[test]
    fn rescale_identity_and_stationary() {
        let p = h3();
        let pts = stationary_points(&p).unwrap();
        let (q, s) = rescale_lambda(&pts.gamma_h_plus, 3.0, p.lambda, p.lambda).unwrap();
        assert_eq!(q, pts.gamma_h_plus);
        assert_eq!(s, 3.0);
        // gamma^H(lambda1) -> gamma^H(lambda2) under the graded scaling
        let l2 = 2.0 * p.lambda;
        let (q, _) = rescale_lambda(&pts.gamma_h_plus, 0.0, p.lambda, l2).unwrap();
        let n = p.nf();
        assert!((q[0] - (-l2 / n).sqrt()).abs() <= 1e-15);
        assert!((q[3] - (-l2 * n).sqrt()).abs() <= 1e-15);
        assert!(matches!(
            rescale_lambda(&pts.gamma_h_plus, 0.0, 0.5, -1.0),
            Err(SolvError::NonNegativeLambda(_))
        ));
    }

    #[test]
    fn scalar_flat_refuses_flow_ops() {
        let p = preset("abelian:2").unwrap().1;
        assert!(matches!(field(&p, &Vector4::zeros()), Err(SolvError::ScalarFlat)));
        assert!(matches!(stationary_points(&p), Err(SolvError::ScalarFlat)));
        assert!(matches!(unstable_eigendata(&p), Err(SolvError::ScalarFlat)));
    }
}
