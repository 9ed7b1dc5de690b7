//! The Einstein locus E: the invariant set cut out by the conservation law
//! z = lambda (n-1) + x^2 n (n-1) - y^2 tr D0^2, with the restricted
//! two-dimensional field (E1, E2) in the (x, y) coordinates.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Result, SolvError};
use crate::flow::PhasePoint;
use crate::params::SolvsolitonParams;

/// Point (x, y) on the Einstein locus; z is implied by `einstein_z`.
pub type EinsteinPoint = Vector2<f64>;

/// Restricted field:
///   E1 = -lambda/n - x^2 - y^2 tr D0^2 / n
///   E2 = lambda (n-1)/s0 + x^2 n (n-1)/s0 + y^2/n - n x y
pub fn einstein_field(params: &SolvsolitonParams, q: &EinsteinPoint) -> Result<EinsteinPoint> {
    params.require_flow()?;
    let n = params.nf();
    let (x, y) = (q[0], q[1]);
    Ok(Vector2::new(
        -params.lambda / n - x * x - y * y * params.tr_d0_sq / n,
        params.lambda * (n - 1.0) / params.s0 + x * x * n * (n - 1.0) / params.s0
            + y * y / n
            - n * x * y,
    ))
}

/// Conserved quantity: z = lambda (n-1) + x^2 n (n-1) - y^2 tr D0^2.
pub fn einstein_z(params: &SolvsolitonParams, q: &EinsteinPoint) -> f64 {
    let n = params.nf();
    let (x, y) = (q[0], q[1]);
    params.lambda * (n - 1.0) + x * x * n * (n - 1.0) - y * y * params.tr_d0_sq
}

pub fn einstein_jacobian(params: &SolvsolitonParams, q: &EinsteinPoint) -> Result<Matrix2<f64>> {
    params.require_flow()?;
    let n = params.nf();
    let (x, y) = (q[0], q[1]);
    Ok(Matrix2::new(
        -2.0 * x,
        -2.0 * y * params.tr_d0_sq / n,
        2.0 * x * n * (n - 1.0) / params.s0 - n * y,
        2.0 * y / n - n * x,
    ))
}

/// gamma^S restricted to E.
pub fn gamma_s_restricted(params: &SolvsolitonParams) -> EinsteinPoint {
    Vector2::new(1.0 / params.nf(), 1.0)
}

/// gamma^H restricted to E: (sqrt(-lambda/n), 0).
pub fn gamma_h_restricted(params: &SolvsolitonParams) -> EinsteinPoint {
    Vector2::new((-params.lambda / params.nf()).sqrt(), 0.0)
}

/// Margins of the invariant region K = {x >= 0, y >= 0, E1 >= 0, E2 <= 0},
/// all nonnegative inside.
pub fn k_margins(params: &SolvsolitonParams, q: &EinsteinPoint) -> Result<[f64; 4]> {
    let e = einstein_field(params, q)?;
    Ok([q[0], q[1], e[0], -e[1]])
}

pub fn in_k(params: &SolvsolitonParams, q: &EinsteinPoint) -> Result<bool> {
    Ok(k_margins(params, q)?.iter().all(|&m| m >= 0.0))
}

/// Unstable eigenvector of the restricted linearization at gamma^S|_E for
/// eps+, normalized, oriented into K (x-component > 0, y-component < 0).
/// The returned vector satisfies the eigen-residual bound 1e-10.
pub fn unstable_direction(params: &SolvsolitonParams) -> Result<EinsteinPoint> {
    params.require_flow()?;
    let n = params.nf();
    let eps_plus = {
        let r = (8.0 + n - 8.0 * params.s0).sqrt() / (2.0 * n.sqrt());
        -0.5 + r
    };
    // first row of (dE - eps+ I) v = 0 at (1/n, 1):
    // (-2/n - eps+) v1 - (2 tr D0^2 / n) v2 = 0
    let v1 = 1.0;
    let v2 = -(2.0 + n * eps_plus) / (2.0 * n * params.tr_d0_sq / n);
    let v = Vector2::new(v1, v2).normalize();
    let j = einstein_jacobian(params, &gamma_s_restricted(params))?;
    let res = (j * v - v * eps_plus).norm();
    if res > 1e-10 {
        return Err(SolvError::DegenerateEigenspace);
    }
    Ok(v)
}

/// 4D embedding of an E-point: (x, y, einstein_z, n x).
pub fn embed(params: &SolvsolitonParams, q: &EinsteinPoint) -> PhasePoint {
    PhasePoint::new(q[0], q[1], einstein_z(params, q), params.nf() * q[0])
}

/// Tangency residual of the embedding: ||F(embed q) - embedded E-derivative||.
/// Identically zero on E; measures how exactly the 4D field restricts.
pub fn embedding_residual(params: &SolvsolitonParams, q: &EinsteinPoint) -> Result<f64> {
    let e = einstein_field(params, q)?;
    let n = params.nf();
    let (x, y) = (q[0], q[1]);
    let dz = 2.0 * x * n * (n - 1.0) * e[0] - 2.0 * y * params.tr_d0_sq * e[1];
    let expected = PhasePoint::new(e[0], e[1], dz, n * e[0]);
    let f = crate::flow::field(params, &embed(params, q))?;
    Ok((f - expected).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::preset;

    fn h3() -> SolvsolitonParams {
        preset("heisenberg3").unwrap().1
    }

    #[test]
    fn restricted_stationary_values() {
        let p = h3();
        let gs = gamma_s_restricted(&p);
        let e = einstein_field(&p, &gs).unwrap();
        assert!(e.norm() <= 1e-15);
        assert!((einstein_z(&p, &gs) - p.s0).abs() <= 1e-15);

        let gh = gamma_h_restricted(&p);
        let e = einstein_field(&p, &gh).unwrap();
        assert!(e[0].abs() <= 1e-15, "E1(gamma^H) = 0");
        assert!(einstein_z(&p, &gh).abs() <= 1e-15, "lambda(n-1) cancels at x^2 = -lambda/n");
    }

    #[test]
    fn unstable_direction_h3() {
        let p = h3();
        let v = unstable_direction(&p).unwrap();
        // exact eigenvector ratio v2/v1 = -(2 + n eps+)/(2 tr D0^2) = -42
        assert!((v[1] / v[0] + 42.0).abs() <= 1e-10);
        assert!(v[0] > 0.0 && v[1] < 0.0, "points into K");
        let j = einstein_jacobian(&p, &gamma_s_restricted(&p)).unwrap();
        assert!((j * v - v * 0.5).norm() <= 1e-10);
    }

    #[test]
    fn k_membership() {
        let p = h3();
        // slightly inside along the unstable direction
        let q = gamma_s_restricted(&p) + unstable_direction(&p).unwrap() * 1e-4;
        assert!(in_k(&p, &q).unwrap());
        // negative x is outside
        assert!(!in_k(&p, &Vector2::new(-0.1, 0.5)).unwrap());
    }

    #[test]
    fn embedding_is_tangent() {
        let p = h3();
        for q in [
            gamma_s_restricted(&p),
            Vector2::new(0.3, 0.4),
            Vector2::new(0.35, 0.01),
        ] {
            assert!(embedding_residual(&p, &q).unwrap() <= 1e-15);
        }
        // w = nx and z = einstein_z at gamma^S reproduce the 4D gamma^S
        let emb = embed(&p, &gamma_s_restricted(&p));
        let gs4 = crate::flow::stationary_points(&p).unwrap().gamma_s_plus;
        assert!((emb - gs4).norm() <= 1e-15);
    }
}
