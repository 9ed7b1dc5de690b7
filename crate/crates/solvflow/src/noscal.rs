//! The scalar-flat subsystem: when the shape operator is a multiple of the
//! soliton derivation, the flow closes on (y, w) alone:
//!   y' = 1 - w y,  w' = -lambda (1 - y^2),
//! defined for -1 < lambda < 0, with stationary solution (1, 1).

use nalgebra::{Matrix2, Vector2};

use crate::error::{Result, SolvError};

/// Point (y, w) of the scalar-flat subsystem.
pub type NoScalPoint = Vector2<f64>;

pub fn check_lambda(lambda: f64) -> Result<()> {
    if lambda <= -1.0 || lambda >= 0.0 {
        return Err(SolvError::LambdaOutOfRange(lambda));
    }
    Ok(())
}

pub fn noscal_field(lambda: f64, q: &NoScalPoint) -> Result<NoScalPoint> {
    check_lambda(lambda)?;
    let (y, w) = (q[0], q[1]);
    Ok(Vector2::new(1.0 - w * y, -lambda * (1.0 - y * y)))
}

pub fn noscal_jacobian(lambda: f64, q: &NoScalPoint) -> Result<Matrix2<f64>> {
    check_lambda(lambda)?;
    let (y, w) = (q[0], q[1]);
    Ok(Matrix2::new(-w, -y, 2.0 * lambda * y, 0.0))
}

pub fn noscal_stationary() -> NoScalPoint {
    Vector2::new(1.0, 1.0)
}

/// Positive eigenvalue of the linearization at (1, 1):
/// mu+ = (-1 + sqrt(1 - 8 lambda)) / 2.
pub fn noscal_mu_plus(lambda: f64) -> f64 {
    (-1.0 + (1.0 - 8.0 * lambda).sqrt()) / 2.0
}

/// Unit unstable eigenvector at (1, 1), oriented so w increases
/// (and y decreases) along it: proportional to (-1, 1 + mu+).
pub fn noscal_unstable_direction(lambda: f64) -> Result<NoScalPoint> {
    check_lambda(lambda)?;
    let mu = noscal_mu_plus(lambda);
    Ok(Vector2::new(-1.0, 1.0 + mu).normalize())
}

/// Embedding of the scalar-flat set into the full system:
/// (x, y, z, w) = (y trD/n, y, s0, w), on which z' = 0 and the x-equation
/// closes (n x^2 = -(lambda + trD0^2) y^2 reduces to x = y/n under the
/// normalization trD = 1).
pub fn embed_point(params: &crate::params::SolvsolitonParams, q: &NoScalPoint) -> nalgebra::Vector4<f64> {
    let n = params.nf();
    nalgebra::Vector4::new(q[0] * params.tr_d / n, q[0], params.s0, q[1])
}

/// 4D lift of a (y, w) trajectory integrated at lambda = params.lambda,
/// with derivatives recomputed from the full field.
pub fn embed_trajectory(
    params: &crate::params::SolvsolitonParams,
    traj: &crate::integrate::Trajectory<2>,
) -> crate::integrate::Trajectory<4> {
    let states: Vec<_> = traj.states.iter().map(|q| embed_point(params, q)).collect();
    let derivs: Vec<_> = states
        .iter()
        .map(|p| crate::flow::field_with_lambda(params, params.lambda, p))
        .collect();
    crate::integrate::Trajectory::<4> {
        times: traj.times.clone(),
        states,
        derivs,
        events: Vec::new(),
        stats: traj.stats.clone(),
        abort: traj.abort.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let l = -0.375;
        assert_eq!(noscal_field(l, &Vector2::new(1.0, 1.0)).unwrap(), Vector2::zeros());
        assert_eq!(
            noscal_field(l, &Vector2::new(0.0, 0.0)).unwrap(),
            Vector2::new(1.0, -l)
        );
        assert_eq!(
            noscal_field(l, &Vector2::new(2.0, 0.0)).unwrap(),
            Vector2::new(1.0, 3.0 * l)
        );
    }

    #[test]
    fn lambda_range_enforced() {
        for l in [-1.0, 0.0, 0.5, -2.0] {
            assert!(matches!(
                noscal_field(l, &Vector2::zeros()),
                Err(SolvError::LambdaOutOfRange(_))
            ));
        }
    }

    #[test]
    fn unstable_direction_is_eigenvector() {
        let l = -0.375;
        let mu = noscal_mu_plus(l);
        assert!((mu - 0.5).abs() <= 1e-15, "matches eps+ of h3 since s0 drops out");
        let u = noscal_unstable_direction(l).unwrap();
        let j = noscal_jacobian(l, &noscal_stationary()).unwrap();
        assert!((j * u - u * mu).norm() <= 1e-14);
        assert!(u[0] < 0.0 && u[1] > 0.0);
    }
}
