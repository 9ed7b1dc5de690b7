//! Normalized soliton parameters (tr D = 1) and the shipped presets.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::LieAlgebraData;
use crate::error::{Result, SolvError};

/// Algebraic data of one problem instance after the tr D = 1 normalization.
///
/// The phase flow depends on the derivation D only through its traces, so D
/// is stored as a spectrum; the full matrix lives only in the detection and
/// residual checks of the algebra module.
#[derive(Clone, Debug, Serialize)]
pub struct SolvsolitonParams {
    pub name: String,
    pub n: usize,
    /// eigenvalues of the normalized derivation, ascending
    pub d_spectrum: Vec<f64>,
    pub tr_d: f64,
    pub tr_d2: f64,
    /// tr D0^2 with D0 = D - (tr D / n) I
    pub tr_d0_sq: f64,
    pub lambda0: f64,
    /// expander normalization; equals lambda0 after normalize
    pub lambda: f64,
    /// s0 = lambda * n + tr D
    pub s0: f64,
    /// s0 == 0: the 4D flow is undefined, only the noscal subsystem applies
    pub scalar_flat: bool,
}

impl SolvsolitonParams {
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Guard for operations that require the 4D flow.
    pub fn require_flow(&self) -> Result<()> {
        if self.scalar_flat {
            Err(SolvError::ScalarFlat)
        } else {
            Ok(())
        }
    }
}

const S0_FLAT_TOL: f64 = 1e-12;

/// Rescales (lambda0, D) by 1/tr D so tr D = 1 (a metric scaling g -> rho*g
/// scales the Ricci operator by 1/rho), populates derived quantities, and
/// sets lambda = lambda0.
pub fn normalize(name: &str, lambda0: f64, d: &DMatrix<f64>, n: usize) -> Result<SolvsolitonParams> {
    if d.nrows() != n || d.ncols() != n {
        return Err(SolvError::InvalidAlgebra(format!(
            "derivation must be {n}x{n}, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    if lambda0 >= 0.0 {
        return Err(SolvError::PositiveLambda0(lambda0));
    }
    let t = d.trace();
    if t <= 1e-14 {
        return Err(SolvError::ZeroTrace);
    }
    let sym = (d + d.transpose()) * (0.5 / t);
    let mut d_spectrum: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    d_spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lambda = lambda0 / t;
    let nf = n as f64;
    let tr_d = 1.0;
    let tr_d2: f64 = d_spectrum.iter().map(|x| x * x).sum();
    let tr_d0_sq = tr_d2 - 1.0 / nf;
    let s0 = lambda * nf + tr_d;
    Ok(SolvsolitonParams {
        name: name.to_string(),
        n,
        d_spectrum,
        tr_d,
        tr_d2,
        tr_d0_sq,
        lambda0: lambda,
        lambda,
        s0,
        scalar_flat: s0.abs() < S0_FLAT_TOL,
    })
}

/// Names accepted by `preset`, in catalog order.
pub fn preset_names() -> &'static [&'static str] {
    &["heisenberg3", "heisenberg:5", "abelian:2", "abelian:3"]
}

/// Builds a shipped preset. Parameters are always regenerated through
/// detection + normalization, never hard-coded. `heisenberg:N` accepts any
/// odd N >= 3; `abelian:N` any N >= 1 (scalar-flat, restricted to noscal use,
/// carrying the exact Ricci decomposition Ric = 0 = -I + I).
pub fn preset(name: &str) -> Result<(LieAlgebraData, SolvsolitonParams)> {
    if name == "heisenberg3" {
        return preset("heisenberg:3").map(|(alg, mut p)| {
            p.name = "heisenberg3".into();
            (alg, p)
        });
    }
    if let Some(rest) = name.strip_prefix("heisenberg:") {
        let dim: usize = rest
            .parse()
            .map_err(|_| SolvError::UnknownPreset(name.to_string()))?;
        let alg = LieAlgebraData::heisenberg(dim)?;
        let (lambda0, d) = alg.detect_solvsoliton()?;
        let params = normalize(name, lambda0, &d, dim)?;
        return Ok((alg, params));
    }
    if let Some(rest) = name.strip_prefix("abelian:") {
        let dim: usize = rest
            .parse()
            .map_err(|_| SolvError::UnknownPreset(name.to_string()))?;
        let alg = LieAlgebraData::abelian(dim)?;
        alg.validate()?;
        // detect_solvsoliton correctly refuses the abelian case (vacuous
        // least-squares system); the flat candidate D = I, lambda0 = -1 is
        // the exact decomposition of Ric = 0 and routes through normalize,
        // which flags scalar_flat.
        let params = normalize(name, -1.0, &DMatrix::identity(dim, dim), dim)?;
        return Ok((alg, params));
    }
    Err(SolvError::UnknownPreset(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg3_normalized_values() {
        let (_, p) = preset("heisenberg3").unwrap();
        assert_eq!(p.n, 3);
        assert!((p.lambda + 0.375).abs() <= 1e-15);
        assert!((p.lambda0 + 0.375).abs() <= 1e-15);
        assert!((p.s0 + 0.125).abs() <= 1e-15);
        assert!((p.tr_d - 1.0).abs() <= 1e-15);
        assert!((p.tr_d2 - 0.375).abs() <= 1e-15);
        assert!((p.tr_d0_sq - 1.0 / 24.0).abs() <= 1e-15);
        let expect = [0.25, 0.25, 0.5];
        for (a, b) in p.d_spectrum.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-13);
        }
        assert!(!p.scalar_flat);
    }

    #[test]
    fn heisenberg5_normalized_values() {
        let (_, p) = preset("heisenberg:5").unwrap();
        assert!((p.lambda + 2.0 / 9.0).abs() <= 1e-14);
        assert!((p.s0 + 1.0 / 9.0).abs() <= 1e-14);
        assert!((p.tr_d0_sq - 1.0 / 45.0).abs() <= 1e-14);
        let expect = [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
        for (a, b) in p.d_spectrum.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn normalization_identities_on_all_presets() {
        // lambda0 = -tr D^2 / tr D and s0 = lambda0 n + tr D after normalize
        for name in preset_names() {
            let (_, p) = preset(name).unwrap();
            assert!(
                (p.lambda0 + p.tr_d2 / p.tr_d).abs() <= 1e-13,
                "{name}: lambda0 vs -trD^2/trD"
            );
            assert!((p.s0 - (p.lambda0 * p.nf() + p.tr_d)).abs() <= 1e-13, "{name}: s0");
            assert!(p.d_spectrum.iter().all(|&d| d >= 0.0), "{name}: spectrum sign");
            let sum: f64 = p.d_spectrum.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "{name}: spectrum sums to tr D");
        }
    }

    #[test]
    fn abelian_is_scalar_flat() {
        let (_, p) = preset("abelian:2").unwrap();
        assert!(p.scalar_flat);
        assert!((p.s0).abs() <= 1e-15);
        assert!((p.lambda + 0.5).abs() <= 1e-15);
        assert!(matches!(p.require_flow(), Err(SolvError::ScalarFlat)));
    }

    #[test]
    fn normalize_flags_flat_candidate_without_zero_trace_error() {
        // D = I/n has tr = 1: ZeroTrace must not fire, but s0 = 0
        let d = DMatrix::identity(3, 3) * (1.0 / 3.0);
        let p = normalize("flat", -1.0 / 3.0, &d, 3).unwrap();
        assert!(p.scalar_flat);
    }

    #[test]
    fn normalize_rejects_bad_input() {
        let d = DMatrix::identity(3, 3);
        assert!(matches!(
            normalize("x", 0.5, &d, 3),
            Err(SolvError::PositiveLambda0(_))
        ));
        let zero = DMatrix::zeros(3, 3);
        assert!(matches!(normalize("x", -1.0, &zero, 3), Err(SolvError::ZeroTrace)));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("nope"), Err(SolvError::UnknownPreset(_))));
        assert!(matches!(preset("heisenberg:4"), Err(SolvError::InvalidAlgebra(_))));
    }
}
