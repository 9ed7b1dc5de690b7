// Walk the built-in presets, then build a custom solvable Lie algebra from
// structure constants and derive its flow parameters from scratch.

use solvflow::algebra::LieAlgebraData;
use solvflow::params::{self, preset, preset_names};

fn main() -> solvflow::Result<()> {
    println!("built-in presets:");
    for name in preset_names() {
        let (alg, p) = preset(name)?;
        println!(
            "  {:<12} dim {}  n {}  lambda {:+.6}  s0 {:+.6}  scalar_flat {}",
            name,
            alg.dim,
            p.n,
            p.lambda,
            p.s0,
            p.scalar_flat
        );
    }

    // the normalized data behind the default preset
    let (alg, p) = preset("heisenberg3")?;
    println!("\nheisenberg3 in full:");
    println!("  D spectrum   {:?}", p.d_spectrum);
    println!("  tr D = {}   tr D^2 = {}   tr D0^2 = {}", p.tr_d, p.tr_d2, p.tr_d0_sq);
    println!("  lambda0 (raw) = {}   lambda (normalized) = {}", p.lambda0, p.lambda);
    let ric = alg.ricci_operator();
    println!("  Ricci operator diag = {:?}", (0..alg.dim).map(|i| ric[(i, i)]).collect::<Vec<_>>());

    // a custom algebra: h3 (+) R, one abelian direction glued on.
    // entries are (i, j, k, c^k_ij) for i < j; here [e1, e2] = e3.
    let custom = LieAlgebraData::new("h3+R", 4, &[(0, 1, 2, 1.0)])?;
    custom.validate()?;
    let (lambda0, d) = custom.detect_solvsoliton()?;
    println!("\ncustom algebra {} (dim {}):", custom.name, custom.dim);
    println!("  detected lambda0 = {}", lambda0);
    println!("  derivation residual = {:.3e}", custom.derivation_residual(&d));
    let p = params::normalize(&custom.name, lambda0, &d, custom.dim)?;
    println!(
        "  normalized: lambda {:+.6}  s0 {:+.6}  D spectrum {:?}",
        p.lambda, p.s0, p.d_spectrum
    );

    // same thing via the JSON round trip the CLI accepts
    let text = custom.to_json();
    let back = LieAlgebraData::from_json(&text)?;
    assert_eq!(back.dim, custom.dim);
    println!("  JSON round trip ok ({} bytes)", text.len());
    Ok(())
}
