//! Compares coarse-grained estimates with states that went through a reservoir.

use cgtomo::decoherence::*;
use cgtomo::gaussian::*;
use cgtomo::mle::{mle_estimate_single, MleConfig};

fn main() -> cgtomo::error::Result<()> {
    let input = SingleModeParams::new(0.0, 1.0, 0.0)?;
    let g0 = cov_from_params1(&input);
    let bath = ReservoirParams::thermal(0.5)?;

    println!("thermal reservoir, nbar 0.5");
    for gt in [0.1, 0.5, 1.0] {
        let g = evolve_cov(&g0, &[bath], &[gt])?;
        let out = params_from_cov1(&g)?.params;
        let y = mixing_fraction_isotropic(&out, &input)?;
        println!(
            "  gamma t {gt}: y {:.6} exp(-gamma t) {:.6}",
            y.y,
            (-gt).exp()
        );
    }

    println!("\nMLE estimates");
    let cfg = MleConfig::default();
    for sigma in [0.3, 1.0, 2.0] {
        let est = mle_estimate_single(&input, sigma, &cfg)?;
        let y = mixing_fraction_isotropic(&est.params, &input)?;
        println!(
            "  sigma {sigma}: y {:.6} ({:?}), min reservoir squeezing {:.4}",
            y.y,
            y.class,
            min_reservoir_squeezing(&est.params, 0.0)
        );
    }

    let squeezed = ReservoirParams::squeezed_thermal(0.0, 0.5)?;
    let g = evolve_cov(&g0, &[squeezed], &[1.0])?;
    let out = params_from_cov1(&g)?.params;
    println!(
        "\nsqueezed reservoir r 0.5 after gamma t 1: y {:.6}",
        mixing_fraction(&out, &input, 0.0, 0.5)?.y
    );
    Ok(())
}
