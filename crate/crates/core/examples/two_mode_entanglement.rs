//! Logarithmic negativity of two-mode squeezed states reconstructed from
//! coarse-grained joint quadratures.

use cgtomo::direct::*;
use cgtomo::gaussian::*;
use cgtomo::metrics::*;
use cgtomo::mle::{mle_estimate_two, MleConfig};

fn main() -> cgtomo::error::Result<()> {
    let input = TwoModeParams::new(0.0, 0.0, 1.0, 0.7)?;
    let g = cov_from_params2(&input);
    println!("input E_N {:.4}", log_negativity(&input));
    let (lo, hi) = symplectic_eigs_pt(&g)?;
    println!("partially transposed symplectic eigenvalues {lo:.4} {hi:.4}");

    let cfg = MleConfig {
        restarts: 4,
        ..MleConfig::default()
    };
    println!(
        "\n{:>5} {:>10} {:>10} {:>10} {:>10}",
        "sigma", "E_N known", "E_N mle", "F known", "F mle"
    );
    for sigma in [0.1, 0.5, 1.0, 1.5] {
        let known = reconstruct_two(&input, sigma, FramePolicy::Known(input.phi))?;
        let mle = mle_estimate_two(&input, sigma, &cfg)?;
        println!(
            "{sigma:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            log_negativity(&known.params),
            log_negativity(&mle.params),
            fidelity2(&g, &known.cov)?.value,
            fidelity2(&g, &mle.cov)?.value
        );
    }

    let avg = frame_averaged_metrics2(&input, 1.0, DEFAULT_FRAME_GRID)?;
    println!(
        "\nunknown frame at sigma 1: mean F {:.4}, mean E_N {:.4}",
        avg.fidelity, avg.nonclassicality
    );
    Ok(())
}
