//! Fidelity and nonclassical squeezing of reconstructions against sigma.

use cgtomo::direct::*;
use cgtomo::gaussian::*;
use cgtomo::metrics::*;

fn main() -> cgtomo::error::Result<()> {
    for nbar in [0.0, 1.0] {
        println!(
            "nbar {nbar}: critical squeezing {:.4}",
            critical_squeezing(nbar)
        );
    }
    let vacuum = CovMatrix::vacuum(1);
    let thermal = cov_from_params1(&SingleModeParams::new(1.0, 0.0, 0.0)?);
    println!(
        "F(vacuum, thermal 1) = {:.6}",
        fidelity1(&vacuum, &thermal)?
    );

    println!(
        "\n{:>5} {:>10} {:>10} {:>10} {:>10}",
        "sigma", "F (0,1)", "rnc (0,1)", "F (0,2)", "rnc (0,2)"
    );
    for k in 1..=10 {
        let sigma = 0.2 * k as f64;
        let a = frame_averaged_metrics(0.0, 1.0, sigma, DEFAULT_FRAME_GRID)?;
        let b = frame_averaged_metrics(0.0, 2.0, sigma, DEFAULT_FRAME_GRID)?;
        println!(
            "{sigma:>5.1} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            a.fidelity, a.nonclassicality, b.fidelity, b.nonclassicality
        );
    }

    let input = SingleModeParams::new(1.0, critical_squeezing(1.0) + 0.05, 0.0)?;
    let est = reconstruct_single(&input, 0.1, FramePolicy::Known(0.0))?;
    let n = nonclassical_squeezing(&est.params);
    println!(
        "\nr_nc 0.05 at sigma 0.1 -> r_nc {:.4}, entanglement potential {:.4}",
        n.r_nc, n.p_ent
    );
    Ok(())
}
