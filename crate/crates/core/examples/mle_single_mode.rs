//! Maximum-likelihood fit of a Gaussian state to coarse-grained homodyne data.

use cgtomo::gaussian::*;
use cgtomo::metrics::fidelity1;
use cgtomo::mle::*;

fn main() -> cgtomo::error::Result<()> {
    let input = SingleModeParams::new(1.0, 1.0, 0.4)?;
    let cfg = MleConfig::default();
    for sigma in [0.1, 0.5, 1.0, 2.0] {
        let est = mle_estimate_single(&input, sigma, &cfg)?;
        println!(
            "sigma {sigma}: nbar {:.4} r {:.4} phi {:.4} lnL {:.5} F {:.4} converged {} iters {}",
            est.params.nbar,
            est.params.r,
            est.params.phi,
            est.log_likelihood,
            fidelity1(&cov_from_params1(&input), &est.cov)?,
            est.converged,
            est.iterations
        );
    }

    // The same fit driven from explicit data.
    let angles = AngleSet::uniform(30)?;
    let data = SingleModeData::simulate(&input, 0.7, &angles, false)?;
    let est = fit_single(&data, &input, &cfg)?;
    println!("\n30 angles at sigma 0.7: {:?}", est.params);
    println!("lnL at the input  {:.6}", data.log_likelihood(&input));
    println!("lnL at the fit    {:.6}", data.log_likelihood(&est.params));
    Ok(())
}
