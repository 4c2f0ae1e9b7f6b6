//! Bins a squeezed quadrature marginal and compares coarse moments with the
//! smooth ones.

use cgtomo::coarse::*;
use cgtomo::gaussian::*;

fn main() -> cgtomo::error::Result<()> {
    let state = SingleModeParams::new(0.0, 1.0, 0.0)?;
    let marg = homodyne_marginal1(&state, 0.0);
    println!("squeezed quadrature variance {:.6}", marg.variance);
    println!(
        "{:>6} {:>6} {:>12} {:>12}",
        "sigma", "bins", "coarse var", "V + s^2/12"
    );
    for sigma in [0.01, 0.1, 0.5, 1.0, 2.0] {
        let b = bin_gaussian(&marg, sigma)?;
        println!(
            "{sigma:>6} {:>6} {:>12.6} {:>12.6}",
            b.masses().len(),
            coarse_variance(&b),
            marg.variance + sigma * sigma / 12.0
        );
    }

    let b = bin_gaussian(&marg, 0.5)?;
    println!("\nbins at sigma 0.5:");
    for (m, x, p) in b.bins().filter(|(_, _, p)| *p > 1e-6) {
        println!("  m {m:>3}  x {x:>5.2}  P {p:.6}");
    }

    let two = TwoModeParams::new(0.0, 0.0, 1.0, 0.0)?;
    let joint = homodyne_joint2(&two, 0.0, 0.0);
    for sigma in [0.1, 1.0] {
        println!(
            "cross moment at sigma {sigma}: smooth {:.6} binned {:.6}",
            joint.cov12,
            gaussian_cross_moment(&joint, sigma)?
        );
    }
    Ok(())
}
