//! Direct reconstruction of a squeezed vacuum under the three frame policies.

use cgtomo::direct::*;
use cgtomo::gaussian::*;
use cgtomo::metrics::fidelity1;

fn main() -> cgtomo::error::Result<()> {
    let input = SingleModeParams::new(0.0, 1.0, 0.3)?;
    let g = cov_from_params1(&input);
    println!("input {input:?}");
    for sigma in [0.1, 0.8, 1.5] {
        println!("sigma {sigma}");
        for (name, policy) in [
            ("known", FramePolicy::Known(input.phi)),
            ("tuned", FramePolicy::tuned()),
            ("unknown", FramePolicy::unknown()),
        ] {
            let est = reconstruct_single(&input, sigma, policy)?;
            println!(
                "  {name:<8} nbar {:.4} r {:.4} phi {:.4} dev {:+.4} F {:.4}",
                est.params.nbar,
                est.params.r,
                est.params.phi,
                est.angle_deviation,
                fidelity1(&g, &est.cov)?
            );
        }
    }

    println!("\nangle deviation at sigma 0.8 across input angles");
    for k in 0..=8 {
        let phi = k as f64 * std::f64::consts::PI / 8.0;
        let d = angle_deviation(&input.with_phi(phi), 0.8)?;
        println!("  phi {phi:.4}: {d:+.2e}");
    }
    Ok(())
}
