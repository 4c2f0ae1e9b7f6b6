//! Direct reconstruction of covariance matrices from three coarse-grained
//! quadratures per mode, plus four joint quadrature pairs for two modes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarse::{gaussian_coarse_moments, gaussian_cross_moment};
use crate::error::{Error, Result};
use crate::gaussian::{
    cov_from_params1, cov_from_params2, homodyne_marginal1, is_physical, params_from_cov1,
    params_from_cov2, tmst_matrix, tmst_residual, wrap_symmetric, CovMatrix, GaussianMarginal,
    SingleModeParams, TwoModeParams,
};
use crate::metrics::{fidelity1, fidelity2, log_negativity, nonclassical_squeezing};

/// Largest deviation from the two-mode squeezed thermal pattern tolerated before projection.
pub const PROJECTION_TOL: f64 = 1e-6;
/// Default number of input angles for frame averaging.
pub const DEFAULT_FRAME_GRID: usize = 36;

/// Offsets scanned by [`FramePolicy::Tuned`] before local refinement.
pub const DEFAULT_TUNING_GRID: usize = 64;

/// How the measurement angles relate to the input state's phase frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FramePolicy {
    /// Measurement angles are shifted by `offset`, normally the input phase.
    Known(f64),
    /// Fixed lab-frame angles; averaged over `grid_size` input phases where needed.
    Unknown(usize),
    /// Frame known, and the measurement offset is chosen to maximize the
    /// fidelity with the input: a scan over `grid` offsets refined by golden-section search.
    Tuned(usize),
}

impl FramePolicy {
    pub fn unknown() -> Self {
        FramePolicy::Unknown(DEFAULT_FRAME_GRID)
    }

    fn offset(&self) -> Result<f64> {
        match *self {
            FramePolicy::Known(offset) if offset.is_finite() => Ok(offset),
            FramePolicy::Known(offset) => Err(Error::InvalidParameter {
                name: "frame offset",
                value: offset,
                reason: "must be finite",
            }),
            FramePolicy::Unknown(0) => Err(Error::InvalidParameter {
                name: "grid_size",
                value: 0.0,
                reason: "must be at least 1",
            }),
            FramePolicy::Unknown(_) => Ok(0.0),
            FramePolicy::Tuned(_) => Err(Error::Unsupported(
                "tuned frames are resolved by the reconstruction routines",
            )),
        }
    }

    pub fn tuned() -> Self {
        FramePolicy::Tuned(DEFAULT_TUNING_GRID)
    }
}

/// Maximizes `score(offset)` over `[0, period)`: grid scan, then golden-section
/// search in the bracket around the best grid point. Ties keep the smallest offset.
fn tune_offset<T>(
    grid: usize,
    period: f64,
    eval: impl Fn(f64) -> Result<(f64, T)> + Sync,
) -> Result<T>
where
    T: Send,
{
    if grid < 4 {
        return Err(Error::InvalidParameter {
            name: "tuning grid",
            value: grid as f64,
            reason: "must be at least 4",
        });
    }
    let step = period / grid as f64;
    let scanned = (0..grid)
        .into_par_iter()
        .map(|k| eval(step * k as f64).map(|(f, _)| f))
        .collect::<Result<Vec<_>>>()?;
    let best = scanned
        .iter()
        .enumerate()
        .fold(0, |b, (k, f)| if *f > scanned[b] { k } else { b });

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?.0;
    let mut f2 = eval(x2)?.0;
    while hi - lo > 1e-9 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?.0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?.0;
        }
    }
    let refined = eval(0.5 * (lo + hi))?;
    let grid_best = eval(step * best as f64)?;
    Ok(if refined.0 >= grid_best.0 {
        refined.1
    } else {
        grid_best.1
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult1 {
    pub params: SingleModeParams,
    /// Estimated covariance in the lab frame.
    pub cov: CovMatrix,
    /// Estimated minus input squeezing angle, wrapped to `(-pi/2, pi/2]`.
    pub angle_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult2 {
    pub params: TwoModeParams,
    pub cov: CovMatrix,
    /// Estimated minus input two-mode phase, wrapped to `(-pi, pi]`.
    pub angle_deviation: f64,
    /// Distance of the assembled matrix from the TMST pattern before projection.
    pub projection_residual: f64,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSigma(sigma))
    }
}

fn coarse_var(marg: &GaussianMarginal, sigma: f64) -> Result<f64> {
    Ok(gaussian_coarse_moments(marg, sigma)?.variance())
}

/// Local covariance block from coarse variances at `offset + {0, pi/4, pi/2}`,
/// expressed in the frame rotated by `offset`.
fn local_block(
    variance_at: impl Fn(f64) -> Result<GaussianMarginal>,
    sigma: f64,
    offset: f64,
) -> Result<(f64, f64, f64)> {
    let v0 = coarse_var(&variance_at(offset)?, sigma)?;
    let v45 = coarse_var(&variance_at(offset + FRAC_PI_4)?, sigma)?;
    let v90 = coarse_var(&variance_at(offset + FRAC_PI_2)?, sigma)?;
    Ok((2.0 * v0, 2.0 * v90, 2.0 * v45 - v0 - v90))
}

/// Reconstructs a single-mode state from coarse-grained quadratures at three angles.
pub fn reconstruct_single(
    input: &SingleModeParams,
    sigma: f64,
    frame: FramePolicy,
) -> Result<ReconResult1> {
    check_sigma(sigma)?;
    if let FramePolicy::Tuned(grid) = frame {
        let target = cov_from_params1(input);
        return tune_offset(grid, PI, |d| {
            let est = reconstruct_single(input, sigma, FramePolicy::Known(input.phi + d))?;
            Ok((fidelity1(&target, &est.cov)?, est))
        });
    }
    let offset = frame.offset()?;
    let (g11, g22, g12) = local_block(|t| Ok(homodyne_marginal1(input, t)), sigma, offset)?;
    let rotated = CovMatrix::single(g11, g22, g12);
    let inv = params_from_cov1(&rotated)?;
    let params = inv.params.with_phi(inv.params.phi + offset);
    let cov = cov_from_params1(&params);
    let angle_deviation = if inv.degenerate_angle {
        0.0
    } else {
        wrap_symmetric(params.phi - input.phi, PI)
    };
    Ok(ReconResult1 {
        params,
        cov,
        angle_deviation,
    })
}

/// Reconstructs a two-mode squeezed thermal state from local quadratures and
/// the joint pairs `(0, 0), (0, pi/2), (pi/2, 0), (pi/2, pi/2)`.
///
/// With a known frame each mode's angles are shifted by half the offset, which
/// aligns the joint angle sums with the two-mode phase.
pub fn reconstruct_two(
    input: &TwoModeParams,
    sigma: f64,
    frame: FramePolicy,
) -> Result<ReconResult2> {
    check_sigma(sigma)?;
    if let FramePolicy::Tuned(grid) = frame {
        let target = cov_from_params2(input);
        return tune_offset(grid, TAU, |d| {
            let est = reconstruct_two(input, sigma, FramePolicy::Known(input.phi + d))?;
            Ok((fidelity2(&target, &est.cov)?.value, est))
        });
    }
    let offset = frame.offset()?;
    let shift = 0.5 * offset;
    let g = cov_from_params2(input);
    let local = |k: usize| {
        local_block(
            |t| GaussianMarginal::centered(g.quadrature_variance(k, t)),
            sigma,
            shift,
        )
    };
    let (a11, a22, a12) = local(0)?;
    let (b11, b22, b12) = local(1)?;

    let cross = |t1: f64, t2: f64| -> Result<f64> {
        let marg = crate::gaussian::joint_from_cov(&g, t1 + shift, t2 + shift);
        Ok(2.0 * gaussian_cross_moment(&marg, sigma)?)
    };
    let g13 = cross(0.0, 0.0)?;
    let g14 = cross(0.0, FRAC_PI_2)?;
    let g23 = cross(FRAC_PI_2, 0.0)?;
    let g24 = cross(FRAC_PI_2, FRAC_PI_2)?;

    #[rustfmt::skip]
    let raw = CovMatrix::from_row_slice(4, &[
        a11, a12, g13, g14,
        a12, a22, g23, g24,
        g13, g23, b11, b12,
        g14, g24, b12, b22,
    ])?;
    let residual = tmst_residual(&raw);
    if residual > PROJECTION_TOL * raw.matrix().amax().max(1.0) {
        return Err(Error::NotTmstForm { residual });
    }
    let projected = tmst_matrix(
        0.5 * (a11 + a22),
        0.5 * (b11 + b22),
        0.5 * (g13 - g24),
        0.5 * (g14 + g23),
    );
    let inv = params_from_cov2(&projected)?;
    let params = inv.params.with_phi(inv.params.phi + offset);
    let cov = cov_from_params2(&params);
    let rep = is_physical(&cov);
    if !rep.physical {
        return Err(Error::NonPhysical {
            min_symplectic: rep.spectrum[0],
        });
    }
    let angle_deviation = if inv.degenerate_angle {
        0.0
    } else {
        wrap_symmetric(params.phi - input.phi, TAU)
    };
    Ok(ReconResult2 {
        params,
        cov,
        angle_deviation,
        projection_residual: residual,
    })
}

/// Squeezing-angle rotation caused by direct reconstruction in a fixed lab frame.
pub fn angle_deviation(input: &SingleModeParams, sigma: f64) -> Result<f64> {
    Ok(reconstruct_single(input, sigma, FramePolicy::Unknown(1))?.angle_deviation)
}

/// Averages over input phases on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAverage {
    pub fidelity: f64,
    /// Mean `r_nc` for one mode, mean logarithmic negativity for two modes.
    pub nonclassicality: f64,
}

fn average(values: Vec<(f64, f64)>) -> FrameAverage {
    let n = values.len() as f64;
    let (f, q) = values
        .iter()
        .fold((0.0, 0.0), |(f, q), (a, b)| (f + a, q + b));
    FrameAverage {
        fidelity: f / n,
        nonclassicality: q / n,
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 4 {
        return Err(Error::InvalidParameter {
            name: "grid_size",
            value: grid_size as f64,
            reason: "must be at least 4",
        });
    }
    Ok(())
}

/// Fidelity and `r_nc` of unknown-frame reconstructions of `(nbar, r, phi)`,
/// averaged over `phi = k pi / grid_size`.
pub fn frame_averaged_metrics(
    nbar: f64,
    r: f64,
    sigma: f64,
    grid_size: usize,
) -> Result<FrameAverage> {
    check_grid(grid_size)?;
    let base = SingleModeParams::new(nbar, r, 0.0)?;
    let values = (0..grid_size)
        .into_par_iter()
        .map(|k| {
            let input = base.with_phi(PI * k as f64 / grid_size as f64);
            let est = reconstruct_single(&input, sigma, FramePolicy::Unknown(grid_size))?;
            let f = fidelity1(&cov_from_params1(&input), &est.cov)?;
            Ok((f, nonclassical_squeezing(&est.params).r_nc))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(average(values))
}

/// Two-mode counterpart of [`frame_averaged_metrics`]: phases `2 pi k / grid_size`,
/// nonclassicality measured by logarithmic negativity.
pub fn frame_averaged_metrics2(
    input: &TwoModeParams,
    sigma: f64,
    grid_size: usize,
) -> Result<FrameAverage> {
    check_grid(grid_size)?;
    let values = (0..grid_size)
        .into_par_iter()
        .map(|k| {
            let inp = input.with_phi(TAU * k as f64 / grid_size as f64);
            let est = reconstruct_two(&inp, sigma, FramePolicy::Unknown(grid_size))?;
            let f = fidelity2(&cov_from_params2(&inp), &est.cov)?.value;
            Ok((f, log_negativity(&est.params)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(average(values))
}
