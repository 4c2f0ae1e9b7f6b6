//! Gaussian-reservoir decoherence in closed form, and the conditions under
//! which a coarse-grained estimate can be mimicked by it.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CovMatrix, SingleModeParams};

/// Gaussian reservoir with thermal occupation `n` and complex squeezing `m = m_re + i m_im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub n: f64,
    pub m_re: f64,
    pub m_im: f64,
}

impl ReservoirParams {
    pub fn new(n: f64, m_re: f64, m_im: f64) -> Result<Self> {
        let res = Self { n, m_re, m_im };
        res.validate()?;
        Ok(res)
    }

    pub fn thermal(n: f64) -> Result<Self> {
        Self::new(n, 0.0, 0.0)
    }

    /// Squeezed thermal reservoir with real squeezing: its covariance is that of the
    /// squeezed thermal state `(nbar_r, r_r, phi = 0)`.
    pub fn squeezed_thermal(nbar_r: f64, r_r: f64) -> Result<Self> {
        let s = nbar_r + 0.5;
        Self::new(s * (2.0 * r_r).cosh() - 0.5, -s * (2.0 * r_r).sinh(), 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "N",
                value: self.n,
                reason: "must be non-negative",
            });
        }
        let m_sq = self.m_re * self.m_re + self.m_im * self.m_im;
        if !m_sq.is_finite() || m_sq > self.n * (self.n + 1.0) + 1e-12 {
            return Err(Error::UnphysicalReservoir { n: self.n, m_sq });
        }
        Ok(())
    }
}

/// Covariance matrix `[[1/2 + N + Re M, Im M], [Im M, 1/2 + N - Re M]]` of the reservoir.
pub fn reservoir_cov(res: &ReservoirParams) -> Result<CovMatrix> {
    res.validate()?;
    Ok(CovMatrix::single(
        0.5 + res.n + res.m_re,
        0.5 + res.n - res.m_re,
        res.m_im,
    ))
}

/// Exact reservoir evolution `G(t) = sqrt(E) (G(0) - G_r) sqrt(E) + G_r`,
/// `E = (+)_i exp(-gamma_i t) I_2`, with one reservoir and one `gamma t` per mode.
pub fn evolve_cov(
    g0: &CovMatrix,
    reservoirs: &[ReservoirParams],
    gamma_t: &[f64],
) -> Result<CovMatrix> {
    let modes = g0.modes();
    if reservoirs.len() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            got: reservoirs.len(),
        });
    }
    if gamma_t.len() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            got: gamma_t.len(),
        });
    }
    if let Some(&bad) = gamma_t.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "gamma_t",
            value: bad,
            reason: "must be non-negative",
        });
    }
    let n = 2 * modes;
    let mut gr = DMatrix::zeros(n, n);
    let mut sqrt_e = DMatrix::zeros(n, n);
    for (k, (res, &gt)) in reservoirs.iter().zip(gamma_t).enumerate() {
        let block = reservoir_cov(res)?;
        gr.view_mut((2 * k, 2 * k), (2, 2))
            .copy_from(block.matrix());
        let s = (-0.5 * gt).exp();
        sqrt_e[(2 * k, 2 * k)] = s;
        sqrt_e[(2 * k + 1, 2 * k + 1)] = s;
    }
    let out = &sqrt_e * (g0.matrix() - &gr) * &sqrt_e + &gr;
    CovMatrix::new((&out + out.transpose()) * 0.5)
}

/// Where a mixing fraction falls relative to the physical range `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixingClass {
    InRange,
    AboveOne,
    BelowZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingFraction {
    pub y: f64,
    pub class: MixingClass,
}

impl MixingFraction {
    fn new(y: f64) -> Self {
        let class = if y > 1.0 {
            MixingClass::AboveOne
        } else if y < 0.0 {
            MixingClass::BelowZero
        } else {
            MixingClass::InRange
        };
        Self { y, class }
    }
}

/// Weight `y` that would make `estimated = y input + (1 - y) reservoir` in
/// the `(2 nbar + 1) sinh 2r` combination, for a squeezed thermal reservoir
/// `(nbar_r, r_r)`. Unclamped.
pub fn mixing_fraction(
    estimated: &SingleModeParams,
    input: &SingleModeParams,
    nbar_r: f64,
    r_r: f64,
) -> Result<MixingFraction> {
    let res = (2.0 * nbar_r + 1.0) * (2.0 * r_r).sinh();
    let den = input.squeezing_weight() - res;
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(MixingFraction::new(
        (estimated.squeezing_weight() - res) / den,
    ))
}

/// [`mixing_fraction`] for a thermal (unsqueezed) reservoir.
pub fn mixing_fraction_isotropic(
    estimated: &SingleModeParams,
    input: &SingleModeParams,
) -> Result<MixingFraction> {
    let den = input.squeezing_weight();
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(MixingFraction::new(estimated.squeezing_weight() / den))
}

/// Boundary reservoir squeezing: the smallest `r_r` with
/// `sinh 2r_r >= (2 nbar_e + 1) sinh 2r_e / (2 nbar_r + 1)`.
pub fn min_reservoir_squeezing(estimated: &SingleModeParams, nbar_r: f64) -> f64 {
    0.5 * (estimated.squeezing_weight() / (2.0 * nbar_r + 1.0)).asinh()
}
