//! Maximum-likelihood estimation of Gaussian states from a full angular set of
//! coarse-grained homodyne distributions.
//!
//! The estimated density `P_E` is the smooth Gaussian marginal of a candidate
//! state. Since `ln P_E` is quadratic in `x`, the likelihood of flat-binned data
//! only depends on each distribution's mass and first two moments, which are
//! precomputed once per data set.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarse::{
    bin_gaussian_with_offset, gaussian_cross_moment, BinnedDistribution, CoarseMoments,
};
use crate::error::{Error, Result};
use crate::gaussian::{
    cov_from_params1, cov_from_params2, homodyne_marginal1, joint_from_cov, CovMatrix,
    GaussianMarginal, SingleModeParams, TwoModeParams,
};
use crate::simplex::{minimize, SimplexOptions, SimplexResult};

pub const DEFAULT_ANGLE_COUNT: usize = 60;
pub const DEFAULT_PAIR_GRID: usize = 12;
/// Candidate marginal variances are floored here so `ln P_E` stays finite.
pub const VARIANCE_FLOOR: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.1;
const POLISH_STEP: f64 = 1e-3;
const PERTURBATION: f64 = 0.3;

/// Measurement angles in `[0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    angles: Vec<f64>,
}

impl AngleSet {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Config("angle set must not be empty".into()));
        }
        if let Some(&bad) = angles.iter().find(|a| !(**a >= 0.0 && **a < PI)) {
            return Err(Error::InvalidParameter {
                name: "angle",
                value: bad,
                reason: "must lie in [0, pi)",
            });
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("angles must be strictly increasing".into()));
        }
        Ok(Self { angles })
    }

    /// `k pi / count` for `k = 0..count`.
    pub fn uniform(count: usize) -> Result<Self> {
        Self::new((0..count).map(|k| PI * k as f64 / count as f64).collect())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Quadrature weight `pi / count` of each angle.
    pub fn weight(&self) -> f64 {
        PI / self.angles.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MleConfig {
    pub angle_count: usize,
    pub restarts: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Two-mode data use a `pair_grid x pair_grid` grid of angle pairs.
    pub pair_grid: usize,
    /// Bin the candidate's marginals as well (single mode only, exploratory).
    pub coarse_model: bool,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            angle_count: DEFAULT_ANGLE_COUNT,
            restarts: 8,
            tol: 1e-8,
            max_iters: 2000,
            seed: 0,
            pair_grid: DEFAULT_PAIR_GRID,
            coarse_model: false,
        }
    }
}

impl MleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.angle_count < 3 {
            return Err(Error::Config("angle_count must be at least 3".into()));
        }
        if self.pair_grid < 3 {
            return Err(Error::Config("pair_grid must be at least 3".into()));
        }
        if self.restarts < 1 || self.max_iters < 1 {
            return Err(Error::Config(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config("tol must be positive".into()));
        }
        Ok(())
    }

    fn simplex(&self, step: f64) -> SimplexOptions {
        SimplexOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            step,
        }
    }
}

/// Outcome of a likelihood maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct MleEstimate<P> {
    pub params: P,
    pub cov: CovMatrix,
    pub log_likelihood: f64,
    /// False when the final simplex search hit `max_iters` before `tol`; the
    /// parameters are then the best found so far.
    pub converged: bool,
    pub iterations: usize,
    /// Index of the restart that produced the estimate (0 starts at the input).
    pub best_restart: usize,
}

/// `int_bin P_D ln P_E dx` for a flat bin of width `sigma` holding `mass`.
pub fn bin_log_likelihood(pe: &GaussianMarginal, center: f64, sigma: f64, mass: f64) -> f64 {
    let v = pe.variance.max(VARIANCE_FLOOR);
    let d = center - pe.mean;
    mass * (-0.5 * (TAU * v).ln() - (d * d + sigma * sigma / 12.0) / (2.0 * v))
}

/// Log-likelihood of binned data `(angle, distribution)` for a candidate
/// state, summed bin by bin and weighted by `pi / len(data)` per angle.
pub fn log_likelihood1(candidate: &SingleModeParams, data: &[(f64, BinnedDistribution)]) -> f64 {
    let w = PI / data.len() as f64;
    data.iter()
        .map(|(angle, b)| {
            let pe = homodyne_marginal1(candidate, *angle);
            b.bins()
                .map(|(_, x, p)| bin_log_likelihood(&pe, x, b.sigma(), p))
                .sum::<f64>()
        })
        .sum::<f64>()
        * w
}

/// Density compared against binned data in [`relative_entropy`].
#[derive(Debug, Clone, Copy)]
pub enum EstimatedDensity<'a> {
    Gaussian(GaussianMarginal),
    /// Piecewise-flat density on the same grid as the data.
    Piecewise(&'a BinnedDistribution),
}

fn entropy_term(pd: &BinnedDistribution) -> f64 {
    pd.bins()
        .filter(|(_, _, p)| *p > 0.0)
        .map(|(_, _, p)| p * (p / pd.sigma()).ln())
        .sum()
}

/// `D(P_D || P_E) = int P_D ln(P_D / P_E) dx`.
pub fn relative_entropy(pd: &BinnedDistribution, pe: &EstimatedDensity) -> Result<f64> {
    match pe {
        EstimatedDensity::Gaussian(g) => {
            let ll: f64 = pd
                .bins()
                .map(|(_, x, p)| bin_log_likelihood(g, x, pd.sigma(), p))
                .sum();
            Ok(entropy_term(pd) - ll)
        }
        EstimatedDensity::Piecewise(q) => {
            let same = (q.sigma() - pd.sigma()).abs() <= 1e-12 * pd.sigma()
                && (q.offset() - pd.offset()).abs() <= 1e-12 * pd.sigma();
            if !same {
                return Err(Error::GridMismatch);
            }
            Ok(pd
                .bins()
                .filter(|(_, _, p)| *p > 0.0)
                .map(|(m, _, p)| {
                    let qm = q.mass(m);
                    if qm > 0.0 {
                        p * (p / qm).ln()
                    } else {
                        f64::INFINITY
                    }
                })
                .sum())
        }
    }
}

/// Single-mode coarse-grained data over an angle set.
#[derive(Debug, Clone)]
pub struct SingleModeData {
    sigma: f64,
    angles: AngleSet,
    moments: Vec<CoarseMoments>,
    bins: Option<Vec<BinnedDistribution>>,
}

impl SingleModeData {
    /// Noise-free coarse-grained marginals of `input`. `keep_bins` retains the
    /// full distributions, which the binned candidate model needs.
    pub fn simulate(
        input: &SingleModeParams,
        sigma: f64,
        angles: &AngleSet,
        keep_bins: bool,
    ) -> Result<Self> {
        let bins = angles
            .angles()
            .par_iter()
            .map(|&t| bin_gaussian_with_offset(&homodyne_marginal1(input, t), sigma, 0.0))
            .collect::<Result<Vec<_>>>()?;
        let moments = bins.iter().map(CoarseMoments::of).collect();
        Ok(Self {
            sigma,
            angles: angles.clone(),
            moments,
            bins: keep_bins.then_some(bins),
        })
    }

    pub fn from_binned(data: Vec<(f64, BinnedDistribution)>) -> Result<Self> {
        let angles = AngleSet::new(data.iter().map(|(a, _)| *a).collect())?;
        let sigma = data[0].1.sigma();
        if data
            .iter()
            .any(|(_, b)| (b.sigma() - sigma).abs() > 1e-12 * sigma)
        {
            return Err(Error::GridMismatch);
        }
        let bins: Vec<_> = data.into_iter().map(|(_, b)| b).collect();
        Ok(Self {
            sigma,
            angles,
            moments: bins.iter().map(CoarseMoments::of).collect(),
            bins: Some(bins),
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn angles(&self) -> &AngleSet {
        &self.angles
    }

    /// Same value as [`log_likelihood1`], evaluated from the moments.
    pub fn log_likelihood(&self, candidate: &SingleModeParams) -> f64 {
        self.angles
            .angles()
            .iter()
            .zip(&self.moments)
            .map(|(&t, m)| {
                let v = homodyne_marginal1(candidate, t)
                    .variance
                    .max(VARIANCE_FLOOR);
                -0.5 * (TAU * v).ln() * m.mass - m.second / (2.0 * v)
            })
            .sum::<f64>()
            * self.angles.weight()
    }

    /// Log-likelihood with the candidate's marginals binned on the data grid.
    pub fn binned_log_likelihood(&self, candidate: &SingleModeParams) -> Result<f64> {
        let bins = self.bins.as_ref().ok_or(Error::Unsupported(
            "binned likelihood needs the full distributions",
        ))?;
        let mut total = 0.0;
        for (&t, pd) in self.angles.angles().iter().zip(bins) {
            let mut pe = homodyne_marginal1(candidate, t);
            pe.variance = pe.variance.max(VARIANCE_FLOOR);
            let q = bin_gaussian_with_offset(&pe, self.sigma, pd.offset())?;
            total += pd
                .bins()
                .filter(|(_, _, p)| *p > 0.0)
                .map(|(m, _, p)| p * (q.mass(m).max(f64::MIN_POSITIVE) / self.sigma).ln())
                .sum::<f64>();
        }
        Ok(total * self.angles.weight())
    }
}

/// Search coordinates `(sqrt nbar, r cos 2phi, r sin 2phi)`.
fn single_to_coords(p: &SingleModeParams) -> Vec<f64> {
    vec![
        p.nbar.sqrt(),
        p.r * (2.0 * p.phi).cos(),
        p.r * (2.0 * p.phi).sin(),
    ]
}

fn single_from_coords(x: &[f64]) -> SingleModeParams {
    SingleModeParams {
        nbar: x[0] * x[0],
        r: x[1].hypot(x[2]),
        phi: crate::gaussian::reduce_angle(0.5 * x[2].atan2(x[1]), PI),
    }
}

/// Search coordinates `(sqrt nbar1, sqrt nbar2, r cos phi, r sin phi)`.
fn two_to_coords(p: &TwoModeParams) -> Vec<f64> {
    vec![
        p.nbar1.sqrt(),
        p.nbar2.sqrt(),
        p.r * p.phi.cos(),
        p.r * p.phi.sin(),
    ]
}

fn two_from_coords(x: &[f64]) -> TwoModeParams {
    TwoModeParams {
        nbar1: x[0] * x[0],
        nbar2: x[1] * x[1],
        r: x[2].hypot(x[3]),
        phi: crate::gaussian::reduce_angle(x[3].atan2(x[2]), TAU),
    }
}

fn restart_rng(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Restart 0 starts at `start`, odd restarts perturb it, even ones draw a
/// fresh point; the best result (lowest index on ties) is polished once more.
fn multistart<F, D>(
    objective: F,
    start: Vec<f64>,
    draw: D,
    cfg: &MleConfig,
) -> (SimplexResult, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
    D: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let runs: Vec<SimplexResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let x0 = if k == 0 {
                start.clone()
            } else {
                let mut rng = restart_rng(cfg.seed, k);
                if k % 2 == 1 {
                    start
                        .iter()
                        .map(|v| v + rng.random_range(-PERTURBATION..PERTURBATION))
                        .collect()
                } else {
                    draw(&mut rng)
                }
            };
            minimize(&objective, &x0, &cfg.simplex(INITIAL_STEP))
        })
        .collect();
    let (best_idx, best) = runs
        .iter()
        .enumerate()
        .fold(None::<(usize, &SimplexResult)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.value <= r.value => acc,
            _ => Some((i, r)),
        })
        .expect("at least one restart");
    let total_iters: usize = runs.iter().map(|r| r.iterations).sum();
    let polish = minimize(&objective, &best.x, &cfg.simplex(POLISH_STEP));
    let chosen = if polish.value <= best.value {
        polish
    } else {
        SimplexResult {
            converged: polish.converged && best.converged,
            ..best.clone()
        }
    };
    (
        SimplexResult {
            iterations: total_iters + chosen.iterations,
            ..chosen
        },
        best_idx,
    )
}

/// Maximizes the likelihood of `data` over squeezed thermal states, starting from `start`.
pub fn fit_single(
    data: &SingleModeData,
    start: &SingleModeParams,
    cfg: &MleConfig,
) -> Result<MleEstimate<SingleModeParams>> {
    cfg.validate()?;
    let draw = |rng: &mut ChaCha8Rng| {
        let p = SingleModeParams {
            nbar: rng.random_range(0.0..2.0),
            r: rng.random_range(0.0..2.5),
            phi: rng.random_range(0.0..PI),
        };
        single_to_coords(&p)
    };
    let (res, best_restart) = if cfg.coarse_model {
        data.binned_log_likelihood(start)?;
        let objective = |x: &[f64]| {
            -data
                .binned_log_likelihood(&single_from_coords(x))
                .unwrap_or(f64::NEG_INFINITY)
        };
        multistart(objective, single_to_coords(start), draw, cfg)
    } else {
        let objective = |x: &[f64]| -data.log_likelihood(&single_from_coords(x));
        multistart(objective, single_to_coords(start), draw, cfg)
    };
    let params = single_from_coords(&res.x);
    Ok(MleEstimate {
        params,
        cov: cov_from_params1(&params),
        log_likelihood: -res.value,
        converged: res.converged,
        iterations: res.iterations,
        best_restart,
    })
}

/// Simulates coarse-grained data of `input` on `cfg.angle_count` angles and fits it.
pub fn mle_estimate_single(
    input: &SingleModeParams,
    sigma: f64,
    cfg: &MleConfig,
) -> Result<MleEstimate<SingleModeParams>> {
    cfg.validate()?;
    let angles = AngleSet::uniform(cfg.angle_count)?;
    let data = SingleModeData::simulate(input, sigma, &angles, cfg.coarse_model)?;
    fit_single(&data, input, cfg)
}

/// Coarse-grained joint data of two modes over a grid of angle pairs.
#[derive(Debug, Clone)]
pub struct TwoModeData {
    sigma: f64,
    angles: AngleSet,
    local1: Vec<CoarseMoments>,
    local2: Vec<CoarseMoments>,
    /// Raw cross moments, row-major in (mode-1 angle, mode-2 angle).
    cross: Vec<f64>,
}

impl TwoModeData {
    pub fn simulate(input: &TwoModeParams, sigma: f64, angles: &AngleSet) -> Result<Self> {
        let g = cov_from_params2(input);
        let local = |k: usize| {
            angles
                .angles()
                .par_iter()
                .map(|&t| {
                    let m = GaussianMarginal::centered(g.quadrature_variance(k, t))?;
                    Ok(CoarseMoments::of(&bin_gaussian_with_offset(
                        &m, sigma, 0.0,
                    )?))
                })
                .collect::<Result<Vec<_>>>()
        };
        let local1 = local(0)?;
        let local2 = local(1)?;
        let n = angles.len();
        let cross = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let (t1, t2) = (angles.angles()[ij / n], angles.angles()[ij % n]);
                gaussian_cross_moment(&joint_from_cov(&g, t1, t2), sigma)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sigma,
            angles: angles.clone(),
            local1,
            local2,
            cross,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn angles(&self) -> &AngleSet {
        &self.angles
    }
}

/// Log-likelihood of two-mode data for a candidate TMST, weighted by
/// `(pi / n)^2` per angle pair. Each pair contributes
/// `-W ln(2 pi sqrt(det S)) - tr(S^-1 M) / 2` with `M` the coarse second-moment matrix.
pub fn log_likelihood2(candidate: &TwoModeParams, data: &TwoModeData) -> f64 {
    let (a, b, cr, ci) = candidate.abc();
    let v1 = (0.5 * a).max(VARIANCE_FLOOR);
    let v2 = (0.5 * b).max(VARIANCE_FLOOR);
    let angles = data.angles.angles();
    let n = angles.len();
    let mut total = 0.0;
    for (i, &t1) in angles.iter().enumerate() {
        let m1 = &data.local1[i];
        for (j, &t2) in angles.iter().enumerate() {
            let m2 = &data.local2[j];
            let s = t1 + t2;
            let c = 0.5 * (cr * s.cos() + ci * s.sin());
            let det = v1 * v2 - c * c;
            if !(det > 0.0) {
                return f64::NEG_INFINITY;
            }
            let w = 0.5 * (m1.mass + m2.mass);
            let tr = (v2 * m1.second - 2.0 * c * data.cross[i * n + j] + v1 * m2.second) / det;
            total += -w * (TAU * det.sqrt()).ln() - 0.5 * tr;
        }
    }
    total * data.angles.weight() * data.angles.weight()
}

/// Maximizes [`log_likelihood2`] over two-mode squeezed thermal states.
pub fn fit_two(
    data: &TwoModeData,
    start: &TwoModeParams,
    cfg: &MleConfig,
) -> Result<MleEstimate<TwoModeParams>> {
    cfg.validate()?;
    if cfg.coarse_model {
        return Err(Error::Unsupported(
            "binned candidate model is only available for one mode",
        ));
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let p = TwoModeParams {
            nbar1: rng.random_range(0.0..2.0),
            nbar2: rng.random_range(0.0..2.0),
            r: rng.random_range(0.0..2.5),
            phi: rng.random_range(0.0..TAU),
        };
        two_to_coords(&p)
    };
    let objective = |x: &[f64]| -log_likelihood2(&two_from_coords(x), data);
    let (res, best_restart) = multistart(objective, two_to_coords(start), draw, cfg);
    let params = two_from_coords(&res.x);
    Ok(MleEstimate {
        params,
        cov: cov_from_params2(&params),
        log_likelihood: -res.value,
        converged: res.converged,
        iterations: res.iterations,
        best_restart,
    })
}

/// Simulates joint data of `input` on a `cfg.pair_grid` square grid of angle pairs and fits it.
pub fn mle_estimate_two(
    input: &TwoModeParams,
    sigma: f64,
    cfg: &MleConfig,
) -> Result<MleEstimate<TwoModeParams>> {
    cfg.validate()?;
    let angles = AngleSet::uniform(cfg.pair_grid)?;
    let data = TwoModeData::simulate(input, sigma, &angles)?;
    fit_two(&data, input, cfg)
}
