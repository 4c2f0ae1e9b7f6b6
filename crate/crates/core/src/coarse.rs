//! Coarse-grained (binned) homodyne distributions.
//!
//! A bin of width `sigma` centered at `x_m = m sigma + offset` collects the
//! probability of `[x_m - sigma/2, x_m + sigma/2]`; the measured density is flat
//! across each bin. Moments of the flat density split into the discrete
//! moments of the bin centers plus `sigma^2 / 12` per quadrature.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::gaussian::{BivariateMarginal, GaussianMarginal};

/// Half-width of the binned window in standard deviations (tail mass ~1e-15).
const TAIL_SIGMAS: f64 = 8.0;
/// Joint grids above this many cells are rejected by [`bin_bivariate`].
pub const MAX_JOINT_CELLS: usize = 16_000_000;
/// [`gaussian_cross_moment`] falls back to cell quadrature when `1 - rho^2` drops below this.
pub const FOURIER_MIN_DECORRELATION: f64 = 1e-8;
const QUAD_START_ORDER: usize = 8;
const QUAD_MAX_ORDER: usize = 1024;
const QUAD_REL_TOL: f64 = 1e-10;
/// Series terms with Gaussian damping `exp(-x)` for `x` above this are dropped.
const FOURIER_CUTOFF: f64 = 40.0;

/// Standard normal CDF, accurate in both tails.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Probability that `N(0, 1)` falls in `[zl, zh]`.
pub(crate) fn normal_interval(zl: f64, zh: f64) -> f64 {
    if zl >= 0.0 {
        0.5 * (libm::erfc(zl * FRAC_1_SQRT_2) - libm::erfc(zh * FRAC_1_SQRT_2))
    } else if zh <= 0.0 {
        0.5 * (libm::erfc(-zh * FRAC_1_SQRT_2) - libm::erfc(-zl * FRAC_1_SQRT_2))
    } else {
        0.5 * (libm::erf(zh * FRAC_1_SQRT_2) - libm::erf(zl * FRAC_1_SQRT_2))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSigma(sigma))
    }
}

/// Inclusive bin index range covering `mean +- 8 sd`.
fn bin_range(mean: f64, sd: f64, sigma: f64, offset: f64) -> (i64, i64) {
    let lo = ((mean - TAIL_SIGMAS * sd - offset) / sigma).floor() as i64 - 1;
    let hi = ((mean + TAIL_SIGMAS * sd - offset) / sigma).ceil() as i64 + 1;
    (lo, hi)
}

/// Piecewise-flat distribution over bins of width `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDistribution {
    sigma: f64,
    offset: f64,
    first: i64,
    masses: Vec<f64>,
}

impl BinnedDistribution {
    /// Builds a distribution from explicit bin masses; `masses[i]` belongs to bin `first + i`.
    pub fn from_masses(sigma: f64, offset: f64, first: i64, masses: Vec<f64>) -> Result<Self> {
        check_sigma(sigma)?;
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "bin mass",
                value: f64::NAN,
                reason: "masses must be finite and non-negative",
            });
        }
        Ok(Self {
            sigma,
            offset,
            first,
            masses,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Truncation window `(first, last)` of stored bin indices.
    pub fn index_range(&self) -> (i64, i64) {
        (self.first, self.first + self.masses.len() as i64 - 1)
    }

    pub fn center(&self, m: i64) -> f64 {
        m as f64 * self.sigma + self.offset
    }

    /// Probability mass `P(x_m) = sigma P_sigma[m]` of bin `m`.
    pub fn mass(&self, m: i64) -> f64 {
        let i = m - self.first;
        if i < 0 || i >= self.masses.len() as i64 {
            0.0
        } else {
            self.masses[i as usize]
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `(m, x_m, P(x_m))` for every stored bin.
    pub fn bins(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        self.masses.iter().enumerate().map(move |(i, &p)| {
            let m = self.first + i as i64;
            (m, self.center(m), p)
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Bin index containing `x`. Points on a bin boundary go to the bin with smaller `|m|`.
    pub fn bin_index(&self, x: f64) -> i64 {
        let t = (x - self.offset) / self.sigma;
        let m = t.round();
        let m = if (t - m).abs() == 0.5 {
            m - m.signum()
        } else {
            m
        };
        m as i64
    }
}

/// Coarse-grains a Gaussian marginal into bins centered on `m sigma`.
pub fn bin_gaussian(marg: &GaussianMarginal, sigma: f64) -> Result<BinnedDistribution> {
    bin_gaussian_with_offset(marg, sigma, 0.0)
}

/// Coarse-grains a Gaussian marginal into bins centered on `m sigma + offset`.
pub fn bin_gaussian_with_offset(
    marg: &GaussianMarginal,
    sigma: f64,
    offset: f64,
) -> Result<BinnedDistribution> {
    check_sigma(sigma)?;
    let sd = marg.variance.sqrt();
    let (lo, hi) = bin_range(marg.mean, sd, sigma, offset);
    let z = |m: i64| ((m as f64 - 0.5) * sigma + offset - marg.mean) / sd;
    let masses = (lo..=hi).map(|m| normal_interval(z(m), z(m + 1))).collect();
    Ok(BinnedDistribution {
        sigma,
        offset,
        first: lo,
        masses,
    })
}

/// First moment `sum x_m P(x_m)`.
pub fn coarse_mean(b: &BinnedDistribution) -> f64 {
    b.bins().map(|(_, x, p)| x * p).sum()
}

/// Variance of the flat-binned density, `sigma^2 / 12` plus the discrete variance of the centers.
pub fn coarse_variance(b: &BinnedDistribution) -> f64 {
    let mean = coarse_mean(b);
    let discrete: f64 = b.bins().map(|(_, x, p)| (x - mean) * (x - mean) * p).sum();
    b.sigma * b.sigma / 12.0 + discrete
}

/// Raw second moment of the flat-binned density.
pub fn coarse_second_moment(b: &BinnedDistribution) -> f64 {
    let discrete: f64 = b.bins().map(|(_, x, p)| x * x * p).sum();
    b.sigma * b.sigma / 12.0 * b.total_mass() + discrete
}

/// Value of the piecewise-flat density at `x`.
pub fn coarse_pdf_eval(b: &BinnedDistribution, x: f64) -> f64 {
    b.mass(b.bin_index(x)) / b.sigma
}

/// Sufficient statistics of a binned quadrature for a zero-mean Gaussian likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseMoments {
    pub mass: f64,
    pub mean: f64,
    /// Raw second moment including the within-bin `sigma^2 / 12`.
    pub second: f64,
}

impl CoarseMoments {
    pub fn of(b: &BinnedDistribution) -> Self {
        Self {
            mass: b.total_mass(),
            mean: coarse_mean(b),
            second: coarse_second_moment(b),
        }
    }

    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// Joint piecewise-flat distribution on a square `sigma x sigma` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedJoint {
    sigma: f64,
    offset: f64,
    first1: i64,
    first2: i64,
    n1: usize,
    n2: usize,
    masses: Vec<f64>,
}

impl BinnedJoint {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center(&self, m: i64) -> f64 {
        m as f64 * self.sigma + self.offset
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn mass(&self, m: i64, n: i64) -> f64 {
        let (i, j) = (m - self.first1, n - self.first2);
        if i < 0 || j < 0 || i >= self.n1 as i64 || j >= self.n2 as i64 {
            0.0
        } else {
            self.masses[i as usize * self.n2 + j as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `(m, n, x_m, y_n, P)` for every stored cell.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, f64, f64, f64)> + '_ {
        self.masses.iter().enumerate().map(move |(k, &p)| {
            let m = self.first1 + (k / self.n2) as i64;
            let n = self.first2 + (k % self.n2) as i64;
            (m, n, self.center(m), self.center(n), p)
        })
    }

    /// Distribution of the first quadrature (sum over the second index).
    pub fn marginal1(&self) -> BinnedDistribution {
        let masses = self
            .masses
            .chunks(self.n2)
            .map(|row| row.iter().sum())
            .collect();
        BinnedDistribution {
            sigma: self.sigma,
            offset: self.offset,
            first: self.first1,
            masses,
        }
    }

    /// Distribution of the second quadrature (sum over the first index).
    pub fn marginal2(&self) -> BinnedDistribution {
        let mut masses = vec![0.0; self.n2];
        for row in self.masses.chunks(self.n2) {
            for (acc, p) in masses.iter_mut().zip(row) {
                *acc += p;
            }
        }
        BinnedDistribution {
            sigma: self.sigma,
            offset: self.offset,
            first: self.first2,
            masses,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Coarse-grains a zero-mean bivariate Gaussian onto a square grid.
///
/// Each row of cells is integrated with Gauss–Legendre in the first
/// quadrature against the exact conditional CDF of the second; the order
/// starts at 8 and doubles until no cell changes by more than `1e-10`
/// relative to the row mass.
pub fn bin_bivariate(marg: &BivariateMarginal, sigma: f64) -> Result<BinnedJoint> {
    bin_bivariate_with_offset(marg, sigma, 0.0)
}

pub fn bin_bivariate_with_offset(
    marg: &BivariateMarginal,
    sigma: f64,
    offset: f64,
) -> Result<BinnedJoint> {
    check_sigma(sigma)?;
    let (sd1, sd2) = (marg.var1.sqrt(), marg.var2.sqrt());
    let (lo1, hi1) = bin_range(0.0, sd1, sigma, offset);
    let (lo2, hi2) = bin_range(0.0, sd2, sigma, offset);
    let n1 = (hi1 - lo1 + 1) as usize;
    let n2 = (hi2 - lo2 + 1) as usize;
    let cells = n1.saturating_mul(n2);
    if cells > MAX_JOINT_CELLS {
        return Err(Error::GridTooLarge { cells });
    }

    let beta = marg.cov12 / marg.var1;
    let cond_sd = (marg.var2 - marg.cov12 * beta).max(0.0).sqrt();
    let edges: Vec<f64> = (lo2..=hi2 + 1)
        .map(|n| (n as f64 - 0.5) * sigma + offset)
        .collect();
    let p1 = marg.marginal1();

    let mut rules: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut order = QUAD_START_ORDER;
    while order <= QUAD_MAX_ORDER {
        rules.push(gauss_legendre(order));
        order *= 2;
    }

    let integrate_row = |a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>), out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        let mut cdf = vec![0.0; edges.len()];
        for (t, w) in rule.0.iter().zip(&rule.1) {
            let x1 = mid + half * t;
            let weight = w * half * p1.pdf(x1);
            if weight == 0.0 {
                continue;
            }
            let mu = beta * x1;
            for (c, e) in cdf.iter_mut().zip(&edges) {
                *c = if cond_sd > 0.0 {
                    normal_cdf((e - mu) / cond_sd)
                } else if *e > mu {
                    1.0
                } else {
                    0.0
                };
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += weight * (cdf[j + 1] - cdf[j]);
            }
        }
    };

    let mut masses = vec![0.0; cells];
    let mut coarse = vec![0.0; n2];
    let mut fine = vec![0.0; n2];
    for (i, m) in (lo1..=hi1).enumerate() {
        let a = (m as f64 - 0.5) * sigma + offset;
        let b = a + sigma;
        integrate_row(a, b, &rules[0], &mut coarse);
        for rule in &rules[1..] {
            integrate_row(a, b, rule, &mut fine);
            let row_mass: f64 = fine.iter().sum();
            let change = coarse
                .iter()
                .zip(&fine)
                .fold(0.0_f64, |acc, (c, f)| acc.max((c - f).abs()));
            std::mem::swap(&mut coarse, &mut fine);
            if change <= QUAD_REL_TOL * row_mass || row_mass < 1e-300 {
                break;
            }
        }
        masses[i * n2..(i + 1) * n2].copy_from_slice(&coarse);
    }
    Ok(BinnedJoint {
        sigma,
        offset,
        first1: lo1,
        first2: lo2,
        n1,
        n2,
        masses,
    })
}

/// Raw cross moment `sum x_m y_n P(x_m, y_n)`; the flat within-cell parts do not contribute.
pub fn coarse_cross_moment(b: &BinnedJoint) -> f64 {
    b.cells().map(|(_, _, x, y, p)| x * y * p).sum()
}

/// Cross moment of the bin centers of a zero-mean bivariate Gaussian via
/// its Fourier (Poisson-summation) representation.
///
/// With `Q(x) = x - s(x)` the bin-center quantizer and `s` a sawtooth of
/// period `sigma`, `E[Q(X1) Q(X2)] = c12 - E[X1 s(X2)] - E[s(X1) X2] + E[s(X1) s(X2)]`,
/// and each term is a rapidly converging series of Gaussian characteristic
/// function values.
pub fn cross_moment_fourier(marg: &BivariateMarginal, sigma: f64, offset: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let (v1, v2, c) = (marg.var1, marg.var2, marg.cov12);
    let rho = marg.correlation();
    let decor = 1.0 - rho * rho;
    if decor < 1e-14 {
        return Err(Error::Unsupported(
            "Fourier cross moment needs |correlation| < 1",
        ));
    }
    let w1 = 2.0 * PI / sigma;
    let coef = |k: usize| {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sign * sigma / (PI * k as f64)
    };

    // E[X1 s(X2)] + E[s(X1) X2]; a_k w_k = 2 (-1)^{k+1}.
    let mut single = 0.0;
    for v in [v1, v2] {
        let mut k = 1;
        loop {
            let w = w1 * k as f64;
            let damp = 0.5 * w * w * v;
            if damp > FOURIER_CUTOFF {
                break;
            }
            let sign = if k % 2 == 1 { 2.0 } else { -2.0 };
            single += sign * c * (-damp).exp() * (w * offset).cos();
            k += 1;
        }
    }

    // E[s(X1) s(X2)], keeping only (k, l) pairs whose smaller damping exponent is below the cutoff.
    let (s1, s2) = (v1.sqrt(), v2.sqrt());
    let mut double = 0.0;
    let mut k = 1;
    loop {
        let x = w1 * k as f64 * s1;
        if 0.5 * decor * x * x > FOURIER_CUTOFF {
            break;
        }
        let reach = (2.0 * FOURIER_CUTOFF - decor * x * x).max(0.0).sqrt();
        let l_lo = (((rho.abs() * x - reach) / (w1 * s2)).floor() as i64).max(1) as usize;
        let l_hi = ((rho.abs() * x + reach) / (w1 * s2)).ceil().max(1.0) as usize;
        let wk = w1 * k as f64;
        for l in l_lo..=l_hi {
            let wl = w1 * l as f64;
            let base = wk * wk * v1 + wl * wl * v2;
            let cross = 2.0 * wk * wl * c;
            let minus = (-0.5 * (base - cross)).exp() * ((wk - wl) * offset).cos();
            let plus = (-0.5 * (base + cross)).exp() * ((wk + wl) * offset).cos();
            double += coef(k) * coef(l) * 0.5 * (minus - plus);
        }
        k += 1;
    }
    Ok(c - single + double)
}

/// Raw coarse-grained cross moment of a zero-mean bivariate Gaussian.
///
/// Uses [`cross_moment_fourier`], except for nearly degenerate correlations
/// where the series converges slowly and the cells are integrated instead.
pub fn gaussian_cross_moment(marg: &BivariateMarginal, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let rho = marg.correlation();
    if 1.0 - rho * rho < FOURIER_MIN_DECORRELATION {
        Ok(coarse_cross_moment(&bin_bivariate(marg, sigma)?))
    } else {
        cross_moment_fourier(marg, sigma, 0.0)
    }
}

/// Coarse-grained moments of a zero-mean Gaussian marginal.
pub fn gaussian_coarse_moments(marg: &GaussianMarginal, sigma: f64) -> Result<CoarseMoments> {
    Ok(CoarseMoments::of(&bin_gaussian(marg, sigma)?))
}
