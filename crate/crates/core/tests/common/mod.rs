//! Brute-force reference computations written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Bin masses of `N(mean, var)` on bins `[(m - 1/2) sigma, (m + 1/2) sigma]`, by Simpson.
pub fn dense_bins(mean: f64, var: f64, sigma: f64) -> Vec<(f64, f64)> {
    let sd = var.sqrt();
    let lo = ((mean - 12.0 * sd) / sigma).floor() as i64;
    let hi = ((mean + 12.0 * sd) / sigma).ceil() as i64;
    (lo..=hi)
        .map(|m| {
            let x = m as f64 * sigma;
            let panels = (((sigma / sd) * 200.0).ceil() as usize).clamp(200, 20_000) & !1;
            let p = simpson(
                |t| normal_pdf(t, mean, var),
                x - 0.5 * sigma,
                x + 0.5 * sigma,
                panels,
            );
            (x, p)
        })
        .collect()
}

/// Variance of the flat-binned density built from [`dense_bins`].
pub fn dense_coarse_variance(var: f64, sigma: f64) -> f64 {
    let bins = dense_bins(0.0, var, sigma);
    let mass: f64 = bins.iter().map(|b| b.1).sum();
    let mean: f64 = bins.iter().map(|(x, p)| x * p).sum::<f64>() / mass;
    let second: f64 = bins
        .iter()
        .map(|(x, p)| p * ((x - mean).powi(2) + sigma * sigma / 12.0))
        .sum();
    second / mass
}

fn quantize(x: f64, sigma: f64) -> f64 {
    (x / sigma).round() * sigma
}

/// Monte-Carlo estimate of `E[Q(X1) Q(X2)]` with its standard error.
pub fn mc_cross_moment(v1: f64, v2: f64, c: f64, sigma: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l11 = v1.sqrt();
    let l21 = c / l11;
    let l22 = (v2 - l21 * l21).max(0.0).sqrt();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let x1 = l11 * z1;
        let x2 = l21 * z1 + l22 * z2;
        let q = quantize(x1, sigma) * quantize(x2, sigma);
        s += q;
        s2 += q * q;
    }
    let mean = s / n as f64;
    let var = (s2 / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

/// `E[Q(X1) Q(X2)]` by integrating `Q(x1) E[Q(X2) | x1]` with Simpson over `x1`,
/// the inner expectation summed over bins with the exact conditional normal CDF.
pub fn quad_cross_moment(v1: f64, v2: f64, c: f64, sigma: f64) -> f64 {
    let beta = c / v1;
    let cond_var = (v2 - c * c / v1).max(1e-300);
    let cond_sd = cond_var.sqrt();
    let inner = |x1: f64| {
        let mu = beta * x1;
        let lo = ((mu - 12.0 * cond_sd) / sigma).floor() as i64 - 1;
        let hi = ((mu + 12.0 * cond_sd) / sigma).ceil() as i64 + 1;
        (lo..=hi)
            .map(|m| {
                let a = ((m as f64 - 0.5) * sigma - mu) / cond_sd;
                let b = ((m as f64 + 0.5) * sigma - mu) / cond_sd;
                m as f64 * sigma * (phi_cdf(b) - phi_cdf(a))
            })
            .sum::<f64>()
    };
    let sd1 = v1.sqrt();
    let lo = ((-10.0 * sd1) / sigma).floor() as i64;
    let hi = ((10.0 * sd1) / sigma).ceil() as i64;
    (lo..=hi)
        .map(|m| {
            let x = m as f64 * sigma;
            x * simpson(
                |t| normal_pdf(t, 0.0, v1) * inner(t),
                x - 0.5 * sigma,
                x + 0.5 * sigma,
                400,
            )
        })
        .sum()
}

pub fn phi_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn rot(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `(nbar + 1/2) R D R^T` with `D = diag(e^{-2r}, e^{2r})`.
pub fn single_cov(nbar: f64, r: f64, phi: f64) -> Matrix2<f64> {
    let d = Matrix2::new((-2.0 * r).exp(), 0.0, 0.0, (2.0 * r).exp());
    rot(phi) * d * rot(phi).transpose() * (nbar + 0.5)
}

/// `S diag((n1 + 1/2) I, (n2 + 1/2) I) S^T` for the two-mode squeezer
/// `S = [[ch I, -sh Z], [-sh Z, ch I]]`, `Z = [[cos phi, sin phi], [sin phi, -cos phi]]`.
pub fn two_cov(n1: f64, n2: f64, r: f64, phi: f64) -> DMatrix<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let (s, c) = phi.sin_cos();
    #[rustfmt::skip]
    let sq = DMatrix::from_row_slice(4, 4, &[
        ch, 0.0, -sh * c, -sh * s,
        0.0, ch, -sh * s, sh * c,
        -sh * c, -sh * s, ch, 0.0,
        -sh * s, sh * c, 0.0, ch,
    ]);
    let th = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
        n1 + 0.5,
        n1 + 0.5,
        n2 + 0.5,
        n2 + 0.5,
    ]));
    &sq * th * sq.transpose()
}

/// Symplectic eigenvalues from the characteristic polynomial of `(J G)^2`
/// for a 4x4 matrix: `nu^4 - Delta nu^2 + det G = 0`, `Delta = det A + det B + 2 det C`.
pub fn seralian_eigs(g: &DMatrix<f64>) -> (f64, f64) {
    let det2 = |r: usize, c: usize| g[(r, c)] * g[(r + 1, c + 1)] - g[(r, c + 1)] * g[(r + 1, c)];
    let delta = det2(0, 0) + det2(2, 2) + 2.0 * det2(0, 2);
    let det = g.determinant();
    let root = (delta * delta - 4.0 * det).max(0.0).sqrt();
    (((delta - root) / 2.0).sqrt(), ((delta + root) / 2.0).sqrt())
}
