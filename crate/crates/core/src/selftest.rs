//! Built-in oracle checks: closed forms against brute-force evaluations,
//! plus the fixed points and limits every build must reproduce.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coarse::{
    bin_bivariate, bin_gaussian, coarse_cross_moment, coarse_variance, cross_moment_fourier,
};
use crate::direct::angle_deviation;
use crate::error::Result;
use crate::experiments::{read_csv, sweep, write_csv, Experiment, SweepConfig};
use crate::gaussian::{
    cov_from_params1, cov_from_params2, joint_from_cov, params_from_cov1, params_from_cov2,
    GaussianMarginal, SingleModeParams, TwoModeParams,
};
use crate::metrics::{symplectic_eigs_pt, symplectic_eigs_pt_tmst};
use crate::mle::bin_log_likelihood;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error, or the failure message.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelfTestReport {
    pub checks: Vec<Check>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelfTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<34} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn within(name: &'static str, worst: Result<f64>, tol: f64) -> Check {
    match worst {
        Ok(err) => Check {
            name,
            passed: err <= tol,
            detail: format!("max error {err:.2e} (tol {tol:.0e})"),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn binning_vs_dense_grid(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v = rng.random_range(0.05..3.0);
        let sigma = rng.random_range(0.05..2.0);
        let marg = GaussianMarginal::centered(v)?;
        let b = bin_gaussian(&marg, sigma)?;
        for (_, x, p) in b.bins() {
            let dense = simpson(|t| marg.pdf(t), x - 0.5 * sigma, x + 0.5 * sigma, 400);
            worst = worst.max((dense - p).abs());
        }
        let sd = v.sqrt();
        let lo = (-12.0 * sd / sigma).floor() as i64;
        let hi = (12.0 * sd / sigma).ceil() as i64;
        let dense_var: f64 = (lo..=hi)
            .map(|m| {
                let x = m as f64 * sigma;
                let p = simpson(|t| marg.pdf(t), x - 0.5 * sigma, x + 0.5 * sigma, 400);
                p * (x * x + sigma * sigma / 12.0)
            })
            .sum();
        worst = worst.max((dense_var - coarse_variance(&b)).abs());
    }
    Ok(worst)
}

fn symplectic_paths(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = TwoModeParams::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0 * PI),
        )?;
        let (a, b) = symplectic_eigs_pt(&cov_from_params2(&p))?;
        let (ca, cb) = symplectic_eigs_pt_tmst(&p);
        worst = worst.max((a - ca).abs()).max((b - cb).abs() / cb.max(1.0));
    }
    Ok(worst)
}

fn likelihood_bins(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let pe = GaussianMarginal::new(rng.random_range(-0.5..0.5), rng.random_range(0.1..3.0))?;
        let sigma = rng.random_range(0.05..2.0);
        let center = rng.random_range(-3.0..3.0);
        let mass = rng.random_range(0.0..0.5);
        let closed = bin_log_likelihood(&pe, center, sigma, mass);
        let quad = simpson(
            |x| mass / sigma * pe.ln_pdf(x),
            center - 0.5 * sigma,
            center + 0.5 * sigma,
            64,
        );
        worst = worst.max((closed - quad).abs());
    }
    Ok(worst)
}

fn cross_moment_paths(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let p = TwoModeParams::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.1..1.0),
            rng.random_range(0.0..2.0 * PI),
        )?;
        let sigma = rng.random_range(0.3..1.5);
        let marg = joint_from_cov(&cov_from_params2(&p), rng.random_range(0.0..PI), 0.3);
        let quad = coarse_cross_moment(&bin_bivariate(&marg, sigma)?);
        worst = worst.max((quad - cross_moment_fourier(&marg, sigma, 0.0)?).abs());
    }
    Ok(worst)
}

fn roundtrips(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = SingleModeParams::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.01..2.0),
            rng.random_range(0.0..PI),
        )?;
        let q = params_from_cov1(&cov_from_params1(&p))?.params;
        worst = worst
            .max((p.nbar - q.nbar).abs())
            .max((p.r - q.r).abs())
            .max((p.phi - q.phi).abs());
        let t = TwoModeParams::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.01..2.0),
            rng.random_range(0.0..2.0 * PI),
        )?;
        let u = params_from_cov2(&cov_from_params2(&t))?.params;
        worst = worst
            .max((t.nbar1 - u.nbar1).abs())
            .max((t.nbar2 - u.nbar2).abs())
            .max((t.r - u.r).abs())
            .max((t.phi - u.phi).abs());
    }
    Ok(worst)
}

fn angle_fixed_points() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in [1, 2, 3, 5, 6, 7] {
        let input = SingleModeParams::new(0.0, 1.0, k as f64 * PI / 8.0)?;
        for sigma in [0.1, 0.5, 1.0, 2.0] {
            worst = worst.max(angle_deviation(&input, sigma)?.abs());
        }
    }
    Ok(worst)
}

fn single_bin_limit() -> Result<f64> {
    let sigma = 20.0;
    let b = bin_gaussian(&GaussianMarginal::centered(0.5)?, sigma)?;
    Ok((coarse_variance(&b) - sigma * sigma / 12.0).abs())
}

fn csv_roundtrip() -> Check {
    let name = "CSV round-trip";
    let mut cfg = SweepConfig::preset(Experiment::Fig2c);
    cfg.sigma_grid = vec![0.1, 1.0];
    cfg.phi_grid = 4;
    let result = sweep(&cfg).and_then(|mut recs| {
        recs.iter_mut().for_each(|r| r.wall_time = 0.0);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).map_err(|e| crate::error::Error::Config(e.to_string()))?;
        let back =
            read_csv(buf.as_slice()).map_err(|e| crate::error::Error::Config(e.to_string()))?;
        Ok(back == recs)
    });
    match result {
        Ok(same) => Check {
            name,
            passed: same,
            detail: if same {
                "identical".into()
            } else {
                "records differ".into()
            },
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Runs every check with a fixed seed.
pub fn self_test() -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E1F_7E57);
    let checks = vec![
        within(
            "binning vs dense grid",
            binning_vs_dense_grid(&mut rng),
            1e-8,
        ),
        within("single-bin variance limit", single_bin_limit(), 1e-10),
        within("partial-transpose paths", symplectic_paths(&mut rng), 1e-10),
        within(
            "likelihood bins vs quadrature",
            likelihood_bins(&mut rng),
            1e-9,
        ),
        within(
            "cross moment: series vs cells",
            cross_moment_paths(&mut rng),
            1e-9,
        ),
        within("parameter round-trips", roundtrips(&mut rng), 1e-9),
        within("squeezing-angle fixed points", angle_fixed_points(), 1e-9),
        csv_roundtrip(),
    ];
    SelfTestReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let report = self_test();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 2);
        assert!((v - 0.0).abs() < 1e-14);
    }
}
