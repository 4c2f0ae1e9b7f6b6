//! Parameter sweeps over coarse-graining size: the angle-deviation map, the
//! mixing-fraction curves, and the fidelity / nonclassicality comparisons of
//! the three reconstruction methods for one and two modes.

mod config;
mod output;
mod svg;

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{default_sigma_grid, Experiment, InputState, Method, SweepConfig};
pub use output::{emit_csv, load_csv, read_csv, write_csv};
pub use svg::{emit_svg, render_svg};

use crate::decoherence::mixing_fraction_isotropic;
use crate::direct::{
    frame_averaged_metrics, frame_averaged_metrics2, reconstruct_single, reconstruct_two,
    FramePolicy,
};
use crate::error::{Error, Result};
use crate::gaussian::{
    cov_from_params1, cov_from_params2, is_physical, wrap_symmetric, CovMatrix, SingleModeParams,
    TwoModeParams,
};
use crate::metrics::{fidelity1, fidelity2, log_negativity, nonclassical_squeezing};
use crate::mle::{mle_estimate_single, mle_estimate_two, MleConfig};

/// One `(input, sigma, method)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub experiment: Experiment,
    pub modes: usize,
    /// `nbar` for one mode, `nbar1` for two.
    pub nbar1: f64,
    pub nbar2: Option<f64>,
    pub r: f64,
    pub phi: f64,
    pub sigma: f64,
    pub method: Method,
    pub fidelity: Option<f64>,
    /// `r_nc` for one mode, logarithmic negativity for two.
    pub nonclassicality: Option<f64>,
    pub angle_deviation: Option<f64>,
    /// Mixing fraction against a thermal reservoir (one mode, squeezed inputs).
    pub y: Option<f64>,
    pub physical: Option<bool>,
    /// Cell-level failure or `no convergence` note; other cells are unaffected.
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: f64,
}

impl SweepRecord {
    pub fn input(&self) -> InputState {
        match self.nbar2 {
            None => InputState::Single(SingleModeParams {
                nbar: self.nbar1,
                r: self.r,
                phi: self.phi,
            }),
            Some(nbar2) => InputState::Two(TwoModeParams {
                nbar1: self.nbar1,
                nbar2,
                r: self.r,
                phi: self.phi,
            }),
        }
    }
}

/// Records of a finished sweep and the files written for it.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub csv_path: PathBuf,
    pub svg_path: PathBuf,
}

#[derive(Debug, Default)]
struct Outcome {
    fidelity: f64,
    nonclassicality: f64,
    angle_deviation: f64,
    y: Option<f64>,
    physical: bool,
    note: Option<String>,
}

struct Cell {
    index: usize,
    input: InputState,
    sigma: f64,
    method: Method,
}

fn cell_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mixing(est: &SingleModeParams, input: &SingleModeParams) -> Option<f64> {
    mixing_fraction_isotropic(est, input).ok().map(|m| m.y)
}

fn physical(cov: &CovMatrix) -> bool {
    is_physical(cov).physical
}

fn no_convergence(converged: bool) -> Option<String> {
    (!converged).then(|| "no convergence".to_string())
}

fn single_cell(
    cfg: &SweepConfig,
    input: &SingleModeParams,
    sigma: f64,
    method: Method,
    mle: &MleConfig,
) -> Result<Outcome> {
    let target = cov_from_params1(input);
    let from_estimate = |params: &SingleModeParams, cov: &CovMatrix, dev: f64| -> Result<Outcome> {
        Ok(Outcome {
            fidelity: fidelity1(&target, cov)?,
            nonclassicality: nonclassical_squeezing(params).r_nc,
            angle_deviation: dev,
            y: mixing(params, input),
            physical: physical(cov),
            note: None,
        })
    };
    match method {
        Method::DirectKnown => {
            let est = reconstruct_single(input, sigma, FramePolicy::Tuned(cfg.tuning_grid))?;
            from_estimate(&est.params, &est.cov, est.angle_deviation)
        }
        Method::DirectUnknown => {
            let est = reconstruct_single(input, sigma, FramePolicy::Unknown(cfg.frame_grid))?;
            let mut out = from_estimate(&est.params, &est.cov, est.angle_deviation)?;
            if cfg.experiment != Experiment::Fig2c {
                let avg = frame_averaged_metrics(input.nbar, input.r, sigma, cfg.frame_grid)?;
                out.fidelity = avg.fidelity;
                out.nonclassicality = avg.nonclassicality;
            }
            Ok(out)
        }
        Method::Mle => {
            let est = mle_estimate_single(input, sigma, mle)?;
            let dev = wrap_symmetric(est.params.phi - input.phi, PI);
            let mut out = from_estimate(&est.params, &est.cov, dev)?;
            out.note = no_convergence(est.converged);
            Ok(out)
        }
    }
}

fn two_cell(
    cfg: &SweepConfig,
    input: &TwoModeParams,
    sigma: f64,
    method: Method,
    mle: &MleConfig,
) -> Result<Outcome> {
    let target = cov_from_params2(input);
    let from_estimate = |params: &TwoModeParams, cov: &CovMatrix, dev: f64| -> Result<Outcome> {
        Ok(Outcome {
            fidelity: fidelity2(&target, cov)?.value,
            nonclassicality: log_negativity(params),
            angle_deviation: dev,
            y: None,
            physical: physical(cov),
            note: None,
        })
    };
    match method {
        Method::DirectKnown => {
            let est = reconstruct_two(input, sigma, FramePolicy::Tuned(cfg.tuning_grid))?;
            from_estimate(&est.params, &est.cov, est.angle_deviation)
        }
        Method::DirectUnknown => {
            let est = reconstruct_two(input, sigma, FramePolicy::Unknown(cfg.frame_grid))?;
            let mut out = from_estimate(&est.params, &est.cov, est.angle_deviation)?;
            let avg = frame_averaged_metrics2(input, sigma, cfg.frame_grid)?;
            out.fidelity = avg.fidelity;
            out.nonclassicality = avg.nonclassicality;
            Ok(out)
        }
        Method::Mle => {
            let est = mle_estimate_two(input, sigma, mle)?;
            let dev = wrap_symmetric(est.params.phi - input.phi, TAU);
            let mut out = from_estimate(&est.params, &est.cov, dev)?;
            out.note = no_convergence(est.converged);
            Ok(out)
        }
    }
}

fn expand_inputs(cfg: &SweepConfig) -> Vec<InputState> {
    if cfg.experiment != Experiment::Fig2c {
        return cfg.inputs.clone();
    }
    cfg.inputs
        .iter()
        .flat_map(|input| {
            (0..cfg.phi_grid).map(move |k| match *input {
                InputState::Single(p) => {
                    InputState::Single(p.with_phi(PI * k as f64 / cfg.phi_grid as f64))
                }
                two => two,
            })
        })
        .collect()
}

fn evaluate(cfg: &SweepConfig, cell: &Cell) -> SweepRecord {
    let start = Instant::now();
    let mle = MleConfig {
        seed: cell_seed(cfg.seed ^ cfg.mle.seed, cell.index),
        ..cfg.mle
    };
    let outcome = match &cell.input {
        InputState::Single(p) => single_cell(cfg, p, cell.sigma, cell.method, &mle),
        InputState::Two(p) => two_cell(cfg, p, cell.sigma, cell.method, &mle),
    };
    let (nbar1, nbar2, r, phi) = match cell.input {
        InputState::Single(p) => (p.nbar, None, p.r, p.phi),
        InputState::Two(p) => (p.nbar1, Some(p.nbar2), p.r, p.phi),
    };
    let mut rec = SweepRecord {
        experiment: cfg.experiment,
        modes: cell.input.modes(),
        nbar1,
        nbar2,
        r,
        phi,
        sigma: cell.sigma,
        method: cell.method,
        fidelity: None,
        nonclassicality: None,
        angle_deviation: None,
        y: None,
        physical: None,
        error: None,
        wall_time: 0.0,
    };
    match outcome {
        Ok(o) => {
            rec.fidelity = Some(o.fidelity);
            rec.nonclassicality = Some(o.nonclassicality);
            rec.angle_deviation = Some(o.angle_deviation);
            rec.y = o.y;
            rec.physical = Some(o.physical);
            rec.error = o.note;
        }
        Err(e) => {
            if let Error::NonPhysical { .. } = e {
                rec.physical = Some(false);
            }
            rec.error = Some(e.to_string());
        }
    }
    rec.wall_time = start.elapsed().as_secs_f64();
    rec
}

/// Evaluates every cell of a validated copy of `cfg`, ordered by input, sigma, method.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let cells: Vec<Cell> = expand_inputs(&cfg)
        .into_iter()
        .flat_map(|input| {
            let methods = cfg.methods.clone();
            cfg.sigma_grid.iter().flat_map(move |&sigma| {
                methods
                    .clone()
                    .into_iter()
                    .map(move |method| (input, sigma, method))
            })
        })
        .enumerate()
        .map(|(index, (input, sigma, method))| Cell {
            index,
            input,
            sigma,
            method,
        })
        .collect();
    Ok(cells.par_iter().map(|c| evaluate(&cfg, c)).collect())
}

/// Runs the sweep and writes `<experiment>.csv` and `<experiment>.svg` into `cfg.out_dir`.
pub fn run(cfg: &SweepConfig) -> Result<SweepOutput> {
    let records = sweep(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| Error::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let name = cfg.experiment.name();
    let csv_path = cfg.out_dir.join(format!("{name}.csv"));
    let svg_path = cfg.out_dir.join(format!("{name}.svg"));
    emit_csv(&records, &csv_path)?;
    emit_svg(&records, &svg_path)?;
    Ok(SweepOutput {
        records,
        csv_path,
        svg_path,
    })
}

fn run_as(cfg: &SweepConfig, experiment: Experiment) -> Result<SweepOutput> {
    run(&SweepConfig {
        experiment,
        ..cfg.clone()
    })
}

/// Squeezing-angle deviation of unknown-frame reconstruction over `(sigma, phi)`.
pub fn run_fig2c(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_as(cfg, Experiment::Fig2c)
}

/// Thermal-reservoir mixing fraction `y(sigma)` of MLE estimates.
pub fn run_fig3(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_as(cfg, Experiment::Fig3)
}

/// Single-mode fidelity and `r_nc` for the three methods.
pub fn run_fig4(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_as(cfg, Experiment::Fig4)
}

/// Two-mode fidelity and logarithmic negativity for the three methods.
pub fn run_fig5(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_as(cfg, Experiment::Fig5)
}

pub fn run_custom(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_as(cfg, Experiment::Custom)
}
