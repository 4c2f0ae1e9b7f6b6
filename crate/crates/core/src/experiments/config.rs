use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::direct::{DEFAULT_FRAME_GRID, DEFAULT_TUNING_GRID};
use crate::error::{Error, Result};
use crate::gaussian::{SingleModeParams, TwoModeParams};
use crate::mle::MleConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig2c,
    Fig3,
    Fig4,
    Fig5,
    Custom,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig2c => "fig2c",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Custom => "custom",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reconstruction method of a sweep cell; the declaration order is the CSV row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "DirectKnown", alias = "direct_known")]
    DirectKnown,
    #[serde(rename = "MLE", alias = "mle")]
    Mle,
    #[serde(rename = "DirectUnknown", alias = "direct_unknown")]
    DirectUnknown,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::DirectKnown, Method::Mle, Method::DirectUnknown];

    pub fn label(&self) -> &'static str {
        match self {
            Method::DirectKnown => "DirectKnown",
            Method::Mle => "MLE",
            Method::DirectUnknown => "DirectUnknown",
        }
    }
}

/// An input state; the field names decide the mode (`nbar` vs `nbar1`/`nbar2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputState {
    Single(SingleModeParams),
    Two(TwoModeParams),
}

impl InputState {
    pub fn modes(&self) -> usize {
        match self {
            InputState::Single(_) => 1,
            InputState::Two(_) => 2,
        }
    }

    fn validated(self) -> Result<Self> {
        Ok(match self {
            InputState::Single(p) => InputState::Single(SingleModeParams::new(p.nbar, p.r, p.phi)?),
            InputState::Two(p) => {
                InputState::Two(TwoModeParams::new(p.nbar1, p.nbar2, p.r, p.phi)?)
            }
        })
    }
}

/// Everything a sweep needs. Built from an experiment preset, optionally
/// overridden field by field from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub sigma_grid: Vec<f64>,
    pub inputs: Vec<InputState>,
    pub methods: Vec<Method>,
    /// Input phases averaged over for `DirectUnknown`.
    pub frame_grid: usize,
    /// Offsets scanned when tuning the `DirectKnown` measurement frame.
    pub tuning_grid: usize,
    /// Input angles `k pi / phi_grid` of the angle-deviation map.
    pub phi_grid: usize,
    pub mle: MleConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

/// Optional overrides read from a JSON config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigOverrides {
    experiment: Option<Experiment>,
    sigma_grid: Option<Vec<f64>>,
    inputs: Option<Vec<InputState>>,
    methods: Option<Vec<Method>>,
    frame_grid: Option<usize>,
    tuning_grid: Option<usize>,
    phi_grid: Option<usize>,
    mle: Option<MleConfig>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
}

/// 40 log-spaced values on `[0.01, 2]` plus 0.1, ascending.
pub fn default_sigma_grid() -> Vec<f64> {
    let (lo, hi): (f64, f64) = (0.01, 2.0);
    let mut grid: Vec<f64> = (0..40)
        .map(|k| lo * (hi / lo).powf(k as f64 / 39.0))
        .collect();
    grid[39] = hi;
    grid.push(0.1);
    grid.sort_by(f64::total_cmp);
    grid
}

fn single(nbar: f64, r: f64) -> InputState {
    InputState::Single(SingleModeParams { nbar, r, phi: 0.0 })
}

fn two(nbar: f64, r: f64) -> InputState {
    InputState::Two(TwoModeParams {
        nbar1: nbar,
        nbar2: nbar,
        r,
        phi: 0.0,
    })
}

impl SweepConfig {
    /// Default grids, inputs and methods of an experiment.
    pub fn preset(experiment: Experiment) -> Self {
        let singles = vec![single(0.0, 1.0), single(1.0, 1.0), single(0.0, 2.0)];
        let (inputs, methods) = match experiment {
            Experiment::Fig2c => (vec![single(0.0, 1.0)], vec![Method::DirectUnknown]),
            Experiment::Fig3 => (singles, vec![Method::Mle]),
            Experiment::Fig4 | Experiment::Custom => (singles, Method::ALL.to_vec()),
            Experiment::Fig5 => (
                vec![two(0.0, 1.0), two(1.0, 1.0), two(0.0, 2.0)],
                Method::ALL.to_vec(),
            ),
        };
        Self {
            experiment,
            sigma_grid: default_sigma_grid(),
            inputs,
            methods,
            frame_grid: DEFAULT_FRAME_GRID,
            tuning_grid: DEFAULT_TUNING_GRID,
            phi_grid: 64,
            mle: MleConfig {
                restarts: 4,
                ..MleConfig::default()
            },
            out_dir: PathBuf::from("out"),
            seed: 0,
        }
    }

    /// Preset for `experiment` (or the file's own `experiment` key) with the
    /// fields present in `json` replacing the defaults.
    pub fn from_json(json: &str, experiment: Experiment) -> Result<Self> {
        let o: ConfigOverrides =
            serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::preset(o.experiment.unwrap_or(experiment));
        if let Some(v) = o.sigma_grid {
            cfg.sigma_grid = v;
        }
        if let Some(v) = o.inputs {
            cfg.inputs = v;
        }
        if let Some(v) = o.methods {
            cfg.methods = v;
        }
        if let Some(v) = o.frame_grid {
            cfg.frame_grid = v;
        }
        if let Some(v) = o.tuning_grid {
            cfg.tuning_grid = v;
        }
        if let Some(v) = o.phi_grid {
            cfg.phi_grid = v;
        }
        if let Some(v) = o.mle {
            cfg.mle = v;
        }
        if let Some(v) = o.out_dir {
            cfg.out_dir = v;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }

    /// Checks grids and inputs. Sorts the sigma grid and methods and normalizes input angles.
    pub fn validate(&mut self) -> Result<()> {
        if self.sigma_grid.is_empty() {
            return Err(Error::Config("sigma_grid must not be empty".into()));
        }
        if let Some(&s) = self
            .sigma_grid
            .iter()
            .find(|s| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::InvalidSigma(s));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("inputs must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        if self.frame_grid < 4 || self.tuning_grid < 4 {
            return Err(Error::Config(
                "frame_grid and tuning_grid must be at least 4".into(),
            ));
        }
        if self.phi_grid < 1 {
            return Err(Error::Config("phi_grid must be positive".into()));
        }
        self.mle.validate()?;
        self.inputs = self
            .inputs
            .iter()
            .map(|p| p.validated())
            .collect::<Result<_>>()?;
        let want = match self.experiment {
            Experiment::Fig2c | Experiment::Fig3 | Experiment::Fig4 => Some(1),
            Experiment::Fig5 => Some(2),
            Experiment::Custom => None,
        };
        if let Some(m) = want {
            if self.inputs.iter().any(|p| p.modes() != m) {
                return Err(Error::Config(format!(
                    "{} takes {m}-mode inputs only",
                    self.experiment
                )));
            }
        }
        if self.experiment == Experiment::Fig2c
            && self.methods.iter().any(|m| *m != Method::DirectUnknown)
        {
            return Err(Error::Config(
                "fig2c maps the unknown-frame angle deviation only".into(),
            ));
        }
        self.sigma_grid.sort_by(f64::total_cmp);
        self.sigma_grid.dedup();
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        self.methods = methods;
        Ok(())
    }
}
