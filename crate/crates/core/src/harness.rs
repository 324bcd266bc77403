//! Measurement runs and their Monte Carlo averages.
//!
//! A run takes `N` copies of an unknown Haar-random state. Before each
//! measurement the strategy picks a basis from the vectors measured so far,
//! the outcome is sampled, and the estimate is rebuilt from all records. The
//! fidelity of every intermediate estimate is kept, so one run yields the
//! whole curve `F(1..=N)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaption::{adapt_basis, bias_entropy, AdaptionConfig};
use crate::error::{Error, Result};
use crate::estimator::{average_density, estimate};
use crate::linalg::{check_dim, fidelity, Basis, StateVector};
use crate::measurement::{sample_outcome, MeasurementRecord};
use crate::random::{haar_state, haar_unitary, RandomStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Least-bias adaption of every basis after the first.
    Adaptive,
    /// A fresh Haar-random basis for every measurement.
    Random,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Adaptive => "adaptive",
            Strategy::Random => "random",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Strategy::Adaptive),
            "random" => Ok(Strategy::Random),
            other => Err(Error::InvalidConfig(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dimension: usize,
    /// Measurements per run.
    pub copies: usize,
    pub runs: usize,
    pub strategy: Strategy,
    pub master_seed: u64,
    pub adaption: AdaptionConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            copies: 50,
            runs: 10_000,
            strategy: Strategy::Adaptive,
            master_seed: 0,
            adaption: AdaptionConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidDimension(self.dimension));
        }
        if self.copies == 0 {
            return Err(Error::InvalidConfig("copies must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        self.adaption.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub true_state: StateVector,
    /// `fidelity_trace[i]` is the fidelity after `i + 1` measurements.
    pub fidelity_trace: Vec<f64>,
    /// The estimate after `i + 1` measurements had a tied leading eigenvalue.
    pub degenerate_flags: Vec<bool>,
    /// `h_trace[i]` is the bias entropy of the basis chosen for measurement
    /// `i + 1`, evaluated against the `i` vectors measured before it.
    pub h_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub nu: usize,
    pub mean_fidelity: f64,
    #[serde(rename = "stderr")]
    pub standard_error: f64,
    pub f_opt: f64,
    pub delta_f: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub points: Vec<CurvePoint>,
}

impl FidelityCurve {
    /// Aggregates per-run traces in run order.
    pub fn from_runs(runs: &[RunResult], dimension: usize) -> Self {
        let Some(first) = runs.first() else {
            return Self::default();
        };
        let n = runs.len() as f64;
        let points = (0..first.fidelity_trace.len())
            .map(|i| {
                let mean = runs.iter().map(|r| r.fidelity_trace[i]).sum::<f64>() / n;
                let standard_error = if runs.len() > 1 {
                    let var = runs
                        .iter()
                        .map(|r| (r.fidelity_trace[i] - mean).powi(2))
                        .sum::<f64>()
                        / (n - 1.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
                let nu = i + 1;
                let f_opt = optimal_fidelity(nu, dimension);
                CurvePoint {
                    nu,
                    mean_fidelity: mean,
                    standard_error,
                    f_opt,
                    delta_f: mean - f_opt,
                }
            })
            .collect();
        Self { points }
    }

    pub fn point(&self, nu: usize) -> Option<&CurvePoint> {
        nu.checked_sub(1).and_then(|i| self.points.get(i))
    }
}

/// Optimal mean fidelity `(N + 1) / (N + d)` of a collective measurement on
/// `N` copies.
pub fn optimal_fidelity(copies: usize, dimension: usize) -> f64 {
    (copies as f64 + 1.0) / (copies as f64 + dimension as f64)
}

/// Basis for the next measurement together with its bias entropy.
pub fn choose_next_basis(
    strategy: Strategy,
    dimension: usize,
    measured: &[StateVector],
    previous: Option<&Basis>,
    cfg: &AdaptionConfig,
    rng: &mut RandomStream,
) -> Result<(Basis, f64)> {
    match strategy {
        Strategy::Adaptive => {
            let adapted = adapt_basis(dimension, measured, previous, cfg, rng)?;
            Ok((adapted.basis, adapted.entropy))
        }
        Strategy::Random => {
            let basis = haar_unitary(dimension, rng)?;
            let h = bias_entropy(measured, &basis)?;
            Ok((basis, h))
        }
    }
}

/// One complete run of `config.copies` measurements on `true_state`.
pub fn run_single_experiment(
    true_state: &StateVector,
    config: &ExperimentConfig,
    rng: &mut RandomStream,
) -> Result<RunResult> {
    config.validate()?;
    let d = config.dimension;
    check_dim(d, true_state.dim())?;

    let n = config.copies;
    let mut records: Vec<MeasurementRecord> = Vec::with_capacity(n);
    let mut measured: Vec<StateVector> = Vec::with_capacity(n);
    let mut previous: Option<Basis> = None;
    let mut fidelity_trace = Vec::with_capacity(n);
    let mut degenerate_flags = Vec::with_capacity(n);
    let mut h_trace = Vec::with_capacity(n);

    for _ in 0..n {
        let (basis, h) = choose_next_basis(
            config.strategy,
            d,
            &measured,
            previous.as_ref(),
            &config.adaption,
            rng,
        )?;
        h_trace.push(h);
        let record = sample_outcome(true_state, &basis, rng)?;
        measured.push(record.measured_vector().clone());
        records.push(record);
        previous = Some(basis);

        let est = estimate(&average_density(&records)?)?;
        fidelity_trace.push(fidelity(true_state, &est.state)?);
        degenerate_flags.push(est.degenerate);
    }

    Ok(RunResult {
        true_state: true_state.clone(),
        fidelity_trace,
        degenerate_flags,
        h_trace,
    })
}

/// Run `r` uses stream `(master_seed, r)`; its true state is the first draw,
/// so both strategies see the same states for the same seed.
pub fn run_indexed(config: &ExperimentConfig, run: usize) -> Result<RunResult> {
    let mut rng = RandomStream::new(config.master_seed, run as u64);
    let true_state = haar_state(config.dimension, &mut rng)?;
    run_single_experiment(&true_state, config, &mut rng)
}

/// All runs of a campaign, in run order.
pub fn run_all(config: &ExperimentConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|r| run_indexed(config, r))
        .collect()
}

/// Mean fidelity curve over `config.runs` independent runs.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<FidelityCurve> {
    let runs = run_all(config)?;
    Ok(FidelityCurve::from_runs(&runs, config.dimension))
}
