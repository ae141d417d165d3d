//! Finite-block estimates of the lower and upper capacities of a memory channel
//! and of how fast the two approach each other.
//!
//! For block length `n` and memory state `ω`, `χ_n(ω)/n` is the largest Holevo
//! quantity per use found for ensembles pushed through `n` uses started in `ω`.
//! The lower and upper values are the minimum and maximum of `χ_n(ω)/n` over a
//! finite set of candidate memory states. All values are sampled estimates.

mod optimizer;
mod transfer;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{is_fixed_point_channel, ChannelSpec, FixedPointCheck};
use crate::indecomposability::{probe_mixing, MixingProbeConfig, MixingProbeResult};
use crate::linalg::DensityMatrix;
use crate::{Error, Result};

pub use optimizer::{
    evaluate_ensemble_chi, optimize_chi_n, ChiOptimum, EnsembleParameterization, OptimizerOptions,
    DEFAULT_ENSEMBLE_CAP,
};

/// A memory state with a label used in reports.
#[derive(Debug, Clone)]
pub struct MemoryCandidate {
    pub id: String,
    pub state: DensityMatrix,
}

impl MemoryCandidate {
    pub fn new(id: impl Into<String>, state: DensityMatrix) -> Self {
        Self {
            id: id.into(),
            state,
        }
    }
}

/// Every memory basis state followed by the maximally mixed memory.
pub fn default_memory_candidates(d_m: usize) -> Result<Vec<MemoryCandidate>> {
    let mut out = (0..d_m)
        .map(|k| {
            Ok(MemoryCandidate::new(
                format!("basis_{k}"),
                DensityMatrix::basis(k, d_m)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(MemoryCandidate::new(
        "maximally_mixed",
        DensityMatrix::maximally_mixed(d_m),
    ));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryValue {
    pub memory_id: String,
    pub chi_per_use: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub n: usize,
    pub per_memory: Vec<MemoryValue>,
    pub lower_c_n: f64,
    pub upper_c_n: f64,
    pub gap: f64,
    pub gap_bound: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Minimum and maximum over `candidates` of the optimized `χ_n(ω)/n`.
pub fn lower_upper_capacity(
    spec: &ChannelSpec,
    n: usize,
    candidates: &[MemoryCandidate],
    opts: &OptimizerOptions,
) -> Result<CapacityReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one memory candidate is required".into(),
        ));
    }
    let start = Instant::now();
    let values: Vec<ChiOptimum> = candidates
        .par_iter()
        .map(|c| optimize_chi_n(spec, &c.state, n, opts))
        .collect::<Result<_>>()?;
    let per_memory: Vec<MemoryValue> = candidates
        .iter()
        .zip(&values)
        .map(|(c, v)| MemoryValue {
            memory_id: c.id.clone(),
            chi_per_use: v.chi_per_use,
            converged: v.converged,
        })
        .collect();
    let lower = per_memory
        .iter()
        .map(|v| v.chi_per_use)
        .fold(f64::INFINITY, f64::min);
    let upper = per_memory
        .iter()
        .map(|v| v.chi_per_use)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CapacityReport {
        n,
        per_memory,
        lower_c_n: lower,
        upper_c_n: upper,
        gap: upper - lower,
        gap_bound: None,
        restarts: opts.restarts,
        seed: opts.seed,
        wall_time: start.elapsed(),
    })
}

/// `ε·log₂ d + log₂(e)/(n·e) + (N·log₂ d / n)·(1 − ε)`, defined for `n > N`.
pub fn convergence_gap_bound(epsilon: f64, n_epsilon: usize, d: usize, n: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if n <= n_epsilon {
        return Err(Error::InvalidArgument(format!(
            "bound needs n > N(epsilon), got n = {n}, N = {n_epsilon}"
        )));
    }
    let log_d = (d as f64).log2();
    let nf = n as f64;
    Ok(epsilon * log_d
        + std::f64::consts::LOG2_E / (nf * std::f64::consts::E)
        + (n_epsilon as f64 * log_d / nf) * (1.0 - epsilon))
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub optimizer: OptimizerOptions,
    pub mixing: MixingProbeConfig,
    /// Run even if the sampled fixed-point check fails.
    pub allow_non_fixed_point: bool,
    pub fixed_point_samples: usize,
    pub fixed_point_tol: f64,
    pub extra_candidates: Vec<MemoryCandidate>,
}

impl ExperimentOptions {
    pub fn new(epsilon: f64, optimizer: OptimizerOptions) -> Self {
        Self {
            mixing: MixingProbeConfig::new(epsilon, optimizer.seed),
            optimizer,
            allow_non_fixed_point: false,
            fixed_point_samples: 32,
            fixed_point_tol: 1e-9,
            extra_candidates: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceExperiment {
    pub fixed_point: FixedPointCheck,
    pub mixing: MixingProbeResult,
    pub reports: Vec<CapacityReport>,
}

/// Probes the mixing time, then estimates lower and upper capacities for
/// `n = 1..=n_max` and attaches the gap bound wherever `n > N(ε)`.
pub fn capacity_convergence_experiment(
    spec: &ChannelSpec,
    n_max: usize,
    opts: &ExperimentOptions,
) -> Result<ConvergenceExperiment> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let fixed_point = is_fixed_point_channel(
        spec,
        opts.fixed_point_samples,
        opts.fixed_point_tol,
        opts.optimizer.seed,
    )?;
    if !fixed_point.is_fixed_point && !opts.allow_non_fixed_point {
        return Err(Error::InvalidArgument(format!(
            "memory map depends on the input (sampled deviation {:.3e}); the experiment needs a fixed-point channel",
            fixed_point.max_deviation
        )));
    }
    let mixing = probe_mixing(spec, &opts.mixing)?;
    let mut candidates = default_memory_candidates(spec.dims().m)?;
    candidates.extend(opts.extra_candidates.iter().cloned());
    let mut reports = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut report = lower_upper_capacity(spec, n, &candidates, &opts.optimizer)?;
        if let Some(n_eps) = mixing.n_epsilon {
            if n > n_eps {
                report.gap_bound = Some(convergence_gap_bound(
                    mixing.epsilon,
                    n_eps,
                    spec.dims().q,
                    n,
                )?);
            }
        }
        reports.push(report);
    }
    Ok(ConvergenceExperiment {
        fixed_point,
        mixing,
        reports,
    })
}
