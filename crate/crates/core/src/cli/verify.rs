//! The property suite behind the `verify` subcommand.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    apply_memory_channel, apply_memory_channel_via_dilation, build_markov_channel, ChannelDims,
    ChannelSpec, MarkovChannelSpec, StepUnitaries,
};
use crate::entropics::{
    extend_separable, mutual_information, sample_fannes, SeparableDecomposition,
};
use crate::indecomposability::check_memory_continuity;
use crate::linalg::{hermitian_eigvals, trace_distance, DensityMatrix, SpaceShape};
use crate::random::{
    haar_state, haar_unitary, hilbert_schmidt_state, random_distribution, random_stochastic,
    sub_rng,
};
use crate::Result;

pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-8;
pub const EQUIVALENCE_TOL: f64 = 1e-9;
pub const COMPOSITION_TOL: f64 = 1e-10;
pub const CONTINUITY_TOL: f64 = 1e-9;
pub const FANNES_SLACK: f64 = 1e-9;
pub const MONOTONICITY_TOL: f64 = 1e-9;
pub const FANNES_DIMENSIONS: [usize; 5] = [2, 4, 8, 16, 32];

/// Sample sizes of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random inputs per block length for the channel under test.
    pub inputs: usize,
    /// Random channels, Markov specs and decompositions.
    pub random_channels: usize,
    pub continuity_trials: usize,
    pub fannes_pairs: usize,
    /// Largest block length; lowered to fit the dimension cap.
    pub max_uses: usize,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inputs: 10,
            random_channels: 20,
            continuity_trials: 200,
            fannes_pairs: 200,
            max_uses: 3,
        }
    }
}

/// One checked property: `value` is compared against `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl CheckResult {
    fn at_most(name: &str, value: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every check on `spec` (and on its other Markov form if `markov` is
/// given) together with the channel-independent checks on random instances.
pub fn run_suite(
    spec: &ChannelSpec,
    markov: Option<&MarkovChannelSpec>,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let seed = opts.seed;
    let counts = use_counts(spec, opts.max_uses);
    let max_uses = counts.iter().copied().max().unwrap_or(1);
    let mut checks = Vec::new();

    let (trace_err, min_eig, n_samples) = cptp_errors(spec, &counts, opts.inputs, seed)?;
    checks.push(CheckResult::at_most(
        "channel_trace_error",
        trace_err,
        TRACE_TOL,
        n_samples,
    ));
    checks.push(CheckResult::at_most(
        "channel_negativity",
        -min_eig,
        PSD_TOL,
        n_samples,
    ));

    let short = &counts[..counts.len().min(2)];
    let (composition, n_compared) = composition_error(spec, short, opts.inputs, seed ^ 0x11)?;
    checks.push(CheckResult::at_most(
        "dilation_agreement",
        composition,
        COMPOSITION_TOL,
        n_compared,
    ));

    let random = random_channel_errors(opts.random_channels, seed ^ 0x22)?;
    checks.push(CheckResult::at_most(
        "random_channels_trace_error",
        random.0,
        TRACE_TOL,
        random.2,
    ));
    checks.push(CheckResult::at_most(
        "random_channels_negativity",
        -random.1,
        PSD_TOL,
        random.2,
    ));

    if let Some(m) = markov {
        let d = markov_form_gap(m, max_uses, opts.inputs, seed ^ 0x33)?;
        checks.push(CheckResult::at_most(
            "markov_forms_agree",
            d,
            EQUIVALENCE_TOL,
            opts.inputs * max_uses,
        ));
    }
    let d = random_markov_gap(opts.random_channels, seed ^ 0x44)?;
    checks.push(CheckResult::at_most(
        "random_markov_forms_agree",
        d,
        EQUIVALENCE_TOL,
        opts.random_channels * 3,
    ));

    let c = check_memory_continuity(spec, opts.continuity_trials, seed ^ 0x55)?;
    checks.push(CheckResult::at_most(
        "memory_continuity",
        c,
        CONTINUITY_TOL,
        opts.continuity_trials,
    ));
    let c = random_continuity(opts.random_channels, opts.continuity_trials, seed ^ 0x66)?;
    checks.push(CheckResult::at_most(
        "random_memory_continuity",
        c,
        CONTINUITY_TOL,
        opts.continuity_trials,
    ));

    for (i, d) in FANNES_DIMENSIONS.iter().enumerate() {
        let s = sample_fannes(
            *d,
            opts.fannes_pairs,
            seed ^ (0x77 + i as u64),
            FANNES_SLACK,
        )?;
        checks.push(CheckResult {
            name: format!("fannes_d{d}"),
            passed: s.violations == 0,
            value: s.violations as f64,
            tolerance: 0.0,
            samples: s.pairs,
        });
    }

    let m = monotonicity_drop(opts.random_channels, seed ^ 0x88)?;
    checks.push(CheckResult::at_most(
        "separable_extension_monotone",
        m,
        MONOTONICITY_TOL,
        opts.random_channels,
    ));

    Ok(VerifyReport { checks })
}

/// Block lengths to test: `1..=wanted` within the dimension cap, or exactly the
/// step count of a channel with per-step unitaries.
fn use_counts(spec: &ChannelSpec, wanted: usize) -> Vec<usize> {
    let d = spec.dims();
    let cap = crate::config::max_dimension();
    let fits = |n: usize| d.q.saturating_pow(n as u32).saturating_mul(d.m) <= cap;
    match spec.fixed_step_count() {
        Some(steps) => vec![steps],
        None => (1..=wanted.max(1)).filter(|&n| n == 1 || fits(n)).collect(),
    }
}

fn random_input(seed: u64, stream: u64, shape: &SpaceShape) -> DensityMatrix {
    let mut rng = sub_rng(seed, stream);
    if stream.is_multiple_of(2) {
        haar_state(&mut rng, shape)
    } else {
        hilbert_schmidt_state(&mut rng, shape)
    }
}

/// Largest trace error, smallest eigenvalue and number of outputs checked.
fn cptp_errors(
    spec: &ChannelSpec,
    counts: &[usize],
    inputs: usize,
    seed: u64,
) -> Result<(f64, f64, usize)> {
    let d = spec.dims();
    let cases: Vec<(usize, usize)> = counts
        .iter()
        .flat_map(|&n| (0..inputs).map(move |i| (n, i)))
        .collect();
    let results: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(n, i)| {
            let stream = (n * inputs + i) as u64;
            let rho = random_input(seed, 2 * stream, &SpaceShape::uniform(d.q, n));
            let omega = random_input(seed, 2 * stream + 1, &SpaceShape::single(d.m));
            let out = apply_memory_channel(spec, &rho, &omega, n)?;
            let tr = (out.mat().trace().re - 1.0).abs();
            let min = hermitian_eigvals(out.mat())?.last().copied().unwrap_or(0.0);
            Ok((tr, min))
        })
        .collect::<Result<_>>()?;
    let tr = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let min = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok((tr, min, results.len()))
}

/// Largest disagreement of the two application routes and number of outputs compared.
fn composition_error(
    spec: &ChannelSpec,
    counts: &[usize],
    inputs: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let d = spec.dims();
    let cap = crate::config::max_dimension();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for &n in counts {
        if d.q.saturating_pow(n as u32).saturating_mul(d.m * d.e) > cap {
            continue;
        }
        compared += inputs;
        for i in 0..inputs {
            let stream = (n * inputs + i) as u64;
            let rho = random_input(seed, 2 * stream, &SpaceShape::uniform(d.q, n));
            let omega = random_input(seed, 2 * stream + 1, &SpaceShape::single(d.m));
            let a = apply_memory_channel(spec, &rho, &omega, n)?;
            let b = apply_memory_channel_via_dilation(spec, &rho, &omega, n)?;
            worst = worst.max(a.mat().max_abs_diff(b.mat()));
        }
    }
    Ok((worst, compared))
}

fn random_dilation(seed: u64, stream: u64) -> Result<ChannelSpec> {
    let mut rng = sub_rng(seed, stream);
    let u = haar_unitary(&mut rng, 8);
    ChannelSpec::new(ChannelDims::new(2, 2, 2)?, StepUnitaries::Repeated(u))
}

fn random_channel_errors(count: usize, seed: u64) -> Result<(f64, f64, usize)> {
    let results: Vec<(f64, f64, usize)> = (0..count)
        .into_par_iter()
        .map(|c| {
            let spec = random_dilation(seed, c as u64)?;
            cptp_errors(&spec, &[1, 2, 3], 2, seed ^ (c as u64 + 1))
        })
        .collect::<Result<_>>()?;
    Ok((
        results.iter().map(|r| r.0).fold(0.0, f64::max),
        results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        results.iter().map(|r| r.2).sum(),
    ))
}

/// Largest trace distance between the signal outputs of the two Markov forms.
pub fn markov_form_gap(
    m: &MarkovChannelSpec,
    max_uses: usize,
    inputs: usize,
    seed: u64,
) -> Result<f64> {
    let a = build_markov_channel(m, false)?;
    let b = build_markov_channel(m, true)?;
    let d_q = m.system_dim();
    let mut worst: f64 = 0.0;
    for n in 1..=max_uses {
        for i in 0..inputs {
            let rho = random_input(seed, (n * inputs + i) as u64, &SpaceShape::uniform(d_q, n));
            let x = apply_memory_channel(&a, &rho, a.initial_memory(), n)?;
            let y = apply_memory_channel(&b, &rho, b.initial_memory(), n)?;
            worst = worst.max(trace_distance(&x, &y)?);
        }
    }
    Ok(worst)
}

/// Two-label chains with random transition matrices and random qubit unitaries.
pub fn random_markov_spec(seed: u64, stream: u64) -> Result<MarkovChannelSpec> {
    let mut rng = sub_rng(seed, stream);
    let transition = random_stochastic(&mut rng, 2);
    let kraus = vec![haar_unitary(&mut rng, 2), haar_unitary(&mut rng, 2)];
    let initial = random_distribution(&mut rng, 2);
    MarkovChannelSpec::new(transition, kraus, initial)
}

fn random_markov_gap(count: usize, seed: u64) -> Result<f64> {
    let gaps: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|c| {
            markov_form_gap(
                &random_markov_spec(seed, c as u64)?,
                3,
                1,
                seed ^ (c as u64 + 1),
            )
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

fn random_continuity(count: usize, trials: usize, seed: u64) -> Result<f64> {
    let per = trials.div_ceil(count.max(1));
    let worst: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|c| {
            check_memory_continuity(
                &random_dilation(seed, c as u64)?,
                per,
                seed ^ (c as u64 + 1),
            )
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Largest `S(R:Q) − S(RR̄:Q)` over random separable decompositions.
pub fn monotonicity_drop(count: usize, seed: u64) -> Result<f64> {
    let drops: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|c| {
            let mut rng = sub_rng(seed, c as u64);
            let terms = 1 + c % 3;
            let probs = random_distribution(&mut rng, terms);
            let r_shape = SpaceShape::single(2);
            let q_shape = SpaceShape::single(2);
            let r: Vec<_> = (0..terms)
                .map(|_| hilbert_schmidt_state(&mut rng, &r_shape))
                .collect();
            let q: Vec<_> = (0..terms)
                .map(|_| hilbert_schmidt_state(&mut rng, &q_shape))
                .collect();
            let dec = SeparableDecomposition::new(probs, r, q)?;
            let before = mutual_information(&dec.state()?, &[0])?;
            let after = mutual_information(&extend_separable(&dec)?, &[0, 1])?;
            Ok(before - after)
        })
        .collect::<Result<_>>()?;
    Ok(drops.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
