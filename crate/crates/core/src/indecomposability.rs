//! Sampled probes of how fast a memory channel forgets its initial memory state.
//!
//! Two copies of the channel are started in memory states `ω` and `σ` and
//! driven by the same signal inputs; the distance between the two memory
//! trajectories is tracked use by use. Everything here is an estimate over
//! sampled inputs and memory pairs, never a proof.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{ChannelSpec, MemoryMap};
use crate::linalg::{
    apply_kraus_on, partial_trace, trace_distance, trace_distance_mat, CMatrix, DensityMatrix,
    SpaceShape,
};
use crate::random::{derive_seed, haar_state, hilbert_schmidt_state, mixed_with_identity, sub_rng};
use crate::{Error, Result};

pub const DEFAULT_STEP_BUDGET: usize = 200;

/// Pairs closer than this are skipped when estimating contraction ratios.
pub const MIN_PAIR_DISTANCE: f64 = 1e-8;

const INPUT_SALT: u64 = 0x1;
const PAIR_SALT: u64 = 0x2;

/// Signal inputs fed to both trajectories, as consecutive blocks.
///
/// Each block is a state on `Q^b`; the blocks are uncorrelated with one another.
/// Per-use product inputs are blocks with `b = 1`.
#[derive(Debug, Clone)]
pub struct InputSequence {
    blocks: Vec<DensityMatrix>,
}

impl InputSequence {
    pub fn product(states: Vec<DensityMatrix>) -> Self {
        Self { blocks: states }
    }

    pub fn blocks(blocks: Vec<DensityMatrix>) -> Self {
        Self { blocks }
    }

    pub fn block_states(&self) -> &[DensityMatrix] {
        &self.blocks
    }
}

/// Seeded generator of input sequences: some per-use product sequences and some
/// made of entangled blocks over `entangled_block` uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputSampler {
    pub seed: u64,
    pub product_sequences: usize,
    pub entangled_sequences: usize,
    pub entangled_block: usize,
}

impl InputSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            product_sequences: 4,
            entangled_sequences: 4,
            entangled_block: 3,
        }
    }

    pub fn count(&self) -> usize {
        self.product_sequences + self.entangled_sequences
    }

    /// Sequences covering `steps` uses of a `d_q`-dimensional signal.
    pub fn sample(&self, d_q: usize, steps: usize) -> Result<Vec<InputSequence>> {
        let block = self.entangled_block.max(1);
        crate::config::check_dimension(d_q.pow(block as u32))?;
        let seed = derive_seed(self.seed, INPUT_SALT);
        let single = SpaceShape::single(d_q);
        let wide = SpaceShape::uniform(d_q, block);
        let mut out = Vec::with_capacity(self.count());
        for s in 0..self.count() {
            let mut rng = sub_rng(seed, s as u64);
            if s < self.product_sequences {
                let states = (0..steps)
                    .map(|i| {
                        if (s + i) % 2 == 0 {
                            haar_state(&mut rng, &single)
                        } else {
                            hilbert_schmidt_state(&mut rng, &single)
                        }
                    })
                    .collect();
                out.push(InputSequence::product(states));
            } else {
                let blocks = (0..steps.div_ceil(block))
                    .map(|_| haar_state(&mut rng, &wide))
                    .collect();
                out.push(InputSequence::blocks(blocks));
            }
        }
        Ok(out)
    }
}

/// Seeded generator of memory-state pairs: every pair of distinct basis states
/// followed by `random_pairs` pairs of Haar-random pure states and mixtures of
/// Haar-random states with the maximally mixed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSampler {
    pub seed: u64,
    pub random_pairs: usize,
    pub include_basis_pairs: bool,
}

impl PairSampler {
    pub fn new(seed: u64, random_pairs: usize) -> Self {
        Self {
            seed,
            random_pairs,
            include_basis_pairs: true,
        }
    }

    pub fn sample(&self, d_m: usize) -> Result<Vec<(DensityMatrix, DensityMatrix)>> {
        let mut out = Vec::new();
        if self.include_basis_pairs {
            for i in 0..d_m {
                for j in i + 1..d_m {
                    out.push((DensityMatrix::basis(i, d_m)?, DensityMatrix::basis(j, d_m)?));
                }
            }
        }
        let seed = derive_seed(self.seed, PAIR_SALT);
        let shape = SpaceShape::single(d_m);
        for s in 0..self.random_pairs {
            let mut rng = sub_rng(seed, s as u64);
            let pair = match s % 3 {
                0 => (haar_state(&mut rng, &shape), haar_state(&mut rng, &shape)),
                1 => (
                    mixed_with_identity(&mut rng, &shape),
                    mixed_with_identity(&mut rng, &shape),
                ),
                _ => (
                    haar_state(&mut rng, &shape),
                    mixed_with_identity(&mut rng, &shape),
                ),
            };
            out.push(pair);
        }
        Ok(out)
    }
}

/// Memory states after each of the first `steps` uses when the channel starts in
/// `memory` and is driven by `inputs`.
pub fn drive_memory(
    spec: &ChannelSpec,
    inputs: &InputSequence,
    memory: &DensityMatrix,
    steps: usize,
) -> Result<Vec<CMatrix>> {
    let dims = spec.dims();
    spec.check_use_budget(steps)?;
    if memory.dim() != dims.m {
        return Err(Error::DimensionMismatch(format!(
            "memory of dimension {}, expected {}",
            memory.dim(),
            dims.m
        )));
    }
    let mut out = Vec::with_capacity(steps);
    let mut mem = memory.mat().clone();
    let mut blocks = inputs.blocks.iter();
    while out.len() < steps {
        let block = blocks.next().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "input sequence covers {} uses, {steps} requested",
                out.len()
            ))
        })?;
        let uses = block_uses(block, dims.q)?;
        crate::config::check_dimension(block.dim() * dims.m)?;
        let mut x = block.mat().kron(&mem)?;
        let mut factors = vec![dims.q; uses];
        factors.push(dims.m);
        for _ in 0..uses {
            let step = out.len();
            let shape = SpaceShape::new(factors.clone())?;
            let last = factors.len() - 1;
            x = apply_kraus_on(&x, &shape, spec.kraus(step)?, &[0, last])?;
            x = partial_trace(&x, &shape, &(1..=last).collect::<Vec<_>>())?;
            factors.remove(0);
            let shape = SpaceShape::new(factors.clone())?;
            mem = partial_trace(&x, &shape, &[factors.len() - 1])?;
            out.push(mem.clone());
            if out.len() == steps {
                break;
            }
        }
    }
    Ok(out)
}

fn block_uses(block: &DensityMatrix, d_q: usize) -> Result<usize> {
    let dims = block.shape().dims();
    if dims.iter().all(|&d| d == d_q) {
        return Ok(dims.len());
    }
    // An unlabelled block of dimension d_q^b.
    crate::channels::per_use_count(block.dim(), d_q)
}

/// `‖ω_M(k) − σ_M(k)‖` for `k = 1..=n`, both trajectories driven by the same inputs.
pub fn memory_trajectory_distance(
    spec: &ChannelSpec,
    inputs: &[DensityMatrix],
    omega: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
) -> Result<Vec<f64>> {
    if inputs.len() < n {
        return Err(Error::InvalidArgument(format!(
            "{} inputs for {n} uses",
            inputs.len()
        )));
    }
    if let Some(bad) = inputs.iter().find(|s| s.dim() != spec.dims().q) {
        return Err(Error::DimensionMismatch(format!(
            "input of dimension {}, expected {}",
            bad.dim(),
            spec.dims().q
        )));
    }
    trajectory_distance(
        spec,
        &InputSequence::product(inputs[..n].to_vec()),
        omega,
        sigma,
        n,
    )
}

/// Like [`memory_trajectory_distance`] for an arbitrary block input sequence.
pub fn trajectory_distance(
    spec: &ChannelSpec,
    inputs: &InputSequence,
    omega: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
) -> Result<Vec<f64>> {
    let a = drive_memory(spec, inputs, omega, n)?;
    let b = drive_memory(spec, inputs, sigma, n)?;
    a.iter()
        .zip(&b)
        .map(|(x, y)| trace_distance_mat(x, y))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub max_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingProbeResult {
    pub epsilon: f64,
    /// First step from which the largest sampled distance stays within `epsilon`
    /// for the rest of the budget; `None` if that never happens.
    pub n_epsilon: Option<usize>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub samples_used: usize,
}

/// Inputs to [`probe_mixing`] with the usual defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingProbeConfig {
    pub epsilon: f64,
    pub step_budget: usize,
    pub inputs: InputSampler,
    pub pairs: PairSampler,
}

impl MixingProbeConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            step_budget: DEFAULT_STEP_BUDGET,
            inputs: InputSampler::new(seed),
            pairs: PairSampler::new(seed, 6),
        }
    }
}

pub fn probe_mixing(spec: &ChannelSpec, config: &MixingProbeConfig) -> Result<MixingProbeResult> {
    estimate_mixing_time(
        spec,
        config.epsilon,
        &config.inputs,
        &config.pairs,
        config.step_budget,
    )
}

/// Largest memory-trajectory distance per step over all sampled input sequences
/// and memory pairs, and the first step after which it stays within `epsilon`.
///
/// For channels with a finite list of per-step unitaries the budget is capped at
/// the number of steps they define.
pub fn estimate_mixing_time(
    spec: &ChannelSpec,
    epsilon: f64,
    inputs: &InputSampler,
    pairs: &PairSampler,
    step_budget: usize,
) -> Result<MixingProbeResult> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if step_budget == 0 {
        return Err(Error::InvalidArgument(
            "step budget must be at least 1".into(),
        ));
    }
    let steps = spec
        .fixed_step_count()
        .map_or(step_budget, |len| len.min(step_budget));
    let dims = spec.dims();
    let sequences = inputs.sample(dims.q, steps)?;
    let memory_pairs = pairs.sample(dims.m)?;
    let tasks: Vec<(usize, usize)> = (0..sequences.len())
        .flat_map(|s| (0..memory_pairs.len()).map(move |p| (s, p)))
        .collect();
    let runs: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(s, p)| {
            let (omega, sigma) = &memory_pairs[p];
            trajectory_distance(spec, &sequences[s], omega, sigma, steps)
        })
        .collect::<Result<_>>()?;

    let mut max = vec![0.0f64; steps];
    for run in &runs {
        for (m, d) in max.iter_mut().zip(run) {
            *m = m.max(*d);
        }
    }
    let trajectory: Vec<TrajectoryPoint> = max
        .iter()
        .enumerate()
        .map(|(k, &d)| TrajectoryPoint {
            step: k + 1,
            max_distance: d.clamp(0.0, 1.0),
        })
        .collect();
    let tail_start = trajectory
        .iter()
        .rposition(|p| p.max_distance > epsilon)
        .map_or(0, |i| i + 1);
    let n_epsilon = (tail_start < steps).then_some(tail_start + 1);
    Ok(MixingProbeResult {
        epsilon,
        n_epsilon,
        trajectory,
        samples_used: tasks.len(),
    })
}

#[derive(Debug, Clone)]
pub struct ContractionEstimate {
    pub sup_ratio: f64,
    pub argmax: Option<(DensityMatrix, DensityMatrix)>,
    /// Pairs that entered the supremum (pairs closer than [`MIN_PAIR_DISTANCE`] are excluded).
    pub samples_used: usize,
}

/// Sampled supremum of `‖Φω − Φσ‖ / ‖ω − σ‖` over the pairs drawn by `pairs`,
/// with `samples` overriding its random pair count.
pub fn contraction_coefficient(
    map: &MemoryMap,
    pairs: &PairSampler,
    samples: usize,
) -> Result<ContractionEstimate> {
    let sampler = PairSampler {
        random_pairs: samples,
        ..*pairs
    };
    let candidates = sampler.sample(map.memory_dim())?;
    let ratios: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|(omega, sigma)| {
            let before = trace_distance(omega, sigma)?;
            if before < MIN_PAIR_DISTANCE {
                return Ok(None);
            }
            let after = trace_distance(&map.apply(omega)?, &map.apply(sigma)?)?;
            Ok(Some(after / before))
        })
        .collect::<Result<_>>()?;
    let mut best = ContractionEstimate {
        sup_ratio: 0.0,
        argmax: None,
        samples_used: 0,
    };
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = r {
            best.samples_used += 1;
            if best.argmax.is_none() || *r > best.sup_ratio {
                best.sup_ratio = *r;
                best.argmax = Some(candidates[i].clone());
            }
        }
    }
    Ok(best)
}

/// Largest `‖Λ[ω]ρ − Λ[σ]ρ‖ − ‖ω − σ‖` over `trials` random signal states and
/// memory pairs, using the first use of the channel.
pub fn check_memory_continuity(spec: &ChannelSpec, trials: usize, seed: u64) -> Result<f64> {
    let dims = spec.dims();
    let q_shape = SpaceShape::single(dims.q);
    let m_shape = SpaceShape::single(dims.m);
    let kraus = spec.kraus(0)?;
    let violations: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sub_rng(seed, t as u64);
            let rho = if t % 2 == 0 {
                haar_state(&mut rng, &q_shape)
            } else {
                hilbert_schmidt_state(&mut rng, &q_shape)
            };
            let (omega, sigma) = match t % 3 {
                0 => (
                    haar_state(&mut rng, &m_shape),
                    haar_state(&mut rng, &m_shape),
                ),
                1 => (
                    hilbert_schmidt_state(&mut rng, &m_shape),
                    hilbert_schmidt_state(&mut rng, &m_shape),
                ),
                _ => (
                    mixed_with_identity(&mut rng, &m_shape),
                    haar_state(&mut rng, &m_shape),
                ),
            };
            let out_a = single_use_output(kraus, &rho, &omega)?;
            let out_b = single_use_output(kraus, &rho, &sigma)?;
            Ok(trace_distance_mat(&out_a, &out_b)? - trace_distance(&omega, &sigma)?)
        })
        .collect::<Result<_>>()?;
    Ok(violations.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Signal output `Λ[ω]ρ` of one use.
pub fn single_use_output(
    kraus: &[CMatrix],
    rho: &DensityMatrix,
    omega: &DensityMatrix,
) -> Result<CMatrix> {
    let shape = SpaceShape::new(vec![rho.dim(), omega.dim()])?;
    let x = rho.mat().kron(omega.mat())?;
    let y = apply_kraus_on(&x, &shape, kraus, &[0, 1])?;
    partial_trace(&y, &shape, &[0])
}
