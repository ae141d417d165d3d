//! Search for the classical–quantum ensemble with the largest Holevo quantity at
//! the output of `n` channel uses.
//!
//! Probabilities and signal states are optimized alternately: projected
//! gradient ascent with backtracking on the (concave) probability problem, and
//! a coordinate search with a shrinking step on the real and imaginary parts
//! of the state vectors.

use rayon::prelude::*;
use serde::Serialize;

use super::transfer::Transfer;
use crate::channels::{apply_memory_channel, ChannelSpec};
use crate::entropics::{entropy_of_spectrum, holevo_chi, CQEnsemble};
use crate::linalg::{
    hermitian_eig, hermitian_eigvals_tridiagonal as hermitian_eigvals, CMatrix, DensityMatrix,
    SpaceShape, C64, ZERO,
};
use crate::random::{derive_seed, haar_unitary, haar_vector, sub_rng};
use crate::{Error, Result};

/// Ensembles are capped at this many members unless set explicitly.
pub const DEFAULT_ENSEMBLE_CAP: usize = 16;

const PROB_IMPROVEMENT: f64 = 1e-8;
const PROB_MAX_ITERATIONS: usize = 500;
const BACKTRACK_LIMIT: usize = 40;
const ACCEPT_GAIN: f64 = 1e-13;
const LOG_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    /// `None` means `min(d_q^n, 16)`.
    pub ensemble_size: Option<usize>,
    pub product_only: bool,
    pub seed: u64,
    pub initial_step: f64,
    pub step_floor: f64,
    pub shrink: f64,
    /// Members with smaller weight are left out of the state search.
    pub prob_tol: f64,
    pub max_sweeps: usize,
    /// After the local search settles, the weakest member is reseeded this many
    /// times; a reseed is kept only if it raises `χ`.
    pub renewals: usize,
    /// Random states drawn per reseed; the one farthest (in relative entropy)
    /// from the current average output is used.
    pub renewal_samples: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            ensemble_size: None,
            product_only: false,
            seed: 0,
            initial_step: 0.25,
            step_floor: 1e-4,
            shrink: 0.5,
            prob_tol: 1e-8,
            max_sweeps: 400,
            renewals: 2,
            renewal_samples: 8,
        }
    }
}

impl OptimizerOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn ensemble_size_for(&self, d_q: usize, n: usize) -> usize {
        self.ensemble_size
            .unwrap_or_else(|| {
                d_q.checked_pow(n as u32)
                    .unwrap_or(usize::MAX)
                    .min(DEFAULT_ENSEMBLE_CAP)
            })
            .max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument(
                "at least one restart is required".into(),
            ));
        }
        if self.ensemble_size == Some(0) {
            return Err(Error::InvalidArgument(
                "ensemble size must be at least 1".into(),
            ));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "shrink factor {} not in (0, 1)",
                self.shrink
            )));
        }
        if !(self.step_floor > 0.0 && self.initial_step >= self.step_floor) {
            return Err(Error::InvalidArgument(format!(
                "step schedule {} -> {} is not a positive shrinking range",
                self.initial_step, self.step_floor
            )));
        }
        Ok(())
    }
}

/// An ensemble of pure signal states on `Q^n` with probabilities.
///
/// Each state is stored as real coordinates `[re₀, im₀, re₁, im₁, …]`; product
/// ensembles store one block of `2·d_q` coordinates per use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleParameterization {
    pub n: usize,
    pub d_q: usize,
    pub product: bool,
    pub probs: Vec<f64>,
    pub state_params: Vec<Vec<f64>>,
}

impl EnsembleParameterization {
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    /// Normalized state vector of member `i` on `Q^n`.
    pub fn state_vector(&self, i: usize) -> Vec<C64> {
        let p = &self.state_params[i];
        let factors: Vec<Vec<C64>> = if self.product {
            p.chunks(2 * self.d_q).map(from_coords).collect()
        } else {
            vec![from_coords(p)]
        };
        let mut v = kron_vectors(&factors);
        normalize(&mut v);
        v
    }

    pub fn states(&self) -> Result<Vec<DensityMatrix>> {
        (0..self.m())
            .map(|i| {
                DensityMatrix::pure(&self.state_vector(i), SpaceShape::uniform(self.d_q, self.n))
            })
            .collect()
    }
}

fn from_coords(c: &[f64]) -> Vec<C64> {
    c.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

fn to_coords(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

fn kron_vectors(factors: &[Vec<C64>]) -> Vec<C64> {
    factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, f| {
        acc.iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect()
    })
}

/// Result of [`optimize_chi_n`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiOptimum {
    /// Holevo quantity of `best` divided by `n`, evaluated by pushing the
    /// ensemble through the channel directly.
    pub chi_per_use: f64,
    pub best: EnsembleParameterization,
    /// Whether the best restart reached the step floor within the sweep limit.
    pub converged: bool,
    pub restart_values: Vec<f64>,
}

/// Holevo quantity of a fixed ensemble at the output of `n` uses started in `memory`.
pub fn evaluate_ensemble_chi(
    spec: &ChannelSpec,
    memory: &DensityMatrix,
    n: usize,
    probs: &[f64],
    states: &[DensityMatrix],
) -> Result<f64> {
    let outputs = states
        .iter()
        .map(|s| apply_memory_channel(spec, s, memory, n))
        .collect::<Result<Vec<_>>>()?;
    holevo_chi(&CQEnsemble::new(probs.to_vec(), outputs)?)
}

/// Best Holevo quantity per use found over `opts.restarts` seeded restarts.
pub fn optimize_chi_n(
    spec: &ChannelSpec,
    memory: &DensityMatrix,
    n: usize,
    opts: &OptimizerOptions,
) -> Result<ChiOptimum> {
    opts.validate()?;
    let transfer = Transfer::new(spec, memory, n)?;
    let d_q = spec.dims().q;
    let m = opts.ensemble_size_for(d_q, n);
    let base_seed = derive_seed(opts.seed, n as u64);
    let runs: Vec<(f64, EnsembleParameterization, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sub_rng(base_seed, r as u64);
            let mut search = Search::new(&transfer, d_q, n, m, opts, &mut rng)?;
            let mut converged = search.run(opts)?;
            for _ in 0..opts.renewals {
                match search.renew(opts, &mut rng)? {
                    Some(c) => converged = c,
                    None => break,
                }
            }
            Ok((search.chi, search.parameters(), converged))
        })
        .collect::<Result<_>>()?;
    let restart_values: Vec<f64> = runs.iter().map(|r| r.0 / n as f64).collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = i;
        }
    }
    let (_, params, converged) = runs.into_iter().nth(best).expect("at least one restart");
    let chi = evaluate_ensemble_chi(spec, memory, n, &params.probs, &params.states()?)?;
    let cap = (d_q as f64).log2();
    Ok(ChiOptimum {
        chi_per_use: (chi / n as f64).clamp(0.0, cap),
        best: params,
        converged,
        restart_values,
    })
}

#[derive(Clone)]
struct Member {
    factors: Vec<Vec<C64>>,
    x: Vec<C64>,
    rows: Vec<CMatrix>,
    sigma: CMatrix,
    entropy: f64,
}

#[derive(Clone)]
struct Search<'a> {
    transfer: &'a Transfer,
    d_q: usize,
    n: usize,
    product: bool,
    members: Vec<Member>,
    probs: Vec<f64>,
    chi: f64,
}

impl<'a> Search<'a> {
    fn new(
        transfer: &'a Transfer,
        d_q: usize,
        n: usize,
        m: usize,
        opts: &OptimizerOptions,
        rng: &mut crate::random::SeededRng,
    ) -> Result<Self> {
        // Members start on the columns of Haar-random unitaries (one per use for
        // product ensembles); any beyond the dimension start as independent vectors.
        let dim = transfer.dim();
        let members = if opts.product_only {
            let bases: Vec<CMatrix> = (0..n).map(|_| haar_unitary(rng, d_q)).collect();
            (0..m)
                .map(|i| {
                    let factors = if i < dim {
                        (0..n)
                            .map(|u| bases[u].column((i / d_q.pow((n - 1 - u) as u32)) % d_q))
                            .collect()
                    } else {
                        (0..n).map(|_| haar_vector(rng, d_q)).collect()
                    };
                    Member::new(transfer, factors)
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            let basis = haar_unitary(rng, dim);
            (0..m)
                .map(|i| {
                    let v = if i < dim {
                        basis.column(i)
                    } else {
                        haar_vector(rng, dim)
                    };
                    Member::new(transfer, vec![v])
                })
                .collect::<Result<Vec<_>>>()?
        };
        let mut s = Self {
            transfer,
            d_q,
            n,
            product: opts.product_only,
            members,
            probs: vec![1.0 / m as f64; m],
            chi: 0.0,
        };
        s.chi = s.chi_for(&s.probs)?;
        Ok(s)
    }

    fn parameters(&self) -> EnsembleParameterization {
        EnsembleParameterization {
            n: self.n,
            d_q: self.d_q,
            product: self.product,
            probs: self.probs.clone(),
            state_params: self
                .members
                .iter()
                .map(|mb| mb.factors.iter().flat_map(|f| to_coords(f)).collect())
                .collect(),
        }
    }

    fn average(&self, probs: &[f64]) -> CMatrix {
        let d = self.transfer.dim();
        let mut avg = CMatrix::zeros(d, d);
        for (p, mb) in probs.iter().zip(&self.members) {
            if *p > 0.0 {
                avg.add_scaled(&mb.sigma, C64::new(*p, 0.0));
            }
        }
        avg
    }

    fn chi_for(&self, probs: &[f64]) -> Result<f64> {
        let mut chi = entropy_of_spectrum(&hermitian_eigvals(&self.average(probs))?)?;
        for (p, mb) in probs.iter().zip(&self.members) {
            chi -= p * mb.entropy;
        }
        Ok(chi)
    }

    /// Alternates probability and state updates until the state step falls
    /// below the floor; returns whether that happened within the sweep limit.
    fn run(&mut self, opts: &OptimizerOptions) -> Result<bool> {
        self.update_probabilities()?;
        let mut step = opts.initial_step;
        for _ in 0..opts.max_sweeps {
            if step < opts.step_floor {
                return Ok(true);
            }
            let improved = self.state_sweep(step, opts.prob_tol)?;
            self.update_probabilities()?;
            if !improved {
                step *= opts.shrink;
            }
        }
        Ok(step < opts.step_floor)
    }

    /// Replaces the lowest-weight member by the random state whose output is
    /// farthest from the current average and reruns the search. Returns the new
    /// convergence flag if `χ` went up, otherwise restores the previous state.
    fn renew(
        &mut self,
        opts: &OptimizerOptions,
        rng: &mut crate::random::SeededRng,
    ) -> Result<Option<bool>> {
        let m = self.members.len();
        if m < 2 || opts.renewal_samples == 0 {
            return Ok(None);
        }
        let weakest = (0..m).fold(0, |best, i| {
            if self.probs[i] < self.probs[best] {
                i
            } else {
                best
            }
        });
        let log_avg =
            hermitian_eig(&self.average(&self.probs))?.map_values(|l| l.max(LOG_FLOOR).log2());
        let mut chosen: Option<(f64, Member)> = None;
        for _ in 0..opts.renewal_samples {
            let factors = if self.product {
                (0..self.n).map(|_| haar_vector(rng, self.d_q)).collect()
            } else {
                vec![haar_vector(rng, self.transfer.dim())]
            };
            let candidate = Member::new(self.transfer, factors)?;
            let divergence = -trace_product(&candidate.sigma, &log_avg) - candidate.entropy;
            if chosen.as_ref().is_none_or(|(d, _)| divergence > *d) {
                chosen = Some((divergence, candidate));
            }
        }
        let snapshot = self.clone();
        let (_, member) = chosen.expect("at least one sample");
        let freed = self.probs[weakest];
        self.probs[weakest] = 0.0;
        if freed < 1.0 {
            self.probs.iter_mut().for_each(|p| *p /= 1.0 - freed);
        }
        self.members[weakest] = member;
        self.chi = self.chi_for(&self.probs)?;
        let converged = self.run(opts)?;
        if self.chi > snapshot.chi + PROB_IMPROVEMENT {
            Ok(Some(converged))
        } else {
            *self = snapshot;
            Ok(None)
        }
    }

    /// Projected gradient ascent on `χ(p)` with backtracking; each accepted step
    /// increases `χ`, and the loop stops once the gain drops below `1e-8`.
    fn update_probabilities(&mut self) -> Result<()> {
        let m = self.members.len();
        if m == 1 {
            return Ok(());
        }
        let mut t = 1.0;
        for _ in 0..PROB_MAX_ITERATIONS {
            let avg = self.average(&self.probs);
            let eig = hermitian_eig(&avg)?;
            let log_avg = eig.map_values(|l| l.max(LOG_FLOOR).log2());
            let grad: Vec<f64> = self
                .members
                .iter()
                .map(|mb| -trace_product(&mb.sigma, &log_avg) - mb.entropy)
                .collect();
            let mut accepted = None;
            let mut trial_t = t * 2.0;
            for _ in 0..BACKTRACK_LIMIT {
                let candidate: Vec<f64> = project_to_simplex(
                    &self
                        .probs
                        .iter()
                        .zip(&grad)
                        .map(|(p, g)| p + trial_t * g)
                        .collect::<Vec<_>>(),
                );
                let chi = self.chi_for(&candidate)?;
                if chi > self.chi {
                    accepted = Some((candidate, chi));
                    break;
                }
                trial_t *= 0.5;
            }
            match accepted {
                Some((p, chi)) => {
                    let gain = chi - self.chi;
                    self.probs = p;
                    self.chi = chi;
                    t = trial_t;
                    if gain < PROB_IMPROVEMENT {
                        break;
                    }
                }
                None => break,
            }
        }
        Ok(())
    }

    /// One pass of ± coordinate moves over every member. Members whose weight
    /// is negligible cannot change `χ`; they climb `D(σ_i‖σ̄)` instead, which is
    /// the rate at which `χ` would grow if weight moved onto them.
    fn state_sweep(&mut self, step: f64, prob_tol: f64) -> Result<bool> {
        // Members are updated incrementally between sweeps; rebuild them to shed round-off.
        for i in 0..self.members.len() {
            self.members[i] = Member::new(self.transfer, self.members[i].factors.clone())?;
        }
        self.chi = self.chi_for(&self.probs)?;
        let mut improved = false;
        for i in 0..self.members.len() {
            let dormant = self.probs[i] <= prob_tol;
            // Only member i moves below, so the rest of the ensemble stays fixed.
            let log_avg = if dormant {
                Some(
                    hermitian_eig(&self.average(&self.probs))?
                        .map_values(|l| l.max(LOG_FLOOR).log2()),
                )
            } else {
                None
            };
            let (rest_avg, rest_entropy) = self.without(i);
            for u in 0..self.members[i].factors.len() {
                for c in 0..self.members[i].factors[u].len() {
                    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                        let mv = self.coordinate_move(i, u, c, unit);
                        improved |= match &log_avg {
                            Some(log_avg) => self.try_dormant_coordinate(i, &mv, step, log_avg)?,
                            None => self.try_coordinate(i, &mv, step, &rest_avg, rest_entropy)?,
                        };
                    }
                }
            }
        }
        Ok(improved)
    }

    /// Weighted average output and weighted entropy of every member except `i`.
    fn without(&self, i: usize) -> (CMatrix, f64) {
        let mut avg = self.average(&self.probs);
        avg.add_scaled(&self.members[i].sigma, C64::new(-self.probs[i], 0.0));
        let entropy = self
            .probs
            .iter()
            .zip(&self.members)
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (q, other))| q * other.entropy)
            .sum();
        (avg, entropy)
    }

    fn coordinate_move(&self, i: usize, u: usize, c: usize, unit: C64) -> Move {
        let mb = &self.members[i];
        let phi = direction(&mb.factors, u, c, unit);
        let cross = self.transfer.image_from_rows(&phi, &mb.rows);
        let cross = &cross + &cross.adjoint();
        let quad = self.transfer.image_sparse(&phi, &phi);
        let overlap: f64 = phi.iter().map(|(a, z)| (mb.x[*a].conj() * z).re).sum();
        let phi_norm: f64 = phi.iter().map(|(_, z)| z.norm_sqr()).sum();
        Move {
            u,
            c,
            unit,
            phi,
            cross,
            quad,
            overlap,
            phi_norm,
        }
    }

    fn try_dormant_coordinate(
        &mut self,
        i: usize,
        mv: &Move,
        step: f64,
        log_avg: &CMatrix,
    ) -> Result<bool> {
        let mb = &self.members[i];
        let current = -trace_product(&mb.sigma, log_avg) - mb.entropy;
        for delta in [step, -step] {
            let sigma = mv.output(&mb.sigma, delta);
            let entropy = entropy_of_spectrum(&hermitian_eigvals(&sigma)?)?;
            let divergence = -trace_product(&sigma, log_avg) - entropy;
            if divergence > current + ACCEPT_GAIN {
                self.members[i] = mb.shifted(self.transfer, mv, delta, sigma, entropy);
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn try_coordinate(
        &mut self,
        i: usize,
        mv: &Move,
        step: f64,
        rest_avg: &CMatrix,
        rest_entropy: f64,
    ) -> Result<bool> {
        let p = self.probs[i];
        let mb = &self.members[i];
        for delta in [step, -step] {
            let sigma = mv.output(&mb.sigma, delta);
            let entropy = entropy_of_spectrum(&hermitian_eigvals(&sigma)?)?;
            let mut avg = rest_avg.clone();
            avg.add_scaled(&sigma, C64::new(p, 0.0));
            let chi = entropy_of_spectrum(&hermitian_eigvals(&avg)?)? - rest_entropy - p * entropy;
            if chi > self.chi + ACCEPT_GAIN {
                self.members[i] = mb.shifted(self.transfer, mv, delta, sigma, entropy);
                self.chi = chi;
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Perturbation of one member along `unit·e_c` in factor `u`, with the pieces
/// of `Λ((x + δφ)(x + δφ)†)` that do not depend on `δ`.
struct Move {
    u: usize,
    c: usize,
    unit: C64,
    phi: Vec<(usize, C64)>,
    cross: CMatrix,
    quad: CMatrix,
    overlap: f64,
    phi_norm: f64,
}

impl Move {
    fn norm_sqr(&self, delta: f64) -> f64 {
        1.0 + 2.0 * delta * self.overlap + delta * delta * self.phi_norm
    }

    fn output(&self, sigma: &CMatrix, delta: f64) -> CMatrix {
        let mut out = sigma.clone();
        out.add_scaled(&self.cross, C64::new(delta, 0.0));
        out.add_scaled(&self.quad, C64::new(delta * delta, 0.0));
        out.scale_real(1.0 / self.norm_sqr(delta))
    }
}

impl Member {
    /// The member moved by `delta` along `mv`, given the output and entropy already computed for it.
    fn shifted(
        &self,
        transfer: &Transfer,
        mv: &Move,
        delta: f64,
        sigma: CMatrix,
        entropy: f64,
    ) -> Self {
        let scale = 1.0 / mv.norm_sqr(delta).sqrt();
        let mut factors = self.factors.clone();
        factors[mv.u][mv.c] += mv.unit * delta;
        normalize(&mut factors[mv.u]);
        let mut x = self.x.clone();
        for (a, z) in &mv.phi {
            x[*a] += z * delta;
        }
        x.iter_mut().for_each(|z| *z *= scale);
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(a, w)| {
                let mut w = w.clone();
                for (b, z) in &mv.phi {
                    w.add_scaled(transfer.unit_image(a, *b), z.conj() * delta);
                }
                w.scale_real(scale)
            })
            .collect();
        Self {
            factors,
            x,
            rows,
            sigma,
            entropy,
        }
    }

    fn new(transfer: &Transfer, mut factors: Vec<Vec<C64>>) -> Result<Self> {
        factors.iter_mut().for_each(|f| normalize(f));
        let x = kron_vectors(&factors);
        let rows = transfer.row_images(&x);
        let dense: Vec<(usize, C64)> = x
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, z)| *z != ZERO)
            .collect();
        let sigma = transfer.image_from_rows(&dense, &rows);
        let entropy = entropy_of_spectrum(&hermitian_eigvals(&sigma)?)?;
        Ok(Self {
            factors,
            x,
            rows,
            sigma,
            entropy,
        })
    }
}

/// Sparse vector `f₀ ⊗ … ⊗ (unit·e_c at position u) ⊗ … ⊗ f_{n-1}`.
fn direction(factors: &[Vec<C64>], u: usize, c: usize, unit: C64) -> Vec<(usize, C64)> {
    let mut entries = vec![(0usize, C64::new(1.0, 0.0))];
    for (v, f) in factors.iter().enumerate() {
        let d = f.len();
        entries = entries
            .into_iter()
            .flat_map(|(idx, z)| {
                let picks: Vec<(usize, C64)> = if v == u {
                    vec![(c, unit)]
                } else {
                    f.iter().copied().enumerate().collect()
                };
                picks.into_iter().map(move |(k, w)| (idx * d + k, z * w))
            })
            .collect();
    }
    entries
}

/// `Re Tr(AB)` for Hermitian `A`, `B`.
fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.rows();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            s += (a[(r, c)] * b[(c, r)]).re;
        }
    }
    s
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    p
}
