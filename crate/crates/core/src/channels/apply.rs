//! Applying memoryless, product and memory channels to states.

use super::spec::ChannelSpec;
use crate::linalg::{
    apply_kraus_on, conjugate_on, partial_trace, CMatrix, DensityMatrix, SpaceShape,
};
use crate::{Error, Result};

/// `Tr_E[U (ρ ⊗ |0⟩⟨0|_E) U†]` for a unitary on `Q ⊗ E`.
pub fn apply_memoryless(u_qe: &CMatrix, rho_q: &DensityMatrix) -> Result<DensityMatrix> {
    let d_q = rho_q.dim();
    let d_e = env_dim(u_qe, d_q)?;
    let joint = rho_q.mat().kron(&CMatrix::basis_projector(0, d_e))?;
    let shape = SpaceShape::new(vec![d_q, d_e])?;
    let out = conjugate_on(&joint, &shape, u_qe, &[0, 1])?;
    Ok(DensityMatrix::new_unchecked(
        partial_trace(&out, &shape, &[0])?,
        rho_q.shape().clone(),
    ))
}

/// `(Λ ⊗ … ⊗ Λ) ρ` on `n` uses, adjoining and tracing a fresh environment per use.
pub fn apply_product_channel(
    u_qe: &CMatrix,
    rho_qn: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    let d_q = per_use_dim(rho_qn.dim(), n)?;
    if n == 0 {
        return Ok(rho_qn.clone());
    }
    let d_e = env_dim(u_qe, d_q)?;
    let mut state = rho_qn.mat().clone();
    let mut dims = vec![d_q; n];
    dims.push(d_e);
    let shape = SpaceShape::new(dims)?;
    let keep: Vec<usize> = (0..n).collect();
    let env = CMatrix::basis_projector(0, d_e);
    for i in 0..n {
        let joint = state.kron(&env)?;
        let evolved = conjugate_on(&joint, &shape, u_qe, &[i, n])?;
        state = partial_trace(&evolved, &shape, &keep)?;
    }
    Ok(DensityMatrix::new_unchecked(
        state,
        SpaceShape::uniform(d_q, n),
    ))
}

/// Output on `Q^n` of `n` uses of a memory channel started in `memory`.
pub fn apply_memory_channel(
    spec: &ChannelSpec,
    rho_qn: &DensityMatrix,
    memory: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    if n == 0 {
        return Ok(rho_qn.clone());
    }
    let joint = evolve_joint(spec, rho_qn, memory, n)?;
    let shape = joint_shape(spec, n);
    let keep: Vec<usize> = (0..n).collect();
    Ok(DensityMatrix::new_unchecked(
        partial_trace(&joint, &shape, &keep)?,
        SpaceShape::uniform(spec.dims().q, n),
    ))
}

/// Memory state `ω_M(n, ρ)` after `n` uses.
pub fn memory_state_after(
    spec: &ChannelSpec,
    rho_qn: &DensityMatrix,
    memory: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    if n == 0 {
        check_memory(spec, memory)?;
        return memory.reshaped(SpaceShape::single(spec.dims().m));
    }
    let joint = evolve_joint(spec, rho_qn, memory, n)?;
    let shape = joint_shape(spec, n);
    Ok(DensityMatrix::new_unchecked(
        partial_trace(&joint, &shape, &[n])?,
        SpaceShape::single(spec.dims().m),
    ))
}

/// Memory states after each of the first `n` uses, from one joint evolution.
pub fn memory_trajectory(
    spec: &ChannelSpec,
    rho_qn: &DensityMatrix,
    memory: &DensityMatrix,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    spec.check_use_budget(n)?;
    check_input(spec, rho_qn, n)?;
    check_memory(spec, memory)?;
    let mut x = rho_qn.mat().kron(memory.mat())?;
    let shape = joint_shape(spec, n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        x = apply_kraus_on(&x, &shape, spec.kraus(i)?, &[i, n])?;
        out.push(DensityMatrix::new_unchecked(
            partial_trace(&x, &shape, &[n])?,
            SpaceShape::single(spec.dims().m),
        ));
    }
    Ok(out)
}

/// Same output as [`apply_memory_channel`], computed by literally adjoining each
/// environment, conjugating with the dilation unitary and tracing it out.
pub fn apply_memory_channel_via_dilation(
    spec: &ChannelSpec,
    rho_qn: &DensityMatrix,
    memory: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    if n == 0 {
        return Ok(rho_qn.clone());
    }
    spec.check_use_count(n)?;
    check_input(spec, rho_qn, n)?;
    check_memory(spec, memory)?;
    let dims = spec.dims();
    let env = CMatrix::outer(spec.env_reset(), spec.env_reset());
    let mut all = vec![dims.q; n];
    all.push(dims.m);
    all.push(dims.e);
    let wide = SpaceShape::new(all)?;
    let keep_qm: Vec<usize> = (0..=n).collect();
    let mut x = rho_qn.mat().kron(memory.mat())?;
    for i in 0..n {
        let joint = x.kron(&env)?;
        let evolved = conjugate_on(&joint, &wide, spec.unitary(i)?, &[i, n, n + 1])?;
        x = partial_trace(&evolved, &wide, &keep_qm)?;
    }
    let shape = joint_shape(spec, n);
    let keep: Vec<usize> = (0..n).collect();
    Ok(DensityMatrix::new_unchecked(
        partial_trace(&x, &shape, &keep)?,
        SpaceShape::uniform(dims.q, n),
    ))
}

/// Joint `Q^n ⊗ M` state after `n` uses.
pub(crate) fn evolve_joint(
    spec: &ChannelSpec,
    rho_qn: &DensityMatrix,
    memory: &DensityMatrix,
    n: usize,
) -> Result<CMatrix> {
    spec.check_use_count(n)?;
    check_input(spec, rho_qn, n)?;
    check_memory(spec, memory)?;
    let x = rho_qn.mat().kron(memory.mat())?;
    evolve_joint_mat(spec, x, n, 0)
}

/// Runs uses `first_step..first_step + n` on an arbitrary (possibly non-Hermitian)
/// operator on `Q^n ⊗ M`; the channel is linear so this also computes images of
/// operator-basis elements.
pub(crate) fn evolve_joint_mat(
    spec: &ChannelSpec,
    mut x: CMatrix,
    n: usize,
    first_step: usize,
) -> Result<CMatrix> {
    let shape = joint_shape(spec, n);
    for i in 0..n {
        x = apply_kraus_on(&x, &shape, spec.kraus(first_step + i)?, &[i, n])?;
    }
    Ok(x)
}

pub(crate) fn joint_shape(spec: &ChannelSpec, n: usize) -> SpaceShape {
    let mut dims = vec![spec.dims().q; n];
    dims.push(spec.dims().m);
    SpaceShape::new(dims).expect("positive dims")
}

fn check_input(spec: &ChannelSpec, rho_qn: &DensityMatrix, n: usize) -> Result<()> {
    let expected = spec
        .dims()
        .q
        .checked_pow(n as u32)
        .ok_or_else(|| Error::DimensionCap {
            requested: usize::MAX,
            cap: crate::config::max_dimension(),
        })?;
    if rho_qn.dim() != expected {
        return Err(Error::DimensionMismatch(format!(
            "input of dimension {} for {n} uses of a {}-dimensional system",
            rho_qn.dim(),
            spec.dims().q
        )));
    }
    crate::config::check_dimension(expected * spec.dims().m)
}

fn check_memory(spec: &ChannelSpec, memory: &DensityMatrix) -> Result<()> {
    if memory.dim() != spec.dims().m {
        return Err(Error::DimensionMismatch(format!(
            "memory of dimension {}, expected {}",
            memory.dim(),
            spec.dims().m
        )));
    }
    Ok(())
}

fn env_dim(u_qe: &CMatrix, d_q: usize) -> Result<usize> {
    if !u_qe.is_square() || d_q == 0 || !u_qe.rows().is_multiple_of(d_q) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary does not act on a {d_q}-dimensional system and an environment",
            u_qe.rows(),
            u_qe.cols()
        )));
    }
    Ok(u_qe.rows() / d_q)
}

/// Per-use dimension `d` with `d^n = total`.
pub(crate) fn per_use_dim(total: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Ok(total);
    }
    let guess = (total as f64).powf(1.0 / n as f64).round() as usize;
    for d in guess.saturating_sub(1)..=guess + 1 {
        if d > 0 && d.checked_pow(n as u32) == Some(total) {
            return Ok(d);
        }
    }
    Err(Error::DimensionMismatch(format!(
        "dimension {total} is not an {n}-th power"
    )))
}

/// Number of uses `n` with `d^n = total`.
pub(crate) fn per_use_count(total: usize, d: usize) -> Result<usize> {
    let mut n = 0;
    let mut acc = 1usize;
    while acc < total && d > 1 {
        acc = acc.saturating_mul(d);
        n += 1;
    }
    if acc != total || d == 0 {
        return Err(Error::DimensionMismatch(format!(
            "dimension {total} is not a power of {d}"
        )));
    }
    Ok(n)
}
