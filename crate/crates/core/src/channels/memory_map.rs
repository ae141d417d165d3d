use serde::Serialize;

use super::spec::ChannelSpec;
use crate::linalg::{
    apply_kraus_on, partial_trace, trace_distance, CMatrix, DensityMatrix, SpaceShape, C64,
};
use crate::random::{haar_state, hilbert_schmidt_state, sub_rng};
use crate::{Error, Result};

/// The map `ω ↦ Tr_Q[Σ_k K_k (ρ_Q ⊗ ω) K_k†]` a single use induces on the memory
/// when the signal input is fixed to `ρ_Q`.
#[derive(Debug, Clone)]
pub struct MemoryMap {
    input: DensityMatrix,
    kraus: Vec<CMatrix>,
    d_m: usize,
}

impl MemoryMap {
    /// A map given directly by Kraus operators on the memory alone.
    pub fn from_memory_kraus(d_m: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.iter().any(|k| k.rows() != d_m || k.cols() != d_m) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must be {d_m}x{d_m}"
            )));
        }
        let mut sum = CMatrix::zeros(d_m, d_m);
        for k in &kraus {
            sum.add_scaled(&(&k.adjoint() * k), C64::new(1.0, 0.0));
        }
        let dev = sum.max_abs_diff(&CMatrix::identity(d_m));
        if dev > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving (max |ΣK†K - I| = {dev:.3e})"
            )));
        }
        Ok(Self {
            input: DensityMatrix::maximally_mixed(1),
            kraus,
            d_m,
        })
    }

    pub fn identity(d_m: usize) -> Self {
        Self::from_memory_kraus(d_m, vec![CMatrix::identity(d_m)])
            .expect("identity is trace preserving")
    }

    /// `ω ↦ I/d`.
    pub fn completely_depolarizing(d_m: usize) -> Self {
        let s = 1.0 / (d_m as f64).sqrt();
        let kraus = (0..d_m)
            .flat_map(|i| {
                (0..d_m).map(move |j| {
                    let mut k = CMatrix::zeros(d_m, d_m);
                    k[(i, j)] = C64::new(s, 0.0);
                    k
                })
            })
            .collect();
        Self::from_memory_kraus(d_m, kraus).expect("depolarizing is trace preserving")
    }

    pub fn input_state(&self) -> &DensityMatrix {
        &self.input
    }

    pub fn memory_dim(&self) -> usize {
        self.d_m
    }

    pub fn apply(&self, omega: &DensityMatrix) -> Result<DensityMatrix> {
        if omega.dim() != self.d_m {
            return Err(Error::DimensionMismatch(format!(
                "memory state of dimension {}, expected {}",
                omega.dim(),
                self.d_m
            )));
        }
        let d_q = self.input.dim();
        let shape = SpaceShape::new(vec![d_q, self.d_m])?;
        let x = self.input.mat().kron(omega.mat())?;
        let y = apply_kraus_on(&x, &shape, &self.kraus, &[0, 1])?;
        Ok(DensityMatrix::new_unchecked(
            partial_trace(&y, &shape, &[1])?,
            SpaceShape::single(self.d_m),
        ))
    }
}

/// Memory map of the first use with signal input `rho_q`.
pub fn induced_memory_map(spec: &ChannelSpec, rho_q: &DensityMatrix) -> Result<MemoryMap> {
    induced_memory_map_at(spec, rho_q, 0)
}

/// Memory map of use `step` (0-based) with signal input `rho_q`.
pub fn induced_memory_map_at(
    spec: &ChannelSpec,
    rho_q: &DensityMatrix,
    step: usize,
) -> Result<MemoryMap> {
    let dims = spec.dims();
    if rho_q.dim() != dims.q {
        return Err(Error::DimensionMismatch(format!(
            "signal state of dimension {}, expected {}",
            rho_q.dim(),
            dims.q
        )));
    }
    Ok(MemoryMap {
        input: rho_q.reshaped(SpaceShape::single(dims.q))?,
        kraus: spec.kraus(step)?.to_vec(),
        d_m: dims.m,
    })
}

/// Outcome of the sampled input-independence check on the memory map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointCheck {
    pub is_fixed_point: bool,
    pub max_deviation: f64,
    pub samples: usize,
}

/// Samples memory states and pairs of signal inputs and reports the largest
/// distance between the two memory-map images. A small deviation is necessary
/// for a fixed-point channel but does not prove it.
pub fn is_fixed_point_channel(
    spec: &ChannelSpec,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<FixedPointCheck> {
    let dims = spec.dims();
    let q_shape = SpaceShape::single(dims.q);
    let m_shape = SpaceShape::single(dims.m);
    let mut max_dev: f64 = 0.0;
    for s in 0..samples {
        let mut rng = sub_rng(seed, s as u64);
        let omega = if s % 2 == 0 {
            haar_state(&mut rng, &m_shape)
        } else {
            hilbert_schmidt_state(&mut rng, &m_shape)
        };
        let rho_a = haar_state(&mut rng, &q_shape);
        let rho_b = haar_state(&mut rng, &q_shape);
        let a = induced_memory_map(spec, &rho_a)?.apply(&omega)?;
        let b = induced_memory_map(spec, &rho_b)?.apply(&omega)?;
        max_dev = max_dev.max(trace_distance(&a, &b)?);
    }
    Ok(FixedPointCheck {
        is_fixed_point: max_dev <= tol,
        max_deviation: max_dev,
        samples,
    })
}
