use serde::{Deserialize, Serialize};

use crate::linalg::{embed, CMatrix, DensityMatrix, SpaceShape, C64, ONE, ZERO};
use crate::{Error, Result};

/// Unitarity tolerance for dilation unitaries.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Factor dimensions of the system, memory and environment spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelDims {
    pub q: usize,
    pub m: usize,
    pub e: usize,
}

impl ChannelDims {
    pub fn new(q: usize, m: usize, e: usize) -> Result<Self> {
        if q == 0 || m == 0 || e == 0 {
            return Err(Error::InvalidArgument(format!(
                "channel dimensions must be positive, got q={q} m={m} e={e}"
            )));
        }
        Ok(Self { q, m, e })
    }

    /// Dimension of `Q ⊗ M ⊗ E`.
    pub fn total(&self) -> usize {
        self.q * self.m * self.e
    }

    /// Shape of `Q ⊗ M ⊗ E`.
    pub fn step_shape(&self) -> SpaceShape {
        SpaceShape::new(vec![self.q, self.m, self.e]).expect("positive dims")
    }
}

/// Either one unitary applied at every use, or an explicit unitary per use.
#[derive(Debug, Clone, PartialEq)]
pub enum StepUnitaries {
    Repeated(CMatrix),
    PerStep(Vec<CMatrix>),
}

/// A memory channel given by its unitary dilation on `Q ⊗ M ⊗ E`.
///
/// Besides the unitaries the spec caches, for every distinct unitary, the Kraus
/// operators it induces on `Q ⊗ M` once the environment is prepared in
/// `env_reset` and traced out: `K_k = (I ⊗ ⟨k|_E) U (I ⊗ |env⟩_E)`.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    dims: ChannelDims,
    steps: StepUnitaries,
    env_reset: Vec<C64>,
    initial_memory: DensityMatrix,
    kraus: Vec<Vec<CMatrix>>,
}

impl ChannelSpec {
    /// Validates the unitaries; the environment starts in `|0⟩` and the memory in `|0⟩⟨0|`.
    pub fn new(dims: ChannelDims, steps: StepUnitaries) -> Result<Self> {
        let mut env_reset = vec![ZERO; dims.e];
        env_reset[0] = ONE;
        let unitaries: Vec<&CMatrix> = match &steps {
            StepUnitaries::Repeated(u) => vec![u],
            StepUnitaries::PerStep(us) => {
                if us.is_empty() {
                    return Err(Error::InvalidArgument("empty per-step unitary list".into()));
                }
                us.iter().collect()
            }
        };
        for (i, u) in unitaries.iter().enumerate() {
            check_step_unitary(u, &dims).map_err(|e| match e {
                Error::NotUnitary(msg) => Error::NotUnitary(format!("step unitary {i}: {msg}")),
                Error::DimensionMismatch(msg) => {
                    Error::DimensionMismatch(format!("step unitary {i}: {msg}"))
                }
                other => other,
            })?;
        }
        let kraus = unitaries
            .iter()
            .map(|u| dilation_kraus(u, &dims, &env_reset))
            .collect();
        Ok(Self {
            dims,
            steps,
            env_reset,
            initial_memory: DensityMatrix::basis(0, dims.m)?,
            kraus,
        })
    }

    pub fn with_env_reset(mut self, env: Vec<C64>) -> Result<Self> {
        if env.len() != self.dims.e {
            return Err(Error::DimensionMismatch(format!(
                "environment reset vector has length {}, expected {}",
                env.len(),
                self.dims.e
            )));
        }
        let norm = env.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "environment reset vector has norm {norm}, expected 1"
            )));
        }
        self.env_reset = env;
        self.kraus = self
            .unitaries()
            .iter()
            .map(|u| dilation_kraus(u, &self.dims, &self.env_reset))
            .collect();
        Ok(self)
    }

    pub fn with_initial_memory(mut self, memory: DensityMatrix) -> Result<Self> {
        if memory.dim() != self.dims.m {
            return Err(Error::DimensionMismatch(format!(
                "initial memory has dimension {}, expected {}",
                memory.dim(),
                self.dims.m
            )));
        }
        self.initial_memory = memory.reshaped(SpaceShape::single(self.dims.m))?;
        Ok(self)
    }

    /// Memoryless channel from a unitary on `Q ⊗ E` (trivial one-dimensional memory).
    pub fn memoryless(u_qe: CMatrix, d_q: usize) -> Result<Self> {
        if d_q == 0 || !u_qe.rows().is_multiple_of(d_q) {
            return Err(Error::DimensionMismatch(format!(
                "unitary of dimension {} does not factor over a system of dimension {d_q}",
                u_qe.rows()
            )));
        }
        let d_e = u_qe.rows() / d_q;
        Self::new(
            ChannelDims::new(d_q, 1, d_e)?,
            StepUnitaries::Repeated(u_qe),
        )
    }

    /// Memoryless channel `ρ ↦ Σ_k A_k ρ A_k†` realized by the isometry `|φ⟩|0⟩ ↦ Σ_k A_k|φ⟩|k⟩`.
    pub fn from_memoryless_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let d_q = kraus.first().map(|k| k.rows()).unwrap_or(0);
        if d_q == 0 || kraus.iter().any(|k| k.rows() != d_q || k.cols() != d_q) {
            return Err(Error::DimensionMismatch(
                "Kraus operators must be square of equal size".into(),
            ));
        }
        let d_e = kraus.len();
        let dims = ChannelDims::new(d_q, 1, d_e)?;
        let mut defined = Vec::with_capacity(d_q);
        for phi in 0..d_q {
            let mut col = vec![ZERO; dims.total()];
            for (k, a) in kraus.iter().enumerate() {
                for q in 0..d_q {
                    col[q * d_e + k] = a[(q, phi)];
                }
            }
            defined.push((phi * d_e, col));
        }
        let u = complete_unitary(dims.total(), &defined)?;
        Self::new(dims, StepUnitaries::Repeated(u))
    }

    /// Perfect-memory channel: the unitary acts on `Q ⊗ M` only and the environment is trivial.
    pub fn perfect_memory(u_qm: CMatrix, d_q: usize, d_m: usize) -> Result<Self> {
        Self::new(
            ChannelDims::new(d_q, d_m, 1)?,
            StepUnitaries::Repeated(u_qm),
        )
    }

    /// Factorized dilation `(U_QE ⊗ I_M)(I_QE ⊗ U_M)`; the memory decouples from the signal.
    pub fn factorized(
        u_qe: &CMatrix,
        u_m: &CMatrix,
        d_q: usize,
        d_m: usize,
        d_e: usize,
    ) -> Result<Self> {
        let dims = ChannelDims::new(d_q, d_m, d_e)?;
        let shape = dims.step_shape();
        let a = embed(u_qe, &[0, 2], &shape)?;
        let b = embed(u_m, &[1], &shape)?;
        Self::new(dims, StepUnitaries::Repeated(&a * &b))
    }

    /// The noiseless channel on a `d`-dimensional system.
    pub fn identity(d: usize) -> Result<Self> {
        Self::memoryless(CMatrix::identity(d), d)
    }

    pub fn dims(&self) -> ChannelDims {
        self.dims
    }

    pub fn steps(&self) -> &StepUnitaries {
        &self.steps
    }

    pub fn env_reset(&self) -> &[C64] {
        &self.env_reset
    }

    pub fn initial_memory(&self) -> &DensityMatrix {
        &self.initial_memory
    }

    /// Number of explicit per-step unitaries, if any.
    pub fn fixed_step_count(&self) -> Option<usize> {
        match &self.steps {
            StepUnitaries::Repeated(_) => None,
            StepUnitaries::PerStep(us) => Some(us.len()),
        }
    }

    fn unitaries(&self) -> Vec<&CMatrix> {
        match &self.steps {
            StepUnitaries::Repeated(u) => vec![u],
            StepUnitaries::PerStep(us) => us.iter().collect(),
        }
    }

    /// Dilation unitary used at `step` (0-based).
    pub fn unitary(&self, step: usize) -> Result<&CMatrix> {
        match &self.steps {
            StepUnitaries::Repeated(u) => Ok(u),
            StepUnitaries::PerStep(us) => us.get(step).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "channel defines {} steps, step {step} requested",
                    us.len()
                ))
            }),
        }
    }

    /// Kraus operators on `Q ⊗ M` for `step` (0-based).
    pub fn kraus(&self, step: usize) -> Result<&[CMatrix]> {
        match &self.steps {
            StepUnitaries::Repeated(_) => Ok(&self.kraus[0]),
            StepUnitaries::PerStep(us) => {
                self.kraus.get(step).map(|k| k.as_slice()).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "channel defines {} steps, step {step} requested",
                        us.len()
                    ))
                })
            }
        }
    }

    /// Fails unless the spec can run exactly `n` uses.
    pub(crate) fn check_use_count(&self, n: usize) -> Result<()> {
        match self.fixed_step_count() {
            Some(len) if len != n => Err(Error::InvalidArgument(format!(
                "channel defines {len} per-step unitaries but {n} uses were requested"
            ))),
            _ => Ok(()),
        }
    }

    /// Fails unless the spec can run at least `n` uses.
    pub(crate) fn check_use_budget(&self, n: usize) -> Result<()> {
        match self.fixed_step_count() {
            Some(len) if len < n => Err(Error::InvalidArgument(format!(
                "channel defines {len} per-step unitaries but {n} uses were requested"
            ))),
            _ => Ok(()),
        }
    }
}

fn check_step_unitary(u: &CMatrix, dims: &ChannelDims) -> Result<()> {
    if !u.is_square() || u.rows() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix, expected {} = {}·{}·{}",
            u.rows(),
            u.cols(),
            dims.total(),
            dims.q,
            dims.m,
            dims.e
        )));
    }
    let dev = u.unitarity_deviation();
    if dev > UNITARITY_TOL {
        return Err(Error::NotUnitary(format!("max |U†U - I| = {dev:.3e}")));
    }
    Ok(())
}

fn dilation_kraus(u: &CMatrix, dims: &ChannelDims, env: &[C64]) -> Vec<CMatrix> {
    let qm = dims.q * dims.m;
    let de = dims.e;
    let mut out = Vec::with_capacity(de);
    for k in 0..de {
        let op = CMatrix::from_fn(qm, qm, |r, c| {
            let row = r * de + k;
            env.iter()
                .enumerate()
                .filter(|(_, w)| **w != ZERO)
                .map(|(e, w)| u[(row, c * de + e)] * w)
                .sum()
        });
        if op.max_abs() > 1e-15 {
            out.push(op);
        }
    }
    out
}

/// Completes a set of orthonormal columns, given at fixed positions, to a unitary.
///
/// Missing columns are filled by Gram–Schmidt over the standard basis in index
/// order, so the completion is deterministic.
pub fn complete_unitary(dim: usize, defined: &[(usize, Vec<C64>)]) -> Result<CMatrix> {
    crate::config::check_dimension(dim)?;
    let mut columns: Vec<Option<Vec<C64>>> = vec![None; dim];
    for (pos, col) in defined {
        if *pos >= dim || col.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "column {pos} of length {} for a {dim}-dimensional unitary",
                col.len()
            )));
        }
        if columns[*pos].is_some() {
            return Err(Error::InvalidArgument(format!(
                "column {pos} defined twice"
            )));
        }
        columns[*pos] = Some(col.clone());
    }
    let given: Vec<&Vec<C64>> = columns.iter().flatten().collect();
    for (i, a) in given.iter().enumerate() {
        for (j, b) in given.iter().enumerate().skip(i) {
            let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            let expected = if i == j { ONE } else { ZERO };
            if (ip - expected).norm() > UNITARITY_TOL {
                return Err(Error::NotUnitary(format!(
                    "defined columns are not orthonormal (inner product {:.3e} at pair {i},{j})",
                    (ip - expected).norm()
                )));
            }
        }
    }
    let mut basis: Vec<Vec<C64>> = given.into_iter().cloned().collect();
    let mut candidate = 0usize;
    for slot in columns.iter_mut() {
        if slot.is_some() {
            continue;
        }
        loop {
            if candidate >= dim {
                return Err(Error::NotUnitary(
                    "could not complete the column set".into(),
                ));
            }
            let mut v = vec![ZERO; dim];
            v[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
                basis.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    let cols: Vec<Vec<C64>> = columns.into_iter().map(|c| c.expect("filled")).collect();
    Ok(CMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gates;

    #[test]
    fn rejects_non_unitary_step() {
        let dims = ChannelDims::new(2, 1, 1).unwrap();
        let m = CMatrix::real_diagonal(&[1.0, 0.5]);
        assert!(matches!(
            ChannelSpec::new(dims, StepUnitaries::Repeated(m)),
            Err(Error::NotUnitary(_))
        ));
        let wrong = CMatrix::identity(3);
        assert!(matches!(
            ChannelSpec::new(dims, StepUnitaries::Repeated(wrong)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn env_reset_must_be_normalized() {
        let spec = ChannelSpec::memoryless(CMatrix::identity(4), 2).unwrap();
        assert!(spec.clone().with_env_reset(vec![ONE, ONE]).is_err());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(spec
            .with_env_reset(vec![C64::new(s, 0.0), C64::new(0.0, s)])
            .is_ok());
    }

    #[test]
    fn completion_is_unitary_and_keeps_defined_columns() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let col = vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(0.0, s)];
        let u = complete_unitary(4, &[(2, col.clone())]).unwrap();
        assert!(u.unitarity_deviation() < 1e-12);
        assert_eq!(u.column(2), col);
    }

    #[test]
    fn completion_rejects_non_orthonormal_columns() {
        let a = vec![ONE, ZERO];
        let b = vec![ONE, ZERO];
        assert!(complete_unitary(2, &[(0, a), (1, b)]).is_err());
    }

    #[test]
    fn kraus_from_memoryless_kraus_round_trip() {
        let p: f64 = 0.1;
        let kraus = vec![
            CMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            gates::pauli_x().scale_real(p.sqrt()),
        ];
        let spec = ChannelSpec::from_memoryless_kraus(&kraus).unwrap();
        let k = spec.kraus(0).unwrap();
        assert_eq!(k.len(), 2);
        for (a, b) in k.iter().zip(&kraus) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
    }

    #[test]
    fn per_step_count_is_enforced() {
        let dims = ChannelDims::new(2, 1, 1).unwrap();
        let spec = ChannelSpec::new(
            dims,
            StepUnitaries::PerStep(vec![CMatrix::identity(2), gates::pauli_x()]),
        )
        .unwrap();
        assert!(spec.check_use_count(2).is_ok());
        assert!(spec.check_use_count(3).is_err());
        assert!(spec.kraus(2).is_err());
    }
}
