//! Markov-correlated unitary noise and the quantum shift channel.
//!
//! A memory register holds the label `j` of the previous error. Each use draws
//! the next label `k` with probability `p(k|j)`, applies the unitary `V_k` to
//! the signal and writes `k` into the memory. The record left in the
//! environment is either the old label `j` (the intersymbol form) or the pair
//! `(j, k)` (the fixed-point form). Both give the same signal outputs.

use serde::{Deserialize, Serialize};

use super::spec::{complete_unitary, ChannelDims, ChannelSpec, StepUnitaries, UNITARITY_TOL};
use crate::linalg::{check_distribution, gates, CMatrix, DensityMatrix, ZERO};
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-10;

/// Which environment record the dilation leaves behind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkovForm {
    /// Environment records the previous label `j`; memory map depends on the input.
    Intersymbol,
    /// Environment records `(j, k)`; memory map is input independent.
    FixedPoint,
}

impl MarkovForm {
    pub fn from_flag(fixed_point_form: bool) -> Self {
        if fixed_point_form {
            Self::FixedPoint
        } else {
            Self::Intersymbol
        }
    }
}

/// Transition matrix `p(k|j)` (row `j` is the from-label), one unitary per label,
/// and the initial label distribution.
#[derive(Debug, Clone)]
pub struct MarkovChannelSpec {
    transition: Vec<Vec<f64>>,
    kraus_unitaries: Vec<CMatrix>,
    initial_distribution: Vec<f64>,
}

impl MarkovChannelSpec {
    pub fn new(
        transition: Vec<Vec<f64>>,
        kraus_unitaries: Vec<CMatrix>,
        initial_distribution: Vec<f64>,
    ) -> Result<Self> {
        let labels = transition.len();
        if labels == 0 {
            return Err(Error::InvalidDistribution(
                "transition matrix has no rows".into(),
            ));
        }
        for (j, row) in transition.iter().enumerate() {
            if row.len() != labels {
                return Err(Error::InvalidDistribution(format!(
                    "transition row {j} has {} entries, expected {labels}",
                    row.len()
                )));
            }
            if let Some((k, p)) = row
                .iter()
                .enumerate()
                .find(|(_, p)| !p.is_finite() || **p < 0.0)
            {
                return Err(Error::InvalidDistribution(format!(
                    "transition row {j} entry {k} = {p} is not a probability"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "transition row {j} sums to {sum}, not 1"
                )));
            }
        }
        if kraus_unitaries.len() != labels {
            return Err(Error::DimensionMismatch(format!(
                "{} unitaries for {labels} memory labels",
                kraus_unitaries.len()
            )));
        }
        let d_q = kraus_unitaries[0].rows();
        for (k, v) in kraus_unitaries.iter().enumerate() {
            if !v.is_square() || v.rows() != d_q {
                return Err(Error::DimensionMismatch(format!(
                    "unitary {k} is {}x{}, expected {d_q}x{d_q}",
                    v.rows(),
                    v.cols()
                )));
            }
            let dev = v.unitarity_deviation();
            if dev > UNITARITY_TOL {
                return Err(Error::NotUnitary(format!(
                    "Kraus unitary {k}: max |V†V - I| = {dev:.3e}"
                )));
            }
        }
        if initial_distribution.len() != labels {
            return Err(Error::InvalidDistribution(format!(
                "initial distribution has {} entries for {labels} labels",
                initial_distribution.len()
            )));
        }
        check_distribution(&initial_distribution)?;
        Ok(Self {
            transition,
            kraus_unitaries,
            initial_distribution,
        })
    }

    /// Two-label chain with the given transition matrix and a uniform start.
    pub fn two_label(transition: [[f64; 2]; 2], v0: CMatrix, v1: CMatrix) -> Result<Self> {
        Self::new(
            transition.iter().map(|r| r.to_vec()).collect(),
            vec![v0, v1],
            vec![0.5, 0.5],
        )
    }

    pub fn labels(&self) -> usize {
        self.transition.len()
    }

    pub fn system_dim(&self) -> usize {
        self.kraus_unitaries[0].rows()
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn kraus_unitaries(&self) -> &[CMatrix] {
        &self.kraus_unitaries
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.initial_distribution
    }

    /// Environment dimension required by `form`.
    pub fn env_dim(&self, form: MarkovForm) -> usize {
        match form {
            MarkovForm::Intersymbol => self.labels(),
            MarkovForm::FixedPoint => self.labels() * self.labels(),
        }
    }
}

/// Dilation `U|φ⟩|j⟩|0⟩ = Σ_k √p(k|j) V_k|φ⟩|k⟩|rec⟩`, with `rec = j` or `rec = (j, k)`,
/// completed to a unitary on the remaining environment columns.
pub fn build_markov_channel(m: &MarkovChannelSpec, fixed_point_form: bool) -> Result<ChannelSpec> {
    let form = MarkovForm::from_flag(fixed_point_form);
    let labels = m.labels();
    let d_q = m.system_dim();
    let d_e = m.env_dim(form);
    let dims = ChannelDims::new(d_q, labels, d_e)?;
    crate::config::check_dimension(dims.total())?;
    let index = |q: usize, mem: usize, e: usize| (q * labels + mem) * d_e + e;

    let mut defined = Vec::with_capacity(d_q * labels);
    for phi in 0..d_q {
        for j in 0..labels {
            let mut col = vec![ZERO; dims.total()];
            for k in 0..labels {
                let amp = m.transition[j][k].sqrt();
                if amp == 0.0 {
                    continue;
                }
                let rec = match form {
                    MarkovForm::Intersymbol => j,
                    MarkovForm::FixedPoint => j * labels + k,
                };
                let v = &m.kraus_unitaries[k];
                for q in 0..d_q {
                    col[index(q, k, rec)] += v[(q, phi)] * amp;
                }
            }
            defined.push((index(phi, j, 0), col));
        }
    }
    let u = complete_unitary(dims.total(), &defined)?;
    ChannelSpec::new(dims, StepUnitaries::Repeated(u))?
        .with_initial_memory(DensityMatrix::diagonal(&m.initial_distribution)?)
}

/// Perfect-memory channel that swaps each input into the memory and releases the
/// previous memory contents as output.
pub fn build_shift_channel(d: usize) -> Result<ChannelSpec> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "shift channel needs d >= 2, got {d}"
        )));
    }
    ChannelSpec::perfect_memory(gates::swap(d), d, d)
}

/// Pauli operators `{I, X, Y, Z}` in label order.
pub fn pauli_unitaries() -> Vec<CMatrix> {
    vec![
        CMatrix::identity(2),
        gates::pauli_x(),
        gates::pauli_y(),
        gates::pauli_z(),
    ]
}

/// `L × L` chain that stays with probability `stay` and otherwise moves uniformly.
pub fn sticky_transition(labels: usize, stay: f64) -> Vec<Vec<f64>> {
    let move_p = if labels > 1 {
        (1.0 - stay) / (labels - 1) as f64
    } else {
        0.0
    };
    (0..labels)
        .map(|j| {
            (0..labels)
                .map(|k| {
                    if j == k {
                        if labels > 1 {
                            stay
                        } else {
                            1.0
                        }
                    } else {
                        move_p
                    }
                })
                .collect()
        })
        .collect()
}
