use rayon::prelude::*;

use crate::channels::{evolve_joint_mat, joint_shape, ChannelSpec};
use crate::linalg::{partial_trace, CMatrix, DensityMatrix, C64, ZERO};
use crate::{Error, Result};

/// The `n`-use map `X ↦ Tr_M Λ⁽ⁿ⁾(X ⊗ ω)` stored through the images of the
/// matrix units `|a⟩⟨b|`, so outputs of arbitrary operators follow by linearity.
#[derive(Debug, Clone)]
pub(crate) struct Transfer {
    dim: usize,
    images: Vec<CMatrix>,
}

impl Transfer {
    pub(crate) fn new(spec: &ChannelSpec, memory: &DensityMatrix, n: usize) -> Result<Self> {
        let dims = spec.dims();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "block length must be at least 1".into(),
            ));
        }
        spec.check_use_count(n)?;
        if memory.dim() != dims.m {
            return Err(Error::DimensionMismatch(format!(
                "memory of dimension {}, expected {}",
                memory.dim(),
                dims.m
            )));
        }
        let dim = dims.q.checked_pow(n as u32).ok_or(Error::DimensionCap {
            requested: usize::MAX,
            cap: crate::config::max_dimension(),
        })?;
        crate::config::check_dimension(dim * dims.m)?;
        let shape = joint_shape(spec, n);
        let keep: Vec<usize> = (0..n).collect();
        // Λ(|b⟩⟨a|) = Λ(|a⟩⟨b|)†, so only a ≤ b is evolved.
        let upper: Vec<(usize, usize)> = (0..dim)
            .flat_map(|a| (a..dim).map(move |b| (a, b)))
            .collect();
        let evolved: Vec<CMatrix> = upper
            .par_iter()
            .map(|&(a, b)| {
                let unit = CMatrix::from_fn(dim, dim, |r, c| {
                    if r == a && c == b {
                        C64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                });
                let x = unit.kron(memory.mat())?;
                let y = evolve_joint_mat(spec, x, n, 0)?;
                partial_trace(&y, &shape, &keep)
            })
            .collect::<Result<_>>()?;
        let mut images = vec![CMatrix::zeros(0, 0); dim * dim];
        for ((a, b), m) in upper.into_iter().zip(evolved) {
            if a != b {
                images[b * dim + a] = m.adjoint();
            }
            images[a * dim + b] = m;
        }
        Ok(Self { dim, images })
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn unit_image(&self, a: usize, b: usize) -> &CMatrix {
        &self.images[a * self.dim + b]
    }

    /// `W_a = Λ(|a⟩⟨y|)` for every `a`.
    pub(crate) fn row_images(&self, y: &[C64]) -> Vec<CMatrix> {
        (0..self.dim)
            .map(|a| {
                let mut w = CMatrix::zeros(self.dim, self.dim);
                for (b, yb) in y.iter().enumerate() {
                    if *yb != ZERO {
                        w.add_scaled(self.unit_image(a, b), yb.conj());
                    }
                }
                w
            })
            .collect()
    }

    /// `Λ(|x⟩⟨y|)` given the row images of `y`; `x` is a sparse list of entries.
    pub(crate) fn image_from_rows(&self, x: &[(usize, C64)], rows: &[CMatrix]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (a, xa) in x {
            out.add_scaled(&rows[*a], *xa);
        }
        out
    }

    /// `Λ(|x⟩⟨y|)` for sparse `x` and `y`.
    pub(crate) fn image_sparse(&self, x: &[(usize, C64)], y: &[(usize, C64)]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (a, xa) in x {
            for (b, yb) in y {
                out.add_scaled(self.unit_image(*a, *b), xa * yb.conj());
            }
        }
        out
    }
}
