use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ZERO};
use crate::{Error, Result};

/// Ordered tensor factor dimensions of a Hilbert space, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceShape {
    dims: Vec<usize>,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "factor dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// A single factor of dimension `d`.
    pub fn single(d: usize) -> Self {
        Self {
            dims: vec![d.max(1)],
        }
    }

    /// `count` identical factors of dimension `d`.
    pub fn uniform(d: usize, count: usize) -> Self {
        Self {
            dims: vec![d.max(1); count],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &SpaceShape) -> SpaceShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SpaceShape { dims }
    }

    /// The shape made of the listed factors, in ascending factor order.
    pub fn select(&self, factors: &[usize]) -> Result<SpaceShape> {
        let sorted = self.normalize_factors(factors)?;
        Ok(SpaceShape {
            dims: sorted.iter().map(|&f| self.dims[f]).collect(),
        })
    }

    /// Factors not in `factors`, ascending.
    pub fn complement(&self, factors: &[usize]) -> Result<Vec<usize>> {
        let sorted = self.normalize_factors(factors)?;
        Ok((0..self.dims.len())
            .filter(|f| !sorted.contains(f))
            .collect())
    }

    fn normalize_factors(&self, factors: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = factors.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&f| f >= self.dims.len()) {
            return Err(Error::FactorOutOfRange {
                index: bad,
                factors: self.dims.len(),
            });
        }
        Ok(sorted)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Table mapping (sub-index over `factors` in the given order, rest-index over the
    /// remaining factors in ascending order) to a full index: `table[rest * sub + a]`.
    fn split_table(&self, factors: &[usize]) -> (usize, usize, Vec<usize>) {
        let strides = self.strides();
        let rest: Vec<usize> = (0..self.dims.len())
            .filter(|f| !factors.contains(f))
            .collect();
        let sub_dim: usize = factors.iter().map(|&f| self.dims[f]).product();
        let rest_dim: usize = rest.iter().map(|&f| self.dims[f]).product();
        let mut table = vec![0usize; sub_dim * rest_dim];
        for r in 0..rest_dim {
            let mut base = 0;
            let mut rem = r;
            for &f in rest.iter().rev() {
                base += (rem % self.dims[f]) * strides[f];
                rem /= self.dims[f];
            }
            for a in 0..sub_dim {
                let mut idx = base;
                let mut rem = a;
                for &f in factors.iter().rev() {
                    idx += (rem % self.dims[f]) * strides[f];
                    rem /= self.dims[f];
                }
                table[r * sub_dim + a] = idx;
            }
        }
        (sub_dim, rest_dim, table)
    }
}

fn check_square(m: &CMatrix, shape: &SpaceShape) -> Result<()> {
    if !m.is_square() || m.rows() != shape.total() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match space {:?}",
            m.rows(),
            m.cols(),
            shape.dims()
        )));
    }
    Ok(())
}

/// Partial trace keeping the factors in `keep`; kept factors retain ascending order.
pub fn partial_trace(m: &CMatrix, shape: &SpaceShape, keep: &[usize]) -> Result<CMatrix> {
    check_square(m, shape)?;
    let kept = shape.select(keep)?;
    let kept_factors: Vec<usize> = {
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        k
    };
    let (dk, dt, table) = shape.split_table(&kept_factors);
    debug_assert_eq!(dk, kept.total());
    let n = shape.total();
    let data = m.as_slice();
    let mut out = vec![ZERO; dk * dk];
    for t in 0..dt {
        let idx = &table[t * dk..(t + 1) * dk];
        for (i, &r) in idx.iter().enumerate() {
            let row = &data[r * n..(r + 1) * n];
            let out_row = &mut out[i * dk..(i + 1) * dk];
            for (o, &c) in out_row.iter_mut().zip(idx) {
                *o += row[c];
            }
        }
    }
    Ok(CMatrix::from_vec_unchecked(dk, dk, out))
}

/// Left-multiplies `x` by `op` acting on `factors` (in the listed order) and identity elsewhere.
///
/// `x` may be any matrix whose row space has the given shape.
pub fn apply_left(
    x: &CMatrix,
    shape: &SpaceShape,
    op: &CMatrix,
    factors: &[usize],
) -> Result<CMatrix> {
    if x.rows() != shape.total() {
        return Err(Error::DimensionMismatch(format!(
            "matrix with {} rows does not match space {:?}",
            x.rows(),
            shape.dims()
        )));
    }
    let mut seen = factors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != factors.len() {
        return Err(Error::InvalidArgument(format!(
            "repeated factor in {factors:?}"
        )));
    }
    shape.select(factors)?;
    let (ds, dr, table) = shape.split_table(factors);
    if !op.is_square() || op.rows() != ds {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not act on factors {factors:?} of {:?}",
            op.rows(),
            op.cols(),
            shape.dims()
        )));
    }
    let cols = x.cols();
    let src = x.as_slice();
    let ops = op.as_slice();
    let mut out = vec![ZERO; src.len()];
    let mut gathered = vec![ZERO; ds * cols];
    for r in 0..dr {
        let idx = &table[r * ds..(r + 1) * ds];
        for (a, &full) in idx.iter().enumerate() {
            gathered[a * cols..(a + 1) * cols]
                .copy_from_slice(&src[full * cols..(full + 1) * cols]);
        }
        for (a2, &full2) in idx.iter().enumerate() {
            let out_row = &mut out[full2 * cols..(full2 + 1) * cols];
            for a in 0..ds {
                let k = ops[a2 * ds + a];
                if k == ZERO {
                    continue;
                }
                for (o, g) in out_row.iter_mut().zip(&gathered[a * cols..(a + 1) * cols]) {
                    *o += k * g;
                }
            }
        }
    }
    Ok(CMatrix::from_vec_unchecked(x.rows(), cols, out))
}

/// `K X K†` with `K` acting on `factors`.
pub fn conjugate_on(
    x: &CMatrix,
    shape: &SpaceShape,
    op: &CMatrix,
    factors: &[usize],
) -> Result<CMatrix> {
    check_square(x, shape)?;
    let left = apply_left(x, shape, op, factors)?;
    // K (K X)† = K X† K†, whose adjoint is K X K†.
    Ok(apply_left(&left.adjoint(), shape, op, factors)?.adjoint())
}

/// `Σ_k K_k X K_k†` with every `K_k` acting on `factors`.
pub fn apply_kraus_on(
    x: &CMatrix,
    shape: &SpaceShape,
    kraus: &[CMatrix],
    factors: &[usize],
) -> Result<CMatrix> {
    check_square(x, shape)?;
    let mut acc = CMatrix::zeros(x.rows(), x.cols());
    for k in kraus {
        let term = conjugate_on(x, shape, k, factors)?;
        acc.add_scaled(&term, C64::new(1.0, 0.0));
    }
    Ok(acc)
}

/// The full-space matrix of `op` acting on `factors` (listed order) and identity elsewhere.
pub fn embed(op: &CMatrix, factors: &[usize], shape: &SpaceShape) -> Result<CMatrix> {
    crate::config::check_dimension(shape.total())?;
    apply_left(&CMatrix::identity(shape.total()), shape, op, factors)
}
