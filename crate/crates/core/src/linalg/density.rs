use super::eig::hermitian_eigvals;
use super::matrix::{CMatrix, C64};
use super::shape::{partial_trace, SpaceShape};
use crate::config::Tolerances;
use crate::{Error, Result};

/// A validated density matrix over a factorized Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    shape: SpaceShape,
    tol: Tolerances,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity with the default tolerances.
    pub fn new(mat: CMatrix, shape: SpaceShape) -> Result<Self> {
        Self::with_tolerances(mat, shape, Tolerances::default())
    }

    pub fn with_tolerances(mat: CMatrix, shape: SpaceShape, tol: Tolerances) -> Result<Self> {
        if !mat.is_square() || mat.rows() != shape.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for space {:?}",
                mat.rows(),
                mat.cols(),
                shape.dims()
            )));
        }
        let herm = mat.hermiticity_deviation();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!(
                "hermiticity deviation {herm:.3e} exceeds {:.1e}",
                tol.hermiticity
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {:.12} is not 1", tr.re)));
        }
        let min_eig = hermitian_eigvals(&mat)?.last().copied().unwrap_or(0.0);
        if min_eig < -tol.psd {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min_eig:.3e} is below -{:.1e}",
                tol.psd
            )));
        }
        Ok(Self { mat, shape, tol })
    }

    /// Wraps a matrix known to be a state (for example a CPTP image of one) without re-checking.
    pub fn new_unchecked(mat: CMatrix, shape: SpaceShape) -> Self {
        debug_assert_eq!(mat.rows(), shape.total());
        Self {
            mat,
            shape,
            tol: Tolerances::default(),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64], shape: SpaceShape) -> Result<Self> {
        if psi.len() != shape.total() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for space {:?}",
                psi.len(),
                shape.dims()
            )));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState(
                "zero or non-finite state vector".into(),
            ));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::new_unchecked(CMatrix::outer(&unit, &unit), shape))
    }

    pub fn basis(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} >= dimension {dim}"
            )));
        }
        Ok(Self::new_unchecked(
            CMatrix::basis_projector(k, dim),
            SpaceShape::single(dim),
        ))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(
            CMatrix::identity(dim).scale_real(1.0 / dim as f64),
            SpaceShape::single(dim),
        )
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        check_distribution(probs)?;
        Ok(Self::new_unchecked(
            CMatrix::real_diagonal(probs),
            SpaceShape::single(probs.len()),
        ))
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Same matrix, new factor structure of equal total dimension.
    pub fn reshaped(&self, shape: SpaceShape) -> Result<Self> {
        if shape.total() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot view dimension {} as {:?}",
                self.dim(),
                shape.dims()
            )));
        }
        Ok(Self {
            mat: self.mat.clone(),
            shape,
            tol: self.tol,
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            mat: self.mat.kron(&other.mat)?,
            shape: self.shape.join(&other.shape),
            tol: self.tol,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let shape = self.shape.select(keep)?;
        Ok(Self {
            mat: partial_trace(&self.mat, &self.shape, keep)?,
            shape,
            tol: self.tol,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigvals(&self.mat)
    }

    /// Re-runs the constructor checks, useful on outputs built with [`Self::new_unchecked`].
    pub fn validate(&self) -> Result<()> {
        Self::with_tolerances(self.mat.clone(), self.shape.clone(), self.tol).map(|_| ())
    }

    /// `p·self + (1 - p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "mixing states of different dimension".into(),
            ));
        }
        let mut m = self.mat.scale_real(p);
        m.add_scaled(&other.mat, C64::new(1.0 - p, 0.0));
        Ok(Self {
            mat: m,
            shape: self.shape.clone(),
            tol: self.tol,
        })
    }
}

pub(crate) fn check_distribution(p: &[f64]) -> Result<()> {
    const TOL: f64 = 1e-10;
    if p.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    if let Some((i, &x)) = p
        .iter()
        .enumerate()
        .find(|(_, &x)| !x.is_finite() || x < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} = {x} is negative or not finite"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `½ Tr|ρ - σ|`, computed from the eigenvalues of the Hermitian difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    trace_distance_mat(rho.mat(), sigma.mat())
}

pub(crate) fn trace_distance_mat(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.rows() != sigma.rows() || rho.cols() != sigma.cols() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let diff = rho - sigma;
    let eig = hermitian_eigvals(&diff)?;
    let d = 0.5 * eig.iter().map(|x| x.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Half-L1 distance between probability vectors on a shared index set.
pub fn distribution_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    Ok((0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).clamp(0.0, 1.0))
}
