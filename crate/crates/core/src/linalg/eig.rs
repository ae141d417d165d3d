//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.
//! Sweeps continue until the off-diagonal Frobenius mass falls below
//! [`OFF_DIAGONAL_TOL`] (relative to the matrix norm when that exceeds one).

use super::matrix::{CMatrix, C64, ZERO};
use crate::{Error, Result};

pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Hermiticity tolerance applied before decomposing.
const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|x| x)
    }
}

pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEigen> {
    let (values, vectors) = jacobi(h, true)?;
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let n = values.len();
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok(HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigvals(h: &CMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(h, false)?;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Eigenvalues only, descending, by Householder reduction to a tridiagonal
/// matrix followed by implicit QL iterations. Several times faster than the
/// Jacobi path on the small matrices evaluated repeatedly during optimization.
pub fn hermitian_eigvals_tridiagonal(h: &CMatrix) -> Result<Vec<f64>> {
    let mut a = checked_hermitian(h)?;
    let n = a.rows();
    let (mut d, mut e) = householder_tridiagonal(&mut a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.truncate(n);
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

fn checked_hermitian(h: &CMatrix) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.max_abs().max(1.0);
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(h.hermitian_part())
}

/// Reduces `a` in place and returns the real diagonal and the moduli of the
/// subdiagonal (last entry zero); a diagonal phase change makes these the
/// entries of a real symmetric matrix with the same spectrum.
fn householder_tridiagonal(a: &mut CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut e = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let data = a.as_mut_slice();
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let norm: f64 = (lo..n)
            .map(|r| data[r * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        e[k] = norm;
        if k + 2 >= n || norm < 1e-300 {
            continue;
        }
        let x0 = data[lo * n + k];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        for r in lo..n {
            v[r] = data[r * n + k];
        }
        v[lo] -= alpha;
        let vnorm: f64 = v[lo..n].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        v[lo..n].iter_mut().for_each(|z| *z /= vnorm);
        // Trailing block: p = A v, q = p − (v†p) v, A ← A − 2 v q† − 2 q v†.
        for r in lo..n {
            let row = &data[r * n + lo..r * n + n];
            p[r] = row.iter().zip(&v[lo..n]).map(|(x, y)| x * y).sum();
        }
        let kv: C64 = (lo..n).map(|r| v[r].conj() * p[r]).sum();
        for r in lo..n {
            p[r] -= kv * v[r];
        }
        for r in lo..n {
            let vr = v[r] * 2.0;
            let pr = p[r] * 2.0;
            let row = &mut data[r * n + lo..r * n + n];
            for (x, (vc, pc)) in row.iter_mut().zip(v[lo..n].iter().zip(&p[lo..n])) {
                *x -= vr * pc.conj() + pr * vc.conj();
            }
        }
    }
    let d = (0..n).map(|i| data[i * n + i].re).collect();
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal
/// matrix; `d` is overwritten with the eigenvalues.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NoConvergence(iterations));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn jacobi(h: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let scale = h.max_abs().max(1.0);
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let data = a.as_slice();
    let mut sum = 0.0;
    for r in 0..n {
        for c in r + 1..n {
            sum += data[r * n + c].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let b = a[(p, q)];
    let beta = b.norm();
    if beta < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / beta;
    // real Jacobi rotation on [[app, beta], [beta, aqq]]
    let theta = (aqq - app) / (2.0 * beta);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    // G = diag(1, conj(phase)) · [[cs, sn], [-sn, cs]]
    let g00 = C64::new(cs, 0.0);
    let g01 = C64::new(sn, 0.0);
    let g10 = -phase.conj() * sn;
    let g11 = phase.conj() * cs;

    let n = a.rows();
    let data = a.as_mut_slice();
    for k in 0..n {
        let akp = data[k * n + p];
        let akq = data[k * n + q];
        data[k * n + p] = akp * g00 + akq * g10;
        data[k * n + q] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let apk = data[p * n + k];
        let aqk = data[q * n + k];
        data[p * n + k] = g00.conj() * apk + g10.conj() * aqk;
        data[q * n + k] = g01.conj() * apk + g11.conj() * aqk;
    }
    data[p * n + p] = C64::new(app - t * beta, 0.0);
    data[q * n + q] = C64::new(aqq + t * beta, 0.0);
    data[p * n + q] = ZERO;
    data[q * n + p] = ZERO;

    if let Some(v) = v {
        let vd = v.as_mut_slice();
        for k in 0..n {
            let vkp = vd[k * n + p];
            let vkq = vd[k * n + q];
            vd[k * n + p] = vkp * g00 + vkq * g10;
            vd[k * n + q] = vkp * g01 + vkq * g11;
        }
    }
}
