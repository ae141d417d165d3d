//! Seeded samplers for states, unitaries and stochastic matrices.
//!
//! Every sampling loop in the crate derives one generator per work item from a
//! top-level seed and the item's index, so results do not depend on the order
//! in which items are executed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{CMatrix, DensityMatrix, SpaceShape, C64};

pub type SeededRng = ChaCha8Rng;

/// Generator for work item `stream` under `seed`.
pub fn sub_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes two words into a new seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random pure state on `shape`.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> DensityMatrix {
    let v = haar_vector(rng, shape.total());
    DensityMatrix::new_unchecked(CMatrix::outer(&v, &v), shape.clone())
}

/// Random mixed state from the Hilbert–Schmidt measure (`GG† / Tr GG†`, `G` Ginibre).
pub fn hilbert_schmidt_state<R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> DensityMatrix {
    let d = shape.total();
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale_real(1.0 / tr).hermitian_part(), shape.clone())
}

/// Haar-random pure state mixed with the maximally mixed state at a uniform weight.
pub fn mixed_with_identity<R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> DensityMatrix {
    let d = shape.total();
    let pure = haar_state(rng, shape);
    let w: f64 = rng.random_range(0.0..1.0);
    let mut m = pure.mat().scale_real(w);
    m.add_scaled(&CMatrix::identity(d), C64::new((1.0 - w) / d as f64, 0.0));
    DensityMatrix::new_unchecked(m, shape.clone())
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

fn orthonormalize_columns(g: &CMatrix) -> Option<CMatrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..g.cols() {
        let mut v = g.column(c);
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    Some(CMatrix::from_fn(n, g.cols(), |r, c| cols[c][r]))
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Row-stochastic matrix with rows drawn uniformly from the simplex.
pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, labels: usize) -> Vec<Vec<f64>> {
    (0..labels)
        .map(|_| random_distribution(rng, labels))
        .collect()
}
