//! Von Neumann entropy, mutual information, Holevo quantities of
//! classical–quantum ensembles, separable-state extension and the Fannes bound.
//!
//! All logarithms are base 2, so every quantity is in bits.

use serde::Serialize;

use crate::config::{ENTROPY_NEGATIVE_LIMIT, ENTROPY_ZERO};
use crate::linalg::{
    check_distribution, hermitian_eig, hermitian_eigvals, CMatrix, DensityMatrix, SpaceShape, C64,
};
use crate::{Error, Result};

/// `log₂(e) / e`, the additive constant of the Fannes bound in bits.
pub const FANNES_CONSTANT: f64 = std::f64::consts::LOG2_E / std::f64::consts::E;

/// Mutual information in `[-MI_ROUNDOFF, 0)` is reported as zero.
const MI_ROUNDOFF: f64 = 1e-9;

/// `-Σ λ log₂ λ` over a spectrum, with clamping of numerical zeros.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -ENTROPY_NEGATIVE_LIMIT {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > ENTROPY_ZERO {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.mat())
}

pub(crate) fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    entropy_of_spectrum(&hermitian_eigvals(m)?)
}

/// `S(A) + S(B) - S(AB)` where `A` is the set of factors in `side_a` and `B` the rest.
pub fn mutual_information(rho: &DensityMatrix, side_a: &[usize]) -> Result<f64> {
    let factors = rho.shape().num_factors();
    let side_b = rho.shape().complement(side_a)?;
    if side_a.is_empty() || side_b.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "cut {side_a:?} does not split a space with {factors} factors into two nonempty sides"
        )));
    }
    let s_a = von_neumann_entropy(&rho.partial_trace(side_a)?)?;
    let s_b = von_neumann_entropy(&rho.partial_trace(&side_b)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    let mi = s_a + s_b - s_ab;
    Ok(if (-MI_ROUNDOFF..0.0).contains(&mi) {
        0.0
    } else {
        mi
    })
}

/// Probabilities with signal states on a common space.
#[derive(Debug, Clone)]
pub struct CQEnsemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl CQEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        check_distribution(&probs)?;
        if probs.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(
                "ensemble states differ in dimension".into(),
            ));
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn average_state(&self) -> DensityMatrix {
        let d = self.states[0].dim();
        let mut avg = CMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            avg.add_scaled(s.mat(), C64::new(*p, 0.0));
        }
        DensityMatrix::new_unchecked(avg, self.states[0].shape().clone())
    }
}

/// `Σ_i p_i |i⟩⟨i| ⊗ ρ_i` on `R ⊗ Q` with `dim R` equal to the ensemble size.
pub fn cq_embed(e: &CQEnsemble) -> Result<DensityMatrix> {
    let m = e.states.len();
    let d = e.states[0].dim();
    crate::config::check_dimension(m * d)?;
    let mut out = CMatrix::zeros(m * d, m * d);
    for (i, (p, s)) in e.probs.iter().zip(&e.states).enumerate() {
        for r in 0..d {
            for c in 0..d {
                out[(i * d + r, i * d + c)] = s.mat()[(r, c)] * *p;
            }
        }
    }
    let shape = SpaceShape::single(m).join(&SpaceShape::single(d));
    Ok(DensityMatrix::new_unchecked(out, shape))
}

/// `S(Σ p_i ρ_i) - Σ p_i S(ρ_i)`.
pub fn holevo_chi(e: &CQEnsemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&e.average_state())?;
    for (p, s) in e.probs.iter().zip(&e.states) {
        if *p > 0.0 {
            chi -= p * von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// `ρ_RQ = Σ_j p_j ρ_R^j ⊗ ρ_Q^j`.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    probs: Vec<f64>,
    r_states: Vec<DensityMatrix>,
    q_states: Vec<DensityMatrix>,
}

impl SeparableDecomposition {
    pub fn new(
        probs: Vec<f64>,
        r_states: Vec<DensityMatrix>,
        q_states: Vec<DensityMatrix>,
    ) -> Result<Self> {
        check_distribution(&probs)?;
        if r_states.len() != probs.len() || q_states.len() != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities, {} R states, {} Q states",
                probs.len(),
                r_states.len(),
                q_states.len()
            )));
        }
        let dr = r_states[0].dim();
        let dq = q_states[0].dim();
        if r_states.iter().any(|s| s.dim() != dr) || q_states.iter().any(|s| s.dim() != dq) {
            return Err(Error::DimensionMismatch(
                "decomposition states differ in dimension".into(),
            ));
        }
        Ok(Self {
            probs,
            r_states,
            q_states,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn r_states(&self) -> &[DensityMatrix] {
        &self.r_states
    }

    pub fn q_states(&self) -> &[DensityMatrix] {
        &self.q_states
    }

    /// The separable state itself on `R ⊗ Q`.
    pub fn state(&self) -> Result<DensityMatrix> {
        let dr = self.r_states[0].dim();
        let dq = self.q_states[0].dim();
        let mut out = CMatrix::zeros(dr * dq, dr * dq);
        for ((p, r), q) in self.probs.iter().zip(&self.r_states).zip(&self.q_states) {
            out.add_scaled(&r.mat().kron(q.mat())?, C64::new(*p, 0.0));
        }
        Ok(DensityMatrix::new_unchecked(
            out,
            SpaceShape::new(vec![dr, dq])?,
        ))
    }
}

/// Purifies every `ρ_R^j` into its own block of an ancilla `R̄`, giving
/// `Σ_j p_j |r̄_j⟩⟨r̄_j| ⊗ ρ_Q^j` on `R ⊗ R̄ ⊗ Q` with mutually orthogonal `|r̄_j⟩`.
///
/// `dim R̄` is the sum of the ranks of the `ρ_R^j`.
pub fn extend_separable(d: &SeparableDecomposition) -> Result<DensityMatrix> {
    let dr = d.r_states[0].dim();
    let dq = d.q_states[0].dim();
    let mut purifications = Vec::with_capacity(d.probs.len());
    let mut offset = 0usize;
    for r in &d.r_states {
        let eig = hermitian_eig(r.mat())?;
        let support: Vec<(f64, Vec<C64>)> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > ENTROPY_ZERO)
            .map(|(k, &l)| (l, eig.vectors.column(k)))
            .collect();
        let rank = support.len();
        purifications.push((offset, support));
        offset += rank;
    }
    let dbar = offset.max(1);
    let d_rr = dr * dbar;
    crate::config::check_dimension(d_rr * dq)?;

    let mut out = CMatrix::zeros(d_rr * dq, d_rr * dq);
    for ((p, (off, support)), q) in d.probs.iter().zip(&purifications).zip(&d.q_states) {
        // |r̄_j⟩ = Σ_a √λ_a |a⟩_R |off + a⟩_R̄
        let mut psi = vec![C64::new(0.0, 0.0); d_rr];
        for (a, (l, v)) in support.iter().enumerate() {
            let w = l.sqrt();
            for (x, vx) in v.iter().enumerate() {
                psi[x * dbar + off + a] += vx * w;
            }
        }
        let block = CMatrix::outer(&psi, &psi).kron(q.mat())?;
        out.add_scaled(&block, C64::new(*p, 0.0));
    }
    Ok(DensityMatrix::new_unchecked(
        out,
        SpaceShape::new(vec![dr, dbar, dq])?,
    ))
}

/// `dist · log₂ d + log₂(e)/e`.
pub fn fannes_bound(dist: f64, d: usize) -> f64 {
    dist * (d as f64).log2() + FANNES_CONSTANT
}

/// `|S(ω) - S(σ)| - fannes_bound(‖ω - σ‖, d)`; positive values are violations.
pub fn fannes_violation(omega: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let dist = crate::linalg::trace_distance(omega, sigma)?;
    let gap = (von_neumann_entropy(omega)? - von_neumann_entropy(sigma)?).abs();
    Ok(gap - fannes_bound(dist, omega.dim()))
}

/// Summary of a sampled Fannes check at one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FannesSample {
    pub dimension: usize,
    pub pairs: usize,
    pub violations: usize,
    pub max_excess: f64,
}

/// Checks the Fannes inequality on `pairs` Hilbert–Schmidt random state pairs.
pub fn sample_fannes(d: usize, pairs: usize, seed: u64, slack: f64) -> Result<FannesSample> {
    let shape = SpaceShape::single(d);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for i in 0..pairs {
        let mut rng = crate::random::sub_rng(seed, i as u64);
        let a = crate::random::hilbert_schmidt_state(&mut rng, &shape);
        let b = crate::random::hilbert_schmidt_state(&mut rng, &shape);
        let excess = fannes_violation(&a, &b)?;
        if excess > slack {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
    }
    Ok(FannesSample {
        dimension: d,
        pairs,
        violations,
        max_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_state, hilbert_schmidt_state, sub_rng};
    use rand::Rng;

    fn binary_entropy(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    fn qubit() -> SpaceShape {
        SpaceShape::single(2)
    }

    #[test]
    fn entropy_examples() {
        let mut rng = sub_rng(1, 0);
        let pure = haar_state(&mut rng, &SpaceShape::single(5));
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-10);
        assert!(
            (von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-14
        );
        let d = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let expected = binary_entropy(0.25);
        assert!((expected - 0.811278).abs() < 1e-6);
        assert!((von_neumann_entropy(&d).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        assert!(matches!(
            entropy_of_spectrum(&[1.1, -0.1]),
            Err(Error::NegativeEigenvalue(_))
        ));
        assert_eq!(entropy_of_spectrum(&[1.0, -5e-10]).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_examples() {
        let mut rng = sub_rng(2, 0);
        let a = hilbert_schmidt_state(&mut rng, &qubit());
        let b = hilbert_schmidt_state(&mut rng, &qubit());
        assert!(
            mutual_information(&a.tensor(&b).unwrap(), &[0])
                .unwrap()
                .abs()
                < 1e-10
        );

        let mut corr = CMatrix::zeros(4, 4);
        corr[(0, 0)] = C64::new(0.5, 0.0);
        corr[(3, 3)] = C64::new(0.5, 0.0);
        let corr = DensityMatrix::new(corr, SpaceShape::uniform(2, 2)).unwrap();
        assert!((mutual_information(&corr, &[0]).unwrap() - 1.0).abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(
            &[
                C64::new(s, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(s, 0.0),
            ],
            SpaceShape::uniform(2, 2),
        )
        .unwrap();
        assert!((mutual_information(&bell, &[1]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_rejects_trivial_cut() {
        let s = DensityMatrix::maximally_mixed(4)
            .reshaped(SpaceShape::uniform(2, 2))
            .unwrap();
        assert!(mutual_information(&s, &[]).is_err());
        assert!(mutual_information(&s, &[0, 1]).is_err());
        assert!(mutual_information(&s, &[3]).is_err());
    }

    #[test]
    fn cq_embedding_examples() {
        let mut rng = sub_rng(3, 0);
        let rho = hilbert_schmidt_state(&mut rng, &qubit());
        let e = CQEnsemble::new(vec![1.0], vec![rho.clone()]).unwrap();
        let embedded = cq_embed(&e).unwrap();
        let expected = CMatrix::basis_projector(0, 1).kron(rho.mat()).unwrap();
        assert!(embedded.mat().max_abs_diff(&expected) < 1e-15);

        let e = CQEnsemble::new(
            vec![0.5, 0.5],
            vec![
                DensityMatrix::basis(0, 2).unwrap(),
                DensityMatrix::basis(1, 2).unwrap(),
            ],
        )
        .unwrap();
        assert!((mutual_information(&cq_embed(&e).unwrap(), &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_examples() {
        let mut rng = sub_rng(4, 0);
        let rho = hilbert_schmidt_state(&mut rng, &qubit());
        let same = CQEnsemble::new(vec![0.3, 0.7], vec![rho.clone(), rho]).unwrap();
        assert!(holevo_chi(&same).unwrap().abs() < 1e-12);

        let basis: Vec<_> = (0..4)
            .map(|k| DensityMatrix::basis(k, 4).unwrap())
            .collect();
        let classical = CQEnsemble::new(vec![0.25; 4], basis).unwrap();
        assert!((holevo_chi(&classical).unwrap() - 2.0).abs() < 1e-12);

        let noisy = CQEnsemble::new(
            vec![0.5, 0.5],
            vec![
                DensityMatrix::diagonal(&[0.9, 0.1]).unwrap(),
                DensityMatrix::diagonal(&[0.1, 0.9]).unwrap(),
            ],
        )
        .unwrap();
        let expected = 1.0 - binary_entropy(0.1);
        assert!((expected - 0.531004).abs() < 1e-6);
        assert!((holevo_chi(&noisy).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn holevo_equals_embedded_mutual_information() {
        for seed in 0..10 {
            let mut rng = sub_rng(5, seed);
            let probs = crate::random::random_distribution(&mut rng, 3);
            let states = (0..3)
                .map(|_| hilbert_schmidt_state(&mut rng, &qubit()))
                .collect();
            let e = CQEnsemble::new(probs, states).unwrap();
            let chi = holevo_chi(&e).unwrap();
            let mi = mutual_information(&cq_embed(&e).unwrap(), &[0]).unwrap();
            assert!((chi - mi).abs() <= 1e-9, "{chi} vs {mi}");
        }
    }

    fn random_decomposition(
        seed: u64,
        terms: usize,
        dr: usize,
        dq: usize,
    ) -> SeparableDecomposition {
        let mut rng = sub_rng(6, seed);
        let probs = crate::random::random_distribution(&mut rng, terms);
        let r = (0..terms)
            .map(|_| hilbert_schmidt_state(&mut rng, &SpaceShape::single(dr)))
            .collect();
        let q = (0..terms)
            .map(|_| hilbert_schmidt_state(&mut rng, &SpaceShape::single(dq)))
            .collect();
        SeparableDecomposition::new(probs, r, q).unwrap()
    }

    #[test]
    fn extension_recovers_separable_state() {
        for seed in 0..5 {
            let d = random_decomposition(seed, 3, 2, 2);
            let ext = extend_separable(&d).unwrap();
            assert_eq!(ext.shape().dims(), &[2, 6, 2]);
            ext.validate().unwrap();
            let back = ext.partial_trace(&[0, 2]).unwrap();
            assert!(back.mat().max_abs_diff(d.state().unwrap().mat()) < 1e-9);
        }
    }

    #[test]
    fn extension_of_pure_terms_uses_one_dimensional_blocks() {
        let mut rng = sub_rng(7, 0);
        let r: Vec<_> = (0..3).map(|_| haar_state(&mut rng, &qubit())).collect();
        let q: Vec<_> = (0..3)
            .map(|_| hilbert_schmidt_state(&mut rng, &qubit()))
            .collect();
        let d = SeparableDecomposition::new(vec![0.2, 0.3, 0.5], r, q).unwrap();
        let ext = extend_separable(&d).unwrap();
        assert_eq!(ext.shape().dims()[1], 3);
    }

    #[test]
    fn extension_does_not_lower_mutual_information() {
        for seed in 0..20 {
            let mut rng = sub_rng(8, seed);
            let terms = rng.random_range(1..5);
            let d = random_decomposition(100 + seed, terms, 2, 3);
            let rq = mutual_information(&d.state().unwrap(), &[0]).unwrap();
            let ext = mutual_information(&extend_separable(&d).unwrap(), &[0, 1]).unwrap();
            assert!(ext >= rq - 1e-9, "{ext} < {rq}");
        }
    }

    #[test]
    fn single_term_extension_is_uncorrelated() {
        let d = random_decomposition(9, 1, 2, 2);
        assert!(mutual_information(&d.state().unwrap(), &[0]).unwrap().abs() < 1e-9);
        assert!(
            mutual_information(&extend_separable(&d).unwrap(), &[0, 1])
                .unwrap()
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn fannes_constants() {
        assert!((fannes_bound(0.0, 2) - 0.530738).abs() < 1e-6);
        assert!((fannes_bound(1.0, 2) - 1.530738).abs() < 1e-6);
    }

    #[test]
    fn fannes_holds_on_random_pairs() {
        for d in [2, 4, 8] {
            let s = sample_fannes(d, 50, 10 + d as u64, 1e-9).unwrap();
            assert_eq!(s.violations, 0, "{s:?}");
        }
    }

    #[test]
    fn fannes_excess_detected_on_known_pair() {
        // |0⟩⟨0| against diag(2/3, 1/3): distance 1/3, entropy gap h₂(1/3) ≈ 0.918 exceeds 1/3 + 0.5307
        let a = DensityMatrix::basis(0, 2).unwrap();
        let b = DensityMatrix::diagonal(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let excess = fannes_violation(&a, &b).unwrap();
        let expected = binary_entropy(1.0 / 3.0) - (1.0 / 3.0 + FANNES_CONSTANT);
        assert!((excess - expected).abs() < 1e-12);
        assert!(excess > 0.05);
    }

    #[test]
    fn entropy_and_concavity_bounds() {
        for seed in 0..20 {
            let mut rng = sub_rng(11, seed);
            let d = rng.random_range(2..9);
            let shape = SpaceShape::single(d);
            let a = hilbert_schmidt_state(&mut rng, &shape);
            let b = haar_state(&mut rng, &shape);
            let sa = von_neumann_entropy(&a).unwrap();
            let sb = von_neumann_entropy(&b).unwrap();
            assert!(sa >= -1e-9 && sa <= (d as f64).log2() + 1e-9);
            let mid = von_neumann_entropy(&a.mix(&b, 0.5).unwrap()).unwrap();
            assert!(mid >= 0.5 * sa + 0.5 * sb - 1e-9);
        }
    }

    #[test]
    fn mutual_information_is_bounded() {
        for seed in 0..10 {
            let mut rng = sub_rng(12, seed);
            let rho = haar_state(&mut rng, &SpaceShape::new(vec![2, 3]).unwrap());
            let mi = mutual_information(&rho, &[0]).unwrap();
            assert!((0.0..=2.0 + 1e-9).contains(&mi));
        }
    }
}
