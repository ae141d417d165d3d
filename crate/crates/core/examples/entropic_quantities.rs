//! Entropies, mutual information, Holevo quantities and the Fannes bound.
//!
//! cargo run --release --example entropic_quantities

use memchan::entropics::{
    extend_separable, fannes_bound, fannes_violation, holevo_chi, mutual_information,
    sample_fannes, von_neumann_entropy, CQEnsemble, SeparableDecomposition,
};
use memchan::linalg::{trace_distance, DensityMatrix, SpaceShape, C64};
use memchan::random::{hilbert_schmidt_state, sub_rng};

fn main() -> memchan::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(
        &[
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ],
        SpaceShape::uniform(2, 2),
    )?;
    println!(
        "Bell pair: S = {:.6}, I(A:B) = {:.6}",
        von_neumann_entropy(&bell)?,
        mutual_information(&bell, &[0])?
    );

    let ensemble = CQEnsemble::new(
        vec![0.5, 0.5],
        vec![
            DensityMatrix::basis(0, 2)?,
            DensityMatrix::diagonal(&[0.5, 0.5])?,
        ],
    )?;
    println!(
        "Holevo quantity of {{|0>, I/2}}: {:.6}",
        holevo_chi(&ensemble)?
    );

    let mut rng = sub_rng(3, 0);
    let q = SpaceShape::single(2);
    let dec = SeparableDecomposition::new(
        vec![0.3, 0.7],
        vec![
            hilbert_schmidt_state(&mut rng, &q),
            hilbert_schmidt_state(&mut rng, &q),
        ],
        vec![
            hilbert_schmidt_state(&mut rng, &q),
            hilbert_schmidt_state(&mut rng, &q),
        ],
    )?;
    let before = mutual_information(&dec.state()?, &[0])?;
    let after = mutual_information(&extend_separable(&dec)?, &[0, 1])?;
    println!("separable state: I(R:Q) = {before:.6} <= I(RR':Q) = {after:.6}");

    let pure = DensityMatrix::basis(0, 2)?;
    let mixed = DensityMatrix::diagonal(&[2.0 / 3.0, 1.0 / 3.0])?;
    let d = trace_distance(&pure, &mixed)?;
    println!(
        "|0> vs diag(2/3, 1/3): entropy gap {:.6}, bound {:.6}, excess {:.6}",
        (von_neumann_entropy(&pure)? - von_neumann_entropy(&mixed)?).abs(),
        fannes_bound(d, 2),
        fannes_violation(&pure, &mixed)?
    );
    for dim in [2, 4, 8, 16, 32] {
        let sample = sample_fannes(dim, 200, 4, 1e-9)?;
        println!(
            "d = {dim:>2}: {} random pairs, {} violations, max excess {:.3}",
            sample.pairs, sample.violations, sample.max_excess
        );
    }
    Ok(())
}
