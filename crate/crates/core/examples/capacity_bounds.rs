//! Lower and upper finite-block capacity estimates over a set of initial memories.
//!
//! cargo run --release --example capacity_bounds [n_max]

use memchan::capacity::{
    convergence_gap_bound, default_memory_candidates, evaluate_ensemble_chi, lower_upper_capacity,
    OptimizerOptions,
};
use memchan::channels::{build_markov_channel, ChannelSpec, MarkovChannelSpec};
use memchan::linalg::{gates, CMatrix, DensityMatrix};

fn main() -> memchan::Result<()> {
    let n_max: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2);
    let opts = OptimizerOptions::with_seed(11);

    let flip = ChannelSpec::from_memoryless_kraus(&[
        CMatrix::identity(2).scale_real(0.9f64.sqrt()),
        gates::pauli_x().scale_real(0.1f64.sqrt()),
    ])?;
    let basis = [DensityMatrix::basis(0, 2)?, DensityMatrix::basis(1, 2)?];
    let chi = evaluate_ensemble_chi(
        &flip,
        &DensityMatrix::maximally_mixed(1),
        1,
        &[0.5, 0.5],
        &basis,
    )?;
    println!("bit flip 0.1, basis ensemble: chi = {chi:.6}");

    let markov = MarkovChannelSpec::two_label(
        [[0.9, 0.1], [0.1, 0.9]],
        CMatrix::identity(2),
        gates::pauli_x(),
    )?;
    let spec = build_markov_channel(&markov, true)?;
    let candidates = default_memory_candidates(2)?;
    for n in 1..=n_max {
        let r = lower_upper_capacity(&spec, n, &candidates, &opts)?;
        println!(
            "correlated bit flips, n = {n}: [{:.6}, {:.6}]",
            r.lower_c_n, r.upper_c_n
        );
        for v in &r.per_memory {
            println!("    {:<16} {:.6}", v.memory_id, v.chi_per_use);
        }
    }

    for n in [10, 100, 1000] {
        println!(
            "gap bound with N = 3, epsilon = 0.25, n = {n}: {:.6}",
            convergence_gap_bound(0.25, 3, 2, n)?
        );
    }
    Ok(())
}
