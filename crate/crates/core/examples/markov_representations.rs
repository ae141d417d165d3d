//! The two dilations of a Markov-correlated bit-flip channel give the same
//! signal outputs but different memory maps.
//!
//! cargo run --release --example markov_representations

use memchan::channels::{
    apply_memory_channel, build_markov_channel, induced_memory_map, is_fixed_point_channel,
    MarkovChannelSpec,
};
use memchan::linalg::{gates, trace_distance, CMatrix, DensityMatrix, SpaceShape};
use memchan::random::{haar_state, sub_rng};

fn main() -> memchan::Result<()> {
    let markov = MarkovChannelSpec::two_label(
        [[0.9, 0.1], [0.1, 0.9]],
        CMatrix::identity(2),
        gates::pauli_x(),
    )?;
    let intersymbol = build_markov_channel(&markov, false)?;
    let fixed_point = build_markov_channel(&markov, true)?;
    println!(
        "environment dimensions: intersymbol {}, fixed point {}",
        intersymbol.dims().e,
        fixed_point.dims().e
    );

    let mut rng = sub_rng(2, 0);
    for n in 1..=3 {
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, n));
        let a = apply_memory_channel(&intersymbol, &rho, intersymbol.initial_memory(), n)?;
        let b = apply_memory_channel(&fixed_point, &rho, fixed_point.initial_memory(), n)?;
        println!(
            "n = {n}: signal outputs differ by {:.2e}",
            trace_distance(&a, &b)?
        );
    }

    let zero = DensityMatrix::basis(0, 2)?;
    let one = DensityMatrix::basis(1, 2)?;
    let omega = DensityMatrix::diagonal(&[0.8, 0.2])?;
    for (name, spec) in [("intersymbol", &intersymbol), ("fixed point", &fixed_point)] {
        let after_zero = induced_memory_map(spec, &zero)?.apply(&omega)?;
        let after_one = induced_memory_map(spec, &one)?.apply(&omega)?;
        let check = is_fixed_point_channel(spec, 32, 1e-9, 3)?;
        println!(
            "{name}: memory map input dependence {:.3e}, sampled fixed-point check {} ({:.3e})",
            trace_distance(&after_zero, &after_one)?,
            check.is_fixed_point,
            check.max_deviation
        );
    }

    let stationary = DensityMatrix::maximally_mixed(2);
    let image = induced_memory_map(&fixed_point, &zero)?.apply(&stationary)?;
    println!(
        "stationary memory is fixed: {:.2e}",
        trace_distance(&image, &stationary)?
    );
    Ok(())
}
