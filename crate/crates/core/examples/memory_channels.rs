//! Builds a few memory channels and pushes states through them.
//!
//! cargo run --release --example memory_channels

use memchan::channels::{
    apply_memory_channel, apply_memory_channel_via_dilation, apply_product_channel,
    build_shift_channel, memory_state_after, memory_trajectory, ChannelSpec,
};
use memchan::entropics::von_neumann_entropy;
use memchan::linalg::{trace_distance, DensityMatrix, SpaceShape};
use memchan::random::{haar_state, haar_unitary, sub_rng};

fn main() -> memchan::Result<()> {
    let mut rng = sub_rng(1, 0);

    // The shift channel hands back the previous input.
    let shift = build_shift_channel(2)?;
    let omega = DensityMatrix::basis(1, 2)?;
    let rho1 = haar_state(&mut rng, &SpaceShape::single(2));
    let rho2 = haar_state(&mut rng, &SpaceShape::single(2));
    let input = rho1.tensor(&rho2)?;
    let out = apply_memory_channel(&shift, &input, &omega, 2)?;
    let expected = omega.tensor(&rho1)?;
    println!(
        "shift, two uses: |out - omega (x) rho1| = {:.2e}",
        trace_distance(&out, &expected)?
    );
    let memory = memory_state_after(&shift, &input, &omega, 2)?;
    println!(
        "shift, memory after two uses holds rho2: {:.2e}",
        trace_distance(&memory, &rho2)?
    );

    // A memory that never touches the signal leaves a product channel.
    let u_qe = haar_unitary(&mut rng, 4);
    let u_m = haar_unitary(&mut rng, 2);
    let factorized = ChannelSpec::factorized(&u_qe, &u_m, 2, 2, 2)?;
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 3));
    let with_memory = apply_memory_channel(&factorized, &rho, &omega, 3)?;
    let product = apply_product_channel(&u_qe, &rho, 3)?;
    println!(
        "factorized dilation vs product channel, n = 3: {:.2e}",
        with_memory.mat().max_abs_diff(product.mat())
    );

    // A generic dilation: the Kraus route and the literal dilation agree.
    let spec = ChannelSpec::new(
        memchan::channels::ChannelDims::new(2, 2, 2)?,
        memchan::channels::StepUnitaries::Repeated(haar_unitary(&mut rng, 8)),
    )?;
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
    let a = apply_memory_channel(&spec, &rho, &omega, 2)?;
    let b = apply_memory_channel_via_dilation(&spec, &rho, &omega, 2)?;
    println!(
        "random dilation: Kraus route vs dilation route {:.2e}",
        a.mat().max_abs_diff(b.mat())
    );
    println!("output entropy {:.6} bits", von_neumann_entropy(&a)?);

    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 4));
    for (i, m) in memory_trajectory(&spec, &rho, &omega, 4)?
        .iter()
        .enumerate()
    {
        println!(
            "memory after use {}: entropy {:.6}",
            i + 1,
            von_neumann_entropy(m)?
        );
    }
    Ok(())
}
