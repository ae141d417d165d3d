//! How fast the initial memory is forgotten.
//!
//! cargo run --release --example mixing_time [channel.json] [epsilon]

use std::path::PathBuf;

use memchan::channels::induced_memory_map;
use memchan::indecomposability::{
    contraction_coefficient, probe_mixing, MixingProbeConfig, PairSampler,
};
use memchan::io::load_channel_file;
use memchan::linalg::DensityMatrix;

fn main() -> memchan::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("channels/dephasing_markov.json")
    });
    let epsilon: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.01);
    let (_, spec) = load_channel_file(&path)?;

    let result = probe_mixing(&spec, &MixingProbeConfig::new(epsilon, 5))?;
    println!("{}: N({epsilon}) = {:?}", path.display(), result.n_epsilon);
    for p in result.trajectory.iter().take(25) {
        println!("{:>4} {:.10}", p.step, p.max_distance);
    }

    let rho = DensityMatrix::maximally_mixed(spec.dims().q);
    let map = induced_memory_map(&spec, &rho)?;
    let c = contraction_coefficient(&map, &PairSampler::new(6, 0), 64)?;
    println!(
        "single-step contraction of the memory map: {:.6} over {} pairs",
        c.sup_ratio, c.samples_used
    );
    Ok(())
}
