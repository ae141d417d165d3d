//! Lower and upper capacity estimates of the correlated Pauli channel for
//! growing block length, with the mixing-time bound on their gap.
//!
//! cargo run --release --example convergence_experiment [n_max] [epsilon]

use memchan::capacity::{capacity_convergence_experiment, ExperimentOptions, OptimizerOptions};
use memchan::io::load_channel_file;

fn main() -> memchan::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_max: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let epsilon: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.25);
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("channels/pauli_markov.json");
    let (_, spec) = load_channel_file(&path)?;

    let opts = ExperimentOptions::new(epsilon, OptimizerOptions::with_seed(7));
    let e = capacity_convergence_experiment(&spec, n_max, &opts)?;
    println!(
        "fixed point: {} (deviation {:.2e}), N({epsilon}) = {:?}",
        e.fixed_point.is_fixed_point, e.fixed_point.max_deviation, e.mixing.n_epsilon
    );
    for r in &e.reports {
        println!(
            "n = {}: lower {:.6} upper {:.6} gap {:.6} bound {} ({:.1?})",
            r.n,
            r.lower_c_n,
            r.upper_c_n,
            r.gap,
            r.gap_bound.map_or("-".into(), |b| format!("{b:.6}")),
            r.wall_time
        );
        for v in &r.per_memory {
            println!("    {:<16} {:.6}", v.memory_id, v.chi_per_use);
        }
    }
    Ok(())
}
