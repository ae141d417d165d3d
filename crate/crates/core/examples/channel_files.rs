//! Loads the bundled channel files and runs the property suite on each.
//!
//! cargo run --release --example channel_files

use memchan::cli::verify::{run_suite, VerifyOptions};
use memchan::io::load_channel_file;

fn main() -> memchan::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("channels");
    let mut names: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let opts = VerifyOptions {
        continuity_trials: 50,
        fannes_pairs: 50,
        ..VerifyOptions::new(1)
    };
    for path in names {
        let (doc, spec) = load_channel_file(&path)?;
        let d = spec.dims();
        let report = run_suite(&spec, doc.markov_spec()?.as_ref(), &opts)?;
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        println!(
            "{:<24} q={} m={} e={}  {} checks, failed: {:?}",
            path.file_name().unwrap().to_string_lossy(),
            d.q,
            d.m,
            d.e,
            report.checks.len(),
            failed
        );
    }
    Ok(())
}
