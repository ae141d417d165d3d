use super::*;
use crate::linalg::{gates, trace_distance, CMatrix, DensityMatrix, SpaceShape, C64};
use crate::random::{haar_state, haar_unitary, hilbert_schmidt_state, sub_rng};

fn flip_markov() -> MarkovChannelSpec {
    MarkovChannelSpec::two_label(
        [[0.9, 0.1], [0.1, 0.9]],
        CMatrix::identity(2),
        gates::pauli_x(),
    )
    .unwrap()
}

fn dephasing_markov() -> MarkovChannelSpec {
    MarkovChannelSpec::two_label(
        [[0.9, 0.1], [0.1, 0.9]],
        CMatrix::identity(2),
        gates::pauli_z(),
    )
    .unwrap()
}

fn plus_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)], SpaceShape::single(2)).unwrap()
}

#[test]
fn memoryless_identity_leaves_input() {
    let mut rng = sub_rng(1, 0);
    let rho = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let out = apply_memoryless(&CMatrix::identity(4), &rho).unwrap();
    assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);
}

#[test]
fn memoryless_swap_outputs_environment_state() {
    let mut rng = sub_rng(2, 0);
    let rho = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let out = apply_memoryless(&gates::swap(2), &rho).unwrap();
    assert!(out.mat().max_abs_diff(&CMatrix::basis_projector(0, 2)) < 1e-15);
}

#[test]
fn memoryless_cnot_dephases_plus() {
    // CNOT|+⟩|0⟩ is a Bell state; the reduced system state is I/2
    let out = apply_memoryless(&gates::cnot(), &plus_state()).unwrap();
    let u = gates::cnot();
    let joint = plus_state()
        .mat()
        .kron(&CMatrix::basis_projector(0, 2))
        .unwrap();
    let evolved = &(&u * &joint) * &u.adjoint();
    let mut oracle = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            for e in 0..2 {
                oracle[(i, j)] += evolved[(i * 2 + e, j * 2 + e)];
            }
        }
    }
    assert!(out.mat().max_abs_diff(&oracle) < 1e-15);
    assert!(
        out.mat()
            .max_abs_diff(&CMatrix::identity(2).scale_real(0.5))
            < 1e-15
    );
}

#[test]
fn memoryless_rejects_mismatched_unitary() {
    assert!(apply_memoryless(&CMatrix::identity(3), &DensityMatrix::maximally_mixed(2)).is_err());
}

#[test]
fn product_channel_single_use_matches_memoryless() {
    let mut rng = sub_rng(3, 0);
    let u = haar_unitary(&mut rng, 4);
    let rho = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let a = apply_product_channel(&u, &rho, 1).unwrap();
    let b = apply_memoryless(&u, &rho).unwrap();
    assert!(a.mat().max_abs_diff(b.mat()) < 1e-14);
}

#[test]
fn product_channel_on_product_input_factorizes() {
    let mut rng = sub_rng(4, 0);
    let u = haar_unitary(&mut rng, 6);
    let shape = SpaceShape::single(2);
    let r1 = hilbert_schmidt_state(&mut rng, &shape);
    let r2 = hilbert_schmidt_state(&mut rng, &shape);
    let joint = r1.tensor(&r2).unwrap();
    let out = apply_product_channel(&u, &joint, 2).unwrap();
    let expected = apply_memoryless(&u, &r1)
        .unwrap()
        .tensor(&apply_memoryless(&u, &r2).unwrap())
        .unwrap();
    assert!(out.mat().max_abs_diff(expected.mat()) < 1e-10);
}

#[test]
fn product_channel_identity_unitary() {
    let mut rng = sub_rng(5, 0);
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 3));
    let out = apply_product_channel(&CMatrix::identity(4), &rho, 3).unwrap();
    assert!(out.mat().max_abs_diff(rho.mat()) < 1e-14);
}

#[test]
fn factorized_memory_channel_reduces_to_product_channel() {
    for seed in 0..5 {
        let mut rng = sub_rng(6, seed);
        let u_qe = haar_unitary(&mut rng, 4);
        let u_m = haar_unitary(&mut rng, 2);
        let spec = ChannelSpec::factorized(&u_qe, &u_m, 2, 2, 2).unwrap();
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
        let mem = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
        let a = apply_memory_channel(&spec, &rho, &mem, 2).unwrap();
        let b = apply_product_channel(&u_qe, &rho, 2).unwrap();
        assert!(a.mat().max_abs_diff(b.mat()) < 1e-10);
    }
}

#[test]
fn perfect_memory_swap_outputs_memory() {
    let spec = ChannelSpec::perfect_memory(gates::swap(2), 2, 2).unwrap();
    let mut rng = sub_rng(7, 0);
    let omega = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let rho = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let out = apply_memory_channel(&spec, &rho, &omega, 1).unwrap();
    assert!(out.mat().max_abs_diff(omega.mat()) < 1e-15);
    let mem = memory_state_after(&spec, &rho, &omega, 1).unwrap();
    assert!(mem.mat().max_abs_diff(rho.mat()) < 1e-15);
}

#[test]
fn zero_uses_return_inputs() {
    let spec = build_shift_channel(2).unwrap();
    let rho = plus_state();
    let omega = DensityMatrix::basis(1, 2).unwrap();
    assert_eq!(apply_memory_channel(&spec, &rho, &omega, 0).unwrap(), rho);
    assert!(
        memory_state_after(&spec, &rho, &omega, 0)
            .unwrap()
            .mat()
            .max_abs_diff(omega.mat())
            < 1e-15
    );
}

#[test]
fn kraus_path_matches_literal_dilation() {
    for seed in 0..5 {
        let mut rng = sub_rng(8, seed);
        let dims = ChannelDims::new(2, 2, 2).unwrap();
        let spec =
            ChannelSpec::new(dims, StepUnitaries::Repeated(haar_unitary(&mut rng, 8))).unwrap();
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 3));
        let mem = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
        let a = apply_memory_channel(&spec, &rho, &mem, 3).unwrap();
        let b = apply_memory_channel_via_dilation(&spec, &rho, &mem, 3).unwrap();
        assert!(a.mat().max_abs_diff(b.mat()) < 1e-12);
    }
}

#[test]
fn nontrivial_env_reset_matches_literal_dilation() {
    let mut rng = sub_rng(9, 0);
    let dims = ChannelDims::new(2, 2, 3).unwrap();
    let env = crate::random::haar_vector(&mut rng, 3);
    let spec = ChannelSpec::new(dims, StepUnitaries::Repeated(haar_unitary(&mut rng, 12)))
        .unwrap()
        .with_env_reset(env)
        .unwrap();
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
    let mem = haar_state(&mut rng, &SpaceShape::single(2));
    let a = apply_memory_channel(&spec, &rho, &mem, 2).unwrap();
    let b = apply_memory_channel_via_dilation(&spec, &rho, &mem, 2).unwrap();
    assert!(a.mat().max_abs_diff(b.mat()) < 1e-12);
}

#[test]
fn per_step_unitaries_are_used_in_order() {
    // step 0 flips, step 1 does nothing: |00⟩ → |10⟩
    let x = gates::pauli_x();
    let spec = ChannelSpec::new(
        ChannelDims::new(2, 1, 1).unwrap(),
        StepUnitaries::PerStep(vec![x, CMatrix::identity(2)]),
    )
    .unwrap();
    let rho = DensityMatrix::basis(0, 4).unwrap();
    let out = apply_memory_channel(&spec, &rho, &DensityMatrix::maximally_mixed(1), 2).unwrap();
    assert!(out.mat().max_abs_diff(&CMatrix::basis_projector(2, 4)) < 1e-15);
    assert!(apply_memory_channel(
        &spec,
        &DensityMatrix::basis(0, 8).unwrap(),
        &DensityMatrix::maximally_mixed(1),
        3
    )
    .is_err());
}

#[test]
fn composition_matches_single_steps() {
    // n uses at once equals one use at a time on (unconsumed inputs ⊗ memory)
    let mut rng = sub_rng(10, 0);
    let spec = ChannelSpec::new(
        ChannelDims::new(2, 2, 2).unwrap(),
        StepUnitaries::Repeated(haar_unitary(&mut rng, 8)),
    )
    .unwrap();
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
    let mem = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let full = apply_memory_channel(&spec, &rho, &mem, 2).unwrap();

    let shape = SpaceShape::new(vec![2, 2, 2]).unwrap();
    let mut x = rho.mat().kron(mem.mat()).unwrap();
    for i in 0..2 {
        x = crate::linalg::apply_kraus_on(&x, &shape, spec.kraus(i).unwrap(), &[i, 2]).unwrap();
    }
    let stepwise = crate::linalg::partial_trace(&x, &shape, &[0, 1]).unwrap();
    assert!(full.mat().max_abs_diff(&stepwise) < 1e-10);
}

#[test]
fn single_label_markov_is_identity() {
    let m = MarkovChannelSpec::new(vec![vec![1.0]], vec![CMatrix::identity(2)], vec![1.0]).unwrap();
    for form in [false, true] {
        let spec = build_markov_channel(&m, form).unwrap();
        let mut rng = sub_rng(11, form as u64);
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
        let out = apply_memory_channel(&spec, &rho, spec.initial_memory(), 2).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-12);
    }
}

#[test]
fn dephasing_markov_preserves_basis_inputs() {
    let mut rng = sub_rng(12, 0);
    let transition = crate::random::random_stochastic(&mut rng, 2);
    let m = MarkovChannelSpec::new(
        transition,
        vec![CMatrix::identity(2), gates::pauli_z()],
        vec![0.5, 0.5],
    )
    .unwrap();
    for form in [false, true] {
        let spec = build_markov_channel(&m, form).unwrap();
        for k in 0..4 {
            let rho = DensityMatrix::basis(k, 4).unwrap();
            let out = apply_memory_channel(&spec, &rho, spec.initial_memory(), 2).unwrap();
            assert!(out.mat().max_abs_diff(rho.mat()) < 1e-12);
        }
    }
}

#[test]
fn markov_forms_agree_on_outputs() {
    let m = flip_markov();
    let a = build_markov_channel(&m, false).unwrap();
    let b = build_markov_channel(&m, true).unwrap();
    for n in 1..=3 {
        let mut rng = sub_rng(13, n as u64);
        let rho = haar_state(&mut rng, &SpaceShape::uniform(2, n));
        let mem = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
        let oa = apply_memory_channel(&a, &rho, &mem, n).unwrap();
        let ob = apply_memory_channel(&b, &rho, &mem, n).unwrap();
        assert!(trace_distance(&oa, &ob).unwrap() <= 1e-9);
    }
}

#[test]
fn fixed_point_markov_memory_follows_transition_matrix() {
    let spec = build_markov_channel(&flip_markov(), true).unwrap();
    let mut rng = sub_rng(14, 0);
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 4));
    let start = DensityMatrix::diagonal(&[0.8, 0.2]).unwrap();
    let traj = memory_trajectory(&spec, &rho, &start, 4).unwrap();
    // classical power iteration on the label distribution
    let mut dist = [0.8, 0.2];
    for mem in &traj {
        dist = [dist[0] * 0.9 + dist[1] * 0.1, dist[0] * 0.1 + dist[1] * 0.9];
        assert!(mem.mat().max_abs_diff(&CMatrix::real_diagonal(&dist)) < 1e-12);
    }
    let last = memory_state_after(&spec, &rho, &start, 4).unwrap();
    assert!(last.mat().max_abs_diff(traj[3].mat()) < 1e-12);
}

#[test]
fn shift_channel_single_use_swaps() {
    let spec = build_shift_channel(2).unwrap();
    let mut rng = sub_rng(15, 0);
    let omega = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let rho = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    assert!(
        apply_memory_channel(&spec, &rho, &omega, 1)
            .unwrap()
            .mat()
            .max_abs_diff(omega.mat())
            < 1e-15
    );
    assert!(
        memory_state_after(&spec, &rho, &omega, 1)
            .unwrap()
            .mat()
            .max_abs_diff(rho.mat())
            < 1e-15
    );
}

#[test]
fn shift_channel_two_uses_delays_inputs() {
    let spec = build_shift_channel(2).unwrap();
    let mut rng = sub_rng(16, 0);
    let shape = SpaceShape::single(2);
    let omega = hilbert_schmidt_state(&mut rng, &shape);
    let r1 = hilbert_schmidt_state(&mut rng, &shape);
    let r2 = hilbert_schmidt_state(&mut rng, &shape);
    let out = apply_memory_channel(&spec, &r1.tensor(&r2).unwrap(), &omega, 2).unwrap();
    let expected = omega.tensor(&r1).unwrap();
    assert!(out.mat().max_abs_diff(expected.mat()) < 1e-14);
}

#[test]
fn shift_channel_entangled_input() {
    let spec = build_shift_channel(2).unwrap();
    let mut rng = sub_rng(17, 0);
    let rho = haar_state(&mut rng, &SpaceShape::uniform(2, 2));
    let out = apply_memory_channel(&spec, &rho, &DensityMatrix::basis(0, 2).unwrap(), 2).unwrap();
    let second = out.partial_trace(&[1]).unwrap();
    let first_input = rho.partial_trace(&[0]).unwrap();
    assert!(second.mat().max_abs_diff(first_input.mat()) < 1e-14);
}

#[test]
fn factorized_memory_map_ignores_input() {
    let mut rng = sub_rng(18, 0);
    let u_m = haar_unitary(&mut rng, 2);
    let spec = ChannelSpec::factorized(&haar_unitary(&mut rng, 4), &u_m, 2, 2, 2).unwrap();
    let omega = hilbert_schmidt_state(&mut rng, &SpaceShape::single(2));
    let expected = &(&u_m * omega.mat()) * &u_m.adjoint();
    for _ in 0..3 {
        let rho = haar_state(&mut rng, &SpaceShape::single(2));
        let out = induced_memory_map(&spec, &rho)
            .unwrap()
            .apply(&omega)
            .unwrap();
        assert!(out.mat().max_abs_diff(&expected) < 1e-12);
    }
    let check = is_fixed_point_channel(&spec, 20, 1e-9, 3).unwrap();
    assert!(check.is_fixed_point && check.max_deviation <= 1e-10);
}

#[test]
fn fixed_point_markov_memory_map() {
    let spec = build_markov_channel(&flip_markov(), true).unwrap();
    let rho = plus_state();
    let map = induced_memory_map(&spec, &rho).unwrap();
    // dephase then redistribute: a coherent memory loses its off-diagonal part
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let coherent =
        DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(0.0, s)], SpaceShape::single(2)).unwrap();
    let out = map.apply(&coherent).unwrap();
    assert!(
        out.mat()
            .max_abs_diff(&CMatrix::identity(2).scale_real(0.5))
            < 1e-12
    );
    let out = map.apply(&DensityMatrix::basis(0, 2).unwrap()).unwrap();
    assert!(out.mat().max_abs_diff(&CMatrix::real_diagonal(&[0.9, 0.1])) < 1e-12);
    let stationary = map.apply(&DensityMatrix::maximally_mixed(2)).unwrap();
    assert!(
        stationary
            .mat()
            .max_abs_diff(&CMatrix::identity(2).scale_real(0.5))
            < 1e-12
    );
    assert!(
        is_fixed_point_channel(&spec, 20, 1e-9, 4)
            .unwrap()
            .is_fixed_point
    );
    let dephasing = build_markov_channel(&dephasing_markov(), true).unwrap();
    assert!(
        is_fixed_point_channel(&dephasing, 20, 1e-9, 4)
            .unwrap()
            .is_fixed_point
    );
}

#[test]
fn intersymbol_markov_memory_map_depends_on_input() {
    let spec = build_markov_channel(&flip_markov(), false).unwrap();
    let omega = DensityMatrix::basis(0, 2).unwrap();
    let a = induced_memory_map(&spec, &DensityMatrix::basis(0, 2).unwrap())
        .unwrap()
        .apply(&omega)
        .unwrap();
    let b = induced_memory_map(&spec, &plus_state())
        .unwrap()
        .apply(&omega)
        .unwrap();
    assert!(trace_distance(&a, &b).unwrap() > 0.1);
    let check = is_fixed_point_channel(&spec, 20, 1e-9, 5).unwrap();
    assert!(!check.is_fixed_point);
}

#[test]
fn shift_channel_is_not_fixed_point() {
    let check = is_fixed_point_channel(&build_shift_channel(2).unwrap(), 10, 1e-9, 6).unwrap();
    assert!(!check.is_fixed_point);
    assert!(check.max_deviation > 0.01);
}

#[test]
fn memoryless_kraus_channel_outputs() {
    let p: f64 = 0.1;
    let spec = ChannelSpec::from_memoryless_kraus(&[
        CMatrix::identity(2).scale_real((1.0 - p).sqrt()),
        gates::pauli_x().scale_real(p.sqrt()),
    ])
    .unwrap();
    let out = apply_memory_channel(
        &spec,
        &DensityMatrix::basis(0, 2).unwrap(),
        spec.initial_memory(),
        1,
    )
    .unwrap();
    assert!(out.mat().max_abs_diff(&CMatrix::real_diagonal(&[0.9, 0.1])) < 1e-12);
}
