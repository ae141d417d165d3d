//! Memory channels built from unitary dilations on `Q ⊗ M ⊗ E`.
//!
//! Each use acts with a unitary on the current signal, the shared memory and a
//! fresh environment prepared in a fixed pure state. Because an environment
//! never interacts again after its step, the crate traces it out immediately
//! and stores the resulting Kraus operators on `Q ⊗ M`; the working state
//! therefore lives on `Q^n ⊗ M`.

mod apply;
mod markov;
mod memory_map;
mod spec;

pub use apply::{
    apply_memory_channel, apply_memory_channel_via_dilation, apply_memoryless,
    apply_product_channel, memory_state_after, memory_trajectory,
};
pub(crate) use apply::{evolve_joint_mat, joint_shape, per_use_count};
pub use markov::{
    build_markov_channel, build_shift_channel, pauli_unitaries, sticky_transition,
    MarkovChannelSpec, MarkovForm,
};
pub use memory_map::{
    induced_memory_map, induced_memory_map_at, is_fixed_point_channel, FixedPointCheck, MemoryMap,
};
pub use spec::{complete_unitary, ChannelDims, ChannelSpec, StepUnitaries, UNITARITY_TOL};

#[cfg(test)]
mod tests;
