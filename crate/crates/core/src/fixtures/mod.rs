//! Game families and random generators.

pub mod hardness;
pub mod instability;
pub mod packing;
pub mod random;
pub mod report;
pub mod suites;

pub use hardness::{gen_hardness_pair, hardness_adversary_check, HardnessGame, HardnessParams, HARDNESS_CHECK_MAX_K};
pub use instability::{gen_instability_pair, instability_closed_forms, verify_instability_balance, InstabilityParams};
pub use packing::PackingGame;
pub use random::{
    random_bmatch_game, random_cycle_instance, random_graph, random_graph_with, random_monotone_game, random_rat,
    random_weighted_graph, rng_from_seed, RANDOM_GAME_CAP,
};
pub use report::{Check, Report};
pub use suites::{
    few2_suite, instability_experiment, lsa_approx_suite, matroid_suite, mps_suite, nz_equivalence_suite, randomized_suite,
    reduction_chain_suite, selftest, InstabilityOutcome,
};

#[cfg(test)]
mod tests;
