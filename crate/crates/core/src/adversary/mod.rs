//! Adversary problems on Friedkin-Johnsen dynamics.

mod l1;
mod l2;
mod linf;
mod objective;
mod sparsity;

pub use l1::{l1_attack, L1Attack};
pub use l2::{l2_attack, pd_optimal, t_sweep, AttackResult, SweepRow, TIE_TOL};
pub use linf::{
    linf_attack_sdp, linf_brute, linf_round, LinfRelaxation, BRUTE_FORCE_MAX_N,
    DEFAULT_ROUNDING_TRIALS,
};
pub use objective::{
    disagreement_gain, evaluate_objective, sigma, Horizon, ObjectiveKind, ObjectiveSpec,
    SigmaMatrix,
};
pub use sparsity::{clique_sparsity_example, clique_sparsity_instance, sparsity_bound};
