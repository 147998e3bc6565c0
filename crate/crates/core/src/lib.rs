//! Exact information-leakage analysis for battery-backed smart meter channels.
//!
//! A household battery sits between the consumer's appliances and the utility
//! provider: at each discrete time step the energy management unit requests
//! `y_i` units from the grid while the appliances draw `x_i`, and the battery
//! absorbs the difference. The utility only ever sees the request sequence, so
//! the battery can be driven to hide consumption patterns. This crate models
//! that channel exactly at small scale:
//!
//! - [`ems`] — battery dynamics, stability (no outage, no overflow), and
//!   exhaustive enumeration of the stable request sequences for a given
//!   consumption sequence.
//! - [`trapdoor`] — the ball-in-box trapdoor channel and a machine-checked
//!   state equivalence with the binary (`alpha = gamma = 1`) battery channel.
//! - [`policy`] — the block repetition request policy (constant blocks of `0`
//!   or `alpha`), plus reference policies used to probe leakage claims.
//! - [`process`] — exact finite-support laws for the consumption process:
//!   i.i.d., Markov, and the block processes that make the leakage bounds
//!   tight.
//! - [`leakage`] — exact mutual-information leakage rates, the closed-form
//!   bounds, a stable-set disjointness checker, and a brute-force minimum
//!   leakage oracle for tiny instances.
//!
//! All computations are exact (up to `f64` rounding): distributions are sparse
//! maps over the full sequence space, never Monte Carlo estimates.

pub mod config;
pub mod ems;
pub mod error;
pub mod leakage;
pub mod policy;
pub mod process;
pub mod trapdoor;

pub use config::EmsConfig;
pub use ems::{
    enumerate_stable_set, enumerate_stable_set_capped, is_stable, random_stable_request, step,
    trajectory, BatteryTrajectory, ConsumptionSequence, RequestSequence, StepOutcome, Violation,
    ViolationKind, DEFAULT_ENUMERATION_CAP,
};
pub use error::{Error, Result};
pub use leakage::{
    binary_entropy, brute_force_min_leakage, exact_leakage, output_law, theorem1_bound,
    theorem2_rate, theorem3_bound, theorem3_bound_asymptotic, theorem4_rate, verify_disjointness,
    DisjointnessReport, DisjointnessWitness, LeakageReport, TheoremBound, BRUTE_FORCE_GUARD,
};
pub use policy::{
    apply_policy, choose_block, disjoint_block_length, max_block_length, BlockAlphabet,
    BlockChoice, BlockPolicy, EchoPolicy, GreedyChargePolicy, MapPolicy, Policy,
};
pub use process::{
    iid_process, iid_process_capped, markov_process, markov_process_capped, mean_block_process,
    mean_block_process_capped, uniform_block_process, uniform_block_process_capped,
    SequenceDistribution, DEFAULT_SUPPORT_CAP,
};
pub use trapdoor::{
    ems_to_trapdoor, is_trapdoor_stable, trapdoor_step, trapdoor_to_ems, BallColor, TrapdoorBox,
    TrapdoorSequences,
};
