//! Bijective weighted sentence alignment: model, exact solvers, hardness
//! reductions, witness encodings and witness-recovery experiments.

pub mod error;
pub mod matching;
pub mod model;
pub mod recovery;
pub mod reductions;
pub mod solvers;
pub mod witness;

pub use error::{Error, Result};
pub use model::{
    alignment_weight, check_alignment, enumerate_partitions, is_valid_alignment, pad_to_bijective, Alignment,
    Link, Sentence, Span, Weight, WeightFn, WsaInstance, DEFAULT_GUARD,
};
pub use solvers::{decide_weight_one, solve_exact, solve_monotone_dp, solve_pwsa, SolveResult, SolveStatus};
pub use witness::{BitString, DualWitness, MatrixWitness, PartitionWitness, Witness};
