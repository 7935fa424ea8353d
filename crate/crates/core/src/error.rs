use thiserror::Error;

use crate::model::{Span, Violation};

/// Errors raised by the alignment toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alignment: {0}")]
    InvalidAlignment(Violation),
    #[error("span {span} is not valid for a sentence of length {len}")]
    InvalidSpan { span: Span, len: usize },
    #[error("no padding needed: |f| = {f_len} is not shorter than |e| = {e_len}")]
    NoPaddingNeeded { e_len: usize, f_len: usize },
    #[error("sentence length {len} exceeds the partition guard {guard}")]
    SizeGuard { len: usize, guard: usize },
    #[error("one sentence is empty and the other is not; no alignment exists")]
    EmptyMismatch,
    #[error("weight function is not {{0,1}}-valued")]
    NotZeroOne,
    #[error("expected |f| <= |e| for a phrase-to-word instance, got |e| = {e_len}, |f| = {f_len}")]
    TargetLongerThanSource { e_len: usize, f_len: usize },
    #[error("variable {var} does not occur in both polarities; preprocess the formula first")]
    Unpreprocessed { var: usize },
    #[error("malformed formula: {0}")]
    InvalidFormula(String),
    #[error("malformed graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {vertex} is isolated")]
    IsolatedVertex { vertex: usize },
    #[error("cover budget k = {k} out of range 1..={n}")]
    BudgetOutOfRange { k: usize, n: usize },
    #[error("wrong encoding: {0}")]
    WrongEncoding(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("witness has {found} ones, expected {expected}")]
    PopcountMismatch { expected: usize, found: usize },
    #[error("block of variable {var} has too few copies for a direct readout")]
    TooFewOccurrences { var: usize },
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("decoded vertex set is not a cover within budget")]
    NotACover,
    #[error("decision oracle answered inconsistently")]
    InconsistentOracle,
    #[error("corruption budget {budget} exceeds witness length {len}")]
    BudgetExceedsLength { budget: usize, len: usize },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
