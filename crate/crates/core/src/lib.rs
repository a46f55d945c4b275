//! Solver for two-player inclusion games over word-generating higher-order
//! recursion schemes.

pub mod automaton;
pub mod domain;
pub mod formula;
pub mod kind;
pub mod scheme;
pub mod solver;
pub mod strategy;
pub mod term;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use automaton::{AccClosure, LetterId, Nfa, StateSet};
pub use domain::{DomainError, Domains, Model, ModelKind, ValueId, ValueStore};
pub use formula::{AtomSet, FormulaId, FormulaStore};
pub use kind::{KindId, KindStore};
pub use scheme::{DetScheme, Instance, Owner, Scheme, Signature};
pub use solver::{
    check_transfer, SolveReport, Solver, SolverError, TransferReport, Valuation,
    DEFAULT_MAX_ITERS,
};
pub use strategy::{
    oracle_attractor, oracle_bounded_a_win, play_random, simulate_exhaustive, OracleOutcome,
    PlayTrace, StrategyError,
};
pub use term::{NonTerminalSym, TermId, TermStore, TerminalSym};
