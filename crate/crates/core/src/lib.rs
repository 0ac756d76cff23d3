//! Minimization and synthesis of the tail machine in a cascade `T∘H`,
//! where a head machine `H` feeds its outputs into a tail machine `T`.
//!
//! The central data structure is the [`ObservationMachine`]: an
//! incompletely specified transducer with universally branching
//! transitions. Tails are minimized by restricting `T` to the output
//! language of `H` and searching for a smallest closed cover of
//! compatibles with a SAT solver; tail equations `T∘H ≡ M` are solved by
//! building an observation machine whose implementations are exactly the
//! solutions.

pub mod bench;
pub mod generators;
pub mod machines;
pub mod minimization;
pub mod observation;
pub mod synthesis;

pub use machines::{
    compose_cascade, equivalent, find_difference, parse_machine, serialize_machine, Alphabet, Machine,
    MealyMachine, Nfa, ParseError, Run, State, Symbol,
};
pub use observation::{ObservationMachine, Transition};

pub use cascade_sat as sat;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("observation machine is inconsistent on `{witness}`")]
    Inconsistent { witness: String },
    #[error("machine does not implement the observation machine on `{witness}`")]
    NotAnImplementation { witness: String },
    #[error("no tail exists: inputs `{first}` and `{second}` give equal head outputs but different model outputs")]
    Infeasible { first: String, second: String },
    #[error("solution exceeds the cap of {cap} states")]
    SolutionTooLarge { cap: usize },
    #[error("solver timed out while trying {last_n} states")]
    Timeout { last_n: usize },
    #[error("cover is not closed: {0}")]
    ClosureViolation(String),
    #[error("bound {n} is below the clique size {clique}")]
    BoundBelowClique { n: usize, clique: usize },
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error(transparent)]
    Sat(#[from] cascade_sat::SatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
