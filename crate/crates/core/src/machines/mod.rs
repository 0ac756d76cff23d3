//! Alphabets, complete Mealy machines, NFAs and their text format.

mod alphabet;
mod format;
mod mealy;
mod nfa;

pub use alphabet::{Alphabet, Symbol};
pub use format::{
    parse_machine, serialize_machine, serialize_mealy, serialize_nfa, serialize_om, Machine, ParseError,
};
pub use mealy::{compose_cascade, equivalent, find_difference, MealyMachine, Run, State};
pub use nfa::Nfa;

pub(crate) use alphabet::{check_name, fresh_name, unique_names};
