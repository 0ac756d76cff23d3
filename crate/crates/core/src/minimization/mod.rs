//! Tail minimization: compatibility analysis, closed covers encoded as
//! CNF, and a bounded-synthesis baseline.

mod compat;
mod cover;
mod naive;
mod search;

pub use compat::{greedy_clique, incompatibility, CompatibilityRelation, PartialSolution};
pub use cover::{cover_to_machine, decode_cover, encode_cover, machine_to_cover, CompatibleCover, CoverDecodeMap};
pub use naive::{decode_naive, encode_replacement_naive, minimize_tail_naive, NaiveDecodeMap};
pub use search::{minimize_om, minimize_tail, Minimized, SolveOptions, DEFAULT_STATE_CAP};

use crate::machines::{compose_cascade, equivalent, MealyMachine};
use crate::Error;

/// Whether `t2` can stand in for `t` behind the head `h`.
pub fn verify_replacement(h: &MealyMachine, t: &MealyMachine, t2: &MealyMachine) -> Result<bool, Error> {
    equivalent(&compose_cascade(h, t)?, &compose_cascade(h, t2)?)
}
