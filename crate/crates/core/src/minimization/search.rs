use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use cascade_sat::{write_dimacs, Cnf, SatOutcome, Solver};
use tracing::debug;

use super::compat::{greedy_clique, incompatibility_unchecked, CompatibilityRelation, PartialSolution};
use super::cover::{cover_to_machine, decode_cover, encode_cover};
use crate::machines::MealyMachine;
use crate::observation::{determinize, image_automaton, implementation_witness, restriction, ObservationMachine};
use crate::Error;

/// Largest subset construction attempted when an upper bound is needed.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Solver choice, wall-clock deadline and optional CNF dump directory
/// shared by the search procedures.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub solver: Solver,
    pub deadline: Option<Instant>,
    pub emit_cnf: Option<PathBuf>,
    pub state_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            solver: Solver::default(),
            deadline: None,
            emit_cnf: None,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl SolveOptions {
    pub(crate) fn solve(&self, cnf: &Cnf, file_name: &str, last_n: usize) -> Result<Option<cascade_sat::Model>, Error> {
        if let Some(dir) = &self.emit_cnf {
            fs::create_dir_all(dir)?;
            let mut file = std::io::BufWriter::new(fs::File::create(dir.join(file_name))?);
            write_dimacs(cnf, &mut file)?;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout { last_n });
        }
        match self.solver.solve_until(cnf, self.deadline)? {
            SatOutcome::Sat(model) => Ok(Some(model)),
            SatOutcome::Unsat => Ok(None),
            SatOutcome::Timeout => Err(Error::Timeout { last_n }),
        }
    }
}

/// A minimal machine together with how it was found.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub machine: MealyMachine,
    pub sat_calls: usize,
    /// The clique already matched the upper bound, so no CNF was built.
    pub skipped_encoding: bool,
    pub clique_size: usize,
}

/// Smallest machine implementing `m`.
///
/// Searches `n = |clique|, |clique| + 1, ...` for a closed cover of `n`
/// compatibles. A `witness` implementing `m` bounds the search: once `n`
/// reaches its size the witness itself is returned. Without a witness, a
/// bound is taken from the subset construction if the search passes `|S|`.
pub fn minimize_om(
    m: &ObservationMachine,
    witness: Option<&MealyMachine>,
    opts: &SolveOptions,
) -> Result<Minimized, Error> {
    m.require_consistent()?;
    if let Some(w) = witness {
        if let Some(word) = implementation_witness(w, m)? {
            return Err(Error::NotAnImplementation {
                witness: m.inputs().render(&word),
            });
        }
    }
    let m = m.trimmed();
    let rel = incompatibility_unchecked(&m);
    let partial = greedy_clique(&rel);
    search(&m, &rel, &partial, witness.cloned(), opts)
}

fn search(
    m: &ObservationMachine,
    rel: &CompatibilityRelation,
    partial: &PartialSolution,
    mut upper: Option<MealyMachine>,
    opts: &SolveOptions,
) -> Result<Minimized, Error> {
    let clique_size = partial.clique.len();
    if let Some(w) = upper.take_if(|w| w.num_states() <= clique_size) {
        return Ok(Minimized {
            machine: w,
            sat_calls: 0,
            skipped_encoding: true,
            clique_size,
        });
    }
    let mut sat_calls = 0;
    let mut n = clique_size;
    loop {
        if let Some(w) = upper.take_if(|w| w.num_states() <= n) {
            return Ok(Minimized {
                machine: w,
                sat_calls,
                skipped_encoding: false,
                clique_size,
            });
        }
        if upper.is_none() && n > m.num_states() {
            upper = Some(determinize(m, opts.state_cap)?.minimized());
            continue;
        }
        let (cnf, map) = encode_cover(m, n, rel, partial)?;
        debug!(n, vars = cnf.var_count(), clauses = cnf.num_clauses(), "cover encoding");
        sat_calls += 1;
        if let Some(model) = opts.solve(&cnf, &format!("cover_n{n}.cnf"), n)? {
            let cover = decode_cover(&model, &map);
            cover.check(m, rel)?;
            let machine = cover_to_machine(&cover, m)?;
            return Ok(Minimized {
                machine,
                sat_calls,
                skipped_encoding: false,
                clique_size,
            });
        }
        n += 1;
    }
}

/// Smallest replacement for `t` in the cascade `t∘h`.
///
/// Builds the restriction of `t` to the output language of `h` and
/// minimizes it. When the clique already has `|S_t|` states, `t` is
/// returned untouched without encoding. Otherwise the classically
/// minimized `t` bounds the search from above.
pub fn minimize_tail(h: &MealyMachine, t: &MealyMachine, opts: &SolveOptions) -> Result<Minimized, Error> {
    let m = restriction(t, &image_automaton(h))?;
    let rel = incompatibility_unchecked(&m);
    let partial = greedy_clique(&rel);
    debug!(restriction = m.num_states(), clique = partial.clique.len(), "tail restriction");
    if partial.clique.len() >= t.num_states() {
        return Ok(Minimized {
            machine: t.clone(),
            sat_calls: 0,
            skipped_encoding: true,
            clique_size: partial.clique.len(),
        });
    }
    let mut found = search(&m, &rel, &partial, Some(t.minimized()), opts)?;
    found.skipped_encoding = false;
    Ok(found)
}
