use std::collections::HashMap;

use cascade_sat::{Cnf, Model};
use tracing::debug;

use super::search::{Minimized, SolveOptions};
use crate::machines::{MealyMachine, State, Symbol};
use crate::Error;

/// Variable layout of the bounded-synthesis encoding for an `n`-state
/// candidate tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveDecodeMap {
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    /// Reachable (head, tail) state pairs of the cascade, in BFS order.
    pub pairs: Vec<(State, State)>,
}

impl NaiveDecodeMap {
    /// Candidate moves from `q` to `q2` on `y`.
    pub fn transition(&self, q: usize, y: Symbol, q2: usize) -> i32 {
        (1 + (q * self.inputs + y) * self.states + q2) as i32
    }

    /// Candidate outputs `z` in `q` on `y`.
    pub fn output(&self, q: usize, y: Symbol, z: Symbol) -> i32 {
        let base = self.states * self.inputs * self.states;
        (1 + base + (q * self.inputs + y) * self.outputs + z) as i32
    }

    /// Cascade pair `p` may be simulated by candidate state `q`.
    pub fn related(&self, p: usize, q: usize) -> i32 {
        let base = self.states * self.inputs * (self.states + self.outputs);
        (1 + base + p * self.states + q) as i32
    }

    pub fn var_count(&self) -> usize {
        self.states * self.inputs * (self.states + self.outputs) + self.pairs.len() * self.states
    }
}

type PairIndex = HashMap<(State, State), usize>;

fn cascade_pairs(h: &MealyMachine, t: &MealyMachine) -> (Vec<(State, State)>, PairIndex) {
    let mut pairs = vec![(h.initial(), t.initial())];
    let mut index = HashMap::from([(pairs[0], 0)]);
    let mut i = 0;
    while i < pairs.len() {
        let (sh, st) = pairs[i];
        for x in h.inputs().symbols() {
            let next = (h.next(sh, x), t.next(st, h.output(sh, x)));
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(next) {
                e.insert(pairs.len());
                pairs.push(next);
            }
        }
        i += 1;
    }
    (pairs, index)
}

/// CNF satisfiable iff some complete `n`-state machine can replace `t` in
/// `t∘h`. It guesses the candidate's transitions and outputs and a
/// relation between cascade states and candidate states that is closed
/// under joint steps and forces matching outputs.
pub fn encode_replacement_naive(
    h: &MealyMachine,
    t: &MealyMachine,
    n: usize,
) -> Result<(Cnf, NaiveDecodeMap), Error> {
    if t.inputs() != h.outputs() {
        return Err(Error::AlphabetMismatch("tail inputs differ from head outputs".into()));
    }
    if n == 0 {
        return Err(Error::BoundBelowClique { n, clique: 1 });
    }
    let (pairs, index) = cascade_pairs(h, t);
    let map = NaiveDecodeMap {
        states: n,
        inputs: t.inputs().len(),
        outputs: t.outputs().len(),
        pairs,
    };
    let mut cnf = Cnf::with_vars(map.var_count() as u32);
    cnf.add_clause([map.related(0, 0)]);
    for (p, &(sh, st)) in map.pairs.iter().enumerate() {
        for x in h.inputs().symbols() {
            let y = h.output(sh, x);
            let z = t.output(st, y);
            let p2 = index[&(h.next(sh, x), t.next(st, y))];
            for q in 0..n {
                cnf.add_clause([-map.related(p, q), map.output(q, y, z)]);
                for q2 in 0..n {
                    cnf.add_clause([-map.related(p, q), -map.transition(q, y, q2), map.related(p2, q2)]);
                }
            }
        }
    }
    for q in 0..n {
        for y in 0..map.inputs {
            cnf.add_clause((0..n).map(|q2| map.transition(q, y, q2)));
            cnf.add_clause((0..map.outputs).map(|z| map.output(q, y, z)));
            for z1 in 0..map.outputs {
                for z2 in z1 + 1..map.outputs {
                    cnf.add_clause([-map.output(q, y, z1), -map.output(q, y, z2)]);
                }
            }
        }
    }
    Ok((cnf, map))
}

/// The candidate machine of a model: least true successor, the unique true
/// output.
pub fn decode_naive(model: &Model, map: &NaiveDecodeMap, t: &MealyMachine) -> Result<MealyMachine, Error> {
    let n = map.states;
    let mut next = Vec::with_capacity(n * map.inputs);
    let mut out = Vec::with_capacity(n * map.inputs);
    for q in 0..n {
        for y in 0..map.inputs {
            next.push((0..n).find(|&q2| model.value(map.transition(q, y, q2))).unwrap_or(q));
            out.push((0..map.outputs).find(|&z| model.value(map.output(q, y, z))).unwrap_or(0));
        }
    }
    let states = (0..n).map(|q| format!("q{q}")).collect();
    MealyMachine::new(t.inputs().clone(), t.outputs().clone(), states, 0, next, out)
}

/// Smallest replacement by trying `n = 1, 2, ..., |S_t|` with the
/// bounded-synthesis encoding.
pub fn minimize_tail_naive(h: &MealyMachine, t: &MealyMachine, opts: &SolveOptions) -> Result<Minimized, Error> {
    for n in 1..=t.num_states() {
        let (cnf, map) = encode_replacement_naive(h, t, n)?;
        debug!(n, vars = cnf.var_count(), clauses = cnf.num_clauses(), "naive encoding");
        if let Some(model) = opts.solve(&cnf, &format!("naive_n{n}.cnf"), n)? {
            let machine = decode_naive(&model, &map, t)?;
            if !super::verify_replacement(h, t, &machine)? {
                return Err(Error::InvalidMachine("naive model does not decode to a replacement".into()));
            }
            return Ok(Minimized {
                machine,
                sat_calls: n,
                skipped_encoding: false,
                clique_size: 0,
            });
        }
    }
    unreachable!("the tail itself satisfies the encoding at n = |S_t|")
}
