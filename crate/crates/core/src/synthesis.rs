//! Solving `T∘H ≡ M` for the tail `T`.

use std::collections::{HashMap, VecDeque};

use crate::machines::{MealyMachine, State, Symbol};
use crate::minimization::{minimize_om, Minimized, SolveOptions};
use crate::observation::{determinize, ObservationMachine, Transition};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Input words with equal head outputs but different model outputs.
    pub witness: Option<(Vec<Symbol>, Vec<Symbol>)>,
}

fn check_inputs(h: &MealyMachine, m: &MealyMachine) -> Result<(), Error> {
    if h.inputs() != m.inputs() {
        return Err(Error::AlphabetMismatch("head and model read different inputs".into()));
    }
    Ok(())
}

/// Decides whether some tail `t` satisfies `t∘h ≡ m`.
///
/// Explores pairs of runs of `h × m` on two input words that `h` maps to
/// the same output word. The equation is unsolvable exactly when such a
/// pair can make `m` answer differently; the shortest such pair is
/// returned as the witness.
pub fn feasible(h: &MealyMachine, m: &MealyMachine) -> Result<FeasibilityVerdict, Error> {
    check_inputs(h, m)?;
    let (nh, nm, k) = (h.num_states(), m.num_states(), h.inputs().len());
    let encode = |a: State, b: State, c: State, d: State| ((a * nm + b) * nh + c) * nm + d;
    let start = encode(h.initial(), m.initial(), h.initial(), m.initial());
    let mut parent: Vec<Option<(usize, Symbol, Symbol)>> = vec![None; nh * nm * nh * nm];
    let mut visited = vec![false; nh * nm * nh * nm];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let d = p % nm;
        let c = (p / nm) % nh;
        let b = (p / (nm * nh)) % nm;
        let a = p / (nm * nh * nm);
        for x in 0..k {
            for x2 in 0..k {
                if h.output(a, x) != h.output(c, x2) {
                    continue;
                }
                if m.output(b, x) != m.output(d, x2) {
                    let (mut w1, mut w2) = (vec![x], vec![x2]);
                    let mut node = p;
                    while let Some((prev, s1, s2)) = parent[node] {
                        w1.push(s1);
                        w2.push(s2);
                        node = prev;
                    }
                    w1.reverse();
                    w2.reverse();
                    return Ok(FeasibilityVerdict {
                        feasible: false,
                        witness: Some((w1, w2)),
                    });
                }
                let q = encode(h.next(a, x), m.next(b, x), h.next(c, x2), m.next(d, x2));
                if !visited[q] {
                    visited[q] = true;
                    parent[q] = Some((p, x, x2));
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(FeasibilityVerdict {
        feasible: true,
        witness: None,
    })
}

fn require_feasible(h: &MealyMachine, m: &MealyMachine) -> Result<(), Error> {
    match feasible(h, m)?.witness {
        None => Ok(()),
        Some((w1, w2)) => Err(Error::Infeasible {
            first: h.inputs().render(&w1),
            second: h.inputs().render(&w2),
        }),
    }
}

/// OM over the reachable part of `h × m` whose implementations are
/// exactly the tails solving `t∘h ≡ m`. On head output `y`, a pair moves
/// to every successor reachable by an input that makes `h` emit `y`.
pub fn solution_om(h: &MealyMachine, m: &MealyMachine) -> Result<ObservationMachine, Error> {
    require_feasible(h, m)?;
    let ys = h.outputs().len();
    let mut index: HashMap<(State, State), usize> = HashMap::new();
    let mut pairs = vec![(h.initial(), m.initial())];
    index.insert(pairs[0], 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (sh, sm) = pairs[i];
        let mut row: Vec<Option<Transition>> = vec![None; ys];
        for x in h.inputs().symbols() {
            let succ = (h.next(sh, x), m.next(sm, x));
            let j = *index.entry(succ).or_insert_with(|| {
                pairs.push(succ);
                pairs.len() - 1
            });
            let entry = row[h.output(sh, x)].get_or_insert_with(|| Transition {
                targets: Vec::new(),
                output: m.output(sm, x),
            });
            debug_assert_eq!(entry.output, m.output(sm, x));
            entry.targets.push(j);
        }
        trans.extend(row);
        i += 1;
    }
    let names = pairs
        .iter()
        .map(|&(sh, sm)| format!("{}.{}", h.state_name(sh), m.state_name(sm)))
        .collect();
    Ok(ObservationMachine::from_parts(
        h.outputs().clone(),
        m.outputs().clone(),
        names,
        0,
        trans,
    ))
}

/// Some solution, by subset construction on the solution OM. Its size can
/// be exponential; more than `cap` states is an error.
pub fn some_solution(h: &MealyMachine, m: &MealyMachine, cap: usize) -> Result<MealyMachine, Error> {
    determinize(&solution_om(h, m)?, cap)
}

/// A solution with the fewest states.
pub fn minimal_solution(h: &MealyMachine, m: &MealyMachine, opts: &SolveOptions) -> Result<Minimized, Error> {
    minimize_om(&solution_om(h, m)?, None, opts)
}
