use std::collections::{HashMap, VecDeque};

use super::{ObservationMachine, Transition};
use crate::machines::{MealyMachine, State, Symbol};
use crate::Error;

fn rebuild_word(parent: &[Option<(usize, Symbol)>], mut node: usize, last: Symbol) -> Vec<Symbol> {
    let mut word = vec![last];
    while let Some((prev, sym)) = parent[node] {
        word.push(sym);
        node = prev;
    }
    word.reverse();
    word
}

/// Breadth-first search over unordered pairs of states reachable by the
/// same word. A pair that defines some input with two different outputs
/// yields the witness.
pub(super) fn inconsistency_witness(m: &ObservationMachine) -> Option<Vec<Symbol>> {
    let n = m.num_states();
    let key = |a: State, b: State| if a <= b { a * n + b } else { b * n + a };
    let start = key(m.initial(), m.initial());
    let mut visited = vec![false; n * n];
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; n * n];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let (a, b) = (p / n, p % n);
        for y in m.inputs().symbols() {
            let (Some(ta), Some(tb)) = (m.transition(a, y), m.transition(b, y)) else {
                continue;
            };
            if ta.output != tb.output {
                return Some(rebuild_word(&parent, p, y));
            }
            for &u in &ta.targets {
                for &v in &tb.targets {
                    let q = key(u, v);
                    if !visited[q] {
                        visited[q] = true;
                        parent[q] = Some((p, y));
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    None
}

fn check_alphabets(n: &MealyMachine, m: &ObservationMachine) -> Result<(), Error> {
    if n.inputs() != m.inputs() || n.outputs() != m.outputs() {
        return Err(Error::AlphabetMismatch(
            "machine and observation machine have different alphabets".into(),
        ));
    }
    Ok(())
}

/// Shortest word defined in `m` on which `n` answers differently, or
/// `None` when `n` implements `m`.
pub fn implementation_witness(
    n: &MealyMachine,
    m: &ObservationMachine,
) -> Result<Option<Vec<Symbol>>, Error> {
    check_alphabets(n, m)?;
    m.require_consistent()?;
    Ok(witness_unchecked(n, m))
}

pub(crate) fn witness_unchecked(n: &MealyMachine, m: &ObservationMachine) -> Option<Vec<Symbol>> {
    let ms = m.num_states();
    let start = n.initial() * ms + m.initial();
    let mut visited = vec![false; n.num_states() * ms];
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; n.num_states() * ms];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let (sn, sm) = (p / ms, p % ms);
        for y in m.inputs().symbols() {
            let Some(t) = m.transition(sm, y) else {
                continue;
            };
            if n.output(sn, y) != t.output {
                return Some(rebuild_word(&parent, p, y));
            }
            let next_n = n.next(sn, y);
            for &u in &t.targets {
                let q = next_n * ms + u;
                if !visited[q] {
                    visited[q] = true;
                    parent[q] = Some((p, y));
                    queue.push_back(q);
                }
            }
        }
    }
    None
}

/// Whether `n` agrees with `m` on every word defined in `m`.
pub fn implements(n: &MealyMachine, m: &ObservationMachine) -> Result<bool, Error> {
    Ok(implementation_witness(n, m)?.is_none())
}

/// Subset construction: each state of the result is the set of OM states
/// reachable on some word. Inputs undefined in every member of a subset
/// become self-loops with the first output symbol. Fails once more than
/// `cap` subsets are discovered.
pub fn determinize(m: &ObservationMachine, cap: usize) -> Result<MealyMachine, Error> {
    m.require_consistent()?;
    let k = m.inputs().len();
    let mut index: HashMap<Vec<State>, usize> = HashMap::new();
    let mut subsets = vec![vec![m.initial()]];
    index.insert(subsets[0].clone(), 0);
    let mut next = Vec::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        for y in 0..k {
            let defined: Vec<&Transition> = subsets[i]
                .iter()
                .filter_map(|&s| m.transition(s, y))
                .collect();
            if defined.is_empty() {
                next.push(i);
                out.push(0);
                continue;
            }
            let mut target: Vec<State> = defined.iter().flat_map(|t| t.targets.iter().copied()).collect();
            target.sort_unstable();
            target.dedup();
            let j = match index.get(&target) {
                Some(&j) => j,
                None => {
                    if subsets.len() >= cap {
                        return Err(Error::SolutionTooLarge { cap });
                    }
                    index.insert(target.clone(), subsets.len());
                    subsets.push(target);
                    subsets.len() - 1
                }
            };
            next.push(j);
            out.push(defined[0].output);
        }
        i += 1;
    }
    let states = (0..subsets.len()).map(|i| format!("q{i}")).collect();
    MealyMachine::new(m.inputs().clone(), m.outputs().clone(), states, 0, next, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::Alphabet;

    fn restricted_copy(n: &MealyMachine, keep: impl Fn(State, Symbol) -> bool) -> ObservationMachine {
        let trans = (0..n.num_states())
            .flat_map(|s| n.inputs().symbols().map(move |y| (s, y)))
            .map(|(s, y)| {
                keep(s, y).then(|| Transition {
                    targets: vec![n.next(s, y)],
                    output: n.output(s, y),
                })
            })
            .collect();
        ObservationMachine::new(
            n.inputs().clone(),
            n.outputs().clone(),
            n.state_names().to_vec(),
            n.initial(),
            trans,
        )
        .unwrap()
    }

    fn counter() -> MealyMachine {
        MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(3), 3, 0, |s, x| {
            ((s + x) % 3, s)
        })
        .unwrap()
    }

    #[test]
    fn empty_domain_is_implemented_by_anything() {
        let n = counter();
        let m = restricted_copy(&n, |_, _| false);
        assert!(implements(&n, &m).unwrap());
    }

    #[test]
    fn restriction_of_own_behaviour() {
        let n = counter();
        let m = restricted_copy(&n, |s, y| (s + y) % 2 == 0);
        assert!(implements(&n, &m).unwrap());
    }

    #[test]
    fn witness_is_shortest() {
        let n = counter();
        let other = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(3), 3, 0, |s, x| {
            ((s + x) % 3, if s == 2 { 0 } else { s })
        })
        .unwrap();
        let m = ObservationMachine::from_mealy(&other);
        let w = implementation_witness(&n, &m).unwrap().unwrap();
        assert_eq!(w, vec![1, 1, 0]);
    }

    #[test]
    fn determinize_implements() {
        let n = counter();
        let m = restricted_copy(&n, |s, _| s != 2);
        let d = determinize(&m, 100).unwrap();
        assert!(implements(&d, &m).unwrap());
        assert!(matches!(determinize(&m, 1), Err(Error::SolutionTooLarge { cap: 1 })));
    }
}
