use std::collections::HashMap;

use super::{ObservationMachine, Transition};
use crate::machines::{MealyMachine, Nfa, State};
use crate::Error;

/// NFA over `h`'s output alphabet obtained by erasing input labels; it
/// accepts exactly the output words `h` can produce.
pub fn image_automaton(h: &MealyMachine) -> Nfa {
    let ys = h.outputs().len();
    let mut delta = vec![Vec::new(); h.num_states() * ys];
    for s in 0..h.num_states() {
        for x in h.inputs().symbols() {
            delta[s * ys + h.output(s, x)].push(h.next(s, x));
        }
    }
    Nfa::new(
        h.outputs().clone(),
        h.state_names().to_vec(),
        h.initial(),
        delta,
    )
    .expect("image automaton of a valid machine is valid")
}

/// The OM behaving like `t` on the words of `a` and undefined elsewhere.
/// Only product states reachable from `(initial_t, initial_a)` are built.
pub fn restriction(t: &MealyMachine, a: &Nfa) -> Result<ObservationMachine, Error> {
    if t.inputs() != a.alphabet() {
        return Err(Error::AlphabetMismatch(
            "machine inputs differ from the automaton alphabet".into(),
        ));
    }
    let k = t.inputs().len();
    let mut index: HashMap<(State, State), usize> = HashMap::new();
    let mut pairs = vec![(t.initial(), a.initial())];
    index.insert(pairs[0], 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (st, sa) = pairs[i];
        for y in 0..k {
            let succ = a.successors(sa, y);
            if succ.is_empty() {
                trans.push(None);
                continue;
            }
            let next_t = t.next(st, y);
            let targets = succ
                .iter()
                .map(|&u| {
                    let len = pairs.len();
                    let j = *index.entry((next_t, u)).or_insert(len);
                    if j == len {
                        pairs.push((next_t, u));
                    }
                    j
                })
                .collect();
            trans.push(Some(Transition {
                targets,
                output: t.output(st, y),
            }));
        }
        i += 1;
    }
    let names = pairs
        .iter()
        .map(|&(st, sa)| format!("{}.{}", t.state_name(st), a.state_name(sa)))
        .collect();
    Ok(ObservationMachine::from_parts(
        t.inputs().clone(),
        t.outputs().clone(),
        names,
        0,
        trans,
    ))
}
