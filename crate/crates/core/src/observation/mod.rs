//! Observation machines: incompletely specified transducers whose
//! next-state function yields a nonempty *set* of states. The branching is
//! universal: an implementation must agree with every run.

mod construct;
mod semantics;

pub use construct::{image_automaton, restriction};
pub use semantics::{determinize, implementation_witness, implements};

use std::collections::VecDeque;

use crate::machines::{check_name, unique_names, Alphabet, MealyMachine, State, Symbol};
use crate::Error;

/// A defined transition: nonempty sorted successor set and one output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub targets: Vec<State>,
    pub output: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMachine {
    inputs: Alphabet,
    outputs: Alphabet,
    states: Vec<String>,
    initial: State,
    trans: Vec<Option<Transition>>,
}

impl ObservationMachine {
    /// `trans` is row-major by (state, input); `None` marks an undefined
    /// pair. Successor sets are sorted and deduplicated.
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        states: Vec<String>,
        initial: State,
        mut trans: Vec<Option<Transition>>,
    ) -> Result<Self, Error> {
        let n = states.len();
        if n == 0 || initial >= n {
            return Err(Error::InvalidMachine("observation machine needs a valid initial state".into()));
        }
        if trans.len() != n * inputs.len() {
            return Err(Error::InvalidMachine("transition table has the wrong size".into()));
        }
        for t in trans.iter_mut().flatten() {
            if t.targets.is_empty() {
                return Err(Error::InvalidMachine("empty successor set".into()));
            }
            if t.targets.iter().any(|&s| s >= n) || t.output >= outputs.len() {
                return Err(Error::InvalidMachine("transition entry out of range".into()));
            }
            t.targets.sort_unstable();
            t.targets.dedup();
        }
        let mut seen = std::collections::HashSet::new();
        for name in &states {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidMachine(format!("duplicate state `{name}`")));
            }
        }
        Ok(ObservationMachine {
            inputs,
            outputs,
            states,
            initial,
            trans,
        })
    }

    /// Builds an OM with states named `s0..` or, on collisions, `q0..`.
    pub(crate) fn from_parts(
        inputs: Alphabet,
        outputs: Alphabet,
        names: Vec<String>,
        initial: State,
        trans: Vec<Option<Transition>>,
    ) -> Self {
        let names = unique_names(names);
        ObservationMachine::new(inputs, outputs, names, initial, trans)
            .expect("constructed observation machine is valid")
    }

    #[cfg(test)]
    pub(crate) fn renamed(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.states.len());
        self.states = names;
        self
    }

    /// A complete machine viewed as an OM without branching.
    pub fn from_mealy(m: &MealyMachine) -> Self {
        let trans = (0..m.num_states())
            .flat_map(|s| {
                m.inputs().symbols().map(move |x| {
                    Some(Transition {
                        targets: vec![m.next(s, x)],
                        output: m.output(s, x),
                    })
                })
            })
            .collect();
        ObservationMachine {
            inputs: m.inputs().clone(),
            outputs: m.outputs().clone(),
            states: m.state_names().to_vec(),
            initial: m.initial(),
            trans,
        }
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: State) -> &str {
        &self.states[s]
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    #[inline]
    pub fn transition(&self, s: State, y: Symbol) -> Option<&Transition> {
        self.trans[s * self.inputs.len() + y].as_ref()
    }

    pub fn is_defined(&self, s: State, y: Symbol) -> bool {
        self.transition(s, y).is_some()
    }

    /// Defined pairs in (state, input) order.
    pub fn domain(&self) -> impl Iterator<Item = (State, Symbol, &Transition)> + '_ {
        let k = self.inputs.len();
        self.trans
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.as_ref().map(|t| (i / k, i % k, t)))
    }

    /// Largest successor set; 0 when nothing is defined.
    pub fn degree(&self) -> usize {
        self.domain().map(|(_, _, t)| t.targets.len()).max().unwrap_or(0)
    }

    /// `|S| + Σ |Δ(s, y)|` over the domain.
    pub fn size(&self) -> usize {
        self.num_states() + self.domain().map(|(_, _, t)| t.targets.len()).sum::<usize>()
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for y in self.inputs.symbols() {
                if let Some(t) = self.transition(s, y) {
                    for &u in &t.targets {
                        if !seen[u] {
                            seen[u] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        seen
    }

    /// The sub-machine on reachable states, keeping their relative order.
    pub fn trimmed(&self) -> ObservationMachine {
        let keep = self.reachable();
        if keep.iter().all(|&k| k) {
            return self.clone();
        }
        let mut map = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for s in (0..self.num_states()).filter(|&s| keep[s]) {
            map[s] = names.len();
            names.push(self.states[s].clone());
        }
        let mut trans = Vec::with_capacity(names.len() * self.inputs.len());
        for s in (0..self.num_states()).filter(|&s| keep[s]) {
            for y in self.inputs.symbols() {
                trans.push(self.transition(s, y).map(|t| Transition {
                    targets: t.targets.iter().map(|&u| map[u]).collect(),
                    output: t.output,
                }));
            }
        }
        ObservationMachine {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            states: names,
            initial: map[self.initial],
            trans,
        }
    }

    /// Outputs along every run on `word` from the initial state, or `None`
    /// if no run exists. Consistent machines yield a single output word.
    pub fn outputs_on(&self, word: &[Symbol]) -> Option<Vec<Vec<Symbol>>> {
        let mut runs: Vec<(State, Vec<Symbol>)> = vec![(self.initial, Vec::new())];
        for &y in word {
            let mut next = Vec::new();
            for (s, out) in &runs {
                if let Some(t) = self.transition(*s, y) {
                    for &u in &t.targets {
                        let mut o = out.clone();
                        o.push(t.output);
                        next.push((u, o));
                    }
                }
            }
            if next.is_empty() {
                return None;
            }
            next.sort();
            next.dedup();
            runs = next;
        }
        let mut outs: Vec<Vec<Symbol>> = runs.into_iter().map(|(_, o)| o).collect();
        outs.sort();
        outs.dedup();
        Some(outs)
    }

    /// Shortest defined word on which two runs disagree, if any.
    pub fn inconsistency_witness(&self) -> Option<Vec<Symbol>> {
        semantics::inconsistency_witness(self)
    }

    pub fn is_consistent(&self) -> bool {
        self.inconsistency_witness().is_none()
    }

    pub(crate) fn require_consistent(&self) -> Result<(), Error> {
        match self.inconsistency_witness() {
            None => Ok(()),
            Some(word) => Err(Error::Inconsistent {
                witness: self.inputs.render(&word),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branching() -> ObservationMachine {
        // r --a--> {s1, s2}; s1 --a/0--> s1; s2 --a/1--> s2
        let ab = Alphabet::new(["a"]).unwrap();
        let out = Alphabet::numbered(2);
        let t = |targets: Vec<State>, output| Some(Transition { targets, output });
        ObservationMachine::new(
            ab,
            out,
            vec!["r".into(), "s1".into(), "s2".into()],
            0,
            vec![t(vec![2, 1], 0), t(vec![1], 0), t(vec![2], 1)],
        )
        .unwrap()
    }

    #[test]
    fn depth_two_divergence() {
        let m = branching();
        assert_eq!(m.degree(), 2);
        assert_eq!(m.size(), 3 + 4);
        assert_eq!(m.inconsistency_witness(), Some(vec![0, 0]));
        assert_eq!(m.transition(0, 0).unwrap().targets, vec![1, 2]);
    }

    #[test]
    fn mealy_view_is_consistent() {
        let m = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 3, 0, |s, x| {
            ((s + x) % 3, x)
        })
        .unwrap();
        let om = ObservationMachine::from_mealy(&m);
        assert!(om.is_consistent());
        assert_eq!(om.degree(), 1);
    }

    #[test]
    fn empty_successor_set_rejected() {
        let res = ObservationMachine::new(
            Alphabet::numbered(1),
            Alphabet::numbered(1),
            vec!["s".into()],
            0,
            vec![Some(Transition {
                targets: vec![],
                output: 0,
            })],
        );
        assert!(res.is_err());
    }
}
