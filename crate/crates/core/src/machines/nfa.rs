use super::alphabet::{check_name, Alphabet, Symbol};
use super::mealy::State;
use crate::Error;

/// A nondeterministic finite automaton in which every state accepts, so its
/// language is prefix-closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: State,
    /// Sorted, duplicate-free successor sets, row-major by (state, symbol).
    delta: Vec<Vec<State>>,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: State,
        mut delta: Vec<Vec<State>>,
    ) -> Result<Self, Error> {
        let n = states.len();
        if n == 0 || initial >= n {
            return Err(Error::InvalidMachine("NFA needs a valid initial state".into()));
        }
        if delta.len() != n * alphabet.len() {
            return Err(Error::InvalidMachine("transition table has the wrong size".into()));
        }
        for set in delta.iter_mut() {
            if set.iter().any(|&s| s >= n) {
                return Err(Error::InvalidMachine("transition target out of range".into()));
            }
            set.sort_unstable();
            set.dedup();
        }
        let mut seen = std::collections::HashSet::new();
        for name in &states {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidMachine(format!("duplicate state `{name}`")));
            }
        }
        Ok(Nfa {
            alphabet,
            states,
            initial,
            delta,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
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

    pub fn successors(&self, s: State, a: Symbol) -> &[State] {
        &self.delta[s * self.alphabet.len() + a]
    }

    /// States reached from the initial state on `word`; empty when the
    /// word is rejected.
    pub fn reach(&self, word: &[Symbol]) -> Vec<State> {
        let mut current = vec![self.initial];
        let mut mark = vec![false; self.num_states()];
        for &a in word {
            let mut next = Vec::new();
            for &s in &current {
                for &t in self.successors(s, a) {
                    if !mark[t] {
                        mark[t] = true;
                        next.push(t);
                    }
                }
            }
            for &t in &next {
                mark[t] = false;
            }
            if next.is_empty() {
                return next;
            }
            current = next;
        }
        current
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&a| a < self.alphabet.len()) && !self.reach(word).is_empty()
    }

    /// `|S| + Σ |Δ(s, a)|`.
    pub fn size(&self) -> usize {
        self.states.len() + self.delta.iter().map(Vec::len).sum::<usize>()
    }
}
