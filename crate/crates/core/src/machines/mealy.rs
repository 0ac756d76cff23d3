use std::collections::{HashMap, VecDeque};

use super::alphabet::{check_name, unique_names, Alphabet, Symbol};
use crate::Error;

/// Index of a state inside its machine.
pub type State = usize;

/// A completely specified deterministic Mealy machine.
///
/// Transitions are stored row-major: entry `s * |inputs| + x` holds the
/// successor and output of state `s` on input `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    inputs: Alphabet,
    outputs: Alphabet,
    states: Vec<String>,
    initial: State,
    next: Vec<State>,
    out: Vec<Symbol>,
}

/// The run of a machine on an input word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub states: Vec<State>,
    pub inputs: Vec<Symbol>,
    pub outputs: Vec<Symbol>,
}

impl MealyMachine {
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        states: Vec<String>,
        initial: State,
        next: Vec<State>,
        out: Vec<Symbol>,
    ) -> Result<Self, Error> {
        let n = states.len();
        if n == 0 {
            return Err(Error::InvalidMachine("machine has no states".into()));
        }
        if initial >= n {
            return Err(Error::InvalidMachine(format!("initial state {initial} out of range")));
        }
        let cells = n * inputs.len();
        if next.len() != cells || out.len() != cells {
            return Err(Error::InvalidMachine("transition table has the wrong size".into()));
        }
        if next.iter().any(|&s| s >= n) || out.iter().any(|&y| y >= outputs.len()) {
            return Err(Error::InvalidMachine("transition table entry out of range".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &states {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidMachine(format!("duplicate state `{name}`")));
            }
        }
        Ok(MealyMachine {
            inputs,
            outputs,
            states,
            initial,
            next,
            out,
        })
    }

    /// Builds a machine with states `s0..s{n-1}` from a transition function.
    pub fn from_fn(
        inputs: Alphabet,
        outputs: Alphabet,
        num_states: usize,
        initial: State,
        mut f: impl FnMut(State, Symbol) -> (State, Symbol),
    ) -> Result<Self, Error> {
        let k = inputs.len();
        let mut next = Vec::with_capacity(num_states * k);
        let mut out = Vec::with_capacity(num_states * k);
        for s in 0..num_states {
            for x in 0..k {
                let (t, y) = f(s, x);
                next.push(t);
                out.push(y);
            }
        }
        let states = (0..num_states).map(|i| format!("s{i}")).collect();
        MealyMachine::new(inputs, outputs, states, initial, next, out)
    }

    /// One-state machine copying its input to its output.
    pub fn identity(alphabet: Alphabet) -> Self {
        MealyMachine::from_fn(alphabet.clone(), alphabet, 1, 0, |_, x| (0, x))
            .expect("identity machine is valid")
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
    pub fn next(&self, s: State, x: Symbol) -> State {
        self.next[s * self.inputs.len() + x]
    }

    #[inline]
    pub fn output(&self, s: State, x: Symbol) -> Symbol {
        self.out[s * self.inputs.len() + x]
    }

    fn check_word(&self, word: &[Symbol]) -> Result<(), Error> {
        match word.iter().find(|&&x| x >= self.inputs.len()) {
            Some(x) => Err(Error::UnknownSymbol(format!("#{x}"))),
            None => Ok(()),
        }
    }

    /// Output word produced from the initial state.
    pub fn run(&self, word: &[Symbol]) -> Result<Vec<Symbol>, Error> {
        self.check_word(word)?;
        Ok(self.run_from(self.initial, word).1)
    }

    /// Like [`run`](Self::run) but on symbol names.
    pub fn run_named<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<String>, Error> {
        let word = self.inputs.word(word)?;
        Ok(self.run(&word)?
            .into_iter()
            .map(|y| self.outputs.name(y).to_string())
            .collect())
    }

    /// Final state and output word of the run from `s`. Symbols must be valid.
    pub fn run_from(&self, mut s: State, word: &[Symbol]) -> (State, Vec<Symbol>) {
        let mut outputs = Vec::with_capacity(word.len());
        for &x in word {
            outputs.push(self.output(s, x));
            s = self.next(s, x);
        }
        (s, outputs)
    }

    pub fn trace(&self, word: &[Symbol]) -> Result<Run, Error> {
        self.check_word(word)?;
        let mut states = vec![self.initial];
        let mut outputs = Vec::with_capacity(word.len());
        let mut s = self.initial;
        for &x in word {
            outputs.push(self.output(s, x));
            s = self.next(s, x);
            states.push(s);
        }
        Ok(Run {
            states,
            inputs: word.to_vec(),
            outputs,
        })
    }

    /// Marks the states reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for x in self.inputs.symbols() {
                let t = self.next(s, x);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// The machine restricted to its reachable states, in original order.
    pub fn trimmed(&self) -> MealyMachine {
        let keep = self.reachable();
        let mut map = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for (s, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            map[s] = names.len();
            names.push(self.states[s].clone());
        }
        self.quotient(&map, names)
    }

    /// Classical minimization: reachable states merged by Moore partition
    /// refinement. Each block keeps the name of its first member.
    pub fn minimized(&self) -> MealyMachine {
        let trimmed = self.trimmed();
        let n = trimmed.num_states();
        let k = trimmed.inputs.len();
        let mut block: Vec<usize> = {
            let mut ids = HashMap::new();
            (0..n)
                .map(|s| {
                    let row: Vec<Symbol> = (0..k).map(|x| trimmed.output(s, x)).collect();
                    let len = ids.len();
                    *ids.entry(row).or_insert(len)
                })
                .collect()
        };
        let mut count = block.iter().max().map_or(0, |&b| b + 1);
        loop {
            let mut ids = HashMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|s| {
                    let sig: Vec<usize> = std::iter::once(block[s])
                        .chain((0..k).map(|x| block[trimmed.next(s, x)]))
                        .collect();
                    let len = ids.len();
                    *ids.entry(sig).or_insert(len)
                })
                .collect();
            let refined_count = ids.len();
            block = refined;
            if refined_count == count {
                break;
            }
            count = refined_count;
        }
        let mut names = vec![String::new(); count];
        for s in (0..n).rev() {
            names[block[s]] = trimmed.states[s].clone();
        }
        trimmed.quotient(&block, names)
    }

    /// Collapses states along `map` (`usize::MAX` drops a state). All
    /// states mapped to one block must agree on their outgoing transitions
    /// modulo the map.
    fn quotient(&self, map: &[usize], names: Vec<String>) -> MealyMachine {
        let n = names.len();
        let k = self.inputs.len();
        let mut next = vec![0; n * k];
        let mut out = vec![0; n * k];
        for s in 0..self.num_states() {
            let b = map[s];
            if b == usize::MAX {
                continue;
            }
            for x in 0..k {
                next[b * k + x] = map[self.next(s, x)];
                out[b * k + x] = self.output(s, x);
            }
        }
        MealyMachine {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            states: names,
            initial: map[self.initial],
            next,
            out,
        }
    }

    /// Renumbers states in breadth-first order from the initial state
    /// (unreachable states follow in their original order) and names them
    /// `s0, s1, ...`.
    pub fn canonical(&self) -> MealyMachine {
        let n = self.num_states();
        let mut order = Vec::with_capacity(n);
        let mut map = vec![usize::MAX; n];
        let mut queue = VecDeque::from([self.initial]);
        map[self.initial] = 0;
        order.push(self.initial);
        while let Some(s) = queue.pop_front() {
            for x in self.inputs.symbols() {
                let t = self.next(s, x);
                if map[t] == usize::MAX {
                    map[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        for s in 0..n {
            if map[s] == usize::MAX {
                map[s] = order.len();
                order.push(s);
            }
        }
        let names = (0..n).map(|i| format!("s{i}")).collect();
        self.quotient(&map, names)
    }
}

/// The machine describing `t ∘ h`: `h`'s outputs drive `t`. Only product
/// states reachable from `(initial_h, initial_t)` are kept.
pub fn compose_cascade(h: &MealyMachine, t: &MealyMachine) -> Result<MealyMachine, Error> {
    if t.inputs() != h.outputs() {
        return Err(Error::AlphabetMismatch(
            "tail inputs differ from head outputs".into(),
        ));
    }
    let k = h.inputs().len();
    let mut index: HashMap<(State, State), usize> = HashMap::new();
    let mut pairs = vec![(h.initial(), t.initial())];
    index.insert(pairs[0], 0);
    let mut next = Vec::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (sh, st) = pairs[i];
        for x in 0..k {
            let y = h.output(sh, x);
            let succ = (h.next(sh, x), t.next(st, y));
            let len = pairs.len();
            let j = *index.entry(succ).or_insert_with(|| len);
            if j == len {
                pairs.push(succ);
            }
            next.push(j);
            out.push(t.output(st, y));
        }
        i += 1;
    }
    let names = pairs
        .iter()
        .map(|&(a, b)| format!("{}.{}", h.state_name(a), t.state_name(b)))
        .collect();
    Ok(MealyMachine {
        inputs: h.inputs().clone(),
        outputs: t.outputs().clone(),
        states: unique_names(names),
        initial: 0,
        next,
        out,
    })
}

/// Returns a shortest input word on which the machines' outputs differ, or
/// `None` if they are language-equivalent.
pub fn find_difference(m1: &MealyMachine, m2: &MealyMachine) -> Result<Option<Vec<Symbol>>, Error> {
    if m1.inputs() != m2.inputs() || m1.outputs() != m2.outputs() {
        return Err(Error::AlphabetMismatch("machines have different alphabets".into()));
    }
    let n2 = m2.num_states();
    let k = m1.inputs().len();
    let start = m1.initial() * n2 + m2.initial();
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; m1.num_states() * n2];
    let mut visited = vec![false; m1.num_states() * n2];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let (s1, s2) = (p / n2, p % n2);
        for x in 0..k {
            if m1.output(s1, x) != m2.output(s2, x) {
                let mut word = vec![x];
                let mut cur = p;
                while let Some((prev, sym)) = parent[cur] {
                    word.push(sym);
                    cur = prev;
                }
                word.reverse();
                return Ok(Some(word));
            }
            let q = m1.next(s1, x) * n2 + m2.next(s2, x);
            if !visited[q] {
                visited[q] = true;
                parent[q] = Some((p, x));
                queue.push_back(q);
            }
        }
    }
    Ok(None)
}

pub fn equivalent(m1: &MealyMachine, m2: &MealyMachine) -> Result<bool, Error> {
    Ok(find_difference(m1, m2)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(inputs: usize, value: Symbol) -> MealyMachine {
        MealyMachine::from_fn(Alphabet::numbered(inputs), Alphabet::numbered(2), 1, 0, |_, _| {
            (0, value)
        })
        .unwrap()
    }

    /// Two-state machine over {0,1} that outputs the previous input.
    fn delay() -> MealyMachine {
        MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 2, 0, |s, x| (x, s)).unwrap()
    }

    #[test]
    fn empty_word_gives_empty_output() {
        assert!(delay().run(&[]).unwrap().is_empty());
    }

    #[test]
    fn constant_machine_run() {
        let m = MealyMachine::from_fn(
            Alphabet::new(["a"]).unwrap(),
            Alphabet::new(["0"]).unwrap(),
            1,
            0,
            |_, _| (0, 0),
        )
        .unwrap();
        assert_eq!(m.run_named(&["a", "a", "a"]).unwrap(), vec!["0", "0", "0"]);
        assert!(matches!(m.run_named(&["b"]), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn delay_trace() {
        let run = delay().trace(&[1, 0, 1]).unwrap();
        assert_eq!(run.outputs, vec![0, 1, 0]);
        assert_eq!(run.states, vec![0, 1, 0, 1]);
    }

    #[test]
    fn counterexample_of_length_one() {
        let cex = find_difference(&constant(2, 0), &constant(2, 1)).unwrap();
        assert_eq!(cex.map(|w| w.len()), Some(1));
        assert!(equivalent(&delay(), &delay()).unwrap());
    }

    #[test]
    fn identity_head_and_tail() {
        let id = MealyMachine::identity(Alphabet::numbered(2));
        let m = delay();
        assert!(equivalent(&compose_cascade(&id, &m).unwrap(), &m).unwrap());
        assert!(equivalent(&compose_cascade(&m, &id).unwrap(), &m).unwrap());
    }

    #[test]
    fn compose_rejects_mismatch() {
        let h = constant(2, 0);
        let t = MealyMachine::identity(Alphabet::new(["a", "b"]).unwrap());
        assert!(matches!(compose_cascade(&h, &t), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn minimized_merges_equivalent_states() {
        // Four states, two of them duplicates and one unreachable.
        let m = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 4, 0, |s, x| match s {
            0 | 2 => (if x == 0 { 2 } else { 1 }, 0),
            1 => (0, 1),
            _ => (3, 1),
        })
        .unwrap();
        let min = m.minimized();
        assert_eq!(min.num_states(), 2);
        assert!(equivalent(&m, &min).unwrap());
        assert_eq!(m.trimmed().num_states(), 3);
    }

    #[test]
    fn canonical_ignores_declaration_order() {
        let a = delay();
        let b = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 2, 1, |s, x| {
            (1 - x, 1 - s)
        })
        .unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
