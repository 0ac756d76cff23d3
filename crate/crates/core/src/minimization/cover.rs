use std::collections::HashMap;

use cascade_sat::{Cnf, Model};

use super::compat::{CompatibilityRelation, PartialSolution};
use crate::machines::{MealyMachine, State, Symbol};
use crate::observation::{implementation_witness, ObservationMachine};
use crate::Error;

/// A family of compatibles `C_0..C_{n-1}` with a successor class for every
/// (class, input) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibleCover {
    pub classes: Vec<Vec<State>>,
    /// Row-major by (class, input).
    pub succ: Vec<usize>,
}

impl CompatibleCover {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn successor(&self, class: usize, y: Symbol) -> usize {
        self.succ[class * (self.succ.len() / self.classes.len().max(1)) + y]
    }

    /// Checks that every class is a compatible, the initial state is
    /// covered, and `Δ(C_i, y) ⊆ C_succ(i, y)` wherever defined.
    pub fn check(&self, m: &ObservationMachine, rel: &CompatibilityRelation) -> Result<(), Error> {
        let k = m.inputs().len();
        if self.classes.is_empty() || self.succ.len() != self.classes.len() * k {
            return Err(Error::ClosureViolation("malformed cover".into()));
        }
        if self.succ.iter().any(|&j| j >= self.classes.len()) {
            return Err(Error::ClosureViolation("successor class out of range".into()));
        }
        if !self.classes.iter().any(|c| c.contains(&m.initial())) {
            return Err(Error::ClosureViolation("initial state is not covered".into()));
        }
        for (i, class) in self.classes.iter().enumerate() {
            for (a, &s) in class.iter().enumerate() {
                if let Some(&t) = class[a..].iter().find(|&&t| rel.is_incompatible(s, t)) {
                    return Err(Error::ClosureViolation(format!(
                        "class {i} holds incompatible states {} and {}",
                        m.state_name(s),
                        m.state_name(t)
                    )));
                }
            }
            for y in 0..k {
                let target = &self.classes[self.succ[i * k + y]];
                for &s in class {
                    if let Some(tr) = m.transition(s, y) {
                        if let Some(&u) = tr.targets.iter().find(|u| !target.contains(u)) {
                            return Err(Error::ClosureViolation(format!(
                                "state {} of class {i} moves to {} on {} outside class {}",
                                m.state_name(s),
                                m.state_name(u),
                                m.inputs().name(y),
                                self.succ[i * k + y]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// How the variables of a cover encoding map back to cover semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDecodeMap {
    pub states: usize,
    pub classes: usize,
    pub inputs: usize,
}

impl CoverDecodeMap {
    /// Variable for "state `s` belongs to class `i`".
    pub fn member(&self, s: State, i: usize) -> i32 {
        (1 + s * self.classes + i) as i32
    }

    /// Variable for "class `j` is a successor of class `i` on `y`".
    pub fn successor(&self, i: usize, j: usize, y: Symbol) -> i32 {
        let n = self.classes;
        (1 + self.states * n + (i * n + j) * self.inputs + y) as i32
    }

    pub fn var_count(&self) -> usize {
        self.states * self.classes + self.classes * self.classes * self.inputs
    }
}

/// CNF that is satisfiable iff `m` has a closed cover of at most `n`
/// compatibles. Clause groups, in order: incompatible pairs never share a
/// class, the initial state is covered, every class has a successor on
/// every input, successors contain the images of their members, and the
/// `k`-th clique state is pinned to class `k`.
pub fn encode_cover(
    m: &ObservationMachine,
    n: usize,
    rel: &CompatibilityRelation,
    partial: &PartialSolution,
) -> Result<(Cnf, CoverDecodeMap), Error> {
    if n < partial.clique.len() || n == 0 {
        return Err(Error::BoundBelowClique {
            n,
            clique: partial.clique.len(),
        });
    }
    let map = CoverDecodeMap {
        states: m.num_states(),
        classes: n,
        inputs: m.inputs().len(),
    };
    let mut cnf = Cnf::with_vars(map.var_count() as u32);
    for (s1, s2) in rel.pairs() {
        for i in 0..n {
            if s1 == s2 {
                cnf.add_clause([-map.member(s1, i)]);
            } else {
                cnf.add_clause([-map.member(s1, i), -map.member(s2, i)]);
            }
        }
    }
    cnf.add_clause((0..n).map(|i| map.member(m.initial(), i)));
    for i in 0..n {
        for y in 0..map.inputs {
            cnf.add_clause((0..n).map(|j| map.successor(i, j, y)));
        }
    }
    for (s, y, t) in m.domain() {
        for &u in &t.targets {
            for i in 0..n {
                for j in 0..n {
                    cnf.add_clause([-map.successor(i, j, y), -map.member(s, i), map.member(u, j)]);
                }
            }
        }
    }
    for (k, &s) in partial.clique.iter().enumerate() {
        cnf.add_clause([map.member(s, k)]);
    }
    Ok((cnf, map))
}

/// Reads a cover from a model of [`encode_cover`]. Empty classes are
/// dropped; identical classes are kept.
pub fn decode_cover(model: &Model, map: &CoverDecodeMap) -> CompatibleCover {
    let n = map.classes;
    let members: Vec<Vec<State>> = (0..n)
        .map(|i| (0..map.states).filter(|&s| model.value(map.member(s, i))).collect())
        .collect();
    let mut renumber = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for (i, c) in members.iter().enumerate() {
        if !c.is_empty() {
            renumber[i] = classes.len();
            classes.push(c.clone());
        }
    }
    let mut succ = Vec::with_capacity(classes.len() * map.inputs);
    for i in (0..n).filter(|&i| renumber[i] != usize::MAX) {
        for y in 0..map.inputs {
            let j = (0..n).find(|&j| model.value(map.successor(i, j, y)));
            // An empty successor class only arises when no member defines `y`.
            let j = j.map(|j| renumber[j]).filter(|&j| j != usize::MAX).unwrap_or(renumber[i]);
            succ.push(j);
        }
    }
    CompatibleCover { classes, succ }
}

/// The machine whose states are the classes of `f`. Outputs come from any
/// member defining the input, otherwise the first output symbol.
pub fn cover_to_machine(f: &CompatibleCover, m: &ObservationMachine) -> Result<MealyMachine, Error> {
    let k = m.inputs().len();
    if f.classes.is_empty() || f.succ.len() != f.classes.len() * k {
        return Err(Error::ClosureViolation("malformed cover".into()));
    }
    let initial = f
        .classes
        .iter()
        .position(|c| c.contains(&m.initial()))
        .ok_or_else(|| Error::ClosureViolation("initial state is not covered".into()))?;
    let mut out = Vec::with_capacity(f.succ.len());
    for (i, class) in f.classes.iter().enumerate() {
        for y in 0..k {
            let j = f.succ[i * k + y];
            if j >= f.classes.len() {
                return Err(Error::ClosureViolation("successor class out of range".into()));
            }
            let mut output = None;
            for &s in class {
                if let Some(t) = m.transition(s, y) {
                    if t.targets.iter().any(|u| !f.classes[j].contains(u)) {
                        return Err(Error::ClosureViolation(format!(
                            "image of class {i} on {} escapes class {j}",
                            m.inputs().name(y)
                        )));
                    }
                    output.get_or_insert(t.output);
                }
            }
            out.push(output.unwrap_or(0));
        }
    }
    let states = (0..f.classes.len()).map(|i| format!("c{i}")).collect();
    MealyMachine::new(m.inputs().clone(), m.outputs().clone(), states, initial, f.succ.clone(), out)
}

/// The cover `Q(s) = { states of m paired with s in the product }` over the
/// reachable part of `n × m`. Has at most `|S_n|` classes.
pub fn machine_to_cover(n: &MealyMachine, m: &ObservationMachine) -> Result<CompatibleCover, Error> {
    if let Some(word) = implementation_witness(n, m)? {
        return Err(Error::NotAnImplementation {
            witness: m.inputs().render(&word),
        });
    }
    let k = m.inputs().len();
    let mut seen = vec![false; n.num_states() * m.num_states()];
    let mut stack = vec![(n.initial(), m.initial())];
    seen[n.initial() * m.num_states() + m.initial()] = true;
    while let Some((sn, sm)) = stack.pop() {
        for y in 0..k {
            if let Some(t) = m.transition(sm, y) {
                let next = n.next(sn, y);
                for &u in &t.targets {
                    let idx = next * m.num_states() + u;
                    if !seen[idx] {
                        seen[idx] = true;
                        stack.push((next, u));
                    }
                }
            }
        }
    }
    let mut class_of: HashMap<State, usize> = HashMap::new();
    let mut owners = Vec::new();
    let mut classes = Vec::new();
    for sn in 0..n.num_states() {
        let q: Vec<State> = (0..m.num_states()).filter(|&sm| seen[sn * m.num_states() + sm]).collect();
        if !q.is_empty() {
            class_of.insert(sn, classes.len());
            owners.push(sn);
            classes.push(q);
        }
    }
    let mut succ = Vec::with_capacity(classes.len() * k);
    for (i, &sn) in owners.iter().enumerate() {
        for y in 0..k {
            succ.push(class_of.get(&n.next(sn, y)).copied().unwrap_or(i));
        }
    }
    Ok(CompatibleCover { classes, succ })
}
