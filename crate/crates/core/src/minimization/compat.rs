use crate::machines::State;
use crate::observation::ObservationMachine;
use crate::Error;

/// Incompatible state pairs of an observation machine, stored as a
/// symmetric bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityRelation {
    states: usize,
    incompatible: Vec<bool>,
}

impl CompatibilityRelation {
    /// A relation with no incompatible pairs.
    pub fn empty(states: usize) -> Self {
        CompatibilityRelation {
            states,
            incompatible: vec![false; states * states],
        }
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn is_incompatible(&self, a: State, b: State) -> bool {
        self.incompatible[a * self.states + b]
    }

    pub fn is_compatible(&self, a: State, b: State) -> bool {
        !self.is_incompatible(a, b)
    }

    /// Marks `{a, b}`; returns whether the pair was new.
    pub fn mark(&mut self, a: State, b: State) -> bool {
        let n = self.states;
        if self.incompatible[a * n + b] {
            return false;
        }
        self.incompatible[a * n + b] = true;
        self.incompatible[b * n + a] = true;
        true
    }

    /// Incompatible pairs `(a, b)` with `a <= b`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (State, State)> + '_ {
        (0..self.states).flat_map(move |a| (a..self.states).filter(move |&b| self.is_incompatible(a, b)).map(move |b| (a, b)))
    }

    /// Number of other states `s` is incompatible with.
    pub fn degree(&self, s: State) -> usize {
        (0..self.states).filter(|&t| t != s && self.is_incompatible(s, t)).count()
    }
}

/// Pairs of states that disagree on some word defined at both.
///
/// Depth-1 conflicts seed a worklist; a pair `{u, v}` then makes every pair
/// `{s, t}` with `u ∈ Δ(s, y)` and `v ∈ Δ(t, y)` incompatible. The fixed
/// point is the least model of the corresponding Horn clauses.
pub fn incompatibility(m: &ObservationMachine) -> Result<CompatibilityRelation, Error> {
    m.require_consistent()?;
    Ok(incompatibility_unchecked(m))
}

pub(crate) fn incompatibility_unchecked(m: &ObservationMachine) -> CompatibilityRelation {
    let n = m.num_states();
    let k = m.inputs().len();
    let mut rel = CompatibilityRelation::empty(n);

    // pred[u * k + y] = states s with u ∈ Δ(s, y)
    let mut pred: Vec<Vec<State>> = vec![Vec::new(); n * k];
    for (s, y, t) in m.domain() {
        for &u in &t.targets {
            pred[u * k + y].push(s);
        }
    }

    let mut work = Vec::new();
    for a in 0..n {
        for b in a..n {
            let conflict = m.inputs().symbols().any(|y| match (m.transition(a, y), m.transition(b, y)) {
                (Some(ta), Some(tb)) => ta.output != tb.output,
                _ => false,
            });
            if conflict && rel.mark(a, b) {
                work.push((a, b));
            }
        }
    }
    while let Some((u, v)) = work.pop() {
        for y in 0..k {
            for &s in &pred[u * k + y] {
                for &t in &pred[v * k + y] {
                    if rel.mark(s, t) {
                        work.push((s, t));
                    }
                }
            }
        }
    }
    rel
}

/// A set of pairwise incompatible states; each needs its own class in any
/// closed cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSolution {
    pub clique: Vec<State>,
}

/// Greedy maximal clique of the incompatibility graph: repeatedly add the
/// candidate of highest degree, lowest index first on ties. States that
/// are incompatible with themselves never join.
pub fn greedy_clique(rel: &CompatibilityRelation) -> PartialSolution {
    let n = rel.state_count();
    let degree: Vec<usize> = (0..n).map(|s| rel.degree(s)).collect();
    let mut candidate: Vec<bool> = (0..n).map(|s| !rel.is_incompatible(s, s)).collect();
    let mut clique = Vec::new();
    loop {
        let best = (0..n)
            .filter(|&s| candidate[s])
            .max_by(|&a, &b| degree[a].cmp(&degree[b]).then(b.cmp(&a)));
        let Some(best) = best else { break };
        clique.push(best);
        for s in 0..n {
            candidate[s] = candidate[s] && s != best && rel.is_incompatible(s, best);
        }
    }
    PartialSolution { clique }
}
