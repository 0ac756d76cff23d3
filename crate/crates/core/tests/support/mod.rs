//! Reference implementations used as oracles. They follow the definitions
//! literally and share no code paths with the library beyond the machine
//! accessors.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use cascade_core::machines::{Alphabet, MealyMachine};

use cascade_core::ObservationMachine;

/// Step-by-step run of a complete machine.
pub fn simulate(m: &MealyMachine, word: &[usize]) -> Vec<usize> {
    let mut s = m.initial();
    let mut out = Vec::with_capacity(word.len());
    for &x in word {
        out.push(m.output(s, x));
        s = m.next(s, x);
    }
    out
}

/// All words of exactly `len` symbols over `0..k`, in lexicographic order.
pub fn words_of_len(k: usize, len: usize) -> Words {
    Words {
        k,
        max: len,
        current: Some(vec![0; len]),
    }
}

/// All words of length at most `len`, shortest first.
pub fn words_up_to(k: usize, len: usize) -> Words {
    Words {
        k,
        max: len,
        current: Some(Vec::new()),
    }
}

/// Lazy odometer over words; grows to the next length after the last word
/// of the current one.
pub struct Words {
    k: usize,
    max: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let word = self.current.take()?;
        let mut next = word.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                if next.len() < self.max {
                    self.current = Some(vec![0; next.len() + 1]);
                }
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.k {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(word)
    }
}

/// Every run of an observation machine on `word`: the set of output words,
/// or `None` if the word is undefined (no run survives).
pub fn om_outputs(m: &ObservationMachine, word: &[usize]) -> Option<HashSet<Vec<usize>>> {
    let mut runs = vec![(m.initial(), Vec::new())];
    for &y in word {
        let mut next = Vec::new();
        for (s, out) in &runs {
            if let Some(t) = m.transition(*s, y) {
                for &u in &t.targets {
                    let mut o: Vec<usize> = out.clone();
                    o.push(t.output);
                    next.push((u, o));
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        runs = next;
    }
    Some(runs.into_iter().map(|(_, o)| o).collect())
}

/// Every complete machine with `n` states over the given alphabets,
/// initial state 0.
pub fn all_machines(inputs: &Alphabet, outputs: &Alphabet, n: usize) -> Vec<MealyMachine> {
    let cells = n * inputs.len();
    let choices = n * outputs.len();
    let total = (choices as u64).pow(cells as u32);
    let mut result = Vec::with_capacity(total as usize);
    for mut code in 0..total {
        let mut table = Vec::with_capacity(cells);
        for _ in 0..cells {
            let c = (code % choices as u64) as usize;
            code /= choices as u64;
            table.push((c / outputs.len(), c % outputs.len()));
        }
        let k = inputs.len();
        result.push(
            MealyMachine::from_fn(inputs.clone(), outputs.clone(), n, 0, |s, x| table[s * k + x]).unwrap(),
        );
    }
    result
}

/// A behaviour that a candidate machine must follow: from reference state
/// `p`, each edge `(y, z, p')` says the candidate reads `y`, must print `z`
/// and continues to simulate `p'`.
pub trait Obligations {
    fn initial(&self) -> usize;
    fn edges(&self, p: usize) -> Vec<(usize, usize, usize)>;
}

/// The tail's view of a cascade: reference states are (head, tail) pairs.
pub struct CascadeObligations<'a> {
    pub h: &'a MealyMachine,
    pub t: &'a MealyMachine,
}

impl Obligations for CascadeObligations<'_> {
    fn initial(&self) -> usize {
        self.h.initial() * self.t.num_states() + self.t.initial()
    }

    fn edges(&self, p: usize) -> Vec<(usize, usize, usize)> {
        let nt = self.t.num_states();
        let (sh, st) = (p / nt, p % nt);
        self.h
            .inputs()
            .symbols()
            .map(|x| {
                let y = self.h.output(sh, x);
                (y, self.t.output(st, y), self.h.next(sh, x) * nt + self.t.next(st, y))
            })
            .collect()
    }
}

/// Implementations of an observation machine: every branch is an
/// obligation.
pub struct OmObligations<'a>(pub &'a ObservationMachine);

impl Obligations for OmObligations<'_> {
    fn initial(&self) -> usize {
        self.0.initial()
    }

    fn edges(&self, p: usize) -> Vec<(usize, usize, usize)> {
        self.0
            .inputs()
            .symbols()
            .filter_map(|y| self.0.transition(p, y).map(|t| (y, t)))
            .flat_map(|(y, t)| t.targets.iter().map(move |&u| (y, t.output, u)))
            .collect()
    }
}

#[derive(Clone)]
struct Search {
    table: Vec<Option<(usize, usize)>>,
    used: usize,
    seen: HashSet<(usize, usize)>,
    pending: Vec<(usize, usize)>,
}

fn extend(ob: &dyn Obligations, k: usize, ys: usize, mut st: Search) -> bool {
    while let Some((p, q)) = st.pending.pop() {
        for (y, z, p2) in ob.edges(p) {
            match st.table[q * ys + y] {
                Some((q2, z2)) => {
                    if z2 != z {
                        return false;
                    }
                    if st.seen.insert((p2, q2)) {
                        st.pending.push((p2, q2));
                    }
                }
                None => {
                    // Branch on the target; new states are opened in order.
                    let limit = (st.used + 1).min(k);
                    for q2 in 0..limit {
                        let mut branch = st.clone();
                        branch.table[q * ys + y] = Some((q2, z));
                        branch.used = branch.used.max(q2 + 1);
                        branch.pending.push((p, q));
                        if branch.seen.insert((p2, q2)) {
                            branch.pending.push((p2, q2));
                        }
                        if extend(ob, k, ys, branch) {
                            return true;
                        }
                    }
                    return false;
                }
            }
        }
    }
    true
}

/// Whether some complete machine with at most `k` states meets every
/// obligation reachable from the initial reference state.
pub fn exists_machine(ob: &dyn Obligations, inputs: usize, k: usize) -> bool {
    let start = (ob.initial(), 0);
    let st = Search {
        table: vec![None; k * inputs],
        used: 1,
        seen: HashSet::from([start]),
        pending: vec![start],
    };
    extend(ob, k, inputs, st)
}

/// Least `k <= limit` for which [`exists_machine`] holds.
pub fn min_machine(ob: &dyn Obligations, inputs: usize, limit: usize) -> Option<usize> {
    (1..=limit).find(|&k| exists_machine(ob, inputs, k))
}

/// Feasibility of `t∘h ≡ m` decided on words up to `len`: group input
/// words by head output and look for a group with two model outputs.
/// Returns the length of the shortest conflict found.
pub fn bounded_conflict(h: &MealyMachine, m: &MealyMachine, len: usize) -> Option<usize> {
    for l in 1..=len {
        let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for w in words_of_len(h.inputs().len(), l) {
            let hw = simulate(h, &w);
            let mw = simulate(m, &w);
            if let Some(prev) = groups.get(&hw) {
                if *prev != mw {
                    return Some(l);
                }
            } else {
                groups.insert(hw, mw);
            }
        }
    }
    None
}

/// Minimal number of states of a complete machine equivalent to `m`, by
/// pairwise distinguishability on the reachable states.
pub fn classical_min_states(m: &MealyMachine) -> usize {
    let n = m.num_states();
    let mut reach = vec![false; n];
    reach[m.initial()] = true;
    let mut stack = vec![m.initial()];
    while let Some(s) = stack.pop() {
        for x in m.inputs().symbols() {
            let u = m.next(s, x);
            if !reach[u] {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    let states: Vec<usize> = (0..n).filter(|&s| reach[s]).collect();
    let mut dist = vec![vec![false; n]; n];
    let mut changed = true;
    while changed {
        changed = false;
        for &a in &states {
            for &b in &states {
                if dist[a][b] {
                    continue;
                }
                let d = m.inputs().symbols().any(|x| {
                    m.output(a, x) != m.output(b, x) || dist[m.next(a, x)][m.next(b, x)]
                });
                if d {
                    dist[a][b] = true;
                    changed = true;
                }
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    for &s in &states {
        if reps.iter().all(|&r| dist[r][s]) {
            reps.push(s);
        }
    }
    reps.len()
}

/// A tail produced for a split instance, read back over the source
/// machine's alphabets: inputs beyond the first `k` are dropped and the
/// extra output symbol becomes symbol 0.
pub fn project(t: &MealyMachine, k: usize, outputs: &Alphabet) -> MealyMachine {
    MealyMachine::new(
        Alphabet::new(t.inputs().names()[..k].iter().cloned()).unwrap(),
        outputs.clone(),
        t.state_names().to_vec(),
        t.initial(),
        (0..t.num_states() * k).map(|i| t.next(i / k, i % k)).collect(),
        (0..t.num_states() * k)
            .map(|i| t.output(i / k, i % k))
            .map(|z| if z < outputs.len() { z } else { 0 })
            .collect(),
    )
    .unwrap()
}
