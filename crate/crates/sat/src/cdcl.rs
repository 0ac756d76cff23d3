//! A conflict-driven clause-learning solver.
//!
//! Two watched literals with blockers, implicit binary clauses, first-UIP
//! learning with recursive minimization, VSIDS with phase saving, Luby
//! restarts and LBD-based learnt clause deletion.

use std::time::Instant;

use crate::cnf::{Cnf, Model, SatOutcome};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(lit: i32) -> Lit {
        let var = lit.unsigned_abs() - 1;
        Lit(var << 1 | u32::from(lit < 0))
    }

    fn new(var: usize, negative: bool) -> Lit {
        Lit((var as u32) << 1 | u32::from(negative))
    }

    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const BINARY: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Reason {
    Decision,
    Binary(Lit),
    Long(u32),
}

#[derive(Clone, Copy)]
enum Conflict {
    Binary(Lit, Lit),
    Long(u32),
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

/// Indexed binary max-heap over variable activities.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![-1; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] >= 0
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as i32;
        self.heap.push(v as u32);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0] as usize;
        let last = self.heap.pop().unwrap();
        self.pos[top] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v] as usize, act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i as i32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && act[self.heap[right] as usize] > act[self.heap[left] as usize] {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if act[c as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = i as i32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub(crate) struct Cdcl {
    num_vars: usize,
    clauses: Vec<Clause>,
    free_slots: Vec<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    to_clear: Vec<Lit>,
    stack: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,
    conflicts: u64,
    unsat: bool,
}

impl Cdcl {
    pub(crate) fn new(cnf: &Cnf) -> Self {
        let n = cnf.var_count() as usize;
        let mut solver = Cdcl {
            num_vars: n,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![Reason::Decision; n],
            polarity: vec![true; n],
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::new(n),
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            to_clear: Vec::new(),
            stack: Vec::new(),
            level_stamp: vec![0; n + 1],
            stamp: 0,
            conflicts: 0,
            unsat: cnf.has_empty_clause(),
        };
        for v in 0..n {
            solver.heap.insert(v, &solver.activity);
        }
        let mut buf = Vec::new();
        for clause in cnf.clauses() {
            if solver.unsat {
                break;
            }
            buf.clear();
            buf.extend(clause.iter().map(|&l| Lit::from_dimacs(l)));
            solver.add_input_clause(&mut buf);
        }
        solver
    }

    fn add_input_clause(&mut self, lits: &mut Vec<Lit>) {
        lits.sort_unstable_by_key(|l| l.0);
        lits.dedup();
        let mut keep = 0;
        for i in 0..lits.len() {
            let l = lits[i];
            if i + 1 < lits.len() && lits[i + 1] == !l {
                return;
            }
            match self.value(l) {
                TRUE => return,
                FALSE => {}
                _ => {
                    lits[keep] = l;
                    keep += 1;
                }
            }
        }
        lits.truncate(keep);
        match lits.len() {
            0 => self.unsat = true,
            1 => self.enqueue(lits[0], Reason::Decision),
            _ => {
                self.attach(lits.clone(), false, 0);
            }
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var()];
        if l.is_neg() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) {
        let v = l.var();
        self.assigns[v] = if l.is_neg() { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> Option<u32> {
        if lits.len() == 2 {
            self.watches[lits[0].idx()].push(Watch {
                cref: BINARY,
                blocker: lits[1],
            });
            self.watches[lits[1].idx()].push(Watch {
                cref: BINARY,
                blocker: lits[0],
            });
            return None;
        }
        let (w0, w1) = (lits[0], lits[1]);
        let clause = Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        };
        let cref = match self.free_slots.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = clause;
                slot
            }
            None => {
                self.clauses.push(clause);
                (self.clauses.len() - 1) as u32
            }
        };
        self.watches[w0.idx()].push(Watch { cref, blocker: w1 });
        self.watches[w1.idx()].push(Watch { cref, blocker: w0 });
        if learnt {
            self.learnts.push(cref);
        }
        Some(cref)
    }

    fn propagate(&mut self) -> Option<Conflict> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                let bval = self.value(w.blocker);
                if bval == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                if w.cref == BINARY {
                    ws[j] = w;
                    j += 1;
                    if bval == FALSE {
                        conflict = Some(Conflict::Binary(false_lit, w.blocker));
                        break;
                    }
                    self.enqueue(w.blocker, Reason::Binary(false_lit));
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watch {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.idx()].push(Watch {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(Conflict::Long(w.cref));
                    break;
                }
                self.enqueue(first, Reason::Long(w.cref));
            }
            while i < ws.len() {
                ws[j] = ws[i];
                i += 1;
                j += 1;
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// Literals of the reason clause of `v` other than the implied one.
    fn reason_lits(&self, v: usize, out: &mut Vec<Lit>) {
        out.clear();
        match self.reason[v] {
            Reason::Decision => {}
            Reason::Binary(other) => out.push(other),
            Reason::Long(cref) => out.extend_from_slice(&self.clauses[cref as usize].lits[1..]),
        }
    }

    fn analyze(&mut self, conflict: Conflict) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut index = self.trail.len();
        let mut lits = Vec::new();
        match conflict {
            Conflict::Binary(a, b) => lits.extend([a, b]),
            Conflict::Long(cref) => {
                self.bump_clause(cref);
                lits.extend_from_slice(&self.clauses[cref as usize].lits);
            }
        }
        let current = self.decision_level();
        let p = loop {
            for &q in &lits {
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var()] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            if let Reason::Long(cref) = self.reason[p.var()] {
                self.bump_clause(cref);
            }
            let mut next = std::mem::take(&mut lits);
            self.reason_lits(p.var(), &mut next);
            lits = next;
        };
        learnt[0] = !p;

        // Recursive minimization.
        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learnt);
        let mut abstract_levels = 0u64;
        for l in &learnt[1..] {
            abstract_levels |= 1u64 << (self.level[l.var()] & 63);
        }
        let mut keep = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var()] == Reason::Decision || !self.lit_redundant(l, abstract_levels) {
                learnt[keep] = l;
                keep += 1;
            }
        }
        learnt.truncate(keep);
        for l in std::mem::take(&mut self.to_clear) {
            self.seen[l.var()] = false;
        }

        let backtrack_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };
        (learnt, backtrack_level)
    }

    fn lit_redundant(&mut self, p: Lit, abstract_levels: u64) -> bool {
        self.stack.clear();
        self.stack.push(p);
        let top = self.to_clear.len();
        let mut lits = Vec::new();
        while let Some(q) = self.stack.pop() {
            self.reason_lits(q.var(), &mut lits);
            for &l in &lits {
                let v = l.var();
                if !self.seen[v] && self.level[v] > 0 {
                    if self.reason[v] != Reason::Decision
                        && (1u64 << (self.level[v] & 63)) & abstract_levels != 0
                    {
                        self.seen[v] = true;
                        self.stack.push(l);
                        self.to_clear.push(l);
                    } else {
                        for l in self.to_clear.drain(top..) {
                            self.seen[l.var()] = false;
                        }
                        return false;
                    }
                }
            }
        }
        true
    }

    fn compute_lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut lbd = 0;
        for l in lits {
            let lv = self.level[l.var()] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                lbd += 1;
            }
        }
        lbd
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.assigns[v] = UNDEF;
            self.polarity[v] = l.is_neg();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clauses[cref as usize].lits[0];
        self.value(first) == TRUE && self.reason[first.var()] == Reason::Long(cref)
    }

    fn reduce_db(&mut self) {
        let mut candidates: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| !self.clauses[c as usize].deleted)
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        let limit = candidates.len() / 2;
        let mut removed = 0;
        for &cref in &candidates {
            if removed >= limit {
                break;
            }
            let c = &self.clauses[cref as usize];
            if c.lbd <= 2 || self.locked(cref) {
                continue;
            }
            let c = &mut self.clauses[cref as usize];
            c.deleted = true;
            c.lits = Vec::new();
            removed += 1;
        }
        let clauses = &self.clauses;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| w.cref == BINARY || !clauses[w.cref as usize].deleted);
        }
        let mut kept = Vec::with_capacity(self.learnts.len());
        for &cref in &self.learnts {
            if self.clauses[cref as usize].deleted {
                self.free_slots.push(cref);
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit::new(v, self.polarity[v]));
            }
        }
        None
    }

    pub(crate) fn solve(mut self, deadline: Option<Instant>) -> SatOutcome {
        if self.unsat || self.propagate().is_some() {
            return SatOutcome::Unsat;
        }
        let mut restarts = 0u64;
        let mut next_reduce = 2000u64;
        let mut ticks = 0u64;
        loop {
            let budget = (luby(2.0, restarts) * 100.0) as u64;
            restarts += 1;
            let mut local_conflicts = 0u64;
            loop {
                ticks += 1;
                if ticks.is_multiple_of(512) {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return SatOutcome::Timeout;
                        }
                    }
                }
                if let Some(conflict) = self.propagate() {
                    self.conflicts += 1;
                    local_conflicts += 1;
                    if self.decision_level() == 0 {
                        return SatOutcome::Unsat;
                    }
                    let (learnt, bt) = self.analyze(conflict);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], Reason::Decision);
                    } else {
                        let lbd = self.compute_lbd(&learnt);
                        let first = learnt[0];
                        let reason = match self.attach(learnt.clone(), true, lbd) {
                            Some(cref) => {
                                self.bump_clause(cref);
                                Reason::Long(cref)
                            }
                            None => Reason::Binary(learnt[1]),
                        };
                        self.enqueue(first, reason);
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                } else {
                    if local_conflicts >= budget {
                        self.cancel_until(0);
                        break;
                    }
                    if self.conflicts >= next_reduce {
                        next_reduce = self.conflicts + 2000 + 300 * (restarts.min(1000));
                        self.reduce_db();
                    }
                    match self.pick_branch() {
                        None => return SatOutcome::Sat(self.model()),
                        Some(lit) => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(lit, Reason::Decision);
                        }
                    }
                }
            }
        }
    }

    fn model(&self) -> Model {
        let mut values = vec![false; self.num_vars + 1];
        for v in 0..self.num_vars {
            values[v + 1] = self.assigns[v] == TRUE;
        }
        Model::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(cnf: &Cnf) -> SatOutcome {
        Cdcl::new(cnf).solve(None)
    }

    fn pigeonhole(pigeons: usize, holes: usize) -> Cnf {
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut cnf = Cnf::new();
        for p in 0..pigeons {
            cnf.add_clause((0..holes).map(|h| var(p, h)));
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    cnf.add_clause([-var(p, h), -var(q, h)]);
                }
            }
        }
        cnf
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<f64> = (0..8).map(|i| luby(2.0, i)).collect();
        assert_eq!(seq, vec![1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 4.0, 1.0]);
    }

    #[test]
    fn unit_and_contradiction() {
        let mut cnf = Cnf::new();
        cnf.add_clause([1]);
        assert!(solve(&cnf).model().unwrap().value(1));
        cnf.add_clause([-1]);
        assert_eq!(solve(&cnf), SatOutcome::Unsat);
    }

    #[test]
    fn pigeonhole_small() {
        assert_eq!(solve(&pigeonhole(6, 5)), SatOutcome::Unsat);
        let cnf = pigeonhole(5, 5);
        let outcome = solve(&cnf);
        assert!(cnf.is_satisfied_by(outcome.model().unwrap().as_slice()));
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let cnf = pigeonhole(11, 10);
        let outcome = Cdcl::new(&cnf).solve(Some(Instant::now()));
        assert_eq!(outcome, SatOutcome::Timeout);
    }
}
