//! Instance generators: random machines and the constructions used to
//! relate minimization, implementability and synthesis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::machines::{fresh_name, Alphabet, MealyMachine, Nfa};
use crate::observation::{ObservationMachine, Transition};
use crate::Error;

/// Complete machine with uniformly random successors and outputs. Symbols
/// are named `0..k-1` and states `s0..`; unreachable states are kept.
pub fn random_mealy(n_states: usize, in_size: usize, out_size: usize, seed: u64) -> MealyMachine {
    assert!(n_states > 0 && in_size > 0 && out_size > 0, "sizes must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Vec::with_capacity(n_states * in_size);
    for _ in 0..n_states * in_size {
        table.push((rng.gen_range(0..n_states), rng.gen_range(0..out_size)));
    }
    MealyMachine::from_fn(Alphabet::numbered(in_size), Alphabet::numbered(out_size), n_states, 0, |s, x| {
        table[s * in_size + x]
    })
    .expect("random machine is valid")
}

/// Random observation machine: each pair is defined with probability 2/3,
/// with between 1 and `max_degree` distinct successors. Not necessarily
/// consistent.
pub fn random_om(n_states: usize, in_size: usize, out_size: usize, max_degree: usize, seed: u64) -> ObservationMachine {
    assert!(n_states > 0 && in_size > 0 && out_size > 0 && max_degree > 0, "sizes must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trans = (0..n_states * in_size)
        .map(|_| {
            if rng.gen_range(0..3) == 0 {
                return None;
            }
            let degree = rng.gen_range(1..=max_degree.min(n_states));
            let targets = rand::seq::index::sample(&mut rng, n_states, degree).into_vec();
            Some(Transition {
                targets,
                output: rng.gen_range(0..out_size),
            })
        })
        .collect();
    ObservationMachine::new(
        Alphabet::numbered(in_size),
        Alphabet::numbered(out_size),
        (0..n_states).map(|i| format!("s{i}")).collect(),
        0,
        trans,
    )
    .expect("random observation machine is valid")
}

/// Random NFA: each (state, symbol) has a successor set whose size is
/// uniform in `0..=max_degree`.
pub fn random_nfa(n_states: usize, size: usize, max_degree: usize, seed: u64) -> Nfa {
    assert!(n_states > 0 && size > 0, "sizes must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = (0..n_states * size)
        .map(|_| {
            let degree = rng.gen_range(0..=max_degree.min(n_states));
            rand::seq::index::sample(&mut rng, n_states, degree).into_vec()
        })
        .collect();
    Nfa::new(
        Alphabet::numbered(size),
        (0..n_states).map(|i| format!("s{i}")).collect(),
        0,
        delta,
    )
    .expect("random NFA is valid")
}

/// Turns an incompletely specified machine `n` into a cascade `(h, t)` in
/// which the minimal replacements of `t` have exactly as many states as
/// the minimal implementations of `n`.
///
/// Both machines gain a fresh symbol `⊥`. The head copies `n`'s inputs
/// while they are defined and otherwise falls into a sink emitting `⊥`,
/// so its output language is the domain of `n` followed by `⊥*`. The tail
/// completes `n` with self-loops on the first output and answers `⊥` with
/// `⊥`.
pub fn np_reduction(n: &ObservationMachine) -> Result<(MealyMachine, MealyMachine), Error> {
    n.require_consistent()?;
    if n.degree() > 1 {
        return Err(Error::InvalidMachine("expected an observation machine without branching".into()));
    }
    let bot = n.inputs().fresh_name("⊥");
    let yhat = n.inputs().extended(&bot)?;
    let zbot = n.outputs().fresh_name("⊥");
    let zhat = n.outputs().extended(&zbot)?;
    let (ns, k) = (n.num_states(), n.inputs().len());
    let sink = fresh_name("*", |c| n.state_names().iter().any(|s| s == c));

    let mut h_states = n.state_names().to_vec();
    h_states.push(sink);
    let (mut h_next, mut h_out) = (Vec::new(), Vec::new());
    for s in 0..=ns {
        for y in 0..=k {
            match (s < ns && y < k).then(|| n.transition(s, y)).flatten() {
                Some(t) => {
                    h_next.push(t.targets[0]);
                    h_out.push(y);
                }
                None => {
                    h_next.push(ns);
                    h_out.push(k);
                }
            }
        }
    }
    let h = MealyMachine::new(yhat.clone(), yhat.clone(), h_states, n.initial(), h_next, h_out)?;

    let (mut t_next, mut t_out) = (Vec::new(), Vec::new());
    for s in 0..ns {
        for y in 0..=k {
            match (y < k).then(|| n.transition(s, y)).flatten() {
                Some(t) => {
                    t_next.push(t.targets[0]);
                    t_out.push(t.output);
                }
                None => {
                    t_next.push(s);
                    t_out.push(if y == k { zhat.len() - 1 } else { 0 });
                }
            }
        }
    }
    let t = MealyMachine::new(yhat, zhat, n.state_names().to_vec(), n.initial(), t_next, t_out)?;
    Ok((h, t))
}

/// Splits `n` into a head `h` and model `m` such that the equation
/// `t∘h ≡ m` is solvable and every solution agrees with `n` on its domain.
///
/// Inputs are pairs `y:i` with `i < max(d(n), 1)`. On `y:i`, both machines
/// follow the `i`-th successor of `Δ(s, y)` (ascending state order); `h`
/// emits `y` and `m` emits `λ(s, y)`. Missing edges lead to a shared sink
/// `*` where both emit `⊥`.
pub fn split_om(n: &ObservationMachine) -> Result<(MealyMachine, MealyMachine), Error> {
    n.require_consistent()?;
    let k = n.degree().max(1);
    let ys = n.inputs().len();
    let xs = Alphabet::new(
        n.inputs()
            .names()
            .iter()
            .flat_map(|y| (0..k).map(move |i| format!("{y}:{i}"))),
    )?;
    let ybot = n.inputs().fresh_name("⊥");
    let yhat = n.inputs().extended(&ybot)?;
    let zbot = n.outputs().fresh_name("⊥");
    let zhat = n.outputs().extended(&zbot)?;
    let ns = n.num_states();
    let sink = fresh_name("*", |c| n.state_names().iter().any(|s| s == c));
    let mut states = n.state_names().to_vec();
    states.push(sink);

    let (mut next, mut h_out, mut m_out) = (Vec::new(), Vec::new(), Vec::new());
    for s in 0..=ns {
        for y in 0..ys {
            for i in 0..k {
                let edge = (s < ns)
                    .then(|| n.transition(s, y))
                    .flatten()
                    .and_then(|t| t.targets.get(i).map(|&u| (u, t.output)));
                match edge {
                    Some((u, z)) => {
                        next.push(u);
                        h_out.push(y);
                        m_out.push(z);
                    }
                    None => {
                        next.push(ns);
                        h_out.push(ys);
                        m_out.push(zhat.len() - 1);
                    }
                }
            }
        }
    }
    let h = MealyMachine::new(xs.clone(), yhat, states.clone(), n.initial(), next.clone(), h_out)?;
    let m = MealyMachine::new(xs, zhat, states, n.initial(), next, m_out)?;
    Ok((h, m))
}

/// Consistent OM of degree 2 with `(n + 1)²` states whose implementations
/// all need at least `2^n` states.
///
/// It answers `⊤` to the first `n` inputs and then to every `a`; the first
/// `b` after `i < n` further `a`s is answered with the `i`-th input of the
/// word. Everything later is undefined. Each prefix state either records
/// the current input or defers, so one branch per position carries the
/// answer.
pub fn exp_family(n: usize) -> ObservationMachine {
    assert!(n >= 1, "family index must be positive");
    let inputs = Alphabet::new(["a", "b"]).expect("valid alphabet");
    let outputs = Alphabet::new(["a", "b", "⊤"]).expect("valid alphabet");
    const TOP: usize = 2;

    let mut names = Vec::new();
    let prefix: Vec<usize> = (0..n)
        .map(|j| {
            names.push(format!("p{j}"));
            names.len() - 1
        })
        .collect();
    // chain[j][c][t - j - 1] counts position t after recording c at j.
    let chain: Vec<[Vec<usize>; 2]> = (0..n)
        .map(|j| {
            [0, 1].map(|c| {
                (j + 1..n)
                    .map(|t| {
                        names.push(format!("r{j}_{}_{t}", ["a", "b"][c]));
                        names.len() - 1
                    })
                    .collect()
            })
        })
        .collect();
    // reveal[c][m]: `m` more `a`s before answering c.
    let reveal: [Vec<usize>; 2] = [0, 1].map(|c| {
        (0..n)
            .map(|m| {
                names.push(format!("w{}_{m}", ["a", "b"][c]));
                names.len() - 1
            })
            .collect()
    });
    names.push("e".into());
    let end = names.len() - 1;

    let record = |j: usize, c: usize| chain[j][c].first().copied().unwrap_or(reveal[c][j]);
    let mut trans: Vec<Option<Transition>> = vec![None; names.len() * 2];
    let t = |targets: Vec<usize>, output| Some(Transition { targets, output });
    for j in 0..n {
        for c in 0..2 {
            let mut targets = vec![record(j, c)];
            if j + 1 < n {
                targets.push(prefix[j + 1]);
            }
            trans[prefix[j] * 2 + c] = t(targets, TOP);
        }
        for c in 0..2 {
            for (idx, &state) in chain[j][c].iter().enumerate() {
                let succ = chain[j][c].get(idx + 1).copied().unwrap_or(reveal[c][j]);
                for y in 0..2 {
                    trans[state * 2 + y] = t(vec![succ], TOP);
                }
            }
        }
    }
    for c in 0..2 {
        for m in 1..n {
            trans[reveal[c][m] * 2] = t(vec![reveal[c][m - 1]], TOP);
        }
        trans[reveal[c][0] * 2 + 1] = t(vec![end], c);
    }
    ObservationMachine::new(inputs, outputs, names, prefix[0], trans).expect("family member is valid")
}
