mod support;

use cascade_core::generators::random_mealy;
use cascade_core::machines::{
    compose_cascade, equivalent, find_difference, parse_machine, serialize_machine, Alphabet, Machine, MealyMachine,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{simulate, words_up_to};

#[test]
fn empty_word_and_constant_machine() {
    let text = "type mealy\ninputs a\noutputs 0\nstates s0\ninitial s0\ntrans s0 a s0 0\n";
    let Machine::Mealy(m) = parse_machine(text).unwrap() else {
        panic!("not a mealy machine")
    };
    assert!(m.run(&[]).unwrap().is_empty());
    assert_eq!(m.run_named(&["a", "a", "a"]).unwrap(), vec!["0", "0", "0"]);
}

#[test]
fn run_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..50 {
        let m = random_mealy(5, 3, 4, seed);
        let word: Vec<usize> = (0..12).map(|_| rng.gen_range(0..3)).collect();
        assert_eq!(m.run(&word).unwrap(), simulate(&m, &word));
        let run = m.trace(&word).unwrap();
        assert_eq!(run.states.len(), word.len() + 1);
        assert_eq!(run.outputs, simulate(&m, &word));
    }
}

#[test]
fn identity_head_and_tail() {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let id = MealyMachine::identity(ab.clone());
    let t = MealyMachine::from_fn(ab.clone(), Alphabet::numbered(3), 3, 0, |s, x| ((s + x + 1) % 3, s)).unwrap();
    assert!(equivalent(&compose_cascade(&id, &t).unwrap(), &t).unwrap());
    let h = MealyMachine::from_fn(Alphabet::numbered(2), ab.clone(), 2, 0, |s, x| (x, if s == 0 { 0 } else { 1 })).unwrap();
    assert!(equivalent(&compose_cascade(&h, &id).unwrap(), &h).unwrap());
}

#[test]
fn composition_is_sequential_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let h = random_mealy(rng.gen_range(1..=4), 2, 3, seed);
        let t = random_mealy(rng.gen_range(1..=4), 3, 2, seed + 100);
        let c = compose_cascade(&h, &t).unwrap();
        for _ in 0..100 {
            let len = rng.gen_range(0..15);
            let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2)).collect();
            assert_eq!(simulate(&c, &w), simulate(&t, &simulate(&h, &w)));
        }
        // Exhaustive on short words.
        for w in words_up_to(2, 10) {
            assert_eq!(c.run(&w).unwrap(), t.run(&h.run(&w).unwrap()).unwrap());
        }
    }
}

#[test]
fn equivalence_matches_bounded_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..60 {
        let (n1, n2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m1 = random_mealy(n1, 2, 2, seed);
        // Half of the pairs are minimized copies, which are equivalent.
        let m2 = if seed % 2 == 0 { m1.minimized() } else { random_mealy(n2, 2, 2, seed + 1000) };
        let bound = m1.num_states() * m2.num_states();
        let brute = words_up_to(2, bound).into_iter().find(|w| simulate(&m1, w) != simulate(&m2, w));
        let diff = find_difference(&m1, &m2).unwrap();
        assert_eq!(diff.is_none(), brute.is_none());
        if let (Some(d), Some(b)) = (diff, brute) {
            assert_eq!(d.len(), b.len(), "counterexample must be shortest");
            assert_ne!(simulate(&m1, &d), simulate(&m2, &d));
        }
    }
}

#[test]
fn immediate_divergence() {
    let a = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 1, 0, |_, _| (0, 0)).unwrap();
    let b = MealyMachine::from_fn(Alphabet::numbered(2), Alphabet::numbered(2), 1, 0, |_, x| (0, x)).unwrap();
    assert!(equivalent(&a, &a).unwrap());
    assert_eq!(find_difference(&a, &b).unwrap(), Some(vec![1]));
}

#[test]
fn declaration_order_canonicalizes() {
    let one = "type mealy\ninputs a b\noutputs 0 1\nstates p q\ninitial p\n\
               trans p a q 0\ntrans p b p 1\ntrans q a p 1\ntrans q b q 0\n";
    let shuffled = "type mealy\noutputs 0 1\ninputs a b\nstates p q\ninitial p\n\
                    trans q b q 0\ntrans q a p 1 # comment\n\ntrans p b p 1\ntrans p a q 0\n";
    let a = serialize_machine(&parse_machine(one).unwrap());
    let b = serialize_machine(&parse_machine(shuffled).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, one);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_machines_round_trip(n in 1usize..8, k in 1usize..4, l in 1usize..4, seed in any::<u64>()) {
        let m = random_mealy(n, k, l, seed);
        let text = serialize_machine(&Machine::Mealy(m.clone()));
        prop_assert_eq!(parse_machine(&text).unwrap(), Machine::Mealy(m));
        prop_assert_eq!(serialize_machine(&parse_machine(&text).unwrap()), text);
    }

    #[test]
    fn output_length_matches_input(seed in any::<u64>(), word in proptest::collection::vec(0usize..3, 0..30)) {
        let m = random_mealy(4, 3, 2, seed);
        prop_assert_eq!(m.run(&word).unwrap().len(), word.len());
    }
}
