use std::path::PathBuf;

use cascade_sat::{to_dimacs, Cnf, ExternalSolver, SatOutcome, Solver};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_3cnf(rng: &mut ChaCha8Rng, vars: i32, clauses: usize) -> Cnf {
    let mut cnf = Cnf::with_vars(vars as u32);
    for _ in 0..clauses {
        let clause: Vec<i32> = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        cnf.add_clause(clause);
    }
    cnf
}

/// Exhaustive satisfiability check used as an oracle for small formulas.
fn brute_force_sat(cnf: &Cnf) -> bool {
    let n = cnf.var_count();
    (0u64..1 << n).any(|bits| {
        let model: Vec<bool> = (0..=n).map(|v| v > 0 && bits >> (v - 1) & 1 == 1).collect();
        cnf.is_satisfied_by(&model)
    })
}

/// A DIMACS reader written independently of the crate's writer.
fn read_dimacs(text: &str) -> (u32, Vec<Vec<i32>>) {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(&header[..2], &["p", "cnf"]);
    let vars = header[2].parse().unwrap();
    let count: usize = header[3].parse().unwrap();
    let clauses: Vec<Vec<i32>> = lines
        .map(|line| {
            let mut lits: Vec<i32> = line.split(' ').map(|t| t.parse().unwrap()).collect();
            assert_eq!(lits.pop(), Some(0));
            lits
        })
        .collect();
    assert_eq!(clauses.len(), count);
    (vars, clauses)
}

fn python_solver() -> Option<Solver> {
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dpll.py");
    let python = which_python()?;
    Some(Solver::External(
        ExternalSolver::new(python).with_args([script.display().to_string()]),
    ))
}

fn which_python() -> Option<PathBuf> {
    ["/usr/bin/python3", "/usr/local/bin/python3"]
        .iter()
        .map(PathBuf::from)
        .find(|p| p.exists())
}

#[test]
fn builtin_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sat = 0;
    for _ in 0..200 {
        let cnf = random_3cnf(&mut rng, 12, 51);
        let outcome = Solver::BuiltIn.solve(&cnf, None).unwrap();
        assert_eq!(outcome.is_sat(), brute_force_sat(&cnf));
        sat += usize::from(outcome.is_sat());
    }
    // The clause ratio sits at the phase transition, so both verdicts occur.
    assert!(sat > 20 && sat < 180, "sat = {sat}");
}

#[test]
fn builtin_agrees_with_external_solver() {
    let Some(external) = python_solver() else {
        eprintln!("python3 not available; skipping cross-backend check");
        return;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let cnf = random_3cnf(&mut rng, 20, 85);
        let builtin = Solver::BuiltIn.solve(&cnf, None).unwrap();
        let other = external.solve(&cnf, None).unwrap();
        assert_eq!(builtin.is_sat(), other.is_sat());
    }
}

#[test]
fn external_solver_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("slow.sh");
    std::fs::write(&script, "#!/bin/sh\nsleep 5\necho 's UNSATISFIABLE'\n").unwrap();
    use std::os::unix::fs::PermissionsExt;
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let solver = Solver::External(ExternalSolver::new(&script));
    let mut cnf = Cnf::new();
    cnf.add_clause([1]);
    let start = std::time::Instant::now();
    let outcome = solver
        .solve(&cnf, Some(std::time::Duration::from_millis(100)))
        .unwrap();
    assert_eq!(outcome, SatOutcome::Timeout);
    assert!(start.elapsed().as_secs() < 4);
}

proptest! {
    #[test]
    fn dimacs_round_trip(clauses in prop::collection::vec(
        prop::collection::vec((1i32..30, any::<bool>()), 1..6), 0..40)) {
        let mut cnf = Cnf::new();
        let expected: Vec<Vec<i32>> = clauses
            .iter()
            .map(|c| c.iter().map(|&(v, neg)| if neg { -v } else { v }).collect())
            .collect();
        for clause in &expected {
            cnf.add_clause(clause.iter().copied());
        }
        let (vars, parsed) = read_dimacs(&to_dimacs(&cnf));
        prop_assert_eq!(vars, cnf.var_count());
        prop_assert_eq!(parsed, expected);
    }

    #[test]
    fn sat_models_satisfy_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = random_3cnf(&mut rng, 15, 50);
        if let SatOutcome::Sat(model) = Solver::BuiltIn.solve(&cnf, None).unwrap() {
            prop_assert!(cnf.is_satisfied_by(model.as_slice()));
        }
    }
}
