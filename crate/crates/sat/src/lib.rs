//! CNF formulas and the solvers that decide them.
//!
//! [`Solver::BuiltIn`] is a complete CDCL solver with no external
//! dependencies. [`Solver::External`] runs a solver binary on a DIMACS file.
//! Either way, every model is checked against the formula before it is
//! returned, so a misbehaving backend surfaces as [`SatError::InvalidModel`].

mod cdcl;
mod cnf;
mod dimacs;
mod external;

use std::path::PathBuf;
use std::time::{Duration, Instant};

pub use cnf::{Cnf, Model, SatOutcome};
pub use dimacs::{parse_solver_output, to_dimacs, write_dimacs};
pub use external::ExternalSolver;

/// Environment variable naming an external solver binary.
pub const SOLVER_ENV: &str = "CASCADE_SAT_SOLVER";

#[derive(Debug, thiserror::Error)]
pub enum SatError {
    #[error("could not run SAT solver `{}`: {source}", program.display())]
    SolverNotFound {
        program: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed solver output (line {line}): {message}")]
    MalformedOutput { line: usize, message: String },
    #[error("solver returned a model that violates the formula")]
    InvalidModel,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    #[default]
    BuiltIn,
    External(ExternalSolver),
}

impl Solver {
    /// The external solver named by [`SOLVER_ENV`], or the built-in one.
    pub fn from_env() -> Self {
        match std::env::var_os(SOLVER_ENV) {
            Some(path) if !path.is_empty() => Solver::External(ExternalSolver::new(path)),
            _ => Solver::BuiltIn,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Solver::BuiltIn => "built-in".to_string(),
            Solver::External(ext) => ext.program().display().to_string(),
        }
    }

    /// Solves `cnf` within a wall-clock budget.
    pub fn solve(&self, cnf: &Cnf, budget: Option<Duration>) -> Result<SatOutcome, SatError> {
        self.solve_until(cnf, budget.map(|b| Instant::now() + b))
    }

    /// Solves `cnf`, giving up once `deadline` has passed.
    pub fn solve_until(&self, cnf: &Cnf, deadline: Option<Instant>) -> Result<SatOutcome, SatError> {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(SatOutcome::Timeout);
        }
        let outcome = match self {
            Solver::BuiltIn => cdcl::Cdcl::new(cnf).solve(deadline),
            Solver::External(ext) => ext.solve(cnf, deadline)?,
        };
        if let SatOutcome::Sat(model) = &outcome {
            if !cnf.is_satisfied_by(model.as_slice()) {
                return Err(SatError::InvalidModel);
            }
        }
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_clause_is_sat() {
        let mut cnf = Cnf::new();
        cnf.add_clause([1]);
        let outcome = Solver::BuiltIn.solve(&cnf, None).unwrap();
        assert!(outcome.model().unwrap().value(1));
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut cnf = Cnf::new();
        cnf.add_clause([1]);
        cnf.add_clause([-1]);
        assert_eq!(Solver::BuiltIn.solve(&cnf, None).unwrap(), SatOutcome::Unsat);
    }

    #[test]
    fn missing_external_solver_is_an_error() {
        let solver = Solver::External(ExternalSolver::new("/nonexistent/solver-binary"));
        let mut cnf = Cnf::new();
        cnf.add_clause([1]);
        assert!(matches!(
            solver.solve(&cnf, None),
            Err(SatError::SolverNotFound { .. })
        ));
    }

    #[test]
    fn lying_solver_is_caught() {
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("liar.sh");
        std::fs::write(&script, "#!/bin/sh\necho 's SATISFIABLE'\necho 'v -1 0'\n").unwrap();
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let solver = Solver::External(ExternalSolver::new(&script));
        let mut cnf = Cnf::new();
        cnf.add_clause([1]);
        assert!(matches!(solver.solve(&cnf, None), Err(SatError::InvalidModel)));
    }
}
