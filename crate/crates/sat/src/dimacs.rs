//! DIMACS CNF output and SAT-competition style solver output parsing.

use std::io::{self, Write};

use crate::cnf::{Cnf, Model, SatOutcome};
use crate::SatError;

/// Renders `cnf` as a DIMACS document: `p cnf <vars> <clauses>` followed by
/// one zero-terminated clause per line.
pub fn to_dimacs(cnf: &Cnf) -> String {
    let mut buf = Vec::with_capacity(16 + cnf.num_literals() * 4);
    write_dimacs(cnf, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("DIMACS output is ASCII")
}

pub fn write_dimacs<W: Write>(cnf: &Cnf, out: &mut W) -> io::Result<()> {
    let extra = usize::from(cnf.has_empty_clause());
    writeln!(
        out,
        "p cnf {} {}",
        cnf.var_count(),
        cnf.num_clauses() + extra
    )?;
    for clause in cnf.clauses() {
        for lit in clause {
            write!(out, "{lit} ")?;
        }
        out.write_all(b"0\n")?;
    }
    if cnf.has_empty_clause() {
        out.write_all(b"0\n")?;
    }
    Ok(())
}

/// Parses solver output following the SAT competition conventions: an
/// `s` status line and, when satisfiable, `v` lines listing literals.
/// Variables the solver does not mention default to false.
pub fn parse_solver_output(text: &str, var_count: u32) -> Result<SatOutcome, SatError> {
    let mut status = None;
    let mut values = vec![false; var_count as usize + 1];
    let mut saw_values = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let malformed = |msg: &str| SatError::MalformedOutput {
            line: lineno + 1,
            message: msg.to_string(),
        };
        if let Some(rest) = line.strip_prefix('s') {
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(malformed("unexpected token"));
            }
            let parsed = match rest.trim() {
                "SATISFIABLE" => Status::Sat,
                "UNSATISFIABLE" => Status::Unsat,
                "UNKNOWN" | "INDETERMINATE" | "INDET" => Status::Unknown,
                other => return Err(malformed(&format!("unknown status `{other}`"))),
            };
            if status.replace(parsed).is_some() {
                return Err(malformed("duplicate status line"));
            }
        } else if let Some(rest) = line.strip_prefix('v') {
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(malformed("unexpected token"));
            }
            saw_values = true;
            for token in rest.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| malformed(&format!("bad literal `{token}`")))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs();
                if var > var_count as u64 {
                    return Err(malformed(&format!("variable {var} out of range")));
                }
                values[var as usize] = lit > 0;
            }
        } else if line.is_empty() || line.starts_with('c') {
            continue;
        } else {
            return Err(malformed("unrecognized line"));
        }
    }
    match status {
        Some(Status::Sat) if saw_values || var_count == 0 => Ok(SatOutcome::Sat(Model::new(values))),
        Some(Status::Sat) => Err(SatError::MalformedOutput {
            line: 0,
            message: "satisfiable without a model".into(),
        }),
        Some(Status::Unsat) => Ok(SatOutcome::Unsat),
        Some(Status::Unknown) => Ok(SatOutcome::Timeout),
        None => Err(SatError::MalformedOutput {
            line: 0,
            message: "missing status line".into(),
        }),
    }
}

enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_definition() {
        let mut cnf = Cnf::new();
        cnf.add_clause([1, -2]);
        assert_eq!(to_dimacs(&cnf), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn empty_clause_is_written() {
        let mut cnf = Cnf::with_vars(1);
        cnf.add_clause([1]);
        cnf.add_clause(std::iter::empty());
        assert_eq!(to_dimacs(&cnf), "p cnf 1 2\n1 0\n0\n");
    }

    #[test]
    fn unsat_output() {
        assert_eq!(
            parse_solver_output("s UNSATISFIABLE\n", 3).unwrap(),
            SatOutcome::Unsat
        );
    }

    #[test]
    fn sat_output_with_values() {
        let text = "c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        let outcome = parse_solver_output(text, 3).unwrap();
        let model = outcome.model().unwrap();
        assert!(model.value(1));
        assert!(!model.value(2));
        assert!(model.value(3));
    }

    #[test]
    fn malformed_outputs() {
        assert!(parse_solver_output("", 1).is_err());
        assert!(parse_solver_output("s MAYBE\n", 1).is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv 1 x 0\n", 1).is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv 7 0\n", 1).is_err());
        assert!(parse_solver_output("s SATISFIABLE\n", 2).is_err());
        assert!(parse_solver_output("garbage\n", 1).is_err());
    }
}
