use std::fmt;

/// A propositional formula in conjunctive normal form.
///
/// Variables are numbered `1..=var_count` and literals use the DIMACS
/// convention: a positive integer is the variable, a negative one its
/// negation. Clauses are stored back to back in one buffer.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    var_count: u32,
    lits: Vec<i32>,
    starts: Vec<u32>,
    has_empty_clause: bool,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(var_count: u32) -> Self {
        Cnf {
            var_count,
            ..Self::default()
        }
    }

    /// Allocates a fresh variable and returns it.
    pub fn new_var(&mut self) -> i32 {
        self.var_count += 1;
        self.var_count as i32
    }

    /// Allocates `count` consecutive variables and returns the first one.
    pub fn new_vars(&mut self, count: u32) -> i32 {
        let first = self.var_count + 1;
        self.var_count += count;
        first as i32
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn num_clauses(&self) -> usize {
        self.starts.len()
    }

    pub fn num_literals(&self) -> usize {
        self.lits.len()
    }

    /// True once an empty clause was added. The empty clause is not stored
    /// in the clause list; it only marks the formula as unsatisfiable.
    pub fn has_empty_clause(&self) -> bool {
        self.has_empty_clause
    }

    /// Appends a clause. Variables beyond the current count grow the
    /// variable range. Zero literals are rejected with a panic since they
    /// cannot be represented.
    pub fn add_clause<I>(&mut self, clause: I)
    where
        I: IntoIterator<Item = i32>,
    {
        let start = self.lits.len();
        for lit in clause {
            assert!(lit != 0, "literal 0 is not a valid literal");
            self.var_count = self.var_count.max(lit.unsigned_abs());
            self.lits.push(lit);
        }
        if self.lits.len() == start {
            self.has_empty_clause = true;
        } else {
            self.starts.push(start as u32);
        }
    }

    pub fn clause(&self, index: usize) -> &[i32] {
        let start = self.starts[index] as usize;
        let end = self
            .starts
            .get(index + 1)
            .map_or(self.lits.len(), |&e| e as usize);
        &self.lits[start..end]
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[i32]> + '_ {
        (0..self.starts.len()).map(move |i| self.clause(i))
    }

    /// Checks a total assignment against every clause. `model[v]` is the
    /// value of variable `v`; index 0 is ignored.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        !self.has_empty_clause
            && self.clauses().all(|clause| {
                clause.iter().any(|&lit| {
                    let value = model
                        .get(lit.unsigned_abs() as usize)
                        .copied()
                        .unwrap_or(false);
                    value == (lit > 0)
                })
            })
    }
}

impl fmt::Debug for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cnf")
            .field("var_count", &self.var_count)
            .field("clauses", &self.num_clauses())
            .field("has_empty_clause", &self.has_empty_clause)
            .finish()
    }
}

/// A total assignment over `1..=var_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[0]` is a placeholder so that variables index directly.
    pub fn new(mut values: Vec<bool>) -> Self {
        if values.is_empty() {
            values.push(false);
        }
        Model { values }
    }

    pub fn value(&self, var: i32) -> bool {
        self.values
            .get(var.unsigned_abs() as usize)
            .copied()
            .unwrap_or(false)
    }

    pub fn lit_value(&self, lit: i32) -> bool {
        self.value(lit) == (lit > 0)
    }

    pub fn var_count(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Model),
    Unsat,
    Timeout,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SatOutcome::Sat(model) => Some(model),
            _ => None,
        }
    }
}
