use std::collections::HashMap;
use std::fmt;

use crate::Error;

/// Index of a symbol inside its [`Alphabet`].
pub type Symbol = usize;

/// A finite, ordered set of named symbols.
///
/// A symbol's index is its position in declaration order and never changes.
#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidMachine("alphabet must not be empty".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            check_name(name)?;
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidMachine(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Alphabet { names, index })
    }

    /// Alphabet `0, 1, ..., size-1`.
    pub fn numbered(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| i.to_string())).expect("numbered alphabets are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn symbols(&self) -> std::ops::Range<Symbol> {
        0..self.names.len()
    }

    /// Translates a word of symbol names into indices.
    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Symbol>, Error> {
        names
            .iter()
            .map(|n| {
                self.symbol(n.as_ref())
                    .ok_or_else(|| Error::UnknownSymbol(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Space-separated rendering of a word; `ε` for the empty word.
    pub fn render(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter()
            .map(|&s| self.names[s].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// A name not yet used in this alphabet, preferring `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh_name(base, |n| self.index.contains_key(n))
    }

    /// This alphabet with one extra symbol appended.
    pub fn extended(&self, name: &str) -> Result<Alphabet, Error> {
        Alphabet::new(self.names.iter().cloned().chain(std::iter::once(name.to_string())))
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

/// Symbol and state names must survive the whitespace-separated file format.
pub(crate) fn check_name(name: &str) -> Result<(), Error> {
    let bad = name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || c == '{' || c == '}' || c == '#');
    if bad {
        Err(Error::InvalidMachine(format!("invalid name `{name}`")))
    } else {
        Ok(())
    }
}

pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .expect("some suffix is free")
}

/// Makes state names unique, falling back to `q<i>` on collisions.
pub(crate) fn unique_names(names: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::with_capacity(names.len());
    let collision = names.iter().any(|n| !seen.insert(n.as_str()) || check_name(n).is_err());
    if collision {
        (0..names.len()).map(|i| format!("q{i}")).collect()
    } else {
        names
    }
}
