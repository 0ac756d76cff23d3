//! Line-oriented text format for Mealy machines, observation machines and
//! NFAs.
//!
//! ```text
//! type mealy            # or `om`, `nfa`
//! inputs a b
//! outputs 0 1           # absent for nfa
//! states s0 s1
//! initial s0
//! trans s0 a s1 0       # om: trans s0 a { s0 s1 } 0   nfa: trans s0 a { s1 }
//! ```
//!
//! `#` starts a comment. Serialization emits transitions in
//! (state, symbol) index order, so equal machines give equal text.

use std::collections::HashMap;
use std::fmt::{self, Write};

use super::alphabet::Alphabet;
use super::mealy::MealyMachine;
use super::nfa::Nfa;
use crate::observation::{ObservationMachine, Transition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Mealy(MealyMachine),
    Om(ObservationMachine),
    Nfa(Nfa),
}

impl Machine {
    pub fn kind(&self) -> &'static str {
        match self {
            Machine::Mealy(_) => "mealy",
            Machine::Om(_) => "om",
            Machine::Nfa(_) => "nfa",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

fn tokenize(line: &str, lineno: usize) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let column_of = |byte: usize| content[..byte].chars().count() + 1;
    for (i, c) in content.char_indices() {
        if c.is_whitespace() || c == '{' || c == '}' {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &content[s..i],
                    line: lineno,
                    column: column_of(s),
                });
            }
            if c == '{' || c == '}' {
                tokens.push(Token {
                    text: &content[i..i + 1],
                    line: lineno,
                    column: column_of(i),
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &content[s..],
            line: lineno,
            column: column_of(s),
        });
    }
    tokens
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Mealy,
    Om,
    Nfa,
}

struct Header {
    inputs: Option<Alphabet>,
    outputs: Option<Alphabet>,
    states: Option<(Vec<String>, HashMap<String, usize>)>,
    initial: Option<usize>,
}

enum Entry {
    Mealy { target: usize, output: usize },
    Set { targets: Vec<usize>, output: Option<usize> },
}

/// Parses a machine document; the `type` line selects the result kind.
pub fn parse_machine(text: &str) -> Result<Machine, ParseError> {
    let mut kind = None;
    let mut header = Header {
        inputs: None,
        outputs: None,
        states: None,
        initial: None,
    };
    let mut entries: HashMap<(usize, usize), Entry> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let tokens = tokenize(raw, lineno);
        let Some(first) = tokens.first().copied() else {
            continue;
        };
        let Some(kind) = kind else {
            if first.text != "type" || tokens.len() != 2 {
                return err(lineno, first.column, "expected `type mealy|om|nfa`");
            }
            kind = Some(match tokens[1].text {
                "mealy" => Kind::Mealy,
                "om" => Kind::Om,
                "nfa" => Kind::Nfa,
                other => return err(lineno, tokens[1].column, format!("unknown machine type `{other}`")),
            });
            continue;
        };
        let args = &tokens[1..];
        match first.text {
            "inputs" | "outputs" => {
                if first.text == "outputs" && kind == Kind::Nfa {
                    return err(lineno, first.column, "nfa documents have no outputs");
                }
                let slot = if first.text == "inputs" {
                    &mut header.inputs
                } else {
                    &mut header.outputs
                };
                if slot.is_some() {
                    return err(lineno, first.column, format!("duplicate `{}` line", first.text));
                }
                if args.iter().any(|t| t.text == "{" || t.text == "}") {
                    return err(lineno, first.column, "braces are not allowed in symbol names");
                }
                let alphabet = Alphabet::new(args.iter().map(|t| t.text))
                    .or_else(|e| err(lineno, first.column, e.to_string()))?;
                *slot = Some(alphabet);
            }
            "states" => {
                if header.states.is_some() {
                    return err(lineno, first.column, "duplicate `states` line");
                }
                if args.is_empty() {
                    return err(lineno, first.column, "at least one state is required");
                }
                let mut index = HashMap::new();
                for (j, t) in args.iter().enumerate() {
                    if t.text == "{" || t.text == "}" {
                        return err(lineno, t.column, "braces are not allowed in state names");
                    }
                    if index.insert(t.text.to_string(), j).is_some() {
                        return err(lineno, t.column, format!("duplicate state `{}`", t.text));
                    }
                }
                header.states = Some((args.iter().map(|t| t.text.to_string()).collect(), index));
            }
            "initial" => {
                if header.initial.is_some() {
                    return err(lineno, first.column, "duplicate `initial` line");
                }
                if args.len() != 1 {
                    return err(lineno, first.column, "expected `initial <state>`");
                }
                header.initial = Some(lookup_state(&header, args[0])?);
            }
            "trans" => parse_trans(kind, &header, args, first, &mut entries)?,
            other => return err(lineno, first.column, format!("unknown directive `{other}`")),
        }
    }

    let Some(kind) = kind else {
        return err(1, 1, "empty document");
    };
    let end = text.lines().count().max(1);
    let inputs = header
        .inputs
        .clone()
        .ok_or_else(|| missing(end, "inputs"))?;
    let (names, _) = header.states.clone().ok_or_else(|| missing(end, "states"))?;
    let initial = header.initial.ok_or_else(|| missing(end, "initial"))?;
    let n = names.len();
    let k = inputs.len();
    let invalid = |e: crate::Error| ParseError {
        line: end,
        column: 1,
        message: e.to_string(),
    };

    match kind {
        Kind::Mealy => {
            let outputs = header.outputs.clone().ok_or_else(|| missing(end, "outputs"))?;
            let mut next = Vec::with_capacity(n * k);
            let mut out = Vec::with_capacity(n * k);
            for s in 0..n {
                for x in 0..k {
                    match entries.get(&(s, x)) {
                        Some(Entry::Mealy { target, output }) => {
                            next.push(*target);
                            out.push(*output);
                        }
                        _ => {
                            return err(
                                end,
                                1,
                                format!("incomplete mealy machine: missing ({},{})", names[s], inputs.name(x)),
                            )
                        }
                    }
                }
            }
            MealyMachine::new(inputs, outputs, names, initial, next, out)
                .map(Machine::Mealy)
                .map_err(invalid)
        }
        Kind::Om => {
            let outputs = header.outputs.clone().ok_or_else(|| missing(end, "outputs"))?;
            let trans = (0..n * k)
                .map(|i| match entries.remove(&(i / k, i % k)) {
                    Some(Entry::Set {
                        targets,
                        output: Some(output),
                    }) => Some(Transition { targets, output }),
                    _ => None,
                })
                .collect();
            ObservationMachine::new(inputs, outputs, names, initial, trans)
                .map(Machine::Om)
                .map_err(invalid)
        }
        Kind::Nfa => {
            let delta = (0..n * k)
                .map(|i| match entries.remove(&(i / k, i % k)) {
                    Some(Entry::Set { targets, .. }) => targets,
                    _ => Vec::new(),
                })
                .collect();
            Nfa::new(inputs, names, initial, delta)
                .map(Machine::Nfa)
                .map_err(invalid)
        }
    }
}

fn missing(line: usize, what: &str) -> ParseError {
    ParseError {
        line,
        column: 1,
        message: format!("missing `{what}` line"),
    }
}

fn lookup_state(header: &Header, tok: Token<'_>) -> Result<usize, ParseError> {
    let Some((_, index)) = &header.states else {
        return err(tok.line, tok.column, "`states` must be declared first");
    };
    match index.get(tok.text) {
        Some(&s) => Ok(s),
        None => err(tok.line, tok.column, format!("unknown state `{}`", tok.text)),
    }
}

fn lookup_symbol(alphabet: &Option<Alphabet>, tok: Token<'_>, what: &str) -> Result<usize, ParseError> {
    let Some(alphabet) = alphabet else {
        return err(tok.line, tok.column, format!("`{what}` must be declared first"));
    };
    match alphabet.symbol(tok.text) {
        Some(x) => Ok(x),
        None => err(tok.line, tok.column, format!("unknown symbol `{}`", tok.text)),
    }
}

fn parse_trans(
    kind: Kind,
    header: &Header,
    args: &[Token<'_>],
    keyword: Token<'_>,
    entries: &mut HashMap<(usize, usize), Entry>,
) -> Result<(), ParseError> {
    let (line, column) = (keyword.line, keyword.column);
    if args.len() < 2 {
        return err(line, column, "truncated transition");
    }
    let source = lookup_state(header, args[0])?;
    let input = lookup_symbol(&header.inputs, args[1], "inputs")?;
    let rest = &args[2..];
    let entry = match kind {
        Kind::Mealy => {
            if rest.len() != 2 {
                return err(line, column, "expected `trans <state> <in> <state> <out>`");
            }
            Entry::Mealy {
                target: lookup_state(header, rest[0])?,
                output: lookup_symbol(&header.outputs, rest[1], "outputs")?,
            }
        }
        Kind::Om | Kind::Nfa => {
            if rest.first().map(|t| t.text) != Some("{") {
                return err(line, column, "expected `{` before the successor set");
            }
            let Some(close) = rest.iter().position(|t| t.text == "}") else {
                return err(line, column, "missing `}`");
            };
            let targets = rest[1..close]
                .iter()
                .map(|&t| lookup_state(header, t))
                .collect::<Result<Vec<_>, _>>()?;
            let tail = &rest[close + 1..];
            let output = if kind == Kind::Om {
                if targets.is_empty() {
                    return err(line, rest[0].column, "empty branch set");
                }
                if tail.len() != 1 {
                    return err(line, column, "expected `trans <state> <in> { <state>+ } <out>`");
                }
                Some(lookup_symbol(&header.outputs, tail[0], "outputs")?)
            } else {
                if !tail.is_empty() {
                    return err(line, tail[0].column, "unexpected token after `}`");
                }
                None
            };
            Entry::Set { targets, output }
        }
    };
    match (entries.get_mut(&(source, input)), entry) {
        (None, entry) => {
            entries.insert((source, input), entry);
        }
        (Some(Entry::Set { targets, .. }), Entry::Set { targets: more, .. }) if kind == Kind::Nfa => {
            targets.extend(more);
        }
        _ => {
            return err(
                line,
                column,
                format!("duplicate transition for ({},{})", args[0].text, args[1].text),
            )
        }
    }
    Ok(())
}

fn write_header(
    f: &mut String,
    kind: &str,
    inputs: &Alphabet,
    outputs: Option<&Alphabet>,
    states: &[String],
    initial: usize,
) -> fmt::Result {
    writeln!(f, "type {kind}")?;
    writeln!(f, "inputs {}", inputs.names().join(" "))?;
    if let Some(outputs) = outputs {
        writeln!(f, "outputs {}", outputs.names().join(" "))?;
    }
    writeln!(f, "states {}", states.join(" "))?;
    writeln!(f, "initial {}", states[initial])
}

pub fn serialize_mealy(m: &MealyMachine) -> String {
    let mut f = String::new();
    let names = m.state_names();
    write_header(&mut f, "mealy", m.inputs(), Some(m.outputs()), names, m.initial()).unwrap();
    for s in 0..m.num_states() {
        for x in m.inputs().symbols() {
            writeln!(
                f,
                "trans {} {} {} {}",
                names[s],
                m.inputs().name(x),
                names[m.next(s, x)],
                m.outputs().name(m.output(s, x))
            )
            .unwrap();
        }
    }
    f
}

pub fn serialize_om(m: &ObservationMachine) -> String {
    let mut f = String::new();
    let names = m.state_names();
    write_header(&mut f, "om", m.inputs(), Some(m.outputs()), names, m.initial()).unwrap();
    for (s, y, t) in m.domain() {
        let targets: Vec<&str> = t.targets.iter().map(|&u| names[u].as_str()).collect();
        writeln!(
            f,
            "trans {} {} {{ {} }} {}",
            names[s],
            m.inputs().name(y),
            targets.join(" "),
            m.outputs().name(t.output)
        )
        .unwrap();
    }
    f
}

pub fn serialize_nfa(a: &Nfa) -> String {
    let mut f = String::new();
    let names = a.state_names();
    write_header(&mut f, "nfa", a.alphabet(), None, names, a.initial()).unwrap();
    for s in 0..a.num_states() {
        for y in a.alphabet().symbols() {
            let succ = a.successors(s, y);
            if succ.is_empty() {
                continue;
            }
            let targets: Vec<&str> = succ.iter().map(|&u| names[u].as_str()).collect();
            writeln!(f, "trans {} {} {{ {} }}", names[s], a.alphabet().name(y), targets.join(" ")).unwrap();
        }
    }
    f
}

pub fn serialize_machine(m: &Machine) -> String {
    match m {
        Machine::Mealy(m) => serialize_mealy(m),
        Machine::Om(m) => serialize_om(m),
        Machine::Nfa(a) => serialize_nfa(a),
    }
}
