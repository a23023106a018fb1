//! Line-oriented text format for automata (`.oaf`): `alphabet:`, `states:`,
//! `init:`, `acc:` (buchi or parity), and a `trans:` section of
//! `src sym dst` lines. `#` starts a comment; blank lines are ignored.
//! `emit` is canonical, so parse∘emit is the identity byte-for-byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{Acceptance, Automaton, AutomatonError, StateId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OafError {
    #[error("line {line}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: state {state} out of range (states: {num_states})")]
    StateOutOfRange { line: usize, state: usize, num_states: usize },
    #[error("missing section `{0}:`")]
    MissingSection(&'static str),
    #[error("line {line}: duplicate section `{section}:`")]
    DuplicateSection { line: usize, section: String },
    #[error("line {line}: state {state} has no priority assigned")]
    UnassignedPriority { line: usize, state: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> OafError {
    OafError::Malformed { line, message: message.into() }
}

fn parse_number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, OafError> {
    tok.parse()
        .map_err(|_| malformed(line, format!("invalid {what} `{tok}`")))
}

struct Sections {
    alphabet: Option<(usize, Vec<String>)>,
    states: Option<(usize, usize)>,
    init: Option<(usize, usize)>,
    acc: Option<(usize, Vec<String>)>,
    trans: Option<usize>,
    trans_lines: Vec<(usize, Vec<String>)>,
}

pub fn parse_oaf(text: &str) -> Result<Automaton, OafError> {
    let mut sec = Sections {
        alphabet: None,
        states: None,
        init: None,
        acc: None,
        trans: None,
        trans_lines: Vec::new(),
    };
    let mut in_trans = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<String> = content.split_whitespace().map(str::to_owned).collect();
        let header = tokens[0].strip_suffix(':');
        match header {
            Some(name @ ("alphabet" | "states" | "init" | "acc" | "trans")) => {
                in_trans = name == "trans";
                let rest = tokens[1..].to_vec();
                let dup = match name {
                    "alphabet" => sec.alphabet.replace((line, rest)).is_some(),
                    "states" => {
                        let n = one_token(line, &rest, "states")?;
                        sec.states.replace((line, n)).is_some()
                    }
                    "init" => {
                        let n = one_token(line, &rest, "init")?;
                        sec.init.replace((line, n)).is_some()
                    }
                    "acc" => sec.acc.replace((line, rest)).is_some(),
                    _ => {
                        if !rest.is_empty() {
                            return Err(malformed(line, "trans: header takes no arguments"));
                        }
                        sec.trans.replace(line).is_some()
                    }
                };
                if dup {
                    return Err(OafError::DuplicateSection { line, section: name.to_string() });
                }
            }
            _ if in_trans => sec.trans_lines.push((line, tokens)),
            _ => return Err(malformed(line, format!("unexpected content `{content}`"))),
        }
    }

    let (al_line, alphabet) = sec.alphabet.ok_or(OafError::MissingSection("alphabet"))?;
    if alphabet.is_empty() {
        return Err(malformed(al_line, "alphabet must list at least one symbol"));
    }
    if alphabet.iter().collect::<BTreeSet<_>>().len() != alphabet.len() {
        return Err(malformed(al_line, "alphabet symbols must be distinct"));
    }
    let (st_line, num_states) = sec.states.ok_or(OafError::MissingSection("states"))?;
    if num_states == 0 {
        return Err(malformed(st_line, "states must be at least 1"));
    }
    let (init_line, initial) = sec.init.ok_or(OafError::MissingSection("init"))?;
    if initial >= num_states {
        return Err(OafError::StateOutOfRange { line: init_line, state: initial, num_states });
    }
    let (acc_line, acc_tokens) = sec.acc.ok_or(OafError::MissingSection("acc"))?;
    sec.trans.ok_or(OafError::MissingSection("trans"))?;

    let acceptance = parse_acc(acc_line, &acc_tokens, num_states)?;
    let mut a = Automaton::new(alphabet, num_states, initial, acceptance)
        .map_err(|e| malformed(acc_line, e.to_string()))?;

    for (line, tokens) in sec.trans_lines {
        if tokens.len() != 3 {
            return Err(malformed(line, "transition lines are `src sym dst`"));
        }
        let src: usize = parse_number(line, &tokens[0], "state")?;
        let dst: usize = parse_number(line, &tokens[2], "state")?;
        for state in [src, dst] {
            if state >= num_states {
                return Err(OafError::StateOutOfRange { line, state, num_states });
            }
        }
        let sym = a
            .symbol_index(&tokens[1])
            .ok_or_else(|| OafError::UnknownSymbol { line, symbol: tokens[1].clone() })?;
        a.add_transition(src, sym, dst).unwrap();
    }
    Ok(a)
}

fn one_token(line: usize, rest: &[String], what: &str) -> Result<usize, OafError> {
    if rest.len() != 1 {
        return Err(malformed(line, format!("`{what}:` takes exactly one number")));
    }
    parse_number(line, &rest[0], what)
}

fn parse_acc(
    line: usize,
    tokens: &[String],
    num_states: usize,
) -> Result<Acceptance, OafError> {
    match tokens.first().map(String::as_str) {
        Some("buchi") => {
            let mut acc = BTreeSet::new();
            for tok in &tokens[1..] {
                let state: usize = parse_number(line, tok, "state")?;
                if state >= num_states {
                    return Err(OafError::StateOutOfRange { line, state, num_states });
                }
                acc.insert(state);
            }
            Ok(Acceptance::Buchi(acc))
        }
        Some("parity") => {
            let mut assigned: BTreeMap<StateId, u32> = BTreeMap::new();
            for tok in &tokens[1..] {
                let (s, p) = tok
                    .split_once('=')
                    .ok_or_else(|| malformed(line, format!("expected `state=priority`, got `{tok}`")))?;
                let state: usize = parse_number(line, s, "state")?;
                if state >= num_states {
                    return Err(OafError::StateOutOfRange { line, state, num_states });
                }
                assigned.insert(state, parse_number(line, p, "priority")?);
            }
            let mut priorities = Vec::with_capacity(num_states);
            for state in 0..num_states {
                match assigned.get(&state) {
                    Some(&p) => priorities.push(p),
                    None => return Err(OafError::UnassignedPriority { line, state }),
                }
            }
            Ok(Acceptance::Parity(priorities))
        }
        _ => Err(malformed(line, "`acc:` must start with `buchi` or `parity`")),
    }
}

pub fn emit_oaf(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "alphabet: {}", a.alphabet().join(" ")).unwrap();
    writeln!(out, "states: {}", a.num_states()).unwrap();
    writeln!(out, "init: {}", a.initial()).unwrap();
    match a.acceptance() {
        Acceptance::Buchi(acc) => {
            write!(out, "acc: buchi").unwrap();
            for q in acc {
                write!(out, " {q}").unwrap();
            }
            out.push('\n');
        }
        Acceptance::Parity(priorities) => {
            write!(out, "acc: parity").unwrap();
            for (q, p) in priorities.iter().enumerate() {
                write!(out, " {q}={p}").unwrap();
            }
            out.push('\n');
        }
    }
    out.push_str("trans:\n");
    for (src, sym, dst) in a.transitions() {
        writeln!(out, "{src} {} {dst}", a.alphabet()[sym]).unwrap();
    }
    out
}

/// Convenience wrappers for CLI and corpus plumbing.
pub fn read_oaf(path: &std::path::Path) -> Result<Automaton, OafFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| OafFileError::Io(path.display().to_string(), e))?;
    parse_oaf(&text).map_err(|e| OafFileError::Parse(path.display().to_string(), e))
}

pub fn write_oaf(path: &std::path::Path, a: &Automaton) -> Result<(), OafFileError> {
    std::fs::write(path, emit_oaf(a)).map_err(|e| OafFileError::Io(path.display().to_string(), e))
}

#[derive(Debug, Error)]
pub enum OafFileError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Parse(String, #[source] OafError),
}

impl From<AutomatonError> for OafError {
    fn from(e: AutomatonError) -> Self {
        malformed(0, e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures;

    const FIG1: &str = "alphabet: p !p\n\
        states: 2\n\
        init: 0\n\
        acc: buchi 1\n\
        trans:\n\
        0 p 0\n\
        0 p 1\n\
        0 !p 0\n\
        0 !p 1\n\
        1 p 1\n";

    #[test]
    fn parses_buchi_example() {
        assert_eq!(parse_oaf(FIG1).unwrap(), fixtures::a_fig1());
    }

    #[test]
    fn emit_is_canonical_and_round_trips() {
        let a = fixtures::a_fig1();
        let text = emit_oaf(&a);
        assert_eq!(text, FIG1);
        assert_eq!(parse_oaf(&text).unwrap(), a);
    }

    #[test]
    fn tolerates_comments_blank_lines_and_order() {
        let scrambled = "# a comment\n\
            states: 2\n\n\
            init: 0  # trailing comment\n\
            alphabet: p !p\n\
            acc: buchi 1\n\
            trans:\n\
            0 p 1\n\
            0 p 0\n\n\
            0 !p 1\n\
            1 p 1\n\
            0 !p 0\n";
        let a = parse_oaf(scrambled).unwrap();
        assert_eq!(emit_oaf(&a), FIG1);
    }

    #[test]
    fn empty_trans_section() {
        let a = parse_oaf("alphabet: a\nstates: 1\ninit: 0\nacc: buchi\ntrans:\n").unwrap();
        assert_eq!(a.num_transitions(), 0);
    }

    #[test]
    fn parity_round_trip() {
        let text = "alphabet: a b\nstates: 2\ninit: 0\nacc: parity 0=1 1=2\ntrans:\n0 a 1\n1 b 0\n";
        let a = parse_oaf(text).unwrap();
        assert_eq!(a.priorities().unwrap(), &[1, 2]);
        assert_eq!(emit_oaf(&a), text);
    }

    #[test]
    fn unknown_symbol_reports_line() {
        let text = "alphabet: p\nstates: 2\ninit: 0\nacc: buchi 1\ntrans:\n0 q 1\n";
        assert_eq!(
            parse_oaf(text),
            Err(OafError::UnknownSymbol { line: 6, symbol: "q".into() })
        );
    }

    #[test]
    fn state_out_of_range_reports_line() {
        let text = "alphabet: p\nstates: 2\ninit: 0\nacc: buchi 1\ntrans:\n0 p 5\n";
        assert_eq!(
            parse_oaf(text),
            Err(OafError::StateOutOfRange { line: 6, state: 5, num_states: 2 })
        );
        let text = "alphabet: p\nstates: 2\ninit: 3\nacc: buchi\ntrans:\n";
        assert_eq!(
            parse_oaf(text),
            Err(OafError::StateOutOfRange { line: 3, state: 3, num_states: 2 })
        );
    }

    #[test]
    fn missing_and_duplicate_sections() {
        assert_eq!(
            parse_oaf("alphabet: p\nstates: 1\ninit: 0\ntrans:\n"),
            Err(OafError::MissingSection("acc"))
        );
        assert_eq!(
            parse_oaf("alphabet: p\nalphabet: q\nstates: 1\ninit: 0\nacc: buchi\ntrans:\n"),
            Err(OafError::DuplicateSection { line: 2, section: "alphabet".into() })
        );
    }

    #[test]
    fn unassigned_priority_reports_state() {
        let text = "alphabet: a\nstates: 2\ninit: 0\nacc: parity 0=1\ntrans:\n";
        assert_eq!(
            parse_oaf(text),
            Err(OafError::UnassignedPriority { line: 4, state: 1 })
        );
    }
}
