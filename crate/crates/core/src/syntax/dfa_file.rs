//! The line-oriented automaton format.
//!
//! ```text
//! dfa lock
//! states: free held
//! alphabet: lock unlock work
//! start: free
//! final: free
//! trans: free lock -> held
//! trans: held unlock -> free
//! ```
//!
//! A file without `dfa` headers holds a single automaton. Missing
//! transitions go to an added non-final sink, and every automaton is
//! minimized once read.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::diagnostic::{Diagnostic, SourceSpan};
use super::lexer::{is_ident_char, is_ident_start};
use crate::name::Name;
use crate::policy::{Dfa, DfaPolicy};

/// Named automata that `@name` references in a system resolve against.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DfaBundle(BTreeMap<Name, DfaPolicy>);

impl DfaBundle {
    pub fn new() -> Self {
        DfaBundle::default()
    }

    pub fn insert(&mut self, name: impl Into<Name>, dfa: Dfa) {
        let name = name.into();
        self.0.insert(name.clone(), DfaPolicy::new(name, dfa));
    }

    pub fn with(mut self, name: impl Into<Name>, dfa: Dfa) -> Self {
        self.insert(name, dfa);
        self
    }

    pub fn get(&self, name: &Name) -> Option<&DfaPolicy> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DfaPolicy> {
        self.0.values()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DfaBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.values().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "dfa {}", d.name)?;
            write!(f, "{}", d.automaton)?;
        }
        Ok(())
    }
}

struct Word<'a> {
    text: &'a str,
    column: usize,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, c) in line.char_indices() {
        column += 1;
        if c.is_whitespace() {
            if let Some((b, col)) = start.take() {
                out.push(Word { text: &line[b..byte], column: col });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, col)) = start {
        out.push(Word { text: &line[b..], column: col });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(is_ident_start) && cs.all(is_ident_char)
}

struct Entry {
    states: Option<(Vec<String>, SourceSpan)>,
    alphabet: Option<(Vec<String>, SourceSpan)>,
    start: Option<(String, SourceSpan)>,
    finals: Option<(Vec<String>, SourceSpan)>,
    trans: Vec<(String, String, String, SourceSpan)>,
    header: SourceSpan,
}

struct Reader {
    file: Arc<str>,
    diags: Vec<Diagnostic>,
}

impl Reader {
    fn span(&self, line: usize, column: usize, length: usize) -> SourceSpan {
        SourceSpan { file: self.file.clone(), line, column, length }
    }

    fn error(&mut self, span: SourceSpan, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, message));
    }

    fn read_line(&mut self, entry: &mut Entry, lineno: usize, ws: &[Word<'_>]) {
        let key = &ws[0];
        let key_span = self.span(lineno, key.column, key.text.chars().count());
        let args: Vec<String> = ws[1..].iter().map(|w| w.text.to_string()).collect();
        for w in &ws[1..] {
            if w.text != "->" && !valid_ident(w.text) {
                let span = self.span(lineno, w.column, w.text.chars().count());
                self.error(span, format!("`{}` is not an identifier", w.text));
            }
        }
        let slot = match key.text {
            "states:" => &mut entry.states,
            "alphabet:" => &mut entry.alphabet,
            "final:" => &mut entry.finals,
            "start:" => {
                if entry.start.is_some() {
                    self.error(key_span, "duplicate `start:` line");
                } else if args.len() != 1 {
                    self.error(key_span, "`start:` takes exactly one state");
                } else {
                    entry.start = Some((args[0].clone(), key_span));
                }
                return;
            }
            "trans:" => {
                if args.len() != 4 || args[2] != "->" {
                    self.error(key_span, "expected `trans: STATE SYMBOL -> STATE`");
                } else {
                    entry.trans.push((args[0].clone(), args[1].clone(), args[3].clone(), key_span));
                }
                return;
            }
            other => {
                self.error(key_span, format!("unknown directive `{other}`"));
                return;
            }
        };
        if slot.is_some() {
            let msg = format!("duplicate `{}` line", key.text);
            self.error(key_span, msg);
        } else {
            *slot = Some((args, key_span));
        }
    }

    fn build(&mut self, entry: Entry) -> Option<Dfa> {
        let before = self.diags.len();
        let Some((states, states_span)) = entry.states else {
            self.error(entry.header, "missing `states:` line");
            return None;
        };
        if states.is_empty() {
            self.error(states_span.clone(), "states must be nonempty");
        }
        let mut index: HashMap<String, usize> = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                self.error(states_span.clone(), format!("state `{s}` declared twice"));
            }
        }
        let (alphabet, alphabet_span) = entry.alphabet.unwrap_or((Vec::new(), entry.header.clone()));
        let sorted: BTreeSet<&String> = alphabet.iter().collect();
        if sorted.len() != alphabet.len() {
            self.error(alphabet_span, "alphabet symbols must be distinct");
        }
        let symbols: Vec<Name> = sorted.iter().map(|s| Name::new(s)).collect();

        let start = match entry.start {
            None => {
                self.error(entry.header.clone(), "missing `start:` line");
                None
            }
            Some((s, span)) => match index.get(s.as_str()) {
                Some(&i) => Some(i),
                None => {
                    self.error(span, format!("unknown start state `{s}`"));
                    None
                }
            },
        };

        let mut finals = vec![false; states.len()];
        match entry.finals {
            None => self.error(entry.header.clone(), "missing `final:` line"),
            Some((fs, span)) => {
                if fs.is_empty() {
                    self.error(span.clone(), "final states must be nonempty");
                }
                for s in fs {
                    match index.get(s.as_str()) {
                        Some(&i) => finals[i] = true,
                        None => self.error(span.clone(), format!("unknown final state `{s}`")),
                    }
                }
            }
        }

        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; symbols.len()]; states.len()];
        for (from, sym, to, span) in entry.trans {
            let f = index.get(from.as_str()).copied();
            let t = index.get(to.as_str()).copied();
            let a = symbols.iter().position(|n| n.as_str() == sym);
            for (ok, what, name) in [(f.is_some(), "state", &from), (a.is_some(), "symbol", &sym), (t.is_some(), "state", &to)] {
                if !ok {
                    self.error(span.clone(), format!("unknown {what} `{name}`"));
                }
            }
            let (Some(f), Some(t), Some(a)) = (f, t, a) else { continue };
            match delta[f][a] {
                Some(prev) if prev != t => self.error(
                    span,
                    format!(
                        "nondeterministic transition: `{from} {sym}` goes to both `{}` and `{to}`",
                        states[prev]
                    ),
                ),
                _ => delta[f][a] = Some(t),
            }
        }

        if self.diags.len() > before {
            return None;
        }

        let mut names = states;
        let needs_sink = delta.iter().flatten().any(Option::is_none);
        let sink = names.len();
        if needs_sink {
            let mut sink_name = "_sink".to_string();
            while index.contains_key(sink_name.as_str()) {
                sink_name.insert(0, '_');
            }
            names.push(sink_name);
            finals.push(false);
            delta.push(vec![Some(sink); symbols.len()]);
        }
        let delta = delta
            .into_iter()
            .map(|row| row.into_iter().map(|t| t.unwrap_or(sink)).collect())
            .collect();
        let dfa = Dfa::from_parts(names, symbols, start?, finals, delta).expect("validated above");
        Some(dfa)
    }
}

fn empty_entry(header: SourceSpan) -> Entry {
    Entry { states: None, alphabet: None, start: None, finals: None, trans: Vec::new(), header }
}

/// Reads one automaton and completes its transition function, without
/// minimizing.
pub fn parse_dfa_complete(file: &str, text: &str) -> Result<Dfa, Vec<Diagnostic>> {
    let bundle = read_entries(file, text, "dfa")?;
    match bundle.len() {
        1 => Ok(bundle.into_iter().next().expect("one entry").1),
        _ => {
            let file: Arc<str> = Arc::from(file);
            Err(vec![Diagnostic::error(
                SourceSpan { file, line: 1, column: 1, length: 0 },
                "expected exactly one automaton",
            )])
        }
    }
}

/// Reads one automaton, completed and minimized.
pub fn parse_dfa(text: &str) -> Result<Dfa, Vec<Diagnostic>> {
    parse_dfa_complete("<input>", text).map(|d| d.minimize())
}

/// Reads a bundle; a file without `dfa` headers becomes one entry named
/// `default_name`.
pub fn parse_dfa_bundle(file: &str, text: &str, default_name: &str) -> Result<DfaBundle, Vec<Diagnostic>> {
    let entries = read_entries(file, text, default_name)?;
    let mut bundle = DfaBundle::new();
    for (name, dfa) in entries {
        bundle.insert(name, dfa.minimize());
    }
    Ok(bundle)
}

fn read_entries(file: &str, text: &str, default_name: &str) -> Result<Vec<(String, Dfa)>, Vec<Diagnostic>> {
    let mut reader = Reader { file: Arc::from(file), diags: Vec::new() };
    let mut entries: Vec<(String, Entry)> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let ws = words(strip_comment(raw));
        if ws.is_empty() {
            continue;
        }
        if ws[0].text == "dfa" {
            let span = reader.span(lineno, ws[0].column, 3);
            if ws.len() != 2 || !valid_ident(ws[1].text) {
                reader.error(span, "expected `dfa NAME`");
                continue;
            }
            let name = ws[1].text.to_string();
            if !seen.insert(name.clone()) {
                reader.error(span.clone(), format!("automaton `{name}` defined twice"));
            }
            entries.push((name, empty_entry(span)));
            continue;
        }
        if entries.is_empty() {
            let span = reader.span(lineno, 1, 0);
            entries.push((default_name.to_string(), empty_entry(span)));
        }
        let entry = &mut entries.last_mut().expect("nonempty").1;
        reader.read_line(entry, lineno, &ws);
    }
    if entries.is_empty() {
        let span = reader.span(1, 1, 0);
        reader.error(span, "no automaton defined");
    }

    let mut out = Vec::new();
    for (name, entry) in entries {
        if let Some(dfa) = reader.build(entry) {
            out.push((name, dfa));
        }
    }
    if reader.diags.is_empty() {
        Ok(out)
    } else {
        Err(reader.diags)
    }
}
