//! Deterministic finite automata over label names.
//!
//! Transition functions are always total. Automata with different alphabets
//! are combined by first extending both to the union alphabet, routing every
//! new symbol to a fresh non-final sink.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::name::Name;

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dfa {
    state_names: Vec<String>,
    /// Sorted, no duplicates.
    alphabet: Vec<Name>,
    start: StateId,
    finals: Vec<bool>,
    /// `delta[s][i]` is the successor of `s` on `alphabet[i]`.
    delta: Vec<Vec<StateId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automaton has no states")]
    NoStates,
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error("alphabet symbols must be distinct and sorted")]
    UnsortedAlphabet,
    #[error("state {state} has {found} transitions, expected {expected}")]
    NotTotal { state: StateId, found: usize, expected: usize },
}

impl Dfa {
    pub fn from_parts(
        state_names: Vec<String>,
        alphabet: Vec<Name>,
        start: StateId,
        finals: Vec<bool>,
        delta: Vec<Vec<StateId>>,
    ) -> Result<Dfa, DfaError> {
        let n = state_names.len();
        if n == 0 {
            return Err(DfaError::NoStates);
        }
        if alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DfaError::UnsortedAlphabet);
        }
        if start >= n {
            return Err(DfaError::StateOutOfRange(start));
        }
        if finals.len() != n || delta.len() != n {
            return Err(DfaError::NotTotal { state: 0, found: delta.len(), expected: n });
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(DfaError::NotTotal { state: s, found: row.len(), expected: alphabet.len() });
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(DfaError::StateOutOfRange(t));
            }
        }
        Ok(Dfa { state_names, alphabet, start, finals, delta })
    }

    /// One-state automaton accepting every word over `alphabet`.
    pub fn universal(alphabet: impl IntoIterator<Item = Name>) -> Dfa {
        let alphabet: Vec<Name> = alphabet.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let delta = vec![vec![0; alphabet.len()]];
        Dfa { state_names: vec!["all".into()], alphabet, start: 0, finals: vec![true], delta }
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn alphabet(&self) -> &[Name] {
        &self.alphabet
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&s| self.finals[s])
    }

    pub fn symbol_index(&self, symbol: &Name) -> Option<usize> {
        self.alphabet.binary_search(symbol).ok()
    }

    /// `None` when `symbol` is outside the alphabet (the implicit sink).
    pub fn next(&self, s: StateId, symbol: &Name) -> Option<StateId> {
        self.symbol_index(symbol).map(|i| self.delta[s][i])
    }

    /// Runs the word from `s`; true iff it ends in a final state. A symbol
    /// outside the alphabet rejects.
    pub fn accepts_from<'a>(&self, s: StateId, word: impl IntoIterator<Item = &'a Name>) -> bool {
        let mut cur = s;
        for symbol in word {
            match self.next(cur, symbol) {
                Some(t) => cur = t,
                None => return false,
            }
        }
        self.finals[cur]
    }

    pub fn accepts<'a>(&self, word: impl IntoIterator<Item = &'a Name>) -> bool {
        self.accepts_from(self.start, word)
    }

    /// Same automaton started from `s`.
    pub fn with_start(&self, s: StateId) -> Dfa {
        Dfa { start: s, ..self.clone() }
    }

    /// Extends the alphabet; new symbols lead to a non-final sink.
    pub fn with_alphabet<'a>(&self, extra: impl IntoIterator<Item = &'a Name>) -> Dfa {
        let mut alphabet: BTreeSet<Name> = self.alphabet.iter().cloned().collect();
        let before = alphabet.len();
        alphabet.extend(extra.into_iter().cloned());
        if alphabet.len() == before {
            return self.clone();
        }
        let alphabet: Vec<Name> = alphabet.into_iter().collect();
        let sink = self.num_states();
        let mut state_names = self.state_names.clone();
        state_names.push(self.fresh_name("sink"));
        let mut finals = self.finals.clone();
        finals.push(false);
        let mut delta = Vec::with_capacity(sink + 1);
        for s in 0..=sink {
            let row = alphabet
                .iter()
                .map(|a| match self.symbol_index(a) {
                    Some(i) if s < sink => self.delta[s][i],
                    _ => sink,
                })
                .collect();
            delta.push(row);
        }
        Dfa { state_names, alphabet, start: self.start, finals, delta }
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut name = format!("_{base}");
        while self.state_names.contains(&name) {
            name.insert(0, '_');
        }
        name
    }

    /// Accepts exactly the words over the same alphabet this one rejects.
    pub fn complement(&self) -> Dfa {
        Dfa { finals: self.finals.iter().map(|f| !f).collect(), ..self.clone() }
    }

    /// Product automaton over the union of both alphabets.
    pub fn intersect(&self, other: &Dfa) -> Dfa {
        let a = self.with_alphabet(other.alphabet());
        let b = other.with_alphabet(self.alphabet());
        let nb = b.num_states();
        let mut state_names = Vec::with_capacity(a.num_states() * nb);
        let mut finals = Vec::with_capacity(a.num_states() * nb);
        let mut delta = Vec::with_capacity(a.num_states() * nb);
        for p in a.states() {
            for q in b.states() {
                state_names.push(format!("({},{})", a.state_names[p], b.state_names[q]));
                finals.push(a.finals[p] && b.finals[q]);
                delta.push(
                    (0..a.alphabet.len())
                        .map(|i| a.delta[p][i] * nb + b.delta[q][i])
                        .collect(),
                );
            }
        }
        Dfa {
            state_names,
            alphabet: a.alphabet,
            start: a.start * nb + b.start,
            finals,
            delta,
        }
    }

    /// Shortest word reaching each state from the start, by breadth-first
    /// search in alphabet order; `None` for unreachable states.
    pub fn access_words(&self) -> Vec<Option<Vec<Name>>> {
        let mut words: Vec<Option<Vec<Name>>> = vec![None; self.num_states()];
        words[self.start] = Some(Vec::new());
        let mut queue = VecDeque::from([self.start]);
        while let Some(s) = queue.pop_front() {
            for (i, &t) in self.delta[s].iter().enumerate() {
                if words[t].is_none() {
                    let mut w = words[s].clone().expect("visited");
                    w.push(self.alphabet[i].clone());
                    words[t] = Some(w);
                    queue.push_back(t);
                }
            }
        }
        words
    }

    /// A shortest accepted word, if any.
    pub fn shortest_accepted(&self) -> Option<Vec<Name>> {
        let words = self.access_words();
        self.states()
            .filter(|&s| self.finals[s])
            .filter_map(|s| words[s].clone())
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }

    /// True iff no final state is reachable from the start.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        seen[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(s) = queue.pop_front() {
            if self.finals[s] {
                return false;
            }
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        true
    }

    /// Language inclusion: every word this automaton accepts, `other` accepts.
    pub fn enforces(&self, other: &Dfa) -> bool {
        self.intersect(&other.with_alphabet(self.alphabet()).complement()).is_empty()
    }

    /// A word accepted here and rejected by `other`, if one exists.
    pub fn inclusion_counterexample(&self, other: &Dfa) -> Option<Vec<Name>> {
        self.intersect(&other.with_alphabet(self.alphabet()).complement())
            .shortest_accepted()
    }

    /// Language-equivalent automaton with the fewest states: unreachable
    /// states are dropped, then indistinguishable ones merged by partition
    /// refinement. States are renumbered in breadth-first order from the
    /// start, so isomorphic automata minimize to equal values.
    pub fn minimize(&self) -> Dfa {
        let reachable: Vec<StateId> = {
            let words = self.access_words();
            self.states().filter(|&s| words[s].is_some()).collect()
        };

        // block[s] for reachable s; refined until stable
        let mut block: HashMap<StateId, usize> =
            reachable.iter().map(|&s| (s, usize::from(self.finals[s]))).collect();
        let mut num_blocks = reachable.iter().map(|&s| self.finals[s]).collect::<BTreeSet<_>>().len();
        loop {
            let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_block = HashMap::with_capacity(reachable.len());
            for &s in &reachable {
                let sig = (block[&s], self.delta[s].iter().map(|t| block[t]).collect::<Vec<_>>());
                let fresh = signatures.len();
                let id = *signatures.entry(sig).or_insert(fresh);
                next_block.insert(s, id);
            }
            let refined = signatures.len();
            block = next_block;
            if refined == num_blocks {
                break;
            }
            num_blocks = refined;
        }

        // renumber blocks in BFS order from the start block
        let mut order: HashMap<usize, StateId> = HashMap::new();
        let mut representative: Vec<StateId> = Vec::new();
        let mut queue = VecDeque::from([self.start]);
        order.insert(block[&self.start], 0);
        representative.push(self.start);
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                let b = block[&t];
                if let std::collections::hash_map::Entry::Vacant(e) = order.entry(b) {
                    e.insert(representative.len());
                    representative.push(t);
                    queue.push_back(t);
                }
            }
        }

        let state_names = representative.iter().map(|&s| self.state_names[s].clone()).collect();
        let finals = representative.iter().map(|&s| self.finals[s]).collect();
        let delta = representative
            .iter()
            .map(|&s| self.delta[s].iter().map(|t| order[&block[t]]).collect())
            .collect();
        Dfa { state_names, alphabet: self.alphabet.clone(), start: 0, finals, delta }
    }
}

impl fmt::Display for Dfa {
    /// The `.dfa` entry body format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.state_names.join(" "))?;
        let alphabet: Vec<&str> = self.alphabet.iter().map(Name::as_str).collect();
        writeln!(f, "alphabet: {}", alphabet.join(" "))?;
        writeln!(f, "start: {}", self.state_names[self.start])?;
        let finals: Vec<&str> = self.finals().map(|s| self.state_names[s].as_str()).collect();
        writeln!(f, "final: {}", finals.join(" "))?;
        for s in self.states() {
            for (i, &t) in self.delta[s].iter().enumerate() {
                writeln!(f, "trans: {} {} -> {}", self.state_names[s], self.alphabet[i], self.state_names[t])?;
            }
        }
        Ok(())
    }
}

pub fn minimize(a: &Dfa) -> Dfa {
    a.minimize()
}

pub fn complement(a: &Dfa) -> Dfa {
    a.complement()
}

pub fn intersect(a1: &Dfa, a2: &Dfa) -> Dfa {
    a1.intersect(a2)
}

pub fn is_empty(a: &Dfa) -> bool {
    a.is_empty()
}

pub fn enforces_dfa(a1: &Dfa, a2: &Dfa) -> bool {
    a1.enforces(a2)
}

pub fn accepts_from(a: &Dfa, s: StateId, sigma: &[Name]) -> bool {
    a.accepts_from(s, sigma)
}
