//! Agents against DFA policies: every local trace must be accepted, and
//! every spawned continuation must satisfy the automaton it carries.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::agent::Agent;
use crate::name::{format_trace, Label};
use crate::policy::cre::{cre_of, Term};
use crate::policy::dfa::{Dfa, StateId};
use crate::policy::Policy;
use crate::system::{SiteFailure, System};

pub const DEFAULT_BOUND: usize = 10_000;

/// A trace the agent may perform that the automaton rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub word: Vec<Label>,
    /// Set when the word belongs to a spawned continuation checked
    /// against its own digest.
    pub within: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` rejected", format_trace(&self.word))?;
        if let Some(ctx) = &self.within {
            write!(f, " (continuation of {ctx})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Satisfaction {
    Yes,
    No(Counterexample),
    /// The search exceeded its bound before closing.
    Unknown { explored: usize },
}

impl Satisfaction {
    pub fn is_yes(&self) -> bool {
        matches!(self, Satisfaction::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Satisfaction::No(_))
    }

    fn and_then(self, next: impl FnOnce() -> Satisfaction) -> Satisfaction {
        match self {
            Satisfaction::No(c) => Satisfaction::No(c),
            Satisfaction::Yes => next(),
            Satisfaction::Unknown { explored } => match next() {
                Satisfaction::No(c) => Satisfaction::No(c),
                Satisfaction::Unknown { explored: more } => Satisfaction::Unknown { explored: explored + more },
                Satisfaction::Yes => Satisfaction::Unknown { explored },
            },
        }
    }
}

/// Decides whether every word of `CRE(p)` is accepted by `dfa` from `start`,
/// ignoring digests. Exploration of (derivative, state) pairs is exact for
/// replication-free agents; otherwise it gives up after `bound` pairs.
pub fn language_included(p: &Agent, dfa: &Dfa, start: StateId, bound: usize) -> Satisfaction {
    let limited = p.has_replication();
    let t0 = Term::from(&cre_of(p));
    let mut seen: HashSet<(Term, Option<StateId>)> = HashSet::new();
    let mut queue: VecDeque<(Term, Option<StateId>, Vec<Label>)> = VecDeque::new();
    seen.insert((t0.clone(), Some(start)));
    queue.push_back((t0, Some(start), Vec::new()));

    while let Some((term, state, word)) = queue.pop_front() {
        let Some(s) = state else {
            // left the alphabet: any completion is a counterexample
            let mut w = word;
            w.extend(term.shortest_word());
            return Satisfaction::No(Counterexample { word: w, within: None });
        };
        if term.nullable() && !dfa.is_final(s) {
            return Satisfaction::No(Counterexample { word, within: None });
        }
        for alpha in term.first() {
            let next_state = dfa.next(s, alpha.name());
            for d in term.derive(&alpha) {
                if seen.insert((d.clone(), next_state)) {
                    let mut w = word.clone();
                    w.push(alpha.clone());
                    queue.push_back((d, next_state, w));
                }
            }
        }
        if limited && seen.len() > bound {
            return Satisfaction::Unknown { explored: seen.len() };
        }
    }
    Satisfaction::Yes
}

/// Every `go(l, A).Q` anywhere inside `p` has `Q` satisfying `A`.
pub fn digests_satisfied(p: &Agent, bound: usize) -> Satisfaction {
    let mut verdict = Satisfaction::Yes;
    p.for_each_migration(&mut |target, digest, body| {
        if verdict.is_no() {
            return;
        }
        let next = match digest {
            Policy::Dfa(d) => match language_included(body, &d.automaton, d.automaton.start(), bound) {
                Satisfaction::No(c) => Satisfaction::No(Counterexample {
                    within: Some(format!("go({target}, @{})", d.name)),
                    ..c
                }),
                other => other,
            },
            other => Satisfaction::No(Counterexample {
                word: Vec::new(),
                within: Some(format!("go({target}, {other}): digest is not an automaton")),
            }),
        };
        verdict = std::mem::replace(&mut verdict, Satisfaction::Yes).and_then(|| next);
    });
    verdict
}

/// `⊢ p : A` from the start state of `dfa`.
pub fn satisfies_dfa(p: &Agent, dfa: &Dfa, bound: usize) -> Satisfaction {
    satisfies_dfa_from(p, dfa, dfa.start(), bound)
}

pub fn satisfies_dfa_from(p: &Agent, dfa: &Dfa, start: StateId, bound: usize) -> Satisfaction {
    language_included(p, dfa, start, bound).and_then(|| digests_satisfied(p, bound))
}

/// Per thread: some state of the automaton accepts every trace of the
/// thread, and every digest is honest.
pub fn thread_satisfies_somewhere(p: &Agent, dfa: &Dfa, bound: usize) -> Satisfaction {
    let mut start_no = None;
    let mut other_no = None;
    let mut explored = None;
    for s in dfa.states() {
        match language_included(p, dfa, s, bound) {
            Satisfaction::Yes => return digests_satisfied(p, bound),
            Satisfaction::No(c) if s == dfa.start() => start_no = Some(c),
            Satisfaction::No(c) => {
                other_no.get_or_insert(c);
            }
            Satisfaction::Unknown { explored: n } => explored = Some(explored.unwrap_or(0) + n),
        }
    }
    match (explored, start_no.or(other_no)) {
        (Some(n), _) => Satisfaction::Unknown { explored: n },
        (None, Some(c)) => Satisfaction::No(c),
        (None, None) => Satisfaction::Yes,
    }
}

/// Failures and inconclusive threads of the DFA well-formedness check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DfaAssessment {
    pub failures: Vec<SiteFailure>,
    pub inconclusive: Vec<SiteFailure>,
}

impl DfaAssessment {
    /// `Some(true)` well-formed, `Some(false)` not, `None` undecided.
    pub fn verdict(&self) -> Option<bool> {
        if !self.failures.is_empty() {
            Some(false)
        } else if !self.inconclusive.is_empty() {
            None
        } else {
            Some(true)
        }
    }
}

pub fn check_wellformed_dfa(n: &System, bound: usize) -> DfaAssessment {
    let mut out = DfaAssessment::default();
    for site in n.trustworthy_sites() {
        let Some(policy) = site.membrane.policy.as_dfa() else {
            out.failures.push(SiteFailure::new(&site.name, None, "membrane policy is not an automaton"));
            continue;
        };
        for (i, thread) in site.code.threads().iter().enumerate() {
            match thread_satisfies_somewhere(thread, &policy.automaton, bound) {
                Satisfaction::Yes => {}
                Satisfaction::No(c) => out.failures.push(SiteFailure::new(
                    &site.name,
                    Some(i),
                    format!("no state of @{} accepts thread `{thread}`: {c}", policy.name),
                )),
                Satisfaction::Unknown { explored } => out.inconclusive.push(SiteFailure::new(
                    &site.name,
                    Some(i),
                    format!("search bound exceeded after {explored} pairs on `{thread}`"),
                )),
            }
        }
    }
    out
}

/// `Some(b)` when decided, `None` when the bound was exceeded.
pub fn wellformed_dfa(n: &System, bound: usize) -> Option<bool> {
    check_wellformed_dfa(n, bound).verdict()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;
    use crate::policy::DfaPolicy;

    fn names(items: &[&str]) -> Vec<Name> {
        items.iter().map(|s| Name::new(s)).collect()
    }

    /// Accepts lock.unlock repeated, with work allowed anywhere.
    fn lock_dfa() -> Dfa {
        // alphabet sorted: lock, unlock, work
        Dfa::from_parts(
            vec!["free".into(), "held".into(), "err".into()],
            names(&["lock", "unlock", "work"]),
            0,
            vec![true, false, false],
            vec![vec![1, 2, 0], vec![2, 0, 1], vec![2, 2, 2]],
        )
        .unwrap()
    }

    #[test]
    fn lock_without_unlock_is_rejected() {
        let v = satisfies_dfa(&Agent::actions(["lock"]), &lock_dfa(), DEFAULT_BOUND);
        let Satisfaction::No(c) = v else { panic!("{v:?}") };
        assert_eq!(format_trace(&c.word), "lock");
        assert!(satisfies_dfa(&Agent::actions(["lock", "work", "unlock"]), &lock_dfa(), 10).is_yes());
    }

    #[test]
    fn symbol_outside_alphabet_rejects() {
        let v = satisfies_dfa(&Agent::actions(["take"]), &lock_dfa(), DEFAULT_BOUND);
        assert!(v.is_no());
    }

    #[test]
    fn replication_hits_bound() {
        let p = Agent::repl(Agent::actions(["lock", "unlock"]));
        let v = satisfies_dfa(&p, &lock_dfa(), 5);
        assert!(matches!(v, Satisfaction::Unknown { .. }), "{v:?}");
        // an interleaving of two copies reaches lock.lock
        let v = satisfies_dfa(&p, &lock_dfa(), 10_000);
        assert!(!v.is_yes());
    }

    #[test]
    fn replication_closes_when_terms_saturate() {
        let p = Agent::repl(Agent::actions(["work"]));
        assert!(satisfies_dfa(&p, &lock_dfa(), 100).is_yes());
    }

    #[test]
    fn suffix_acceptance_from_inner_state() {
        let p = Agent::actions(["unlock"]);
        assert!(satisfies_dfa(&p, &lock_dfa(), 10).is_no());
        assert!(thread_satisfies_somewhere(&p, &lock_dfa(), 10).is_yes());
    }

    #[test]
    fn dishonest_digest_is_found() {
        let digest = DfaPolicy::new("lock", lock_dfa());
        let p = Agent::go("there", digest.into(), Agent::actions(["lock"]));
        let all = Dfa::universal(names(&["there"]));
        let v = satisfies_dfa(&p, &all, 10);
        let Satisfaction::No(c) = v else { panic!("{v:?}") };
        assert_eq!(c.within.as_deref(), Some("go(there, @lock)"));
    }
}
