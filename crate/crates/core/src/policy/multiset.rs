//! Policies as multisets of labels, with `ω` for permanent resources.
//!
//! Multiset union (written `⊔` for resident policies) is pointwise
//! addition with `ω` absorbing. Both the parallel-composition typing rule
//! and the budget arithmetic of dynamic membranes depend on additivity.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::agent::Agent;
use crate::name::Name;
use crate::policy::{Policy, Refutation};
use crate::system::{SiteFailure, System};

/// Occurrence count of a label: a positive natural or `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u64),
    Omega,
}

impl Count {
    pub const ONE: Count = Count::Finite(1);

    pub fn add(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a.saturating_add(b)),
            _ => Count::Omega,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Omega => f.write_str("w"),
        }
    }
}

/// A finite multiset of labels. Absent labels have count zero; zero is
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultisetPolicy(BTreeMap<Name, Count>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot subtract {used} from {from}: it does not enforce it")]
pub struct SubtractError {
    pub from: MultisetPolicy,
    pub used: MultisetPolicy,
}

impl MultisetPolicy {
    pub fn new() -> Self {
        MultisetPolicy::default()
    }

    pub fn singleton(label: impl Into<Name>) -> Self {
        MultisetPolicy::new().with(label, Count::ONE)
    }

    /// Adds `count` occurrences of `label`; a zero finite count is ignored.
    pub fn with(mut self, label: impl Into<Name>, count: Count) -> Self {
        self.add(label.into(), count);
        self
    }

    pub fn add(&mut self, label: Name, count: Count) {
        if count == Count::Finite(0) {
            return;
        }
        let entry = self.0.entry(label).or_insert(Count::Finite(0));
        *entry = entry.add(count);
    }

    /// `None` means zero occurrences.
    pub fn count(&self, label: &Name) -> Option<Count> {
        self.0.get(label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, Count)> {
        self.0.iter().map(|(n, c)| (n, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Multiset inclusion, with `n ≤ ω` for every `n`.
    pub fn enforces(&self, other: &MultisetPolicy) -> bool {
        self.0
            .iter()
            .all(|(label, c)| other.count(label).is_some_and(|d| *c <= d))
    }

    /// Pointwise sum.
    pub fn join(&self, other: &MultisetPolicy) -> MultisetPolicy {
        let mut out = self.clone();
        for (label, c) in other.iter() {
            out.add(label.clone(), c);
        }
        out
    }

    /// The pointwise-largest `r` with `r.join(used) == self`:
    /// finite counts subtract, and `ω - anything = ω`.
    pub fn subtract(&self, used: &MultisetPolicy) -> Result<MultisetPolicy, SubtractError> {
        if !used.enforces(self) {
            return Err(SubtractError { from: self.clone(), used: used.clone() });
        }
        let mut out = BTreeMap::new();
        for (label, c) in self.iter() {
            let rest = match (c, used.count(label)) {
                (c, None) => c,
                (Count::Omega, Some(_)) => Count::Omega,
                (Count::Finite(a), Some(Count::Finite(b))) => Count::Finite(a - b),
                (Count::Finite(_), Some(Count::Omega)) => unreachable!("checked by enforces"),
            };
            if rest != Count::Finite(0) {
                out.insert(label.clone(), rest);
            }
        }
        Ok(MultisetPolicy(out))
    }

    /// Every label raised to `ω`.
    pub fn omega(&self) -> MultisetPolicy {
        MultisetPolicy(self.0.keys().map(|k| (k.clone(), Count::Omega)).collect())
    }

    /// Removes one occurrence of `label`; `ω` stays `ω`. `None` if absent.
    pub fn take_one(&self, label: &Name) -> Option<MultisetPolicy> {
        let mut out = self.clone();
        match self.count(label)? {
            Count::Omega => {}
            Count::Finite(1) => {
                out.0.remove(label);
            }
            Count::Finite(n) => {
                out.0.insert(label.clone(), Count::Finite(n - 1));
            }
        }
        Some(out)
    }
}

impl<S: Into<Name>> FromIterator<(S, Count)> for MultisetPolicy {
    fn from_iter<I: IntoIterator<Item = (S, Count)>>(iter: I) -> Self {
        let mut out = MultisetPolicy::new();
        for (label, c) in iter {
            out.add(label.into(), c);
        }
        out
    }
}

impl fmt::Display for MultisetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (label, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match c {
                Count::Finite(1) => write!(f, "{label}")?,
                c => write!(f, "{label}^{c}")?,
            }
        }
        f.write_str("}")
    }
}

pub fn enforces_multiset(t1: &MultisetPolicy, t2: &MultisetPolicy) -> bool {
    t1.enforces(t2)
}

pub fn join(t1: &MultisetPolicy, t2: &MultisetPolicy) -> MultisetPolicy {
    t1.join(t2)
}

pub fn subtract(t: &MultisetPolicy, used: &MultisetPolicy) -> Result<MultisetPolicy, SubtractError> {
    t.subtract(used)
}

/// Computes the least policy `p` satisfies, or explains which digest lies.
pub fn infer_explained(p: &Agent) -> Result<MultisetPolicy, Refutation> {
    match p {
        Agent::Nil => Ok(MultisetPolicy::new()),
        Agent::Act(a, rest) => {
            let mut t = infer_explained(rest).map_err(|r| r.under("r-act"))?;
            t.add(a.clone(), Count::ONE);
            Ok(t)
        }
        Agent::Go(l, digest, rest) => {
            let Policy::Multiset(digest) = digest else {
                return Err(Refutation::new("r-mig", p, "digest is not a multiset policy"));
            };
            let inner = infer_explained(rest).map_err(|r| r.under("r-mig"))?;
            if !inner.enforces(digest) {
                return Err(Refutation::new(
                    "r-mig",
                    p,
                    format!("code needs {inner}, which does not enforce the digest {digest}"),
                ));
            }
            Ok(MultisetPolicy::singleton(l.clone()))
        }
        Agent::Par(l, r) => {
            let tl = infer_explained(l).map_err(|e| e.under("r-par"))?;
            let tr = infer_explained(r).map_err(|e| e.under("r-par"))?;
            Ok(tl.join(&tr))
        }
        Agent::Repl(body) => Ok(infer_explained(body).map_err(|e| e.under("r-repl"))?.omega()),
    }
}

/// The unique minimal policy of `p`; `None` when some digest in `p` is not
/// enforced by the code it describes.
pub fn infer_policy(p: &Agent) -> Option<MultisetPolicy> {
    infer_explained(p).ok()
}

/// Decides `⊢ p : t` by structural recursion over the typing rules.
///
/// Parallel composition hands the left component exactly its inferred
/// (minimal) usage and the right one the remainder; replication compares
/// the body's usage raised to `ω` against `t`. Both choices are complete
/// because typing is upward closed.
pub fn check_multiset(p: &Agent, t: &MultisetPolicy) -> Result<(), Refutation> {
    match p {
        Agent::Nil => Ok(()),
        Agent::Act(a, rest) => {
            let Some(left) = t.take_one(a) else {
                return Err(Refutation::new("t-act", p, format!("no `{a}` left in {t}")));
            };
            check_multiset(rest, &left).map_err(|r| r.under("t-act"))
        }
        Agent::Go(l, digest, rest) => {
            if t.take_one(l).is_none() {
                return Err(Refutation::new("t-mig", p, format!("no `{l}` left in {t}")));
            }
            let Policy::Multiset(digest) = digest else {
                return Err(Refutation::new("t-mig", p, "digest is not a multiset policy"));
            };
            check_multiset(rest, digest).map_err(|r| r.under("t-mig"))
        }
        Agent::Par(l, r) => {
            let used = infer_explained(l).map_err(|e| e.under("t-par"))?;
            let Ok(rest) = t.subtract(&used) else {
                return Err(Refutation::new(
                    "t-par",
                    p,
                    format!("left component needs {used}, more than {t}"),
                ));
            };
            check_multiset(r, &rest).map_err(|e| e.under("t-par"))
        }
        Agent::Repl(body) => {
            let used = infer_explained(body).map_err(|e| e.under("t-repl"))?;
            let unbounded = used.omega();
            if unbounded.enforces(t) {
                Ok(())
            } else {
                Err(Refutation::new("t-repl", p, format!("replication needs {unbounded}, more than {t}")))
            }
        }
    }
}

pub fn typecheck_multiset(p: &Agent, t: &MultisetPolicy) -> bool {
    check_multiset(p, t).is_ok()
}

/// Entry well-formedness: every thread at a trustworthy site conforms to
/// the site's policy on its own.
pub fn check_wellformed_multiset(n: &System) -> Vec<SiteFailure> {
    let mut failures = Vec::new();
    for site in n.trustworthy_sites() {
        let Some(policy) = site.membrane.policy.as_multiset() else {
            failures.push(SiteFailure::new(&site.name, None, "membrane policy is not a multiset policy"));
            continue;
        };
        for (i, thread) in site.code.threads().iter().enumerate() {
            if let Err(r) = check_multiset(thread, policy) {
                failures.push(SiteFailure::new(&site.name, Some(i), r.to_string()));
            }
        }
    }
    failures
}

pub fn wellformed_multiset(n: &System) -> bool {
    check_wellformed_multiset(n).is_empty()
}

/// Well-formedness for static resident membranes: the whole code at a
/// trustworthy site conforms to the (never changing) membrane policy.
pub fn check_wellformed_static(n: &System) -> Vec<SiteFailure> {
    let mut failures = Vec::new();
    for site in n.trustworthy_sites() {
        let Some(policy) = site.membrane.policy.as_multiset() else {
            failures.push(SiteFailure::new(&site.name, None, "membrane policy is not a multiset policy"));
            continue;
        };
        if let Err(r) = check_multiset(&site.code, policy) {
            failures.push(SiteFailure::new(&site.name, None, r.to_string()));
        }
    }
    failures
}

/// Resident record: the original policy of every trustworthy site.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidentRecord(BTreeMap<Name, MultisetPolicy>);

impl ResidentRecord {
    pub fn new() -> Self {
        ResidentRecord::default()
    }

    pub fn insert(&mut self, site: impl Into<Name>, policy: MultisetPolicy) {
        self.0.insert(site.into(), policy);
    }

    pub fn with(mut self, site: impl Into<Name>, policy: MultisetPolicy) -> Self {
        self.insert(site, policy);
        self
    }

    pub fn get(&self, site: &Name) -> Option<&MultisetPolicy> {
        self.0.get(site)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &MultisetPolicy)> {
        self.0.iter()
    }

    /// The record a system starts from: each trustworthy site's current
    /// policy joined with the usage of its current code.
    pub fn from_system(n: &System) -> Option<ResidentRecord> {
        let mut out = ResidentRecord::new();
        for site in n.trustworthy_sites() {
            let policy = site.membrane.policy.as_multiset()?;
            out.insert(site.name.clone(), infer_policy(&site.code)?.join(policy));
        }
        Some(out)
    }
}

impl fmt::Display for ResidentRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (site, policy) in &self.0 {
            writeln!(f, "{site}: {policy}")?;
        }
        Ok(())
    }
}

/// Well-formedness under a resident record: at each trustworthy site the
/// code's usage plus what the membrane still grants stays within the
/// site's original policy.
pub fn check_wellformed_resident(n: &System, theta: &ResidentRecord) -> Vec<SiteFailure> {
    let mut failures = Vec::new();
    for site in n.trustworthy_sites() {
        let Some(policy) = site.membrane.policy.as_multiset() else {
            failures.push(SiteFailure::new(&site.name, None, "membrane policy is not a multiset policy"));
            continue;
        };
        let Some(original) = theta.get(&site.name) else {
            failures.push(SiteFailure::new(&site.name, None, "no resident record entry for trustworthy site"));
            continue;
        };
        match infer_explained(&site.code) {
            Err(r) => failures.push(SiteFailure::new(&site.name, None, r.to_string())),
            Ok(used) => {
                let total = used.join(policy);
                if !total.enforces(original) {
                    failures.push(SiteFailure::new(
                        &site.name,
                        None,
                        format!("code usage {used} plus remaining {policy} exceeds original {original}"),
                    ));
                }
            }
        }
    }
    failures
}

pub fn wellformed_resident(n: &System, theta: &ResidentRecord) -> bool {
    check_wellformed_resident(n, theta).is_empty()
}
