//! Policies as finite sets of permitted actions and localities.

use std::collections::BTreeSet;
use std::fmt;

use crate::agent::Agent;
use crate::name::Name;
use crate::policy::{Policy, Refutation};
use crate::system::{SiteFailure, System};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPolicy(BTreeSet<Name>);

impl SetPolicy {
    pub fn new() -> Self {
        SetPolicy::default()
    }

    pub fn contains(&self, label: &Name) -> bool {
        self.0.contains(label)
    }

    pub fn insert(&mut self, label: impl Into<Name>) {
        self.0.insert(label.into());
    }

    pub fn iter(&self) -> impl Iterator<Item = &Name> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Subset inclusion.
    pub fn enforces(&self, other: &SetPolicy) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl<S: Into<Name>> FromIterator<S> for SetPolicy {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        SetPolicy(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for SetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("}")
    }
}

pub fn enforces_set(t1: &SetPolicy, t2: &SetPolicy) -> bool {
    t1.enforces(t2)
}

/// Decides `⊢ p : t` for set policies, returning the failing rule on refusal.
pub fn check_set(p: &Agent, t: &SetPolicy) -> Result<(), Refutation> {
    match p {
        Agent::Nil => Ok(()),
        Agent::Act(a, rest) => {
            if !t.contains(a) {
                return Err(Refutation::new("t-act", p, format!("action `{a}` not in {t}")));
            }
            check_set(rest, t).map_err(|r| r.under("t-act"))
        }
        Agent::Go(l, digest, rest) => {
            if !t.contains(l) {
                return Err(Refutation::new("t-mig", p, format!("locality `{l}` not in {t}")));
            }
            let Policy::Set(digest) = digest else {
                return Err(Refutation::new("t-mig", p, "digest is not a set policy"));
            };
            check_set(rest, digest).map_err(|r| r.under("t-mig"))
        }
        Agent::Par(l, r) => {
            check_set(l, t).map_err(|e| e.under("t-par"))?;
            check_set(r, t).map_err(|e| e.under("t-par"))
        }
        Agent::Repl(body) => check_set(body, t).map_err(|e| e.under("t-repl")),
    }
}

pub fn typecheck_set(p: &Agent, t: &SetPolicy) -> bool {
    check_set(p, t).is_ok()
}

/// Every trustworthy site's code conforms to its own membrane policy.
/// Sites that are not trustworthy pass unconditionally.
pub fn check_wellformed_set(n: &System) -> Vec<SiteFailure> {
    let mut failures = Vec::new();
    for site in n.sites().iter().filter(|s| s.is_trustworthy()) {
        let Some(policy) = site.membrane.policy.as_set() else {
            failures.push(SiteFailure::new(&site.name, None, "membrane policy is not a set policy"));
            continue;
        };
        if let Err(r) = check_set(&site.code, policy) {
            failures.push(SiteFailure::new(&site.name, None, r.to_string()));
        }
    }
    failures
}

pub fn wellformed_set(n: &System) -> bool {
    check_wellformed_set(n).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> SetPolicy {
        items.iter().copied().collect()
    }

    #[test]
    fn enforces_is_subset() {
        assert!(enforces_set(&set(&["info", "req"]), &set(&["info", "req", "secure"])));
        assert!(enforces_set(&set(&[]), &set(&[])));
        assert!(!enforces_set(&set(&["take"]), &set(&["info", "req", "secure"])));
    }

    #[test]
    fn nil_satisfies_everything() {
        assert!(typecheck_set(&Agent::Nil, &set(&[])));
    }

    #[test]
    fn take_is_rejected_by_home() {
        let home = set(&["info", "req", "secure"]);
        let p = Agent::actions(["take"]);
        let err = check_set(&p, &home).unwrap_err();
        assert_eq!(err.rules, vec!["t-act"]);
        assert!(!typecheck_set(&p, &home));
    }

    #[test]
    fn digest_is_checked_under_migration() {
        let home = set(&["info", "req", "secure"]);
        let p = Agent::go("secure", set(&["give", "home"]).into(), Agent::actions(["take"]));
        let err = check_set(&p, &home).unwrap_err();
        assert_eq!(err.rules, vec!["t-mig", "t-act"]);
    }

    #[test]
    fn replication_checks_the_body() {
        let p = Agent::repl(Agent::actions(["send"]));
        assert!(typecheck_set(&p, &set(&["send", "quit"])));
        assert!(!typecheck_set(&p, &set(&["quit"])));
    }
}
