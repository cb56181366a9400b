//! The three policy languages a membrane can enforce.

pub mod cre;
pub mod dfa;
pub mod multiset;
pub mod satisfaction;
pub mod set;

use std::fmt;
use std::sync::Arc;

use crate::name::Name;

pub use dfa::Dfa;
pub use multiset::{Count, MultisetPolicy};
pub use set::SetPolicy;

/// Which kind of policy every membrane and digest of a system uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Set,
    Multiset,
    Dfa,
}

impl Regime {
    pub fn keyword(self) -> &'static str {
        match self {
            Regime::Set => "set",
            Regime::Multiset => "multiset",
            Regime::Dfa => "dfa",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A named automaton from a `.dfa` bundle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DfaPolicy {
    pub name: Name,
    pub automaton: Arc<Dfa>,
}

impl DfaPolicy {
    pub fn new(name: impl Into<Name>, automaton: Dfa) -> Self {
        DfaPolicy { name: name.into(), automaton: Arc::new(automaton) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Policy {
    Set(SetPolicy),
    Multiset(MultisetPolicy),
    Dfa(DfaPolicy),
}

impl Policy {
    pub fn regime(&self) -> Regime {
        match self {
            Policy::Set(_) => Regime::Set,
            Policy::Multiset(_) => Regime::Multiset,
            Policy::Dfa(_) => Regime::Dfa,
        }
    }

    pub fn as_set(&self) -> Option<&SetPolicy> {
        match self {
            Policy::Set(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_multiset(&self) -> Option<&MultisetPolicy> {
        match self {
            Policy::Multiset(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_dfa(&self) -> Option<&DfaPolicy> {
        match self {
            Policy::Dfa(t) => Some(t),
            _ => None,
        }
    }
}

impl From<SetPolicy> for Policy {
    fn from(t: SetPolicy) -> Self {
        Policy::Set(t)
    }
}

impl From<MultisetPolicy> for Policy {
    fn from(t: MultisetPolicy) -> Self {
        Policy::Multiset(t)
    }
}

impl From<DfaPolicy> for Policy {
    fn from(t: DfaPolicy) -> Self {
        Policy::Dfa(t)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Set(t) => t.fmt(f),
            Policy::Multiset(t) => t.fmt(f),
            Policy::Dfa(t) => write!(f, "@{}", t.name),
        }
    }
}

/// Why a typing judgement could not be derived: the chain of rules applied
/// from the root down to the failing one, the subterm it failed on, and why.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub rules: Vec<&'static str>,
    pub subterm: String,
    pub reason: String,
}

impl Refutation {
    pub(crate) fn new(rule: &'static str, subterm: impl fmt::Display, reason: impl Into<String>) -> Self {
        Refutation { rules: vec![rule], subterm: subterm.to_string(), reason: reason.into() }
    }

    pub(crate) fn under(mut self, rule: &'static str) -> Self {
        self.rules.insert(0, rule);
        self
    }
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] at `{}`", self.reason, self.rules.join(" > "), self.subterm)
    }
}
