//! Agent terms and their structural normal form.
//!
//! `normalize` applies the monoid laws of parallel composition (unit `nil`,
//! commutativity, associativity) everywhere in a term. It never unfolds a
//! replication; the interpreter does that lazily, one copy at a time.

use std::collections::BTreeSet;
use std::fmt;

use crate::name::Name;
use crate::policy::Policy;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Nil,
    /// `a.P`
    Act(Name, Box<Agent>),
    /// `go(l, T).P`: migrate to `l` with digest `T`, then run `P` there.
    Go(Name, Policy, Box<Agent>),
    Par(Box<Agent>, Box<Agent>),
    Repl(Box<Agent>),
}

impl Agent {
    pub fn act(action: impl Into<Name>, then: Agent) -> Agent {
        Agent::Act(action.into(), Box::new(then))
    }

    pub fn go(target: impl Into<Name>, digest: Policy, then: Agent) -> Agent {
        Agent::Go(target.into(), digest, Box::new(then))
    }

    pub fn par(left: Agent, right: Agent) -> Agent {
        Agent::Par(Box::new(left), Box::new(right))
    }

    pub fn repl(body: Agent) -> Agent {
        Agent::Repl(Box::new(body))
    }

    /// `a1.a2. ... .an.nil`
    pub fn actions<I, S>(actions: I) -> Agent
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<Name>,
    {
        actions
            .into_iter()
            .rev()
            .fold(Agent::Nil, |acc, a| Agent::act(a, acc))
    }

    /// Right-nested parallel composition of `parts`; `nil` when empty.
    pub fn par_all(parts: impl IntoIterator<Item = Agent>) -> Agent {
        let mut parts: Vec<Agent> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Agent::Nil;
        };
        while let Some(p) = parts.pop() {
            acc = Agent::par(p, acc);
        }
        acc
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Agent::Nil)
    }

    /// Canonical representative of the structural-equivalence class
    /// (replication law excluded). Idempotent.
    pub fn normalize(&self) -> Agent {
        Agent::par_all(self.normal_threads())
    }

    /// The threads of the normal form, in canonical order. `nil` has none.
    pub fn threads(&self) -> Vec<Agent> {
        self.normal_threads()
    }

    fn normal_threads(&self) -> Vec<Agent> {
        let mut out = Vec::new();
        self.collect_threads(&mut out);
        sort_threads(&mut out);
        out
    }

    fn collect_threads(&self, out: &mut Vec<Agent>) {
        match self {
            Agent::Nil => {}
            Agent::Par(l, r) => {
                l.collect_threads(out);
                r.collect_threads(out);
            }
            Agent::Act(a, p) => out.push(Agent::act(a.clone(), p.normalize())),
            Agent::Go(l, t, p) => out.push(Agent::go(l.clone(), t.clone(), p.normalize())),
            Agent::Repl(b) => out.push(Agent::repl(b.normalize())),
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Agent::Nil => 1,
            Agent::Act(_, p) | Agent::Go(_, _, p) | Agent::Repl(p) => 1 + p.size(),
            Agent::Par(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn has_replication(&self) -> bool {
        match self {
            Agent::Nil => false,
            Agent::Repl(_) => true,
            Agent::Act(_, p) | Agent::Go(_, _, p) => p.has_replication(),
            Agent::Par(l, r) => l.has_replication() || r.has_replication(),
        }
    }

    /// Calls `visit` on every migration subterm `go(l, T).P`, outermost first.
    pub fn for_each_migration<'a>(&'a self, visit: &mut impl FnMut(&'a Name, &'a Policy, &'a Agent)) {
        match self {
            Agent::Nil => {}
            Agent::Act(_, p) | Agent::Repl(p) => p.for_each_migration(visit),
            Agent::Go(l, t, p) => {
                visit(l, t, p);
                p.for_each_migration(visit);
            }
            Agent::Par(l, r) => {
                l.for_each_migration(visit);
                r.for_each_migration(visit);
            }
        }
    }

    /// Names used in action-prefix position.
    pub fn action_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<Name>) {
        match self {
            Agent::Nil => {}
            Agent::Act(a, p) => {
                out.insert(a.clone());
                p.collect_actions(out);
            }
            Agent::Go(_, _, p) | Agent::Repl(p) => p.collect_actions(out),
            Agent::Par(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
        }
    }

    /// Names used as migration targets.
    pub fn target_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.for_each_migration(&mut |l, _, _| {
            out.insert(l.clone());
        });
        out
    }
}

/// Sorts threads by their concrete rendering, which is stable across runs.
pub(crate) fn sort_threads(threads: &mut [Agent]) {
    threads.sort_by_cached_key(|t| t.to_string());
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Nil => f.write_str("nil"),
            Agent::Act(a, p) => {
                write!(f, "{a}.")?;
                fmt_operand(p, f)
            }
            Agent::Go(l, t, p) => {
                write!(f, "go({l}, {t}).")?;
                fmt_operand(p, f)
            }
            Agent::Par(l, r) => write!(f, "{l} | {r}"),
            Agent::Repl(b) => {
                f.write_str("!")?;
                fmt_operand(b, f)
            }
        }
    }
}

fn fmt_operand(p: &Agent, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if let Agent::Par(..) = p {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}
