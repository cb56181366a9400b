use std::collections::BTreeSet;

use crate::agent::Agent;
use crate::name::{Label, Trace};
use crate::policy::cre::{cre_of, Term};

/// All single labelled transitions of `p`, residuals normalized and
/// duplicates removed. A replication contributes the transitions of one
/// unfolded copy.
pub fn lts_step(p: &Agent) -> Vec<(Label, Agent)> {
    let mut out: BTreeSet<(Label, Agent)> = BTreeSet::new();
    for (label, residual) in raw_step(p) {
        out.insert((label, residual.normalize()));
    }
    out.into_iter().collect()
}

fn raw_step(p: &Agent) -> Vec<(Label, Agent)> {
    match p {
        Agent::Nil => Vec::new(),
        Agent::Act(a, rest) => vec![(Label::Action(a.clone()), (**rest).clone())],
        Agent::Go(l, _, _) => vec![(Label::Locality(l.clone()), Agent::Nil)],
        Agent::Par(l, r) => {
            let mut out: Vec<(Label, Agent)> = raw_step(l)
                .into_iter()
                .map(|(a, l2)| (a, Agent::par(l2, (**r).clone())))
                .collect();
            out.extend(raw_step(r).into_iter().map(|(a, r2)| (a, Agent::par((**l).clone(), r2))));
            out
        }
        Agent::Repl(body) => raw_step(body)
            .into_iter()
            .map(|(a, b2)| (a, Agent::par(b2, p.clone())))
            .collect(),
    }
}

fn explore(p: &Agent, depth: usize, mut keep: impl FnMut(&Trace, &Agent) -> bool) -> BTreeSet<Trace> {
    let mut traces = BTreeSet::new();
    let mut frontier: BTreeSet<(Trace, Agent)> = BTreeSet::from([(Vec::new(), p.normalize())]);
    for level in 0..=depth {
        let mut next = BTreeSet::new();
        for (trace, agent) in &frontier {
            if keep(trace, agent) {
                traces.insert(trace.clone());
            }
            if level < depth {
                for (label, residual) in lts_step(agent) {
                    let mut t = trace.clone();
                    t.push(label);
                    next.insert((t, residual));
                }
            }
        }
        frontier = next;
    }
    traces
}

/// Every label sequence of length at most `depth` that `p` can perform.
pub fn agent_traces(p: &Agent, depth: usize) -> BTreeSet<Trace> {
    explore(p, depth, |_, _| true)
}

/// The traces of length at most `depth` after which nothing but
/// replications remain: the words of `CRE(p)` up to that length.
pub fn complete_traces(p: &Agent, depth: usize) -> BTreeSet<Trace> {
    explore(p, depth, |_, q| Term::from(&cre_of(q)).nullable())
}
