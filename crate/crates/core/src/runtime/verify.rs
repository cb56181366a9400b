use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::agent::Agent;
use crate::name::{format_trace, Label, Name, Trace};
use crate::policy::{Count, MultisetPolicy, Policy};
use crate::runtime::{agent_traces, complete_traces, step, Engine, EventKind, MembraneKind};
use crate::system::{Site, System};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub site: Name,
    pub thread: Option<usize>,
    pub trace: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let thread = self.thread.map_or_else(|| "-".to_string(), |i| i.to_string());
        write!(f, "{}\t{}\t{}\t{}", self.site, thread, self.trace, self.reason)
    }
}

/// Outcome of a verification: one line per violation, then a summary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    /// Checks that could not be decided within the search bound.
    pub unknown: usize,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
        self.unknown += other.unknown;
    }

    fn push(&mut self, site: &Name, thread: Option<usize>, trace: impl Into<String>, reason: impl Into<String>) {
        self.violations.push(Violation { site: site.clone(), thread, trace: trace.into(), reason: reason.into() });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        if self.unknown > 0 {
            writeln!(f, "# undecided checks: {}", self.unknown)?;
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        if self.violations.is_empty() {
            writeln!(f, "SUMMARY ok")
        } else {
            writeln!(f, "SUMMARY violations={}", self.violations.len())
        }
    }
}

/// Traces in breadth-first order: shorter first, then lexicographic.
fn by_length(traces: BTreeSet<Trace>) -> Vec<Trace> {
    let mut v: Vec<Trace> = traces.into_iter().collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v
}

/// For each label a trace overuses, the shortest trace that first does so.
fn count_violations(traces: BTreeSet<Trace>, allowed: &MultisetPolicy) -> Vec<(Label, Trace)> {
    let mut found: BTreeMap<Label, Trace> = BTreeMap::new();
    for t in by_length(traces) {
        let mut used = MultisetPolicy::new();
        for (i, label) in t.iter().enumerate() {
            used.add(label.name().clone(), Count::ONE);
            let limit = allowed.count(label.name());
            if limit.is_none_or(|c| used.count(label.name()).expect("just added") > c) {
                found.entry(label.clone()).or_insert_with(|| t[..=i].to_vec());
                break;
            }
        }
    }
    let mut out: Vec<(Label, Trace)> = found.into_iter().collect();
    out.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.cmp(b)));
    out
}

fn set_as_counts(items: impl Iterator<Item = Name>) -> MultisetPolicy {
    items.map(|n| (n, Count::Omega)).collect()
}

fn check_whole(report: &mut Report, site: &Site, code: &Agent, allowed: &MultisetPolicy, shown: &dyn fmt::Display, depth: usize) {
    for (label, trace) in count_violations(agent_traces(code, depth), allowed) {
        report.push(&site.name, None, format_trace(&trace), format!("`{label}` exceeds {shown}"));
    }
}

fn check_threads(report: &mut Report, site: &Site, allowed: &MultisetPolicy, depth: usize) {
    for (i, thread) in site.code.threads().iter().enumerate() {
        for (label, trace) in count_violations(agent_traces(thread, depth), allowed) {
            report.push(&site.name, Some(i), format_trace(&trace), format!("`{label}` exceeds {allowed}"));
        }
    }
}

/// Checks the safety statement of the engine's mode on every trace of
/// length at most `depth` at each trustworthy site of `n`.
///
/// Set policies bound the labels of whole-site traces; entry multisets
/// bound the label counts of each thread; resident multisets bound the
/// counts of whole-site traces, against the membrane policy (static) or the
/// resident record (dynamic). For automata, every complete trace of a
/// thread must be accepted from some state, that is, be a suffix of an
/// accepted word.
pub fn verify_safety(n: &System, engine: &Engine, depth: usize) -> Report {
    let n = n.normalize();
    let mut report = Report::default();
    for site in n.trustworthy_sites() {
        let policy = &site.membrane.policy;
        if policy.regime() != engine.mode.regime() {
            report.push(&site.name, None, "-", format!("membrane policy {policy} outside the {} regime", engine.mode.regime()));
            continue;
        }
        match (engine.mode.membrane(), policy) {
            (MembraneKind::Entry, Policy::Set(t)) => {
                check_whole(&mut report, site, &site.code, &set_as_counts(t.iter().cloned()), t, depth)
            }
            (MembraneKind::Entry, Policy::Multiset(t)) => check_threads(&mut report, site, t, depth),
            (MembraneKind::Entry, Policy::Dfa(d)) => {
                let access = d.automaton.access_words();
                for (i, thread) in site.code.threads().iter().enumerate() {
                    let rejected = complete_traces(thread, depth).into_iter().find(|sigma| {
                        let names: Vec<Name> = sigma.iter().map(|l| l.name().clone()).collect();
                        !d.automaton.states().any(|s| access[s].is_some() && d.automaton.accepts_from(s, &names))
                    });
                    if let Some(sigma) = rejected {
                        report.push(
                            &site.name,
                            Some(i),
                            format_trace(&sigma),
                            format!("not a suffix of any word accepted by @{}", d.name),
                        );
                    }
                }
            }
            (MembraneKind::Static, Policy::Multiset(t)) => check_whole(&mut report, site, &site.code, t, t, depth),
            (MembraneKind::Dynamic, Policy::Multiset(_)) => match engine.theta.as_ref().and_then(|th| th.get(&site.name)) {
                Some(original) => check_whole(&mut report, site, &site.code, original, original, depth),
                None => report.push(&site.name, None, "-", "no resident record entry"),
            },
            _ => unreachable!("mode and policy regimes agree"),
        }
    }
    report
}

fn describe_path(path: &[EventKind]) -> String {
    if path.is_empty() {
        return "-".to_string();
    }
    path.iter()
        .map(|e| match e {
            EventKind::LocalAction { site, action } => format!("{site}:{action}"),
            EventKind::Migration { from, to, .. } => format!("{from}>{to}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Breadth-first over systems reachable in at most `steps` reductions,
/// calling `visit` on each with the path that first reached it.
fn explore(n: &System, engine: &Engine, steps: usize, mut visit: impl FnMut(&System, &[EventKind])) -> usize {
    let start = n.normalize();
    let mut seen: HashSet<System> = HashSet::from([start.clone()]);
    let mut frontier: Vec<(System, Vec<EventKind>)> = vec![(start, Vec::new())];
    for level in 0..=steps {
        let mut next = Vec::new();
        for (sys, path) in &frontier {
            visit(sys, path);
            if level < steps {
                for (succ, ev) in step(sys, engine) {
                    if seen.insert(succ.clone()) {
                        let mut p = path.clone();
                        p.push(ev);
                        next.push((succ, p));
                    }
                }
            }
        }
        frontier = next;
    }
    seen.len()
}

/// Re-checks well-formedness on every system reachable in at most `depth`
/// reductions. Any failure contradicts subject reduction.
pub fn verify_subject_reduction(n: &System, engine: &Engine, depth: usize) -> Report {
    let mut report = Report::default();
    let initial = engine.wellformedness(&n.normalize());
    for (k, l) in &initial.incoherent {
        report.notes.push(format!("incoherent: {k} trusts {l} above its self-assessment"));
    }
    if initial.verdict() == Some(false) {
        for f in initial.failures {
            report.push(&f.site, f.thread, "-", format!("not well-formed: {}", f.reason));
        }
        report.notes.push("subject reduction: not explored, the initial system is not well-formed".into());
        return report;
    }
    let explored = explore(n, engine, depth, |sys, path| {
        let wf = engine.wellformedness(sys);
        for f in wf.failures {
            report.push(&f.site, f.thread, describe_path(path), format!("not well-formed: {}", f.reason));
        }
        report.unknown += wf.inconclusive.len();
    });
    report.notes.push(format!("subject reduction: {explored} systems within {depth} steps"));
    report
}

/// Safety on every system reachable in at most `steps` reductions; each
/// distinct violation is reported once, from the first system showing it.
pub fn verify_reachable_safety(n: &System, engine: &Engine, steps: usize, depth: usize) -> Report {
    let mut report = Report::default();
    let mut reported: HashSet<(Name, String)> = HashSet::new();
    let explored = explore(n, engine, steps, |sys, _| {
        let r = verify_safety(sys, engine, depth);
        report.unknown += r.unknown;
        for v in r.violations {
            if reported.insert((v.site.clone(), v.reason.clone())) {
                report.violations.push(v);
            }
        }
    });
    report.notes.push(format!("safety: {explored} systems within {steps} steps, traces up to length {depth}"));
    report
}
