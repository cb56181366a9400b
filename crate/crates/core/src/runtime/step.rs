use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::Agent;
use crate::name::Name;
use crate::policy::Policy;
use crate::runtime::{allows, Admission, Engine, MembraneKind};
use crate::system::System;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    LocalAction { site: Name, action: Name },
    Migration { from: Name, to: Name, digest: Policy, admitted: bool, reason: Option<String> },
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::LocalAction { site, action } => write!(f, "{site}: {action}"),
            EventKind::Migration { from, to, digest, admitted, reason } => {
                write!(f, "{from} -> {to} {digest} ")?;
                if *admitted {
                    f.write_str("admitted")
                } else {
                    write!(f, "denied")?;
                    match reason {
                        Some(r) => write!(f, ": {r}"),
                        None => Ok(()),
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub step: usize,
    pub kind: EventKind,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {}", self.step, self.kind)
    }
}

/// A migration whose side condition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Denial {
    pub from: Name,
    pub to: Name,
    pub digest: Policy,
    pub reason: String,
    /// The automaton check was inconclusive rather than negative.
    pub unknown: bool,
}

impl Denial {
    fn event(&self) -> EventKind {
        let reason = if self.unknown { format!("undecided, {}", self.reason) } else { self.reason.clone() };
        EventKind::Migration {
            from: self.from.clone(),
            to: self.to.clone(),
            digest: self.digest.clone(),
            admitted: false,
            reason: Some(reason),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct StepOutcome {
    /// Distinct successors in normal form, each with the event producing it.
    pub successors: Vec<(System, EventKind)>,
    pub denials: Vec<Denial>,
}

/// A prefixed thread ready to fire and the rest of its site's code, with
/// replications unfolded once where the thread came from one.
struct Redex {
    thread: Agent,
    rest: Vec<Agent>,
}

fn redexes(threads: &[Agent], out: &mut Vec<Redex>) {
    for (j, t) in threads.iter().enumerate() {
        match t {
            Agent::Act(..) | Agent::Go(..) => {
                let mut rest = threads.to_vec();
                rest.remove(j);
                out.push(Redex { thread: t.clone(), rest });
            }
            Agent::Repl(body) => {
                let mut inner = Vec::new();
                redexes(&body.threads(), &mut inner);
                for r in inner {
                    let mut rest = threads.to_vec();
                    rest.extend(r.rest);
                    out.push(Redex { thread: r.thread, rest });
                }
            }
            Agent::Nil | Agent::Par(..) => {}
        }
    }
}

fn compose(parts: Vec<Agent>) -> Agent {
    Agent::par_all(parts).normalize()
}

/// All one-step successors of `n` together with the migrations the
/// membranes refused.
pub fn step_detailed(n: &System, engine: &Engine) -> StepOutcome {
    let n = n.normalize();
    let mut out = StepOutcome::default();
    let mut seen: HashSet<System> = HashSet::new();

    for (i, site) in n.sites().iter().enumerate() {
        let mut rs = Vec::new();
        redexes(&site.code.threads(), &mut rs);
        for Redex { thread, rest } in rs {
            match thread {
                Agent::Act(a, cont) => {
                    let mut next = n.clone();
                    let mut parts = rest;
                    parts.push(*cont);
                    next.sites_mut()[i].code = compose(parts);
                    if seen.insert(next.clone()) {
                        out.successors.push((next, EventKind::LocalAction { site: site.name.clone(), action: a }));
                    }
                }
                Agent::Go(target, digest, cont) => {
                    let Some(j) = n.position(&target).filter(|&j| j != i) else {
                        continue;
                    };
                    let dest = &n.sites()[j];
                    match allows(&dest.membrane, &site.name, &digest, &cont, engine, &dest.code) {
                        Admission::Admit(membrane) => {
                            let mut next = n.clone();
                            next.sites_mut()[i].code = compose(rest);
                            let arrived = compose(vec![*cont, dest.code.clone()]);
                            let d = &mut next.sites_mut()[j];
                            d.code = arrived;
                            d.membrane = membrane;
                            if seen.insert(next.clone()) {
                                out.successors.push((
                                    next,
                                    EventKind::Migration {
                                        from: site.name.clone(),
                                        to: target,
                                        digest,
                                        admitted: true,
                                        reason: None,
                                    },
                                ));
                            }
                        }
                        Admission::Deny(reason) => out.denials.push(Denial {
                            from: site.name.clone(),
                            to: target,
                            digest,
                            reason,
                            unknown: false,
                        }),
                        Admission::Unknown(reason) => out.denials.push(Denial {
                            from: site.name.clone(),
                            to: target,
                            digest,
                            reason,
                            unknown: true,
                        }),
                    }
                }
                _ => unreachable!("redexes are prefixed threads"),
            }
        }
    }
    out.denials.dedup();
    out
}

/// All distinct one-step successors of `n`.
pub fn step(n: &System, engine: &Engine) -> Vec<(System, EventKind)> {
    step_detailed(n, engine).successors
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub events: Vec<Event>,
    pub final_system: System,
    /// Migrations refused under dynamic membranes; budgets only shrink, so
    /// these can never fire.
    pub stuck: Vec<Denial>,
}

/// Runs `n` for at most `max_steps` reductions, choosing uniformly among
/// successors with a generator seeded by `seed`. When no reduction is left
/// but some migrations were refused, those refusals are logged and the run
/// stops.
pub fn run(n: &System, engine: &Engine, max_steps: usize, seed: u64) -> RunTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = n.normalize();
    let mut events = Vec::new();
    let mut stuck = Vec::new();
    let mut step_index = 0;
    while step_index < max_steps {
        let outcome = step_detailed(&current, engine);
        if outcome.successors.is_empty() {
            for d in &outcome.denials {
                step_index += 1;
                events.push(Event { step: step_index, kind: d.event() });
            }
            if engine.mode.membrane() == MembraneKind::Dynamic {
                stuck = outcome.denials;
            }
            break;
        }
        let pick = rng.gen_range(0..outcome.successors.len());
        let (next, kind) = outcome.successors.into_iter().nth(pick).expect("in range");
        step_index += 1;
        events.push(Event { step: step_index, kind });
        current = next;
    }
    RunTrace { events, final_system: current, stuck }
}
