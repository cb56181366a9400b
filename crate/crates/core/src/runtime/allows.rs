use crate::agent::Agent;
use crate::name::Name;
use crate::policy::multiset::{check_multiset, infer_explained};
use crate::policy::satisfaction::{satisfies_dfa, Satisfaction};
use crate::policy::set::check_set;
use crate::policy::Policy;
use crate::runtime::{Engine, MembraneKind};
use crate::system::Membrane;
use crate::trust::TrustLevel;

/// Verdict of a membrane on a migrating agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admission {
    /// The membrane of the target after admission.
    Admit(Membrane),
    Deny(String),
    /// The automaton check could not finish within its bound.
    Unknown(String),
}

impl Admission {
    pub fn is_admit(&self) -> bool {
        matches!(self, Admission::Admit(_))
    }
}

fn mismatch(what: &str, policy: &Policy) -> Admission {
    Admission::Deny(format!("{what} {policy} does not belong to the configured regime"))
}

fn verdict(m: &Membrane, ok: bool, why: impl FnOnce() -> String) -> Admission {
    if ok {
        Admission::Admit(m.clone())
    } else {
        Admission::Deny(why())
    }
}

/// Decides whether the membrane `m` admits `p`, sent from `source` with
/// digest `digest`, into a site currently running `resident`.
///
/// Only a source trusted at level `good` has its digest believed; every
/// other source, unmapped ones included, has its code inspected.
pub fn allows(
    m: &Membrane,
    source: &Name,
    digest: &Policy,
    p: &Agent,
    engine: &Engine,
    resident: &Agent,
) -> Admission {
    let trusted = m.trust_of(source) == TrustLevel::Good;
    match engine.mode.membrane() {
        MembraneKind::Entry => entry(m, trusted, digest, p, engine.bound),
        MembraneKind::Static => resident_static(m, trusted, digest, p, resident),
        MembraneKind::Dynamic => resident_dynamic(m, trusted, digest, p),
    }
}

fn entry(m: &Membrane, trusted: bool, digest: &Policy, p: &Agent, bound: usize) -> Admission {
    match (&m.policy, digest) {
        (Policy::Set(mp), Policy::Set(t)) => {
            if trusted {
                verdict(m, t.enforces(mp), || format!("digest {t} does not enforce {mp}"))
            } else {
                match check_set(p, mp) {
                    Ok(()) => Admission::Admit(m.clone()),
                    Err(r) => Admission::Deny(r.to_string()),
                }
            }
        }
        (Policy::Multiset(mp), Policy::Multiset(t)) => {
            if trusted {
                verdict(m, t.enforces(mp), || format!("digest {t} does not enforce {mp}"))
            } else {
                match check_multiset(p, mp) {
                    Ok(()) => Admission::Admit(m.clone()),
                    Err(r) => Admission::Deny(r.to_string()),
                }
            }
        }
        (Policy::Dfa(mp), Policy::Dfa(t)) => {
            if trusted {
                verdict(m, t.automaton.enforces(&mp.automaton), || {
                    format!("digest @{} does not enforce @{}", t.name, mp.name)
                })
            } else {
                match satisfies_dfa(p, &mp.automaton, bound) {
                    Satisfaction::Yes => Admission::Admit(m.clone()),
                    Satisfaction::No(c) => Admission::Deny(format!("code violates @{}: {c}", mp.name)),
                    Satisfaction::Unknown { explored } => Admission::Unknown(format!(
                        "check against @{} gave up after {explored} pairs",
                        mp.name
                    )),
                }
            }
        }
        _ => mismatch("digest", digest),
    }
}

fn resident_static(m: &Membrane, trusted: bool, digest: &Policy, p: &Agent, resident: &Agent) -> Admission {
    let Policy::Multiset(mp) = &m.policy else {
        return mismatch("membrane policy", &m.policy);
    };
    if trusted {
        let Policy::Multiset(t) = digest else {
            return mismatch("digest", digest);
        };
        match infer_explained(resident) {
            Err(r) => Admission::Deny(format!("resident code has no policy: {r}")),
            Ok(used) => {
                let total = t.join(&used);
                verdict(m, total.enforces(mp), || {
                    format!("digest {t} plus resident usage {used} does not enforce {mp}")
                })
            }
        }
    } else {
        let joint = Agent::par(p.clone(), resident.clone());
        match check_multiset(&joint, mp) {
            Ok(()) => Admission::Admit(m.clone()),
            Err(r) => Admission::Deny(format!("incoming and resident code together: {r}")),
        }
    }
}

fn resident_dynamic(m: &Membrane, trusted: bool, digest: &Policy, p: &Agent) -> Admission {
    let Policy::Multiset(mp) = &m.policy else {
        return mismatch("membrane policy", &m.policy);
    };
    let budget = if trusted {
        let Policy::Multiset(t) = digest else {
            return mismatch("digest", digest);
        };
        t.clone()
    } else {
        match infer_explained(p) {
            Ok(t) => t,
            Err(r) => return Admission::Deny(format!("incoming code has no policy: {r}")),
        }
    };
    match mp.subtract(&budget) {
        Ok(rest) => Admission::Admit(Membrane { trust: m.trust.clone(), policy: Policy::Multiset(rest) }),
        Err(_) => Admission::Deny(format!("needs {budget}, only {mp} remains")),
    }
}
