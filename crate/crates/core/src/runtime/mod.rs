//! Reduction, admission, labelled transitions, and the theorem checkers.

mod allows;
mod lts;
mod step;
mod verify;

use std::fmt;

use thiserror::Error;

use crate::policy::multiset::{check_wellformed_multiset, check_wellformed_resident, check_wellformed_static, ResidentRecord};
use crate::policy::satisfaction::{check_wellformed_dfa, DEFAULT_BOUND};
use crate::policy::set::check_wellformed_set;
use crate::policy::Regime;
use crate::system::{incoherent_pairs, SiteFailure, System};
use crate::name::Name;

pub use allows::{allows, Admission};
pub use lts::{agent_traces, complete_traces, lts_step};
pub use step::{run, step, step_detailed, Denial, Event, EventKind, RunTrace, StepOutcome};
pub use verify::{
    verify_reachable_safety, verify_safety, verify_subject_reduction, Report, Violation,
};

/// How membranes guard their sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MembraneKind {
    /// Incoming code is checked once against the entry policy.
    Entry,
    /// Incoming code is checked together with the code already resident.
    Static,
    /// The membrane policy is a budget, decremented at each admission.
    Dynamic,
}

impl MembraneKind {
    pub const ALL: [MembraneKind; 3] = [MembraneKind::Entry, MembraneKind::Static, MembraneKind::Dynamic];

    pub fn keyword(self) -> &'static str {
        match self {
            MembraneKind::Entry => "entry",
            MembraneKind::Static => "static",
            MembraneKind::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for MembraneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{membrane} membranes require the multiset regime, not {regime}")]
pub struct ModeError {
    pub regime: Regime,
    pub membrane: MembraneKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mode {
    regime: Regime,
    membrane: MembraneKind,
}

impl Mode {
    pub fn new(regime: Regime, membrane: MembraneKind) -> Result<Mode, ModeError> {
        if membrane != MembraneKind::Entry && regime != Regime::Multiset {
            return Err(ModeError { regime, membrane });
        }
        Ok(Mode { regime, membrane })
    }

    pub fn entry(regime: Regime) -> Mode {
        Mode { regime, membrane: MembraneKind::Entry }
    }

    pub fn resident_static() -> Mode {
        Mode { regime: Regime::Multiset, membrane: MembraneKind::Static }
    }

    pub fn resident_dynamic() -> Mode {
        Mode { regime: Regime::Multiset, membrane: MembraneKind::Dynamic }
    }

    pub fn regime(self) -> Regime {
        self.regime
    }

    pub fn membrane(self) -> MembraneKind {
        self.membrane
    }

    /// The five valid combinations.
    pub fn all() -> [Mode; 5] {
        [
            Mode::entry(Regime::Set),
            Mode::entry(Regime::Multiset),
            Mode::entry(Regime::Dfa),
            Mode::resident_static(),
            Mode::resident_dynamic(),
        ]
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.membrane, self.regime)
    }
}

/// Everything the engine needs besides the system itself.
#[derive(Clone, Debug)]
pub struct Engine {
    pub mode: Mode,
    /// Pair budget for automaton satisfaction searches.
    pub bound: usize,
    /// Original resident policies, for dynamic membranes.
    pub theta: Option<ResidentRecord>,
}

impl Engine {
    pub fn new(mode: Mode) -> Self {
        Engine { mode, bound: DEFAULT_BOUND, theta: None }
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_theta(mut self, theta: ResidentRecord) -> Self {
        self.theta = Some(theta);
        self
    }

    /// Uses the record implied by `n` unless one was given.
    pub fn with_theta_from(mut self, n: &System) -> Self {
        if self.theta.is_none() && self.mode.membrane() == MembraneKind::Dynamic {
            self.theta = ResidentRecord::from_system(n);
        }
        self
    }

    /// Coherence and the well-formedness judgement of the mode.
    pub fn wellformedness(&self, n: &System) -> WellFormedness {
        let incoherent = incoherent_pairs(n);
        let mut out = WellFormedness { incoherent, ..WellFormedness::default() };
        match (self.mode.membrane(), self.mode.regime()) {
            (MembraneKind::Entry, Regime::Set) => out.failures = check_wellformed_set(n),
            (MembraneKind::Entry, Regime::Multiset) => out.failures = check_wellformed_multiset(n),
            (MembraneKind::Entry, Regime::Dfa) => {
                let a = check_wellformed_dfa(n, self.bound);
                out.failures = a.failures;
                out.inconclusive = a.inconclusive;
            }
            (MembraneKind::Static, _) => out.failures = check_wellformed_static(n),
            (MembraneKind::Dynamic, _) => match &self.theta {
                Some(theta) => out.failures = check_wellformed_resident(n, theta),
                None => out.failures = n
                    .trustworthy_sites()
                    .map(|s| SiteFailure::new(&s.name, None, "no resident record available"))
                    .collect(),
            },
        }
        out
    }
}

/// Result of checking one system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WellFormedness {
    /// Pairs `(k, l)` breaking coherence.
    pub incoherent: Vec<(Name, Name)>,
    pub failures: Vec<SiteFailure>,
    /// Threads whose automaton check hit the search bound.
    pub inconclusive: Vec<SiteFailure>,
}

impl WellFormedness {
    pub fn coherent(&self) -> bool {
        self.incoherent.is_empty()
    }

    /// Well-formed and coherent: `Some(true)`; decided otherwise:
    /// `Some(false)`; undecided: `None`.
    pub fn verdict(&self) -> Option<bool> {
        if !self.failures.is_empty() || !self.incoherent.is_empty() {
            Some(false)
        } else if !self.inconclusive.is_empty() {
            None
        } else {
            Some(true)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.verdict() == Some(true)
    }
}
