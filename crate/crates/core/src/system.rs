//! Sites, membranes, and systems of sites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::agent::Agent;
use crate::name::Name;
use crate::policy::{Policy, Regime};
use crate::trust::TrustLevel;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Membrane {
    /// Partial map; a locality absent from it is trusted at level `Unknown`.
    pub trust: BTreeMap<Name, TrustLevel>,
    pub policy: Policy,
}

impl Membrane {
    pub fn new(policy: impl Into<Policy>) -> Self {
        Membrane { trust: BTreeMap::new(), policy: policy.into() }
    }

    pub fn with_trust(mut self, locality: impl Into<Name>, level: TrustLevel) -> Self {
        self.trust.insert(locality.into(), level);
        self
    }

    pub fn trust_of(&self, locality: &Name) -> TrustLevel {
        self.trust.get(locality).copied().unwrap_or(TrustLevel::Unknown)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Site {
    pub name: Name,
    pub membrane: Membrane,
    pub code: Agent,
}

impl Site {
    pub fn new(name: impl Into<Name>, membrane: Membrane, code: Agent) -> Self {
        Site { name: name.into(), membrane, code }
    }

    /// A site is trustworthy when it trusts itself at level `Good`.
    pub fn is_trustworthy(&self) -> bool {
        self.membrane.trust_of(&self.name) == TrustLevel::Good
    }
}

/// A finite collection of sites. Source order is kept for rendering;
/// [`System::normalize`] gives the canonical form used for comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct System {
    sites: Vec<Site>,
}

impl System {
    pub fn new() -> Self {
        System::default()
    }

    /// Builds a system without checking name uniqueness; see [`validate_system`].
    pub fn from_sites(sites: Vec<Site>) -> Self {
        System { sites }
    }

    pub fn with_site(mut self, site: Site) -> Self {
        self.sites.push(site);
        self
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn sites_mut(&mut self) -> &mut [Site] {
        &mut self.sites
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site(&self, name: &Name) -> Option<&Site> {
        self.sites.iter().find(|s| &s.name == name)
    }

    pub fn site_mut(&mut self, name: &Name) -> Option<&mut Site> {
        self.sites.iter_mut().find(|s| &s.name == name)
    }

    pub fn position(&self, name: &Name) -> Option<usize> {
        self.sites.iter().position(|s| &s.name == name)
    }

    /// Sites sorted by name, every code in normal form.
    pub fn normalize(&self) -> System {
        let mut sites: Vec<Site> = self
            .sites
            .iter()
            .map(|s| Site { name: s.name.clone(), membrane: s.membrane.clone(), code: s.code.normalize() })
            .collect();
        sites.sort_by(|a, b| a.name.cmp(&b.name));
        System { sites }
    }

    pub fn trustworthy_sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| s.is_trustworthy())
    }
}

/// A reason why one site of a system fails a well-formedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteFailure {
    pub site: Name,
    pub thread: Option<usize>,
    pub reason: String,
}

impl SiteFailure {
    pub fn new(site: &Name, thread: Option<usize>, reason: impl Into<String>) -> Self {
        SiteFailure { site: site.clone(), thread, reason: reason.into() }
    }
}

impl fmt::Display for SiteFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.thread {
            Some(i) => write!(f, "{} (thread {}): {}", self.site, i, self.reason),
            None => write!(f, "{}: {}", self.site, self.reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IssueKind {
    DuplicateSite,
    /// The same identifier is used as an action and as a locality.
    NamespaceClash(Name),
    RegimeMismatch { expected: Regime, found: Regime },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub site: Name,
    pub kind: IssueKind,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IssueKind::DuplicateSite => write!(f, "duplicate site name `{}`", self.site),
            IssueKind::NamespaceClash(n) => {
                write!(f, "`{n}` is used both as an action and as a locality (site `{}`)", self.site)
            }
            IssueKind::RegimeMismatch { expected, found } => write!(
                f,
                "site `{}` uses a {found} policy but the configured regime is {expected}",
                self.site
            ),
        }
    }
}

/// Checks site-name uniqueness, action/locality disjointness, and that
/// every membrane policy and digest belongs to `regime`.
pub fn validate_system(n: &System, regime: Regime) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();

    let mut seen = BTreeSet::new();
    for site in n.sites() {
        if !seen.insert(site.name.clone()) {
            issues.push(ValidationIssue { site: site.name.clone(), kind: IssueKind::DuplicateSite });
        }
    }

    let mut localities: BTreeSet<Name> = BTreeSet::new();
    for site in n.sites() {
        localities.insert(site.name.clone());
        localities.extend(site.membrane.trust.keys().cloned());
        localities.extend(site.code.target_names());
    }
    let mut reported = BTreeSet::new();
    for site in n.sites() {
        for action in site.code.action_names() {
            if localities.contains(&action) && reported.insert(action.clone()) {
                issues.push(ValidationIssue {
                    site: site.name.clone(),
                    kind: IssueKind::NamespaceClash(action),
                });
            }
        }
    }

    for site in n.sites() {
        let own = site.membrane.policy.regime();
        let mut found = (own != regime).then_some(own);
        site.code.for_each_migration(&mut |_, digest, _| {
            if found.is_none() && digest.regime() != regime {
                found = Some(digest.regime());
            }
        });
        if let Some(found) = found {
            issues.push(ValidationIssue {
                site: site.name.clone(),
                kind: IssueKind::RegimeMismatch { expected: regime, found },
            });
        }
    }

    issues
}

/// Pairs `(k, l)` where trustworthy `k` trusts `l` more than `l` trusts itself.
pub fn incoherent_pairs(n: &System) -> Vec<(Name, Name)> {
    let mut out = Vec::new();
    for k in n.trustworthy_sites() {
        for l in n.sites() {
            let opinion = k.membrane.trust_of(&l.name);
            let own = l.membrane.trust_of(&l.name);
            if !opinion.le(&own) {
                out.push((k.name.clone(), l.name.clone()));
            }
        }
    }
    out
}

pub fn coherent(n: &System) -> bool {
    incoherent_pairs(n).is_empty()
}
