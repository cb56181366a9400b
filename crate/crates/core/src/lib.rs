//! Mobile agents behind policy membranes.
//!
//! A system is a set of sites; each site runs agents and guards its border
//! with a membrane that decides which migrating agents may enter. Policies
//! come in three flavours (sets, multisets with ω, and automata), and
//! membranes either check incoming code once or track a resident budget.

pub mod agent;
pub mod cli;
pub mod name;
pub mod policy;
pub mod runtime;
pub mod syntax;
pub mod system;
pub mod trust;

pub use agent::Agent;
pub use name::{Label, Name, Trace};
pub use policy::{Policy, Regime};
pub use system::{Membrane, Site, System};
pub use trust::TrustLevel;
