//! Text formats: `.mem` systems, `.dfa` automaton bundles and `.theta`
//! resident records.

mod diagnostic;
pub mod dfa_file;
pub mod lexer;
mod parser;
mod render;

pub use diagnostic::{Diagnostic, Severity, SourceSpan};
pub use dfa_file::{parse_dfa, parse_dfa_bundle, parse_dfa_complete, DfaBundle};
pub use parser::{parse_agent, parse_policy, parse_system, parse_system_named, parse_theta};
pub use render::{render, render_membrane, render_site};
