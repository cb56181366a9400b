use std::fmt::Write;

use crate::system::{Membrane, Site, System};

pub fn render_membrane(m: &Membrane) -> String {
    let entries: Vec<String> = m.trust.iter().map(|(l, t)| format!("{l}: {t}")).collect();
    let trust = if entries.is_empty() { "trust {}".to_string() } else { format!("trust {{ {} }}", entries.join(", ")) };
    format!("{trust}; policy {}", m.policy)
}

pub fn render_site(s: &Site) -> String {
    format!("{}[ {}; {} ]", s.name, render_membrane(&s.membrane), s.code)
}

/// One site per line, continuation lines starting with `||`. The empty
/// system renders as the empty string.
pub fn render(n: &System) -> String {
    let mut out = String::new();
    for (i, site) in n.sites().iter().enumerate() {
        let sep = if i == 0 { "" } else { "|| " };
        writeln!(out, "{sep}{}", render_site(site)).expect("write to string");
    }
    out
}
