//! Recursive-descent parser for systems, agents, policies and resident
//! records.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::dfa_file::DfaBundle;
use super::diagnostic::{Diagnostic, SourceSpan};
use super::lexer::{lex, Tok, Token};
use crate::agent::Agent;
use crate::name::Name;
use crate::policy::multiset::ResidentRecord;
use crate::policy::{Count, MultisetPolicy, Policy, Regime, SetPolicy};
use crate::system::{validate_system, IssueKind, Membrane, Site, System};
use crate::trust::TrustLevel;

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    regime: Regime,
    bundle: &'a DfaBundle,
    /// Recoverable errors; parsing continues past them.
    diags: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    fn new(file: &str, text: &str, regime: Regime, bundle: &'a DfaBundle) -> PResult<Self> {
        let file: Arc<str> = Arc::from(file);
        let toks = lex(&file, text)?;
        Ok(Parser { toks, pos: 0, regime, bundle, diags: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = self.peek();
        let message = if *found == Tok::Eof {
            "unexpected end of input".to_string()
        } else {
            format!("expected {wanted}, found {}", found.describe())
        };
        Diagnostic::error(self.span(), message)
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<(Name, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((Name::from(s), span))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{word}`"))),
        }
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn system(&mut self) -> PResult<(System, Vec<SourceSpan>)> {
        let mut sites = Vec::new();
        let mut spans = Vec::new();
        if self.at_end() {
            return Ok((System::new(), spans));
        }
        loop {
            let (site, span) = self.site()?;
            sites.push(site);
            spans.push(span);
            if *self.peek() == Tok::BarBar {
                self.bump();
                continue;
            }
            if !self.at_end() {
                return Err(self.unexpected("`||` or end of input"));
            }
            return Ok((System::from_sites(sites), spans));
        }
    }

    fn site(&mut self) -> PResult<(Site, SourceSpan)> {
        let (name, span) = self.ident("a site name")?;
        self.expect(Tok::LBracket, "`[`")?;
        let membrane = self.membrane()?;
        self.expect(Tok::Semi, "`;`")?;
        let code = self.agent()?;
        self.expect(Tok::RBracket, "`]`")?;
        Ok((Site::new(name, membrane, code), span))
    }

    fn membrane(&mut self) -> PResult<Membrane> {
        self.keyword("trust")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut trust = BTreeMap::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let (locality, span) = self.ident("a locality")?;
                self.expect(Tok::Colon, "`:`")?;
                let level_span = self.span();
                let (word, _) = self.ident("a trust level")?;
                match TrustLevel::from_keyword(word.as_str()) {
                    Some(level) => {
                        if trust.insert(locality.clone(), level).is_some() {
                            self.diags.push(Diagnostic::error(span, format!("`{locality}` trusted twice")));
                        }
                    }
                    None => self.diags.push(Diagnostic::error(
                        level_span,
                        format!("unknown trust level `{word}`; expected good, bad or unknown"),
                    )),
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                    continue;
                }
                break;
            }
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        if *self.peek() == Tok::Semi && matches!(self.peek_at(1), Tok::Ident(s) if s == "policy") {
            self.bump();
        }
        self.keyword("policy")?;
        let policy = self.policy()?;
        Ok(Membrane { trust, policy })
    }

    fn placeholder(&self) -> Policy {
        match self.regime {
            Regime::Multiset => MultisetPolicy::new().into(),
            _ => SetPolicy::new().into(),
        }
    }

    fn policy(&mut self) -> PResult<Policy> {
        let start = self.span();
        match self.peek() {
            Tok::At => {
                self.bump();
                let (name, span) = self.ident("an automaton name")?;
                if self.regime != Regime::Dfa {
                    self.diags.push(Diagnostic::error(
                        start,
                        format!("automaton reference `@{name}` in the {} regime", self.regime),
                    ));
                    return Ok(self.placeholder());
                }
                match self.bundle.get(&name) {
                    Some(d) => Ok(Policy::Dfa(d.clone())),
                    None => {
                        self.diags.push(Diagnostic::error(span, format!("unknown automaton `{name}`")));
                        Ok(self.placeholder())
                    }
                }
            }
            Tok::LBrace => {
                self.bump();
                let mut items: Vec<(Name, Count)> = Vec::new();
                let mut counted = false;
                if *self.peek() != Tok::RBrace {
                    loop {
                        let (label, _) = self.ident("a policy item")?;
                        let mut count = Count::ONE;
                        if *self.peek() == Tok::Caret {
                            counted = true;
                            self.bump();
                            let cspan = self.span();
                            count = match self.bump().tok {
                                Tok::Nat(0) => {
                                    self.diags.push(Diagnostic::error(
                                        cspan,
                                        format!("count of `{label}` must be positive"),
                                    ));
                                    Count::ONE
                                }
                                Tok::Nat(n) => Count::Finite(n),
                                Tok::Ident(w) if w == "w" => Count::Omega,
                                Tok::Eof => return Err(Diagnostic::error(cspan, "unexpected end of input")),
                                other => {
                                    return Err(Diagnostic::error(
                                        cspan,
                                        format!("expected a count or `w`, found {}", other.describe()),
                                    ))
                                }
                            };
                        }
                        items.push((label, count));
                        if *self.peek() == Tok::Comma {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`,` or `}`")?;
                match self.regime {
                    Regime::Set => {
                        if counted {
                            self.diags.push(Diagnostic::error(start, "counts are only allowed in multiset policies"));
                        }
                        Ok(Policy::Set(items.into_iter().map(|(n, _)| n).collect()))
                    }
                    Regime::Multiset => {
                        let mut t = MultisetPolicy::new();
                        for (n, c) in items {
                            t.add(n, c);
                        }
                        Ok(Policy::Multiset(t))
                    }
                    Regime::Dfa => {
                        self.diags.push(Diagnostic::error(
                            start,
                            "literal policy in the dfa regime; expected `@name`",
                        ));
                        Ok(self.placeholder())
                    }
                }
            }
            _ => Err(self.unexpected("a policy")),
        }
    }

    /// `prefix ("|" prefix)*`
    fn agent(&mut self) -> PResult<Agent> {
        let mut parts = vec![self.prefix()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.prefix()?);
        }
        let mut it = parts.into_iter();
        let first = it.next().expect("one part");
        Ok(it.fold(first, Agent::par))
    }

    fn prefix(&mut self) -> PResult<Agent> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Agent::repl(self.prefix()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.agent()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(s) if s == "nil" => {
                self.bump();
                Ok(Agent::Nil)
            }
            Tok::Ident(s) if s == "go" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after `go`")?;
                let (target, _) = self.ident("a locality")?;
                self.expect(Tok::Comma, "`,`")?;
                let digest = self.policy()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Dot, "`.`")?;
                let rest = self.prefix()?;
                Ok(Agent::go(target, digest, rest))
            }
            Tok::Ident(_) => {
                let (action, _) = self.ident("an action")?;
                self.expect(Tok::Dot, "`.`")?;
                let rest = self.prefix()?;
                Ok(Agent::act(action, rest))
            }
            _ => Err(self.unexpected("an agent")),
        }
    }

    fn finish<T>(self, value: PResult<T>) -> Result<T, Vec<Diagnostic>> {
        match value {
            Ok(v) if self.diags.is_empty() => Ok(v),
            Ok(_) => Err(self.diags),
            Err(d) => {
                let mut diags = self.diags;
                diags.push(d);
                Err(diags)
            }
        }
    }
}

/// Parses and validates a system.
pub fn parse_system(text: &str, regime: Regime, bundle: &DfaBundle) -> Result<System, Vec<Diagnostic>> {
    parse_system_named("<input>", text, regime, bundle)
}

pub fn parse_system_named(
    file: &str,
    text: &str,
    regime: Regime,
    bundle: &DfaBundle,
) -> Result<System, Vec<Diagnostic>> {
    let mut p = Parser::new(file, text, regime, bundle).map_err(|d| vec![d])?;
    let parsed = p.system();
    let (system, spans) = p.finish(parsed)?;

    let mut diags = Vec::new();
    for issue in validate_system(&system, regime) {
        let candidates: Vec<usize> = (0..system.sites().len())
            .filter(|&i| system.sites()[i].name == issue.site)
            .collect();
        let i = match issue.kind {
            IssueKind::DuplicateSite => *candidates.last().expect("site exists"),
            _ => candidates[0],
        };
        diags.push(Diagnostic::error(spans[i].clone(), issue.to_string()));
    }
    if diags.is_empty() {
        Ok(system)
    } else {
        Err(diags)
    }
}

/// Parses a single agent term.
pub fn parse_agent(text: &str, regime: Regime, bundle: &DfaBundle) -> Result<Agent, Vec<Diagnostic>> {
    let mut p = Parser::new("<agent>", text, regime, bundle).map_err(|d| vec![d])?;
    let parsed = p.agent().and_then(|a| {
        if p.at_end() {
            Ok(a)
        } else {
            Err(p.unexpected("`|` or end of input"))
        }
    });
    p.finish(parsed)
}

/// Parses a single policy literal or reference.
pub fn parse_policy(text: &str, regime: Regime, bundle: &DfaBundle) -> Result<Policy, Vec<Diagnostic>> {
    let mut p = Parser::new("<policy>", text, regime, bundle).map_err(|d| vec![d])?;
    let parsed = p.policy().and_then(|t| {
        if p.at_end() {
            Ok(t)
        } else {
            Err(p.unexpected("end of input"))
        }
    });
    p.finish(parsed)
}

/// Reads `site: policy` lines of multiset literals.
pub fn parse_theta(file: &str, text: &str) -> Result<ResidentRecord, Vec<Diagnostic>> {
    let empty = DfaBundle::new();
    let mut p = Parser::new(file, text, Regime::Multiset, &empty).map_err(|d| vec![d])?;
    let mut theta = ResidentRecord::new();
    let parsed = (|| {
        while !p.at_end() {
            let (site, span) = p.ident("a site name")?;
            p.expect(Tok::Colon, "`:`")?;
            let Policy::Multiset(t) = p.policy()? else { unreachable!("multiset regime") };
            if theta.get(&site).is_some() {
                p.diags.push(Diagnostic::error(span, format!("site `{site}` listed twice")));
            }
            theta.insert(site, t);
        }
        Ok(())
    })();
    p.finish(parsed).map(|()| theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_system(text: &str) -> Result<System, Vec<Diagnostic>> {
        parse_system(text, Regime::Set, &DfaBundle::new())
    }

    #[test]
    fn home_site() {
        let n = set_system("home[ trust { bob: good }; policy {info, req, secure} ; nil ]").unwrap();
        let home = &n.sites()[0];
        assert_eq!(home.membrane.trust_of(&"bob".into()), TrustLevel::Good);
        let expected: SetPolicy = ["info", "req", "secure"].into_iter().collect();
        assert_eq!(home.membrane.policy, Policy::Set(expected));
        assert_eq!(home.code, Agent::Nil);
    }

    #[test]
    fn grammar_form_without_separator() {
        assert!(set_system("h[ trust {} policy {}; nil ]").is_ok());
    }

    #[test]
    fn multiset_counts() {
        let n = parse_system("s[ trust {}; policy {send^3}; !send.nil ]", Regime::Multiset, &DfaBundle::new())
            .unwrap();
        let t = n.sites()[0].membrane.policy.as_multiset().unwrap();
        assert_eq!(t.count(&"send".into()), Some(Count::Finite(3)));
        assert_eq!(n.sites()[0].code, Agent::repl(Agent::actions(["send"])));
    }

    #[test]
    fn omega_and_zero() {
        let b = DfaBundle::new();
        let t = parse_policy("{a^w, b, b}", Regime::Multiset, &b).unwrap();
        assert_eq!(t.to_string(), "{a^w, b^2}");
        let diags = parse_policy("{a^0}", Regime::Multiset, &b).unwrap_err();
        assert!(diags[0].message.contains("positive"));
    }

    #[test]
    fn end_of_input() {
        let diags = set_system("x[").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unexpected end of input");
    }

    #[test]
    fn precedence() {
        let b = DfaBundle::new();
        let p = parse_agent("!a.nil | b.c.nil", Regime::Set, &b).unwrap();
        assert_eq!(p, Agent::par(Agent::repl(Agent::actions(["a"])), Agent::actions(["b", "c"])));
        let q = parse_agent("a.(b.nil | c.nil)", Regime::Set, &b).unwrap();
        assert_eq!(q, Agent::act("a", Agent::par(Agent::actions(["b"]), Agent::actions(["c"]))));
    }

    #[test]
    fn regime_mismatches() {
        let b = DfaBundle::new();
        assert!(parse_policy("@mail", Regime::Set, &b).is_err());
        assert!(parse_policy("{a^2}", Regime::Set, &b).is_err());
        assert!(parse_policy("{a}", Regime::Dfa, &b).is_err());
        let diags = parse_policy("@mail", Regime::Dfa, &b).unwrap_err();
        assert_eq!(diags[0].message, "unknown automaton `mail`");
    }

    #[test]
    fn validation_is_reported_with_spans() {
        let diags = set_system("h[ trust {}; policy {}; nil ] || h[ trust {}; policy {}; nil ]").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].span.column, 34);
    }

    #[test]
    fn theta_lines() {
        let theta = parse_theta("t", "# record\ns: {get_licence^2}\nt: {}\n").unwrap();
        assert_eq!(theta.get(&"s".into()).unwrap().to_string(), "{get_licence^2}");
        assert!(theta.get(&"t".into()).unwrap().is_empty());
        assert!(parse_theta("t", "s: {a}\ns: {b}").is_err());
    }

    #[test]
    fn empty_input_is_the_empty_system() {
        assert!(set_system("  # nothing\n").unwrap().is_empty());
    }
}
