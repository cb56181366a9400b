//! Concurrent regular expressions: regular expressions with shuffle and
//! shuffle closure, decided by symbol derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::agent::Agent;
use crate::name::Label;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cre {
    Eps,
    Sym(Label),
    Seq(Box<Cre>, Box<Cre>),
    Shuffle(Box<Cre>, Box<Cre>),
    ShuffleClosure(Box<Cre>),
}

impl Cre {
    pub fn sym(label: Label) -> Cre {
        Cre::Sym(label)
    }

    pub fn seq(a: Cre, b: Cre) -> Cre {
        Cre::Seq(Box::new(a), Box::new(b))
    }

    pub fn shuffle(a: Cre, b: Cre) -> Cre {
        Cre::Shuffle(Box::new(a), Box::new(b))
    }

    pub fn closure(a: Cre) -> Cre {
        Cre::ShuffleClosure(Box::new(a))
    }

    pub fn depth(&self) -> usize {
        match self {
            Cre::Eps | Cre::Sym(_) => 1,
            Cre::Seq(a, b) | Cre::Shuffle(a, b) => 1 + a.depth().max(b.depth()),
            Cre::ShuffleClosure(a) => 1 + a.depth(),
        }
    }
}

impl fmt::Display for Cre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cre::Eps => f.write_str("ε"),
            Cre::Sym(l) => write!(f, "{l}"),
            Cre::Seq(a, b) => write!(f, "({a}.{b})"),
            Cre::Shuffle(a, b) => write!(f, "({a} ⊙ {b})"),
            Cre::ShuffleClosure(a) => write!(f, "({a})^⊗"),
        }
    }
}

/// The expression describing the local traces of `p`. A migration
/// contributes only its target; the continuation runs elsewhere.
/// `ε` units are dropped, so `a.nil` becomes `a`.
pub fn cre_of(p: &Agent) -> Cre {
    match p {
        Agent::Nil => Cre::Eps,
        Agent::Act(a, rest) => match cre_of(rest) {
            Cre::Eps => Cre::Sym(Label::Action(a.clone())),
            tail => Cre::seq(Cre::Sym(Label::Action(a.clone())), tail),
        },
        Agent::Go(l, _, _) => Cre::Sym(Label::Locality(l.clone())),
        Agent::Par(a, b) => match (cre_of(a), cre_of(b)) {
            (Cre::Eps, e) | (e, Cre::Eps) => e,
            (x, y) => Cre::shuffle(x, y),
        },
        Agent::Repl(body) => match cre_of(body) {
            Cre::Eps => Cre::Eps,
            e => Cre::closure(e),
        },
    }
}

/// Normal form used as a derivative state. Every term denotes a nonempty
/// language; an empty language is an empty set of terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Eps,
    Sym(Label),
    /// At least two parts, none `Eps` or `Seq`.
    Seq(Vec<Term>),
    /// Distinct sorted parts with multiplicities, at least two in total,
    /// none `Eps` or `Shuffle`; a closure has multiplicity one.
    Shuffle(Vec<(Term, usize)>),
    /// Body is neither `Eps` nor a closure.
    Closure(Box<Term>),
}

impl Term {
    pub fn seq(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Term::Eps => {}
                Term::Seq(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Term::Eps,
            1 => flat.pop().expect("one part"),
            _ => Term::Seq(flat),
        }
    }

    pub fn shuffle(parts: impl IntoIterator<Item = Term>) -> Term {
        Term::shuffle_counted(parts.into_iter().map(|p| (p, 1)))
    }

    fn shuffle_counted(parts: impl IntoIterator<Item = (Term, usize)>) -> Term {
        let mut bag: BTreeMap<Term, usize> = BTreeMap::new();
        let mut add = |t: Term, n: usize| {
            let e = bag.entry(t).or_insert(0);
            *e += n;
        };
        for (p, n) in parts {
            match p {
                Term::Eps => {}
                Term::Shuffle(inner) => inner.into_iter().for_each(|(t, m)| add(t, m * n)),
                other => add(other, n),
            }
        }
        // L^⊗ ⊙ L^⊗ = L^⊗
        for (t, n) in bag.iter_mut() {
            if matches!(t, Term::Closure(_)) {
                *n = 1;
            }
        }
        let mut flat: Vec<(Term, usize)> = bag.into_iter().filter(|(_, n)| *n > 0).collect();
        match flat.as_slice() {
            [] => Term::Eps,
            [(_, 1)] => flat.pop().expect("one part").0,
            _ => Term::Shuffle(flat),
        }
    }

    pub fn closure(body: Term) -> Term {
        match body {
            Term::Eps => Term::Eps,
            c @ Term::Closure(_) => c,
            other => Term::Closure(Box::new(other)),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Term::Eps | Term::Closure(_) => true,
            Term::Sym(_) => false,
            Term::Seq(parts) => parts.iter().all(Term::nullable),
            Term::Shuffle(parts) => parts.iter().all(|(p, _)| p.nullable()),
        }
    }

    /// Labels that can start a word of this term.
    pub fn first(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_first(&mut out);
        out
    }

    fn collect_first(&self, out: &mut BTreeSet<Label>) {
        match self {
            Term::Eps => {}
            Term::Sym(l) => {
                out.insert(l.clone());
            }
            Term::Seq(parts) => {
                for p in parts {
                    p.collect_first(out);
                    if !p.nullable() {
                        break;
                    }
                }
            }
            Term::Shuffle(parts) => parts.iter().for_each(|(p, _)| p.collect_first(out)),
            Term::Closure(body) => body.collect_first(out),
        }
    }

    /// The derivative with respect to `alpha`, as a set of alternatives.
    pub fn derive(&self, alpha: &Label) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        match self {
            Term::Eps => {}
            Term::Sym(l) => {
                if l == alpha {
                    out.insert(Term::Eps);
                }
            }
            Term::Seq(parts) => {
                for (i, head) in parts.iter().enumerate() {
                    for d in head.derive(alpha) {
                        out.insert(Term::seq(std::iter::once(d).chain(parts[i + 1..].iter().cloned())));
                    }
                    if !head.nullable() {
                        break;
                    }
                }
            }
            Term::Shuffle(parts) => {
                for (i, (part, _)) in parts.iter().enumerate() {
                    for d in part.derive(alpha) {
                        let rest = parts.iter().enumerate().map(|(j, (t, n))| (t.clone(), if i == j { n - 1 } else { *n }));
                        out.insert(Term::shuffle_counted(rest.chain(std::iter::once((d, 1)))));
                    }
                }
            }
            Term::Closure(body) => {
                for d in body.derive(alpha) {
                    out.insert(Term::shuffle([d, self.clone()]));
                }
            }
        }
        out
    }

    /// A shortest word of the language.
    pub fn shortest_word(&self) -> Vec<Label> {
        match self {
            Term::Eps | Term::Closure(_) => Vec::new(),
            Term::Sym(l) => vec![l.clone()],
            Term::Seq(parts) => parts.iter().flat_map(Term::shortest_word).collect(),
            Term::Shuffle(parts) => parts
                .iter()
                .flat_map(|(p, n)| std::iter::repeat_n(p.shortest_word(), *n).flatten())
                .collect(),
        }
    }
}

impl From<&Cre> for Term {
    fn from(e: &Cre) -> Term {
        match e {
            Cre::Eps => Term::Eps,
            Cre::Sym(l) => Term::Sym(l.clone()),
            Cre::Seq(a, b) => Term::seq([Term::from(&**a), Term::from(&**b)]),
            Cre::Shuffle(a, b) => Term::shuffle([Term::from(&**a), Term::from(&**b)]),
            Cre::ShuffleClosure(a) => Term::closure(Term::from(&**a)),
        }
    }
}

/// Membership of `sigma` in the language of `e`.
pub fn lang_member(e: &Cre, sigma: &[Label]) -> bool {
    let mut current: BTreeSet<Term> = BTreeSet::from([Term::from(e)]);
    for alpha in sigma {
        current = current.iter().flat_map(|t| t.derive(alpha)).collect();
        if current.is_empty() {
            return false;
        }
    }
    current.iter().any(Term::nullable)
}
