//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use membrane::policy::cre::Cre;
use membrane::policy::multiset::{infer_policy, ResidentRecord};
use membrane::policy::{Count, Dfa, DfaPolicy, MultisetPolicy, SetPolicy};
use membrane::runtime::{Engine, MembraneKind, Mode};
use membrane::{Agent, Label, Membrane, Name, Policy, Regime, Site, System, TrustLevel};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ACTIONS: [&str; 3] = ["a", "b", "c"];
pub const SITES: [&str; 3] = ["s0", "s1", "s2"];

/// Draws `n` values from `strategy` with a fixed-seed runner.
pub fn sample<T: Debug>(strategy: impl Strategy<Value = T>, n: usize) -> Vec<T> {
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| strategy.new_tree(&mut runner).expect("strategy").current()).collect()
}

pub fn names(items: &[&str]) -> Vec<Name> {
    items.iter().map(|s| Name::new(s)).collect()
}

// ---------------------------------------------------------------- CREs

pub fn cre_alphabet() -> Vec<Label> {
    vec![Label::action("a"), Label::action("b"), Label::locality("l")]
}

fn cre_leaf() -> BoxedStrategy<Cre> {
    prop_oneof![
        1 => Just(Cre::Eps),
        4 => proptest::sample::select(cre_alphabet()).prop_map(Cre::Sym),
    ]
    .boxed()
}

/// Expressions of depth at most `depth` with at most `closures` nested
/// shuffle closures.
pub fn cre_strategy(depth: usize, closures: usize) -> BoxedStrategy<Cre> {
    if depth <= 1 {
        return cre_leaf();
    }
    let sub = cre_strategy(depth - 1, closures);
    let mut options: Vec<(u32, BoxedStrategy<Cre>)> = vec![
        (2, cre_leaf()),
        (3, (sub.clone(), sub.clone()).prop_map(|(a, b)| Cre::seq(a, b)).boxed()),
        (3, (sub.clone(), sub).prop_map(|(a, b)| Cre::shuffle(a, b)).boxed()),
    ];
    if closures > 0 {
        options.push((2, cre_strategy(depth - 1, closures - 1).prop_map(Cre::closure).boxed()));
    }
    proptest::strategy::Union::new_weighted(options).boxed()
}

pub fn word_strategy(max_len: usize) -> BoxedStrategy<Vec<Label>> {
    proptest::collection::vec(proptest::sample::select(cre_alphabet()), 0..=max_len).boxed()
}

/// Recursive interleaving semantics, straight from the defining equations.
pub fn oracle_member(e: &Cre, w: &[Label]) -> bool {
    match e {
        Cre::Eps => w.is_empty(),
        Cre::Sym(l) => w.len() == 1 && &w[0] == l,
        Cre::Seq(a, b) => (0..=w.len()).any(|i| oracle_member(a, &w[..i]) && oracle_member(b, &w[i..])),
        Cre::Shuffle(a, b) => splits(w, false).any(|(x, y)| oracle_member(a, &x) && oracle_member(b, &y)),
        Cre::ShuffleClosure(a) => {
            // the copy that performs the first letter may be taken first
            w.is_empty() || splits(w, true).any(|(x, y)| oracle_member(a, &x) && oracle_member(e, &y))
        }
    }
}

/// All ways to split `w` into two interleaved subsequences.
fn splits(w: &[Label], first_in_left: bool) -> impl Iterator<Item = (Vec<Label>, Vec<Label>)> + '_ {
    let n = w.len();
    (0u32..(1 << n)).filter(move |m| !first_in_left || m & 1 == 1).map(move |mask| {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (i, l) in w.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x.push(l.clone());
            } else {
                y.push(l.clone());
            }
        }
        (x, y)
    })
}

/// Some word of `lang(e)`, picked at random; closures contribute up to two
/// copies.
pub fn random_member(e: &Cre, rng: &mut impl Rng) -> Vec<Label> {
    match e {
        Cre::Eps => Vec::new(),
        Cre::Sym(l) => vec![l.clone()],
        Cre::Seq(a, b) => {
            let mut w = random_member(a, rng);
            w.extend(random_member(b, rng));
            w
        }
        Cre::Shuffle(a, b) => {
            let (x, y) = (random_member(a, rng), random_member(b, rng));
            interleave(x, y, rng)
        }
        Cre::ShuffleClosure(a) => {
            let mut w = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                let copy = random_member(a, rng);
                w = interleave(w, copy, rng);
            }
            w
        }
    }
}

fn interleave(x: Vec<Label>, y: Vec<Label>, rng: &mut impl Rng) -> Vec<Label> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && rng.gen_bool(0.5)) {
            out.push(x[i].clone());
            i += 1;
        } else {
            out.push(y[j].clone());
            j += 1;
        }
    }
    out
}

// ---------------------------------------------------------------- DFAs

/// A total automaton kept as raw tables so that acceptance can be replayed
/// without the library.
#[derive(Clone, Debug)]
pub struct RawDfa {
    pub alphabet: Vec<Name>,
    pub start: usize,
    pub finals: Vec<bool>,
    pub delta: Vec<Vec<usize>>,
}

impl RawDfa {
    pub fn states(&self) -> usize {
        self.finals.len()
    }

    pub fn accepts(&self, w: &[Name]) -> bool {
        let mut s = self.start;
        for sym in w {
            match self.alphabet.iter().position(|a| a == sym) {
                Some(i) => s = self.delta[s][i],
                None => return false,
            }
        }
        self.finals[s]
    }

    pub fn build(&self) -> Dfa {
        let names = (0..self.states()).map(|i| format!("q{i}")).collect();
        Dfa::from_parts(names, self.alphabet.clone(), self.start, self.finals.clone(), self.delta.clone())
            .expect("generated tables are valid")
    }
}

pub fn raw_dfa_over(alphabet: Vec<Name>, max_states: usize) -> BoxedStrategy<RawDfa> {
    (1..=max_states)
        .prop_flat_map(move |n| {
            let k = alphabet.len();
            let alphabet = alphabet.clone();
            (
                0..n,
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(proptest::collection::vec(0..n, k), n),
            )
                .prop_map(move |(start, finals, delta)| RawDfa { alphabet: alphabet.clone(), start, finals, delta })
        })
        .boxed()
}

/// Automata over a nonempty subset of {x, y, z}.
pub fn raw_dfa(max_states: usize) -> BoxedStrategy<RawDfa> {
    proptest::sample::subsequence(vec!["x", "y", "z"], 1..=3)
        .prop_flat_map(move |syms| raw_dfa_over(names(&syms), max_states))
        .boxed()
}

/// Two automata over one shared alphabet.
pub fn raw_dfa_pair(max_states: usize) -> BoxedStrategy<(RawDfa, RawDfa)> {
    proptest::sample::subsequence(vec!["x", "y", "z"], 1..=3)
        .prop_flat_map(move |syms| (raw_dfa_over(names(&syms), max_states), raw_dfa_over(names(&syms), max_states)))
        .boxed()
}

/// Every word over `alphabet` of length at most `max_len`.
pub fn all_words(alphabet: &[Name], max_len: usize) -> Vec<Vec<Name>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v: Vec<Name> = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Inclusion by enumeration of every word up to `max_len`, walked as a
/// prefix tree so that words are never stored.
pub fn brute_force_enforces(a1: &RawDfa, a2: &RawDfa, max_len: usize) -> bool {
    fn walk(a1: &RawDfa, a2: &RawDfa, s1: usize, s2: Option<usize>, left: usize) -> bool {
        if a1.finals[s1] && !s2.is_some_and(|s| a2.finals[s]) {
            return false;
        }
        if left == 0 {
            return true;
        }
        a1.alphabet.iter().enumerate().all(|(i, sym)| {
            let t2 = s2.and_then(|s| a2.alphabet.iter().position(|b| b == sym).map(|j| a2.delta[s][j]));
            walk(a1, a2, a1.delta[s1][i], t2, left - 1)
        })
    }
    walk(a1, a2, a1.start, Some(a2.start), max_len)
}

// ---------------------------------------------------------------- agents

/// Labels an agent performs locally: actions and migration targets, not
/// what a continuation does after leaving.
pub fn local_labels(p: &Agent) -> BTreeSet<Name> {
    match p {
        Agent::Nil => BTreeSet::new(),
        Agent::Act(a, rest) => {
            let mut s = local_labels(rest);
            s.insert(a.clone());
            s
        }
        Agent::Go(l, _, _) => BTreeSet::from([l.clone()]),
        Agent::Par(x, y) => local_labels(x).union(&local_labels(y)).cloned().collect(),
        Agent::Repl(b) => local_labels(b),
    }
}

fn all_labels() -> Vec<Name> {
    names(&ACTIONS).into_iter().chain(names(&SITES)).collect()
}

fn random_subset(rng: &mut impl Rng, p: f64) -> BTreeSet<Name> {
    all_labels().into_iter().filter(|_| rng.gen_bool(p)).collect()
}

fn random_count(rng: &mut impl Rng) -> Count {
    if rng.gen_bool(0.2) {
        Count::Omega
    } else {
        Count::Finite(rng.gen_range(1..=3))
    }
}

fn random_multiset(rng: &mut impl Rng, p: f64) -> MultisetPolicy {
    random_subset(rng, p).into_iter().map(|l| (l, random_count(rng))).collect()
}

pub fn universal_policy(name: &str, alphabet: impl IntoIterator<Item = Name>) -> Policy {
    DfaPolicy::new(name, Dfa::universal(alphabet)).into()
}

/// A random total automaton over `alphabet`.
fn random_dfa(rng: &mut impl Rng, alphabet: Vec<Name>) -> Dfa {
    let n = rng.gen_range(1..=3);
    let raw = RawDfa {
        delta: (0..n).map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..n)).collect()).collect(),
        alphabet,
        start: 0,
        finals: (0..n).map(|i| i == 0 || rng.gen_bool(0.5)).collect(),
    };
    raw.build()
}

/// A digest for the continuation `body`. Honest digests are satisfied by
/// the body; dishonest ones are arbitrary.
fn digest(rng: &mut impl Rng, regime: Regime, body: &Agent, honest: bool) -> Policy {
    match (regime, honest) {
        (Regime::Set, true) => {
            let mut s = local_labels(body);
            s.extend(random_subset(rng, 0.15));
            Policy::Set(s.into_iter().collect::<SetPolicy>())
        }
        (Regime::Set, false) => Policy::Set(random_subset(rng, 0.3).into_iter().collect::<SetPolicy>()),
        (Regime::Multiset, true) => {
            let inferred = infer_policy(body).expect("honest digests make inference defined");
            Policy::Multiset(inferred.join(&random_multiset(rng, 0.1)))
        }
        (Regime::Multiset, false) => Policy::Multiset(random_multiset(rng, 0.3)),
        (Regime::Dfa, true) => {
            let mut s = local_labels(body);
            s.extend(random_subset(rng, 0.15));
            universal_policy("all", s)
        }
        (Regime::Dfa, false) => {
            let alphabet: Vec<Name> = random_subset(rng, 0.5).into_iter().collect();
            DfaPolicy::new("rand", random_dfa(rng, alphabet)).into()
        }
    }
}

/// A random agent of at most `budget` syntax nodes. Migration targets are
/// drawn from `SITES`, actions from `ACTIONS`.
pub fn gen_agent(rng: &mut impl Rng, budget: usize, regime: Regime, honest: bool) -> Agent {
    if budget <= 1 || rng.gen_bool(0.12) {
        return Agent::Nil;
    }
    match rng.gen_range(0..10) {
        0..=3 => Agent::act(*ACTIONS.choose(rng).expect("nonempty"), gen_agent(rng, budget - 1, regime, honest)),
        4..=5 => {
            let body = gen_agent(rng, budget - 1, regime, honest);
            let t = digest(rng, regime, &body, honest);
            Agent::go(*SITES.choose(rng).expect("nonempty"), t, body)
        }
        6..=8 if budget >= 3 => {
            let left = rng.gen_range(1..=budget - 2);
            Agent::par(gen_agent(rng, left, regime, honest), gen_agent(rng, budget - 1 - left, regime, honest))
        }
        _ => Agent::repl(gen_agent(rng, budget - 1, regime, honest)),
    }
}

pub fn agent_strategy(budget: usize, regime: Regime, honest: bool) -> BoxedStrategy<Agent> {
    any::<u64>()
        .prop_map(move |seed| gen_agent(&mut ChaCha8Rng::seed_from_u64(seed), budget, regime, honest))
        .boxed()
}

// ---------------------------------------------------------------- systems

fn pointwise_max(a: &MultisetPolicy, b: &MultisetPolicy) -> MultisetPolicy {
    let mut out: BTreeMap<Name, Count> = a.iter().map(|(l, c)| (l.clone(), c)).collect();
    for (l, c) in b.iter() {
        let e = out.entry(l.clone()).or_insert(c);
        *e = (*e).max(c);
    }
    out.into_iter().collect()
}

/// The policy a trustworthy site needs so that its code is well-formed in
/// `mode`, widened a little at random.
fn resident_policy(rng: &mut impl Rng, mode: Mode, code: &Agent) -> Policy {
    match (mode.membrane(), mode.regime()) {
        (MembraneKind::Entry, Regime::Set) => {
            let mut s = local_labels(code);
            s.extend(random_subset(rng, 0.2));
            Policy::Set(s.into_iter().collect::<SetPolicy>())
        }
        (MembraneKind::Entry, Regime::Multiset) => {
            let mut need = MultisetPolicy::new();
            for t in code.threads() {
                need = pointwise_max(&need, &infer_policy(&t).expect("honest"));
            }
            Policy::Multiset(need.join(&random_multiset(rng, 0.2)))
        }
        (MembraneKind::Static, _) => {
            let need = infer_policy(code).expect("honest");
            Policy::Multiset(need.join(&random_multiset(rng, 0.2)))
        }
        (MembraneKind::Dynamic, _) => Policy::Multiset(random_multiset(rng, 0.3)),
        (MembraneKind::Entry, Regime::Dfa) => {
            let mut s = local_labels(code);
            s.extend(random_subset(rng, 0.2));
            if rng.gen_bool(0.5) {
                universal_policy("all", s)
            } else {
                DfaPolicy::new("rand", random_dfa(rng, s.into_iter().collect())).into()
            }
        }
    }
}

fn foreign_policy(rng: &mut impl Rng, regime: Regime) -> Policy {
    match regime {
        Regime::Set => Policy::Set(random_subset(rng, 0.3).into_iter().collect::<SetPolicy>()),
        Regime::Multiset => Policy::Multiset(random_multiset(rng, 0.3)),
        Regime::Dfa => {
            let alphabet: Vec<Name> = random_subset(rng, 0.5).into_iter().collect();
            DfaPolicy::new("rand", random_dfa(rng, alphabet)).into()
        }
    }
}

/// A candidate system for `mode`: trustworthy sites run honest code under
/// a policy fitting it, the others run arbitrary code. Trust maps respect
/// coherence by construction. Callers still filter on the engine verdict.
pub fn gen_system(rng: &mut impl Rng, mode: Mode) -> System {
    let n = rng.gen_range(1..=3);
    let trustworthy: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
    let self_bad: Vec<bool> = (0..n).map(|i| !trustworthy[i] && rng.gen_bool(0.5)).collect();
    let mut sites = Vec::new();
    for i in 0..n {
        let code = if trustworthy[i] {
            gen_agent(rng, 6, mode.regime(), true)
        } else {
            gen_agent(rng, 6, mode.regime(), false)
        };
        let policy = if trustworthy[i] {
            resident_policy(rng, mode, &code)
        } else {
            foreign_policy(rng, mode.regime())
        };
        let mut m = Membrane::new(policy);
        for j in 0..n {
            let level = if i == j {
                if trustworthy[i] {
                    Some(TrustLevel::Good)
                } else if self_bad[i] {
                    Some(TrustLevel::Bad)
                } else {
                    None
                }
            } else if !trustworthy[i] {
                *[None, Some(TrustLevel::Good), Some(TrustLevel::Bad)].choose(rng).expect("nonempty")
            } else if trustworthy[j] {
                *[None, Some(TrustLevel::Good)].choose(rng).expect("nonempty")
            } else if self_bad[j] {
                *[None, Some(TrustLevel::Bad)].choose(rng).expect("nonempty")
            } else {
                None
            };
            if let Some(level) = level {
                m = m.with_trust(SITES[j], level);
            }
        }
        sites.push(Site::new(SITES[i], m, code));
    }
    System::from_sites(sites)
}

/// A well-formed coherent system and its engine, or `None` after too many
/// rejected candidates.
pub fn gen_wellformed(rng: &mut impl Rng, mode: Mode) -> Option<(System, Engine)> {
    for _ in 0..200 {
        let n = gen_system(rng, mode);
        let engine = Engine::new(mode).with_bound(2_000).with_theta_from(&n);
        if engine.wellformedness(&n).is_ok() {
            return Some((n, engine));
        }
    }
    None
}

pub fn wellformed_strategy(mode: Mode) -> BoxedStrategy<(System, Engine)> {
    any::<u64>()
        .prop_filter_map("no well-formed candidate", move |seed| {
            gen_wellformed(&mut ChaCha8Rng::seed_from_u64(seed), mode)
        })
        .boxed()
}

// ---------------------------------------------------------------- negative controls

/// A system where `home` trusts `liar`, whose agent carries a digest that
/// fits home's policy while the code performs `b`. Home's membrane is the
/// corrupted one: it extends trust the code does not deserve.
pub fn corrupted_system(mode: Mode) -> (System, Engine) {
    let (home_policy, lie): (Policy, Policy) = match (mode.membrane(), mode.regime()) {
        (MembraneKind::Entry, Regime::Set) => {
            (Policy::Set(["a"].into_iter().collect()), Policy::Set(["a"].into_iter().collect()))
        }
        (_, Regime::Multiset) | (MembraneKind::Static | MembraneKind::Dynamic, _) => (
            Policy::Multiset(MultisetPolicy::singleton("a")),
            Policy::Multiset(MultisetPolicy::singleton("a")),
        ),
        (MembraneKind::Entry, Regime::Dfa) => (universal_policy("only_a", names(&["a"])), universal_policy("only_a", names(&["a"]))),
    };
    let liar_policy = match mode.regime() {
        Regime::Set => Policy::Set(["home"].into_iter().collect()),
        Regime::Multiset => Policy::Multiset(MultisetPolicy::singleton("home")),
        Regime::Dfa => universal_policy("to_home", names(&["home"])),
    };
    let n = System::from_sites(vec![
        Site::new(
            "home",
            Membrane::new(home_policy).with_trust("home", TrustLevel::Good).with_trust("liar", TrustLevel::Good),
            Agent::Nil,
        ),
        Site::new(
            "liar",
            Membrane::new(liar_policy).with_trust("liar", TrustLevel::Good),
            Agent::go("home", lie, Agent::actions(["b"])),
        ),
    ]);
    let theta = ResidentRecord::new()
        .with("home", MultisetPolicy::singleton("a"))
        .with("liar", MultisetPolicy::singleton("home"));
    let engine = match mode.membrane() {
        MembraneKind::Dynamic => Engine::new(mode).with_theta(theta),
        _ => Engine::new(mode),
    };
    (n, engine)
}
