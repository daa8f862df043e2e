//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sfm1::automata::{Dfa, Nfa, StateId};
use sfm1::terms::{ConstName, Env, Label, Process, Symbol, Term};

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

pub fn symbols(n: usize) -> Vec<Symbol> {
    ["a", "b", "c"][..n].iter().map(|s| sym(s)).collect()
}

pub fn cname(i: usize) -> ConstName {
    ConstName::new(&format!("C{i}")).unwrap()
}

// ---------------------------------------------------------------------------
// Oracle: the transition rules read off one by one, with no sharing of code
// with the library's semantics.

/// All `(α, p')` with `t --α--> p'`, derived rule by rule.
pub fn derive(t: &Term, env: &Env, depth: usize) -> BTreeSet<(Label, Term)> {
    assert!(depth < 10_000, "unguarded recursion in oracle");
    match t {
        // α.p --α--> p
        Term::Prefix(a, p) => BTreeSet::from([(a.clone(), (**p).clone())]),
        // p --α--> p'  gives  p + q --α--> p'  and  q + p --α--> p'
        Term::Sum(l, r) => derive(l, env, depth + 1).union(&derive(r, env, depth + 1)).cloned().collect(),
        // p --α--> p' and C ≐ p  gives  C --α--> p'
        Term::Const(c) => derive(env.body(c).expect("defined"), env, depth + 1),
        _ => BTreeSet::new(),
    }
}

/// `t` is final: `1`, a sum with a final operand, or a constant with a final
/// body.
pub fn terminates(t: &Term, env: &Env) -> bool {
    match t {
        Term::One => true,
        Term::Sum(l, r) => terminates(l, env) || terminates(r, env),
        Term::Const(c) => terminates(env.body(c).expect("defined"), env),
        _ => false,
    }
}

/// The reachable automaton by the rules above; states are rendered terms.
pub fn oracle_denote(p: &Process) -> Nfa {
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::from([p.root.clone()]);
    seen.insert(p.root.to_string(), p.root.clone());
    let (mut trans, mut finals, mut alphabet) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    while let Some(t) = queue.pop_front() {
        if terminates(&t, &p.env) {
            finals.insert(t.to_string());
        }
        for (a, u) in derive(&t, &p.env, 0) {
            if let Label::Sym(s) = &a {
                alphabet.insert(s.clone());
            }
            trans.insert((t.to_string(), a, u.to_string()));
            if let std::collections::btree_map::Entry::Vacant(slot) = seen.entry(u.to_string()) {
                slot.insert(u.clone());
                queue.push_back(u);
            }
        }
    }
    Nfa::new(seen.into_keys(), alphabet, p.root.to_string(), finals, trans).unwrap()
}

fn eps_close(set: BTreeSet<Term>, env: &Env) -> BTreeSet<Term> {
    let mut out = set.clone();
    let mut todo: Vec<Term> = set.into_iter().collect();
    while let Some(t) = todo.pop() {
        for (a, u) in derive(&t, env, 0) {
            if a.is_eps() && out.insert(u.clone()) {
                todo.push(u);
            }
        }
    }
    out
}

/// Word acceptance straight from the transition rules.
pub fn term_accepts(p: &Process, word: &[Symbol]) -> bool {
    let mut cur = eps_close(BTreeSet::from([p.root.clone()]), &p.env);
    for s in word {
        let next = cur
            .iter()
            .flat_map(|t| derive(t, &p.env, 0))
            .filter(|(a, _)| a.symbol() == Some(s))
            .map(|(_, u)| u)
            .collect();
        cur = eps_close(next, &p.env);
    }
    cur.iter().any(|t| terminates(t, &p.env))
}

/// Every word over `alphabet` of length at most `max`.
pub fn words(alphabet: &[Symbol], max: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Symbol>| alphabet.iter().map(move |a| [w.clone(), vec![a.clone()]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Bounded language comparison by enumeration.
pub fn agree_upto(p: &Process, q: &Process, alphabet: &[Symbol], max: usize) -> bool {
    words(alphabet, max).iter().all(|w| term_accepts(p, w) == term_accepts(q, w))
}

// ---------------------------------------------------------------------------
// Random systems.

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_consts: usize,
    pub symbols: usize,
    /// Chance that a prefix is ε.
    pub eps: f64,
    /// ε-prefixed constants only point forward, which rules out ε-cycles.
    pub og: bool,
    pub depth: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_consts: 4, symbols: 2, eps: 0.25, og: true, depth: 2 }
    }
}

fn label(rng: &mut Rng8, shape: &Shape) -> Label {
    if rng.gen_bool(shape.eps) {
        Label::Eps
    } else {
        Label::Sym(symbols(shape.symbols).choose(rng).unwrap().clone())
    }
}

/// A prefix owned by the body of constant `owner`.
fn prefix(rng: &mut Rng8, shape: &Shape, n: usize, owner: usize, depth: usize) -> Term {
    let a = label(rng, shape);
    let forward: Vec<usize> = if a.is_eps() && shape.og { (owner + 1..n).collect() } else { (0..n).collect() };
    if depth > 0 && rng.gen_bool(0.25) {
        return Term::prefix(a, guarded(rng, shape, n, owner, depth - 1));
    }
    match forward.choose(rng) {
        Some(&j) => Term::prefix(a, Term::Const(cname(j))),
        None => Term::prefix(a, Term::One),
    }
}

/// A sum of prefixes, `0` and `1`.
fn guarded(rng: &mut Rng8, shape: &Shape, n: usize, owner: usize, depth: usize) -> Term {
    let k = rng.gen_range(1..=3);
    let parts = (0..k).map(|_| match rng.gen_range(0..10) {
        0 => Term::Zero,
        1 | 2 => Term::One,
        _ => prefix(rng, shape, n, owner, depth),
    });
    Term::sum_of(parts.collect::<Vec<_>>())
}

pub fn system_from(bodies: Vec<Term>) -> Process {
    let mut env = Env::new();
    for (i, b) in bodies.into_iter().enumerate() {
        env.define(cname(i), b).unwrap();
    }
    let root = Term::Const(cname(0));
    let env = env.restrict_to(&root);
    Process { root, env }
}

pub fn bodies_of(p: &Process) -> Vec<(ConstName, Term)> {
    p.env.iter().map(|(c, b)| (c.clone(), b.clone())).collect()
}

pub fn random_system(rng: &mut Rng8, shape: &Shape) -> Process {
    let n = rng.gen_range(1..=shape.max_consts);
    let bodies = (0..n).map(|i| guarded(rng, shape, n, i, shape.depth)).collect();
    system_from(bodies)
}

/// A system where every constant but the last has an ε-self-loop summand,
/// so it is never observationally guarded.
pub fn random_unguarded(rng: &mut Rng8, shape: &Shape) -> Process {
    let n = rng.gen_range(1..=shape.max_consts);
    let bodies = (0..n)
        .map(|i| {
            let rest = guarded(rng, &Shape { og: false, ..*shape }, n, i, shape.depth);
            let looped = Term::prefix(Label::Eps, Term::Const(cname(i)));
            if rng.gen_bool(0.5) {
                Term::sum(looped, rest)
            } else {
                Term::sum(rest, looped)
            }
        })
        .collect();
    system_from(bodies)
}

// ---------------------------------------------------------------------------
// Language-preserving rewrites.

fn rebuild(p: &Process, body: impl Fn(&ConstName, &Term) -> Term, extra: Option<(ConstName, Term)>) -> Process {
    let mut env = Env::new();
    for (c, b) in p.env.iter() {
        env.define(c.clone(), body(c, b)).unwrap();
    }
    if let Some((c, b)) = extra {
        env.define(c, b).unwrap();
    }
    Process { root: p.root.clone(), env }
}

/// One random sound rewrite of a single body.
pub fn rewrite_once(rng: &mut Rng8, p: &Process) -> Process {
    let consts: Vec<ConstName> = p.env.iter().map(|(c, _)| c.clone()).collect();
    let target = consts.choose(rng).unwrap().clone();
    let body = p.env.body(&target).unwrap().clone();
    let mut parts: Vec<Term> = body.summands().into_iter().cloned().collect();
    let mut extra = None;
    let a = sym("a");
    match rng.gen_range(0..9) {
        // commutativity
        0 => parts.reverse(),
        // idempotency
        1 => {
            let s = parts.choose(rng).unwrap().clone();
            parts.push(s);
        }
        // identity
        2 => parts.insert(rng.gen_range(0..=parts.len()), Term::Zero),
        // ε-absorption
        3 => {
            let i = rng.gen_range(0..parts.len());
            parts[i] = Term::prefix(Label::Eps, parts[i].clone());
        }
        // annihilation
        4 => parts.push(Term::prefix(Label::Sym(a), Term::Zero)),
        // identity under a prefix
        5 => {
            let prefixes: Vec<usize> = (0..parts.len())
                .filter(|&i| matches!(&parts[i], Term::Prefix(_, q) if !matches!(**q, Term::Const(_))))
                .collect();
            if let Some(&i) = prefixes.choose(rng) {
                let Term::Prefix(l, q) = parts[i].clone() else { unreachable!() };
                parts[i] = Term::prefix(l.clone(), Term::sum((*q).clone(), Term::Zero));
            }
        }
        // unfolding a constant under a prefix
        6 => {
            for s in parts.iter_mut() {
                if let Term::Prefix(l, q) = s.clone() {
                    if let Term::Const(c) = &*q {
                        *s = Term::prefix(l, p.env.body(c).unwrap().clone());
                        break;
                    }
                }
            }
        }
        // distributivity, read right to left
        7 => {
            let open = |t: &Term| matches!(t, Term::Prefix(_, q) if !matches!(**q, Term::Const(_)));
            let pairs: Vec<(usize, usize)> = (0..parts.len())
                .flat_map(|i| (i + 1..parts.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| match (&parts[i], &parts[j]) {
                    (Term::Prefix(l, _), Term::Prefix(m, _)) => l == m && open(&parts[i]) && open(&parts[j]),
                    _ => false,
                })
                .collect();
            if let Some(&(i, j)) = pairs.choose(rng) {
                let (Term::Prefix(l, x), Term::Prefix(_, y)) = (parts[i].clone(), parts[j].clone()) else {
                    unreachable!()
                };
                parts[i] = Term::prefix(l, Term::sum((*x).clone(), (*y).clone()));
                parts.remove(j);
            }
        }
        // a fresh copy of a constant
        _ => {
            let fresh = ConstName::new(&format!("K{}", p.env.len())).unwrap();
            if !p.env.contains(&fresh) {
                for s in parts.iter_mut() {
                    if let Term::Prefix(l, q) = s.clone() {
                        if let Term::Const(c) = &*q {
                            extra = Some((fresh.clone(), p.env.body(c).unwrap().clone()));
                            *s = Term::prefix(l, Term::Const(fresh));
                            break;
                        }
                    }
                }
            }
        }
    }
    let new_body = Term::sum_of(parts);
    let rewritten = rebuild(p, |c, b| if *c == target { new_body.clone() } else { b.clone() }, extra);
    let env = rewritten.env.restrict_to(&rewritten.root);
    Process { root: rewritten.root, env }
}

pub fn rewrite(rng: &mut Rng8, p: &Process, times: usize) -> Process {
    (0..times).fold(p.clone(), |q, _| rewrite_once(rng, &q))
}

// ---------------------------------------------------------------------------
// Random automata.

/// A reduced NFA: every state is reached from `q0` by a spanning edge.
pub fn random_reduced_nfa(rng: &mut Rng8, max_states: usize, nsyms: usize, eps: bool) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let syms = symbols(nsyms);
    let pick = |rng: &mut Rng8| -> Label {
        if eps && rng.gen_bool(0.2) {
            Label::Eps
        } else {
            Label::Sym(syms.choose(rng).unwrap().clone())
        }
    };
    let name = |i: usize| -> StateId { format!("q{i}") };
    let mut trans = BTreeSet::new();
    for i in 1..n {
        let from = rng.gen_range(0..i);
        trans.insert((name(from), pick(rng), name(i)));
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        trans.insert((name(rng.gen_range(0..n)), pick(rng), name(rng.gen_range(0..n))));
    }
    let finals: Vec<StateId> = (0..n).filter(|_| rng.gen_bool(0.3)).map(name).collect();
    Nfa::new((0..n).map(name), syms, name(0), finals, trans).unwrap()
}

pub fn random_complete_dfa(rng: &mut Rng8, max_states: usize, syms: &[Symbol]) -> Dfa {
    let n = rng.gen_range(1..=max_states);
    let name = |i: usize| -> StateId { format!("s{i}") };
    let mut trans = BTreeSet::new();
    for i in 0..n {
        for a in syms {
            trans.insert((name(i), Label::Sym(a.clone()), name(rng.gen_range(0..n))));
        }
    }
    let finals: Vec<StateId> = (0..n).filter(|_| rng.gen_bool(0.4)).map(name).collect();
    Dfa::from_nfa(Nfa::new((0..n).map(name), syms.to_vec(), name(0), finals, trans).unwrap()).unwrap()
}
