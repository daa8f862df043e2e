//! Normal forms: prefixes applied to constants, then no ε, then one
//! successor per symbol. Each stage comes with a proof that the new root
//! equals the old one.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::semantics::moves;
use crate::terms::{
    bfs_consts, free_vars, is_final, is_og_system, nf, ConstName, Label, Process, Subst, Symbol, Term, VarName,
};

use super::builder::{canon_list, internal, Builder, Res, Sid};
use super::equiv::merge_processes;
use super::solve::usol;
use super::{AxiomId, AxiomSet, Proof, ProofError};

pub(super) fn require_closed(b: &Builder, root: &Term) -> Res<()> {
    if free_vars(root, b.env()).is_empty() {
        Ok(())
    } else {
        Err(ProofError::Open)
    }
}

/// The root as a constant, wrapping a non-constant root in a new definition.
pub(super) fn const_root(b: &mut Builder, root: &Term) -> Res<(ConstName, Sid)> {
    match root {
        Term::Const(c) => Ok((c.clone(), b.refl(root.clone()))),
        Term::Var(_) => Err(ProofError::Open),
        t => {
            let k = b.define("K", t.clone())?;
            let unf = b.unfold(&k)?;
            Ok((k, b.symm(unf)))
        }
    }
}

fn fresh_vars(b: &mut Builder, n: usize) -> Vec<VarName> {
    (0..n).map(|_| b.ws.fresh.var_name("x")).collect()
}

/// Reserves distinct constant names, preferring `wanted` when free.
fn reserve(b: &mut Builder, wanted: &[String]) -> Vec<ConstName> {
    let mut taken = BTreeSet::new();
    wanted
        .iter()
        .map(|w| {
            let c = match ConstName::new(w) {
                Ok(c) if !b.env().contains(&c) && !taken.contains(&c) => c,
                _ => loop {
                    let c = b.ws.fresh.const_name(w, &b.ws.env);
                    if !taken.contains(&c) {
                        break c;
                    }
                },
            };
            taken.insert(c.clone());
            c
        })
        .collect()
}

fn define_all(b: &mut Builder, names: &[ConstName], bodies: Vec<Term>) -> Res<()> {
    for (c, body) in names.iter().zip(bodies) {
        b.ws.define(c.clone(), body)?;
    }
    Ok(())
}

fn const_terms(cs: &[ConstName]) -> Vec<Term> {
    cs.iter().map(|c| Term::Const(c.clone())).collect()
}

fn with_vars(xs: &[VarName], ts: Vec<Term>) -> Subst {
    xs.iter().cloned().zip(ts).collect()
}

/// Normal form over the reachable moves: one constant per reachable term.
pub(super) fn nf_in(b: &mut Builder, root: &Term) -> Res<(Term, Sid)> {
    require_closed(b, root)?;
    if nf(root, b.env()) {
        return Ok((root.clone(), b.refl(root.clone())));
    }
    if b.set != AxiomSet::B && !is_og_system(root, b.env()) {
        return Err(ProofError::NotOg);
    }
    let mut states: Vec<Term> = vec![root.clone()];
    let mut index: HashMap<Term, usize> = HashMap::from([(root.clone(), 0)]);
    let mut edges: Vec<Vec<(Label, usize)>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut out = Vec::new();
        for (a, t) in moves(&states[i], b.env()) {
            let j = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                states.len() - 1
            });
            out.push((a, j));
        }
        out.sort_by_key(|x| (x.0.to_string(), x.1));
        out.dedup();
        edges.push(out);
        i += 1;
    }
    let n = states.len();
    let xs = fresh_vars(b, n);
    let templates: Vec<Term> = (0..n)
        .map(|i| {
            let mut summands: Vec<Term> =
                edges[i].iter().map(|(a, j)| Term::prefix(a.clone(), Term::Var(xs[*j].clone()))).collect();
            if is_final(&states[i], b.env()) {
                summands.push(Term::One);
            }
            Term::sum_of(summands)
        })
        .collect();
    // Generated names never clash with user constants.
    let lits: Vec<ConstName> = states
        .iter()
        .map(|t| {
            let base = match t {
                Term::Const(c) => c.base().to_string(),
                _ => "N".to_string(),
            };
            b.ws.fresh.const_name(&base, &b.ws.env)
        })
        .collect();
    let lit_sub = with_vars(&xs, const_terms(&lits));
    let bodies = templates.iter().map(|t| b.ws.apply(t, &lit_sub)).collect::<Result<Vec<_>, _>>()?;
    define_all(b, &lits, bodies)?;

    let state_sub = with_vars(&xs, states.clone());
    let mut proofs = Vec::with_capacity(n);
    for i in 0..n {
        let target = b.ws.apply(&templates[i], &state_sub)?;
        let p = match &states[i] {
            Term::Const(c) => {
                let unf = b.unfold(c)?;
                let body = b.rhs(unf).clone();
                let ac = b.ac_eq(&body, &target)?;
                b.trans(unf, ac)?
            }
            t => b.ac_eq(t, &target)?,
        };
        proofs.push(p);
    }
    let sol = usol(b, &xs, &templates, &lits, &states, &proofs)?;
    let back = b.symm(sol[0]);
    Ok((Term::Const(lits[0].clone()), back))
}

fn has_eps(root: &Term, b: &Builder) -> bool {
    let mut labels = BTreeSet::new();
    root.labels(&mut labels);
    for c in bfs_consts(root, b.env()) {
        if let Some(body) = b.env().body(&c) {
            body.labels(&mut labels);
        }
    }
    labels.contains(&Label::Eps)
}

struct Expansion {
    summands: Vec<Term>,
    proof: Sid,
}

/// ε-free normal form; constants are named `D<i>` after the position of the
/// constant they replace in breadth-first order.
pub(super) fn eps_free_in(b: &mut Builder, root: &Term) -> Res<(Term, Sid)> {
    require_closed(b, root)?;
    if !nf(root, b.env()) {
        return Err(ProofError::NotNf);
    }
    if !is_og_system(root, b.env()) {
        return Err(ProofError::NotOg);
    }
    if !has_eps(root, b) {
        return Ok((root.clone(), b.refl(root.clone())));
    }
    let (c0, p0) = const_root(b, root)?;
    let cs = bfs_consts(&Term::Const(c0.clone()), b.env());
    let pos: HashMap<ConstName, usize> = cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();

    let mut memo: HashMap<usize, Expansion> = HashMap::new();
    for i in 0..cs.len() {
        expand(b, &cs, &pos, i, &mut memo, &mut BTreeSet::new())?;
    }

    // Constants reachable in the new system, in original order.
    let mut keep = BTreeSet::from([0usize]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in &memo[&i].summands {
            if let Term::Prefix(_, k) = s {
                if let Term::Const(c) = &**k {
                    if keep.insert(pos[c]) {
                        queue.push_back(pos[c]);
                    }
                }
            }
        }
    }
    let keep: Vec<usize> = keep.into_iter().collect();
    let slot: HashMap<usize, usize> = keep.iter().enumerate().map(|(s, &i)| (i, s)).collect();
    let xs = fresh_vars(b, keep.len());
    let to_var: HashMap<ConstName, VarName> = keep.iter().map(|&i| (cs[i].clone(), xs[slot[&i]].clone())).collect();
    let templates: Vec<Term> =
        keep.iter().map(|i| Term::sum_of(memo[i].summands.iter().map(|s| abstract_consts(s, &to_var)))).collect();
    let names = reserve(b, &keep.iter().map(|i| format!("D{}", i + 1)).collect::<Vec<_>>());
    let lit_sub = with_vars(&xs, const_terms(&names));
    let bodies = templates.iter().map(|t| b.ws.apply(t, &lit_sub)).collect::<Result<Vec<_>, _>>()?;
    define_all(b, &names, bodies)?;

    let provable: Vec<Term> = keep.iter().map(|&i| Term::Const(cs[i].clone())).collect();
    let mut proofs = Vec::with_capacity(keep.len());
    for &i in &keep {
        let unf = b.unfold(&cs[i])?;
        proofs.push(b.trans(unf, memo[&i].proof)?);
    }
    let sol = usol(b, &xs, &templates, &names, &provable, &proofs)?;
    let back = b.symm(sol[0]);
    Ok((Term::Const(names[0].clone()), b.trans(p0, back)?))
}

fn abstract_consts(t: &Term, to_var: &HashMap<ConstName, VarName>) -> Term {
    match t {
        Term::Const(c) => to_var.get(c).map_or_else(|| t.clone(), |x| Term::Var(x.clone())),
        Term::Prefix(a, p) => Term::prefix(a.clone(), abstract_consts(p, to_var)),
        Term::Sum(l, r) => Term::sum(abstract_consts(l, to_var), abstract_consts(r, to_var)),
        other => other.clone(),
    }
}

/// Summands of `body(C_i)` with every `ε.C_j` replaced by the expansion of
/// `C_j`, first occurrences kept, and a proof `body(C_i) = Σ summands`.
fn expand(
    b: &mut Builder,
    cs: &[ConstName],
    pos: &HashMap<ConstName, usize>,
    i: usize,
    memo: &mut HashMap<usize, Expansion>,
    active: &mut BTreeSet<usize>,
) -> Res<()> {
    if memo.contains_key(&i) {
        return Ok(());
    }
    if !active.insert(i) {
        return Err(ProofError::NotOg);
    }
    let body = b.body(&cs[i])?;
    let mut summands: Vec<Term> = Vec::new();
    let mut rewrites = Vec::new();
    for s in body.summands() {
        match s {
            Term::Prefix(Label::Eps, k) => {
                let Term::Const(c) = &**k else { return Err(ProofError::NotNf) };
                let j = *pos.get(c).ok_or_else(|| internal("unreachable constant"))?;
                expand(b, cs, pos, j, memo, active)?;
                let unf = b.unfold(c)?;
                let under = b.under_prefix(&Label::Eps, unf)?;
                let inner = b.body(c)?;
                let t3 = b.law(AxiomId::T3, None, &[inner])?;
                let e = &memo[&j];
                let (ej, more) = (e.proof, e.summands.clone());
                rewrites.push(Some(b.chain(&[under, t3, ej])?));
                for m in more {
                    if !summands.contains(&m) {
                        summands.push(m);
                    }
                }
            }
            Term::Zero => rewrites.push(None),
            other => {
                rewrites.push(None);
                if !summands.contains(other) {
                    summands.push(other.clone());
                }
            }
        }
    }
    let step = b.rewrite_summands(&body, &rewrites)?;
    let spliced = b.rhs(step).clone();
    let ac = b.ac_eq(&spliced, &Term::sum_of(summands.iter().cloned()))?;
    let proof = b.trans(step, ac)?;
    active.remove(&i);
    memo.insert(i, Expansion { summands, proof });
    Ok(())
}

fn symbols_of(root: &Term, b: &Builder) -> BTreeSet<Symbol> {
    let mut labels = BTreeSet::new();
    root.labels(&mut labels);
    for c in bfs_consts(root, b.env()) {
        if let Some(body) = b.env().body(&c) {
            body.labels(&mut labels);
        }
    }
    labels.into_iter().filter_map(|l| l.symbol().cloned()).collect()
}

fn set_name(prefix: &str, set: &BTreeSet<usize>) -> String {
    let inner: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
    format!("{prefix}{{{}}}", inner.join(","))
}

/// `α.(b1 + ... + bm) = α.b1 + ... + α.bm` for a left-nested sum.
fn split(b: &mut Builder, a: &Label, parts: &[Term]) -> Res<Sid> {
    match parts.len() {
        0 => Err(internal("empty group")),
        1 => Ok(b.refl(Term::prefix(a.clone(), parts[0].clone()))),
        m => {
            let init = Term::sum_of(parts[..m - 1].iter().cloned());
            let t2 = b.law(AxiomId::T2, Some(a.clone()), &[init, parts[m - 1].clone()])?;
            let rest = split(b, a, &parts[..m - 1])?;
            let ctx = Term::sum(Term::Var(super::builder::hole(0)), Term::prefix(a.clone(), parts[m - 1].clone()));
            let inner = b.in_context(&ctx, &super::builder::hole(0), rest)?;
            b.trans(t2, inner)
        }
    }
}

/// `a.C = 0` for a constant whose body has no non-zero summand.
fn prefix_of_dead(b: &mut Builder, a: &Label, c: &ConstName) -> Res<Sid> {
    let unf = b.unfold(c)?;
    let body = b.rhs(unf).clone();
    let zero = b.ac_eq(&body, &Term::Zero)?;
    let to_zero = b.trans(unf, zero)?;
    let under = b.under_prefix(a, to_zero)?;
    let t1 = b.law(AxiomId::T1, Some(a.clone()), &[])?;
    b.trans(under, t1)
}

/// Subset construction with one constant per reachable set of states.
pub(super) fn det_in(b: &mut Builder, root: &Term, alphabet: &BTreeSet<Symbol>) -> Res<(Term, Sid)> {
    require_closed(b, root)?;
    if !nf(root, b.env()) {
        return Err(ProofError::NotNf);
    }
    if has_eps(root, b) {
        return Err(ProofError::NotEpsFree);
    }
    let alphabet: BTreeSet<Symbol> = alphabet.union(&symbols_of(root, b)).cloned().collect();
    let labels: Vec<Label> = alphabet.iter().map(|s| Label::Sym(s.clone())).collect();
    let (c0, p0) = const_root(b, root)?;
    let cs = bfs_consts(&Term::Const(c0.clone()), b.env());
    let pos: HashMap<ConstName, usize> = cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut succ: Vec<BTreeMap<Symbol, BTreeSet<usize>>> = Vec::new();
    let mut fin = Vec::new();
    let mut dead = Vec::new();
    for c in &cs {
        let body = b.body(c)?;
        let mut m: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
        for s in body.summands() {
            if let Term::Prefix(Label::Sym(a), k) = s {
                let Term::Const(k) = &**k else { return Err(ProofError::NotNf) };
                m.entry(a.clone()).or_default().insert(pos[k]);
            }
        }
        succ.push(m);
        fin.push(is_final(&body, b.env()));
        dead.push(canon_list(&body).is_empty());
    }

    let start: BTreeSet<usize> = if dead[0] { BTreeSet::new() } else { BTreeSet::from([0]) };
    let mut sets = vec![start.clone()];
    let mut idx: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::from([(start, 0)]);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut k = 0;
    while k < sets.len() {
        let mut row = Vec::new();
        for a in &alphabet {
            let next: BTreeSet<usize> = sets[k]
                .iter()
                .flat_map(|&i| succ[i].get(a).into_iter().flatten().copied())
                .filter(|&j| !dead[j])
                .collect();
            let j = *idx.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                sets.len() - 1
            });
            row.push(j);
        }
        delta.push(row);
        k += 1;
    }
    let n = sets.len();
    let finals: Vec<bool> = sets.iter().map(|s| s.iter().any(|&i| fin[i])).collect();
    let xs = fresh_vars(b, n);
    let templates: Vec<Term> = (0..n)
        .map(|k| {
            let mut summands: Vec<Term> =
                labels.iter().zip(&delta[k]).map(|(a, &j)| Term::prefix(a.clone(), Term::Var(xs[j].clone()))).collect();
            if finals[k] {
                summands.push(Term::One);
            }
            Term::sum_of(summands)
        })
        .collect();

    let d_names = reserve(b, &sets.iter().map(|s| set_name("D", s)).collect::<Vec<_>>());
    let b_names = reserve(b, &sets.iter().map(|s| set_name("B", s)).collect::<Vec<_>>());
    let lit_sub = with_vars(&xs, const_terms(&d_names));
    let d_bodies = templates.iter().map(|t| b.ws.apply(t, &lit_sub)).collect::<Result<Vec<_>, _>>()?;
    define_all(b, &d_names, d_bodies)?;
    let prov_sub = with_vars(&xs, const_terms(&b_names));
    let mut b_bodies = Vec::with_capacity(n);
    for (k, s) in sets.iter().enumerate() {
        b_bodies.push(if s.is_empty() {
            b.ws.apply(&templates[k], &prov_sub)?
        } else {
            let parts = s.iter().map(|&i| b.body(&cs[i])).collect::<Res<Vec<_>>>()?;
            Term::sum_of(parts)
        });
    }
    define_all(b, &b_names, b_bodies)?;

    // B_∅ = 0, when the empty set is reachable.
    let empty = idx.get(&BTreeSet::new()).copied();
    let sink_zero = match empty {
        Some(e) if labels.is_empty() => Some(b.unfold(&b_names[e])?),
        Some(e) => {
            let dead_sum = Term::sum_of(labels.iter().map(|a| Term::prefix(a.clone(), Term::Zero)));
            let t1s =
                labels.iter().map(|a| b.law(AxiomId::T1, Some(a.clone()), &[]).map(Some)).collect::<Res<Vec<_>>>()?;
            let zeros = b.rewrite_summands(&dead_sum, &t1s)?;
            let all_zero = b.rhs(zeros).clone();
            let collapse = b.ac_eq(&all_zero, &Term::Zero)?;
            let forward = b.trans(zeros, collapse)?;
            let premise = b.symm(forward);
            let x = xs[e].clone();
            let template = Term::sum_of(labels.iter().map(|a| Term::prefix(a.clone(), Term::Var(x.clone()))));
            Some(b.fold(&b_names[e], &x, &template, premise)?)
        }
        None => None,
    };

    let mut proofs = Vec::with_capacity(n);
    for k in 0..n {
        let unf = b.unfold(&b_names[k])?;
        if sets[k].is_empty() {
            proofs.push(unf);
            continue;
        }
        let whole = b.rhs(unf).clone();
        let mut rw = Vec::new();
        for s in whole.summands() {
            rw.push(match s {
                Term::Prefix(a @ Label::Sym(_), c) => {
                    let Term::Const(c) = &**c else { return Err(ProofError::NotNf) };
                    if dead[pos[c]] {
                        Some(prefix_of_dead(b, a, c)?)
                    } else {
                        let u = b.unfold(c)?;
                        Some(b.under_prefix(a, u)?)
                    }
                }
                _ => None,
            });
        }
        let s1 = b.rewrite_summands(&whole, &rw)?;
        let target = b.ws.apply(&templates[k], &prov_sub)?;
        let mut grouped = Vec::new();
        for (a, &j) in labels.iter().zip(&delta[k]) {
            let under = if sets[j].is_empty() {
                let z = sink_zero.ok_or_else(|| internal("missing sink lemma"))?;
                let u = b.under_prefix(a, z)?;
                let t1 = b.law(AxiomId::T1, Some(a.clone()), &[])?;
                b.trans(u, t1)?
            } else {
                let u = b.unfold(&b_names[j])?;
                let u = b.under_prefix(a, u)?;
                let parts = sets[j].iter().map(|&i| b.body(&cs[i])).collect::<Res<Vec<_>>>()?;
                let sp = split(b, a, &parts)?;
                b.trans(u, sp)?
            };
            grouped.push(Some(under));
        }
        let expanded = b.rewrite_summands(&target, &grouped)?;
        let (from, to) = (b.rhs(s1).clone(), b.rhs(expanded).clone());
        let ac = b.ac_eq(&from, &to)?;
        let back = b.symm(expanded);
        proofs.push(b.chain(&[unf, s1, ac, back])?);
    }
    let provable = const_terms(&b_names);
    let sol = usol(b, &xs, &templates, &d_names, &provable, &proofs)?;

    // C_root = B_{I0}.
    let to_b = if sets[0].is_empty() {
        let unf = b.unfold(&c0)?;
        let body = b.rhs(unf).clone();
        let z = b.ac_eq(&body, &Term::Zero)?;
        let sink = b.symm(sink_zero.ok_or_else(|| internal("missing sink lemma"))?);
        b.chain(&[unf, z, sink])?
    } else {
        let unf = b.unfold(&c0)?;
        let ub = b.unfold(&b_names[0])?;
        let back = b.symm(ub);
        b.trans(unf, back)?
    };
    let to_d = b.symm(sol[0]);
    Ok((Term::Const(d_names[0].clone()), b.chain(&[p0, to_b, to_d])?))
}

/// Successor per symbol and finality of a deterministic system.
fn det_table(
    b: &Builder,
    root: &ConstName,
    alphabet: &BTreeSet<Symbol>,
) -> Res<BTreeMap<ConstName, (Vec<ConstName>, bool)>> {
    let mut out = BTreeMap::new();
    for c in bfs_consts(&Term::Const(root.clone()), b.env()) {
        let body = b.body(&c)?;
        let mut row: BTreeMap<Symbol, ConstName> = BTreeMap::new();
        let mut fin = false;
        for s in body.summands() {
            match s {
                Term::One => fin = true,
                Term::Zero => {}
                Term::Prefix(Label::Sym(a), k) => {
                    let Term::Const(k) = &**k else { return Err(ProofError::NotNf) };
                    if row.insert(a.clone(), k.clone()).is_some_and(|old| &old != k) {
                        return Err(ProofError::NotDeterministic(format!("{c} has two {a}-successors")));
                    }
                }
                _ => return Err(ProofError::NotDeterministic(format!("{c} has summand `{s}`"))),
            }
        }
        if row.keys().ne(alphabet.iter()) {
            return Err(ProofError::NotDeterministic(format!("{c} lacks a successor for some symbol")));
        }
        out.insert(c, (row.into_values().collect(), fin));
    }
    Ok(out)
}

/// Equality of two deterministic normal forms with the same language.
pub(super) fn det_equal_in(b: &mut Builder, r1: &ConstName, r2: &ConstName) -> Res<Sid> {
    let mut alphabet = symbols_of(&Term::Const(r1.clone()), b);
    alphabet.extend(symbols_of(&Term::Const(r2.clone()), b));
    let t1 = det_table(b, r1, &alphabet)?;
    let t2 = det_table(b, r2, &alphabet)?;
    let mut pairs = vec![(r1.clone(), r2.clone())];
    let mut idx: BTreeMap<(ConstName, ConstName), usize> = BTreeMap::from([((r1.clone(), r2.clone()), 0)]);
    let mut delta = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let (h1, h2) = pairs[k].clone();
        let (row1, f1) = &t1[&h1];
        let (row2, f2) = &t2[&h2];
        if f1 != f2 {
            return Err(ProofError::NotEquivalent);
        }
        let mut row = Vec::new();
        for (s1, s2) in row1.iter().zip(row2) {
            let key = (s1.clone(), s2.clone());
            let j = *idx.entry(key.clone()).or_insert_with(|| {
                pairs.push(key);
                pairs.len() - 1
            });
            row.push(j);
        }
        delta.push(row);
        k += 1;
    }
    let n = pairs.len();
    let labels: Vec<Label> = alphabet.iter().map(|s| Label::Sym(s.clone())).collect();
    let xs = fresh_vars(b, n);
    let templates: Vec<Term> = (0..n)
        .map(|k| {
            let mut summands: Vec<Term> =
                labels.iter().zip(&delta[k]).map(|(a, &j)| Term::prefix(a.clone(), Term::Var(xs[j].clone()))).collect();
            if t1[&pairs[k].0].1 {
                summands.push(Term::One);
            }
            Term::sum_of(summands)
        })
        .collect();
    let names: Vec<ConstName> = (0..n).map(|_| b.ws.fresh.const_name("J", &b.ws.env)).collect();
    let lit_sub = with_vars(&xs, const_terms(&names));
    let bodies = templates.iter().map(|t| b.ws.apply(t, &lit_sub)).collect::<Result<Vec<_>, _>>()?;
    define_all(b, &names, bodies)?;

    let mut sides = Vec::new();
    for side in 0..2 {
        let provable: Vec<Term> =
            pairs.iter().map(|(h1, h2)| Term::Const(if side == 0 { h1.clone() } else { h2.clone() })).collect();
        let sub = with_vars(&xs, provable.clone());
        let mut proofs = Vec::with_capacity(n);
        for k in 0..n {
            let Term::Const(c) = &provable[k] else { unreachable!() };
            let unf = b.unfold(c)?;
            let body = b.rhs(unf).clone();
            let target = b.ws.apply(&templates[k], &sub)?;
            let ac = b.ac_eq(&body, &target)?;
            proofs.push(b.trans(unf, ac)?);
        }
        sides.push(usol(b, &xs, &templates, &names, &provable, &proofs)?[0]);
    }
    let left = b.symm(sides[0]);
    b.trans(left, sides[1])
}

fn run(p: &Process, set: AxiomSet, f: impl FnOnce(&mut Builder, &Term) -> Res<(Term, Sid)>) -> Res<(Process, Proof)> {
    p.env.check_closed()?;
    p.env.check_term(&p.root)?;
    let mut b = Builder::new(p.env.clone(), set);
    let (root, _) = f(&mut b, &p.root)?;
    let env = b.env().restrict_to(&root);
    Ok((Process { root, env }, b.finish()))
}

/// Normal form of a process, with a proof in `set`. `Wg` and `W` need an
/// observationally guarded system; `B` does not.
pub fn to_normal_form(p: &Process, set: AxiomSet) -> Result<(Process, Proof), ProofError> {
    run(p, set, nf_in)
}

/// ε-free normal form of an observationally guarded normal form.
pub fn to_eps_free(p: &Process) -> Result<(Process, Proof), ProofError> {
    run(p, AxiomSet::Wg, eps_free_in)
}

/// Deterministic normal form over `alphabet` (extended by the symbols used).
pub fn to_deterministic(p: &Process, alphabet: &BTreeSet<Symbol>) -> Result<(Process, Proof), ProofError> {
    run(p, AxiomSet::Wg, |b, root| det_in(b, root, alphabet))
}

/// Proof that two deterministic normal forms with equal languages are equal.
pub fn prove_det_equal(p: &Process, q: &Process) -> Result<Proof, ProofError> {
    let (env, r1, r2) = merge_processes(p, q)?;
    let mut b = Builder::new(env, AxiomSet::Wg);
    let (c1, s1) = const_root(&mut b, &r1)?;
    let (c2, s2) = const_root(&mut b, &r2)?;
    let mid = det_equal_in(&mut b, &c1, &c2)?;
    let back = b.symm(s2);
    b.chain(&[s1, mid, back])?;
    Ok(b.finish())
}
