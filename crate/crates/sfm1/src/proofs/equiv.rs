//! Top-level proof procedures: unfolding, unique solutions, and full
//! equivalence proofs.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{language_equiv, LangVerdict, Witness};
use crate::semantics::denote;
use crate::terms::{bfs_consts, is_og_system, ConstName, Env, Fresh, Label, Process, Subst, Symbol, Term, VarName};

use super::builder::{internal, Builder, Res};
use super::normal::{const_root, det_equal_in, det_in, eps_free_in, nf_in, require_closed};
use super::og::og_in;
use super::solve::usol;
use super::{AxiomSet, Proof, ProofError};

/// Outcome of [`prove_equivalence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Equal(Proof),
    Distinct(Witness),
}

fn rename_consts(t: &Term, map: &BTreeMap<ConstName, ConstName>) -> Term {
    match t {
        Term::Const(c) => Term::Const(map.get(c).cloned().unwrap_or_else(|| c.clone())),
        Term::Prefix(a, p) => Term::prefix(a.clone(), rename_consts(p, map)),
        Term::Sum(l, r) => Term::sum(rename_consts(l, map), rename_consts(r, map)),
        other => other.clone(),
    }
}

/// One environment holding both processes. Constants of `q` that clash with
/// a differently defined constant of `p` are renamed.
pub(super) fn merge_processes(p: &Process, q: &Process) -> Res<(Env, Term, Term)> {
    let mut rename: BTreeMap<ConstName, ConstName> = BTreeMap::new();
    let mut fresh = Fresh::default();
    loop {
        let mut changed = false;
        for (c, body) in q.env.iter() {
            if rename.contains_key(c) || !p.env.contains(c) {
                continue;
            }
            if p.env.body(c) != Some(&rename_consts(body, &rename)) {
                let taken = |n: &ConstName| p.env.contains(n) || q.env.contains(n) || rename.values().any(|v| v == n);
                let name = loop {
                    let n = fresh.const_name(c.base(), &p.env);
                    if !taken(&n) {
                        break n;
                    }
                };
                rename.insert(c.clone(), name);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut env = p.env.clone();
    for (c, body) in q.env.iter() {
        let name = rename.get(c).unwrap_or(c);
        if !env.contains(name) {
            env.define(name.clone(), rename_consts(body, &rename))?;
        }
    }
    Ok((env, p.root.clone(), rename_consts(&q.root, &rename)))
}

/// The unfolding `C = body(C)` as a one-step proof.
pub fn prove_unfold(c: &ConstName, env: &Env) -> Result<Proof, ProofError> {
    env.check_closed()?;
    let mut b = Builder::new(env.clone(), AxiomSet::Wg);
    b.unfold(c)?;
    Ok(b.finish())
}

/// Proves `literal_i = solution_i` for every `i`, where
/// `body(literal_i) = templates_i{literal/vars}` and each `solution_i` equals
/// `templates_i{solution/vars}` up to unfolding its head constant and the
/// choice laws. Returns the proof and the steps holding each equality.
pub fn unique_solution(
    env: &Env,
    vars: &[VarName],
    templates: &[Term],
    literal: &[ConstName],
    solution: &[Term],
) -> Result<(Proof, Vec<usize>), ProofError> {
    let n = vars.len();
    if templates.len() != n || literal.len() != n || solution.len() != n {
        return Err(ProofError::NotASolution("lists of different lengths".into()));
    }
    env.check_closed()?;
    let mut b = Builder::new(env.clone(), AxiomSet::Wg);
    for t in solution {
        b.env().check_term(t)?;
        require_closed(&b, t)?;
    }
    let lit_sub: Subst = vars.iter().cloned().zip(literal.iter().map(|c| Term::Const(c.clone()))).collect();
    for (c, t) in literal.iter().zip(templates) {
        let want = b.ws.apply(t, &lit_sub)?;
        if b.env().body(c) != Some(&want) {
            return Err(ProofError::NotASolution(format!("{c} is not defined by its template")));
        }
        if !is_og_system(&Term::Const(c.clone()), b.env()) {
            return Err(ProofError::NotOg);
        }
    }
    if !solution.iter().all(|t| is_og_system(t, b.env())) {
        return Err(ProofError::NotOg);
    }
    let sol_sub: Subst = vars.iter().cloned().zip(solution.iter().cloned()).collect();
    let mut proofs = Vec::with_capacity(n);
    for (t, s) in templates.iter().zip(solution) {
        let target = b.ws.apply(t, &sol_sub)?;
        let attempt = match s {
            Term::Const(c) => b.unfold(c).and_then(|u| {
                let body = b.rhs(u).clone();
                let ac = b.ac_eq(&body, &target)?;
                b.trans(u, ac)
            }),
            other => b.ac_eq(other, &target),
        };
        proofs.push(attempt.map_err(|_| ProofError::NotASolution(format!("`{s}` does not satisfy `{t}`")))?);
    }
    let steps = usol(&mut b, vars, templates, literal, solution, &proofs)?;
    Ok((b.finish(), steps))
}

fn symbols(p: &Process) -> BTreeSet<Symbol> {
    let mut labels = BTreeSet::new();
    p.root.labels(&mut labels);
    for c in bfs_consts(&p.root, &p.env) {
        if let Some(body) = p.env.body(&c) {
            body.labels(&mut labels);
        }
    }
    labels
        .into_iter()
        .filter_map(|l| match l {
            Label::Sym(s) => Some(s),
            Label::Eps => None,
        })
        .collect()
}

/// Decides language equivalence; when equal, returns a proof in `W` ending
/// in `p.root = q.root`, otherwise a shortest distinguishing word.
pub fn prove_equivalence(p: &Process, q: &Process) -> Result<EquivVerdict, ProofError> {
    for side in [p, q] {
        side.env.check_closed()?;
        side.env.check_term(&side.root)?;
        if !side.is_closed() {
            return Err(ProofError::Open);
        }
    }
    if let LangVerdict::Distinct(w) = language_equiv(&denote(p), &denote(q)) {
        return Ok(EquivVerdict::Distinct(w));
    }
    let (env, r1, r2) = merge_processes(p, q)?;
    let mut alphabet = symbols(p);
    alphabet.extend(symbols(q));
    let mut b = Builder::new(env, AxiomSet::W);
    let mut ends = Vec::new();
    for root in [&r1, &r2] {
        let (o, s_og) = og_in(&mut b, root)?;
        let (n, s_nf) = nf_in(&mut b, &o)?;
        let (e, s_ef) = eps_free_in(&mut b, &n)?;
        let (d, s_det) = det_in(&mut b, &e, &alphabet)?;
        let (c, s_c) = const_root(&mut b, &d)?;
        let whole = b.chain(&[s_og, s_nf, s_ef, s_det, s_c])?;
        ends.push((c, whole));
    }
    let mid = det_equal_in(&mut b, &ends[0].0, &ends[1].0).map_err(|e| match e {
        ProofError::NotEquivalent => internal("normal forms disagree on a language the automata call equal"),
        other => other,
    })?;
    let back = b.symm(ends[1].1);
    b.chain(&[ends[0].1, mid, back])?;
    Ok(EquivVerdict::Equal(b.finish()))
}
