//! Reduction to an observationally guarded system.
//!
//! Constants are eliminated last-first. Each template is kept flat: a sum of
//! symbol prefixes, `1`, and `ε.x` for variables only. At the level of `x_k`
//! a self-loop `ε.x_k` is cut away with excision, and every `ε.G` left by the
//! substitution is spliced open. Unguarded variables then only point to
//! lower levels, so the final system has no ε-cycle.

use std::collections::HashMap;

use crate::terms::{bfs_consts, free_vars, is_og_system, ConstName, Label, Process, Subst, Term, VarName};

use super::builder::{internal, Builder, Res, Sid};
use super::normal::{const_root, require_closed};
use super::solve::syscong;
use super::{AxiomId, AxiomSet, Proof, ProofError};

const SPLICE_LIMIT: usize = 64;

/// `t = arranged(t)` where the summands are flattened, deduplicated, zeros
/// dropped, and `ε.x` (if present) comes first as `ε.x + rest`.
fn flatten(b: &mut Builder, t: &Term, x: &VarName) -> Res<(Term, Sid)> {
    let (summands, proof) = flat_summands(b, t, 0)?;
    let looped = Term::prefix(Label::Eps, Term::Var(x.clone()));
    let arranged = if summands.contains(&looped) {
        let rest: Vec<Term> = summands.into_iter().filter(|s| *s != looped).collect();
        Term::sum(looped, Term::sum_of(rest))
    } else {
        Term::sum_of(summands)
    };
    let flat = b.rhs(proof).clone();
    let ac = b.ac_eq(&flat, &arranged)?;
    Ok((arranged, b.trans(proof, ac)?))
}

/// Flat summands of `t`, with a proof `t = Σ summands` (up to nesting).
fn flat_summands(b: &mut Builder, t: &Term, depth: usize) -> Res<(Vec<Term>, Sid)> {
    if depth > SPLICE_LIMIT {
        return Err(internal("ε-splicing does not terminate"));
    }
    let mut out: Vec<Term> = Vec::new();
    let mut rewrites = Vec::new();
    for s in t.summands() {
        match s {
            Term::Zero => rewrites.push(None),
            Term::Prefix(Label::Eps, p) if !matches!(**p, Term::Var(_)) => {
                let open = match &**p {
                    Term::Const(c) => {
                        let unf = b.unfold(c)?;
                        let under = b.under_prefix(&Label::Eps, unf)?;
                        let body = b.rhs(unf).clone();
                        let t3 = b.law(AxiomId::T3, None, &[body])?;
                        b.trans(under, t3)?
                    }
                    inner => b.law(AxiomId::T3, None, std::slice::from_ref(inner))?,
                };
                let opened = b.rhs(open).clone();
                let (more, inner) = flat_summands(b, &opened, depth + 1)?;
                rewrites.push(Some(b.trans(open, inner)?));
                for m in more {
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
            }
            other => {
                rewrites.push(None);
                if !out.contains(other) {
                    out.push(other.clone());
                }
            }
        }
    }
    let proof = b.rewrite_summands(t, &rewrites)?;
    Ok((out, proof))
}

fn abstract_consts(t: &Term, to_var: &HashMap<ConstName, VarName>) -> Term {
    match t {
        Term::Const(c) => to_var.get(c).map_or_else(|| t.clone(), |x| Term::Var(x.clone())),
        Term::Prefix(a, p) => Term::prefix(a.clone(), abstract_consts(p, to_var)),
        Term::Sum(l, r) => Term::sum(abstract_consts(l, to_var), abstract_consts(r, to_var)),
        other => other.clone(),
    }
}

/// New literal solution for `templates` over `xs`.
fn literal(b: &mut Builder, base: &str, xs: &[VarName], templates: &[Term]) -> Res<Vec<ConstName>> {
    let names: Vec<ConstName> = templates.iter().map(|_| b.ws.fresh.const_name(base, &b.ws.env)).collect();
    let sub: Subst = xs.iter().cloned().zip(names.iter().map(|c| Term::Const(c.clone()))).collect();
    for (c, t) in names.iter().zip(templates) {
        let body = b.ws.apply(t, &sub)?;
        b.ws.define(c.clone(), body)?;
    }
    Ok(names)
}

/// Re-expresses the system `lits` (solving `from`) by the flat `to`, given
/// open proofs `from_i = to_i`. Returns the new literal solution and proofs
/// `lits_i = new_i`.
fn restate(
    b: &mut Builder,
    xs: &[VarName],
    from: &[Term],
    lits: &[ConstName],
    to: &[Term],
    proofs: &[Sid],
) -> Res<(Vec<ConstName>, Vec<Sid>)> {
    if from == to {
        let same = lits.iter().map(|c| b.refl(Term::Const(c.clone()))).collect();
        return Ok((lits.to_vec(), same));
    }
    let fresh = literal(b, "S", xs, to)?;
    let eqs = syscong(b, xs, (from, lits), (to, &fresh), proofs)?;
    Ok((fresh, eqs))
}

pub(super) fn og_in(b: &mut Builder, root: &Term) -> Res<(Term, Sid)> {
    require_closed(b, root)?;
    if is_og_system(root, b.env()) {
        return Ok((root.clone(), b.refl(root.clone())));
    }
    let (c0, p0) = const_root(b, root)?;
    let cs = bfs_consts(&Term::Const(c0.clone()), b.env());
    let n = cs.len();
    let xs: Vec<VarName> = (0..n).map(|_| b.ws.fresh.var_name("x")).collect();
    let to_var: HashMap<ConstName, VarName> = cs.iter().cloned().zip(xs.iter().cloned()).collect();
    let mut templates = Vec::with_capacity(n);
    for c in &cs {
        templates.push(abstract_consts(&b.body(c)?, &to_var));
    }
    let mut flat = Vec::with_capacity(n);
    let mut flat_proofs = Vec::with_capacity(n);
    for (t, x) in templates.iter().zip(&xs) {
        let (f, p) = flatten(b, t, x)?;
        flat.push(f);
        flat_proofs.push(p);
    }
    let (mut lits, eqs) = restate(b, &xs, &templates, &cs, &flat, &flat_proofs)?;
    let mut chain = vec![p0, eqs[0]];
    let mut cur = flat;

    for k in (0..n).rev() {
        let xk = &xs[k];
        let rest = &xs[..k];
        let tau: Subst = rest.iter().cloned().zip(lits[..k].iter().map(|c| Term::Const(c.clone()))).collect();
        let sk = cur[k].clone();
        let h = if free_vars(&sk, b.env()).iter().all(|y| y == xk) {
            lits[k].clone()
        } else {
            let h = b.ws.fresh.const_name("H", &b.ws.env);
            let body = b.ws.apply(&sk, &Subst::single(xk.clone(), Term::Const(h.clone())))?;
            b.ws.define(h.clone(), body)?;
            b.ws.register_copy(&h, &tau, &lits[k]).map_err(|e| internal(e.to_string()))?;
            h
        };
        let looped = Term::prefix(Label::Eps, Term::Var(xk.clone()));
        let (g, hg) = match &sk {
            Term::Sum(l, r) if **l == looped => {
                let g = b.ws.fresh.const_name("G", &b.ws.env);
                let body = b.ws.apply(r, &Subst::single(xk.clone(), Term::Const(g.clone())))?;
                b.ws.define(g.clone(), body)?;
                let hg = b.excise(&h, &g, xk, r)?;
                (g, hg)
            }
            _ => (h.clone(), b.refl(Term::Const(h.clone()))),
        };
        if k == 0 {
            chain.push(hg);
            let proof = b.chain(&chain)?;
            if !is_og_system(&Term::Const(g.clone()), b.env()) {
                return Err(internal("reduction left an ε-cycle"));
            }
            return Ok((Term::Const(g), proof));
        }
        let to_h = Subst::single(xk.clone(), Term::Const(h.clone()));
        let to_g = Subst::single(xk.clone(), Term::Const(g.clone()));
        let mut from = Vec::with_capacity(k);
        let mut to = Vec::with_capacity(k);
        let mut proofs = Vec::with_capacity(k);
        for i in 0..k {
            let swap = b.in_context(&cur[i], xk, hg)?;
            let substituted = b.ws.apply(&cur[i], &to_g)?;
            let (f, fp) = flatten(b, &substituted, &xs[i])?;
            proofs.push(b.trans(swap, fp)?);
            from.push(b.ws.apply(&cur[i], &to_h)?);
            to.push(f);
        }
        let (next, eqs) = restate(b, rest, &from, &lits[..k], &to, &proofs)?;
        chain.push(eqs[0]);
        lits = next;
        cur = to;
    }
    Err(internal("empty system"))
}

/// An observationally guarded system equal to `p` under `W`.
pub fn to_og(p: &Process) -> Result<(Process, Proof), ProofError> {
    p.env.check_closed()?;
    p.env.check_term(&p.root)?;
    let mut b = Builder::new(p.env.clone(), AxiomSet::W);
    let (root, _) = og_in(&mut b, &p.root)?;
    let env = b.env().restrict_to(&root);
    Ok((Process { root, env }, b.finish()))
}
