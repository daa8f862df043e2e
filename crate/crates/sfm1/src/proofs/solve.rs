//! Variable elimination over template systems.
//!
//! A template system is a list of variables `x̃` and templates `p̃` open on
//! them. Its literal solution is a list of constants `L̃` with
//! `body(L_i) = p_i{L̃/x̃}` exactly. Eliminating the last variable defines a
//! constant `H ≐ p_k{H/x_k}` open on the others and registers `L_k` as the
//! copy of `H` under `{L̃'/x̃'}`, so the reduced system keeps `L̃'` as its
//! literal solution.

use crate::terms::{free_vars, ConstName, Subst, Term, VarName};

use super::builder::{internal, Builder, Res, Sid};

fn closed_over(b: &Builder, t: &Term, x: &VarName) -> bool {
    free_vars(t, b.env()).iter().all(|y| y == x)
}

fn as_subst(xs: &[VarName], ts: impl IntoIterator<Item = Term>) -> Subst {
    xs.iter().cloned().zip(ts).collect()
}

fn consts(cs: &[ConstName]) -> Vec<Term> {
    cs.iter().map(|c| Term::Const(c.clone())).collect()
}

/// Defines `H ≐ p{H/x}` and registers `lit` as its copy under `tau`.
fn eliminate(b: &mut Builder, base: &str, p: &Term, x: &VarName, tau: &Subst, lit: &ConstName) -> Res<ConstName> {
    let h = b.ws.fresh.const_name(base, &b.ws.env);
    let body = b.ws.apply(p, &Subst::single(x.clone(), Term::Const(h.clone())))?;
    b.ws.define(h.clone(), body)?;
    b.ws.register_copy(&h, tau, lit).map_err(|e| internal(format!("literal solution mismatch: {e}")))?;
    Ok(h)
}

/// Unique solution: from `proofs[i]: b_i = p_i{b̃/x̃}` derive `L_i = b_i`.
pub(super) fn usol(
    b: &mut Builder,
    xs: &[VarName],
    templates: &[Term],
    lits: &[ConstName],
    provable: &[Term],
    proofs: &[Sid],
) -> Res<Vec<Sid>> {
    let k = xs.len();
    if templates.len() != k || lits.len() != k || provable.len() != k || proofs.len() != k {
        return Err(internal("template system of mismatched sizes"));
    }
    if k == 0 {
        return Ok(vec![]);
    }
    let (xk, pk, lk, bk) = (&xs[k - 1], &templates[k - 1], &lits[k - 1], &provable[k - 1]);
    let rest = &xs[..k - 1];
    let tau_b = as_subst(rest, provable[..k - 1].iter().cloned());
    let tau_l = as_subst(rest, consts(&lits[..k - 1]));

    // `e` stands for x_k in the reduced templates; `pe = e{b̃'}` is proved equal to b_k.
    let (e, pe) = if closed_over(b, pk, xk) {
        let pe = b.fold(lk, xk, pk, proofs[k - 1])?;
        (lk.clone(), pe)
    } else {
        let h = eliminate(b, "H", pk, xk, &tau_l, lk)?;
        let hb = match b.ws.apply(&Term::Const(h.clone()), &tau_b)? {
            Term::Const(c) => c,
            other => return Err(internal(format!("copy of a constant is `{other}`"))),
        };
        let template = b.ws.apply(pk, &tau_b)?;
        (h, b.fold(&hb, xk, &template, proofs[k - 1])?)
    };
    let back = b.symm(pe);

    let mut reduced = Vec::with_capacity(k - 1);
    let mut reduced_proofs = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let ctx = b.ws.apply(&templates[i], &tau_b)?;
        let swap = b.in_context(&ctx, xk, back)?;
        reduced_proofs.push(b.trans(proofs[i], swap)?);
        reduced.push(b.ws.apply(&templates[i], &Subst::single(xk.clone(), Term::Const(e.clone())))?);
    }
    let mut out = usol(b, rest, &reduced, &lits[..k - 1], &provable[..k - 1], &reduced_proofs)?;

    if e == *lk {
        out.push(pe);
        return Ok(out);
    }
    // b_k = p_k{b̃} = p_k{L̃', b_k}, then fold into L_k.
    let ctx = b.ws.apply(pk, &Subst::single(xk.clone(), bk.clone()))?;
    let flips: Vec<Sid> = out.iter().map(|&s| b.symm(s)).collect();
    let swap = b.congruence(&ctx, rest, &flips)?;
    let premise = b.trans(proofs[k - 1], swap)?;
    let template = b.ws.apply(pk, &tau_l)?;
    out.push(b.fold(lk, xk, &template, premise)?);
    Ok(out)
}

/// Congruence of systems: from open proofs `t_i = u_i` derive `L_i = M_i`,
/// where `L̃` solves `t̃` and `M̃` solves `ũ` literally. Needs no guardedness.
pub(super) fn syscong(
    b: &mut Builder,
    xs: &[VarName],
    left: (&[Term], &[ConstName]),
    right: (&[Term], &[ConstName]),
    proofs: &[Sid],
) -> Res<Vec<Sid>> {
    let k = xs.len();
    let (ts, ls) = left;
    let (us, ms) = right;
    if ts.len() != k || ls.len() != k || us.len() != k || ms.len() != k || proofs.len() != k {
        return Err(internal("template systems of mismatched sizes"));
    }
    if k == 0 {
        return Ok(vec![]);
    }
    let xk = &xs[k - 1];
    let rest = &xs[..k - 1];
    let tau_l = as_subst(rest, consts(&ls[..k - 1]));
    let tau_m = as_subst(rest, consts(&ms[..k - 1]));
    let h = if closed_over(b, &ts[k - 1], xk) {
        ls[k - 1].clone()
    } else {
        eliminate(b, "H", &ts[k - 1], xk, &tau_l, &ls[k - 1])?
    };
    let g = if closed_over(b, &us[k - 1], xk) {
        ms[k - 1].clone()
    } else {
        eliminate(b, "G", &us[k - 1], xk, &tau_m, &ms[k - 1])?
    };
    let hg = b.recursion(proofs[k - 1], xk, &h, &g);

    let mut t2 = Vec::with_capacity(k - 1);
    let mut u2 = Vec::with_capacity(k - 1);
    let mut reduced_proofs = Vec::with_capacity(k - 1);
    let to_h = Subst::single(xk.clone(), Term::Const(h.clone()));
    let to_g = Subst::single(xk.clone(), Term::Const(g.clone()));
    for i in 0..k - 1 {
        let s1 = b.instantiate(proofs[i], &to_h)?;
        let s2 = b.in_context(&us[i], xk, hg)?;
        reduced_proofs.push(b.trans(s1, s2)?);
        t2.push(b.ws.apply(&ts[i], &to_h)?);
        u2.push(b.ws.apply(&us[i], &to_g)?);
    }
    let mut out = syscong(b, rest, (&t2, &ls[..k - 1]), (&u2, &ms[..k - 1]), &reduced_proofs)?;

    // L_k = H{L̃'} = G{L̃'} = G{M̃'} = M_k.
    let s1 = b.instantiate(hg, &tau_l)?;
    let s2 = b.congruence(&Term::Const(g.clone()), rest, &out)?;
    out.push(b.trans(s1, s2)?);
    Ok(out)
}
