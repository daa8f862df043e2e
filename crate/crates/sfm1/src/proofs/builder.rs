//! Incremental proof construction over a shared workspace, plus the
//! choice-law lemmas every procedure needs.

use std::cmp::Ordering;

use crate::terms::{ConstName, Env, Fresh, Label, Subst, Term, VarName, Workspace};

use super::check::instance;
use super::{AxiomId, AxiomSet, Bindings, Proof, ProofError, ProofStep, Rule};

/// 1-based step number.
pub(super) type Sid = usize;

pub(super) type Res<T> = Result<T, ProofError>;

pub(super) fn internal(msg: impl Into<String>) -> ProofError {
    ProofError::Internal(msg.into())
}

/// Counter start for generated names, from `SFM1_SEED` when set.
pub(super) fn fresh_from_env() -> Fresh {
    let start = std::env::var("SFM1_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0);
    Fresh::new(start)
}

pub(super) fn hole(i: usize) -> VarName {
    VarName::new_unchecked(&format!("hole%{i}"))
}

pub(super) struct Builder {
    pub ws: Workspace,
    pub set: AxiomSet,
    env0: Env,
    steps: Vec<ProofStep>,
}

impl Builder {
    pub fn new(env0: Env, set: AxiomSet) -> Self {
        Builder { ws: Workspace::new(env0.clone(), fresh_from_env()), set, env0, steps: Vec::new() }
    }

    pub fn finish(mut self) -> Proof {
        // Definitions made after the last step are unused, but keep them so the
        // final environment is complete.
        let rest = self.ws.take_new();
        if let Some(last) = self.steps.last_mut() {
            last.introduced.extend(rest);
        }
        Proof { axiom_set: self.set, env0: self.env0, steps: self.steps }
    }

    pub fn env(&self) -> &Env {
        &self.ws.env
    }

    pub fn body(&self, c: &ConstName) -> Res<Term> {
        self.ws.env.body(c).cloned().ok_or_else(|| ProofError::Undefined(c.to_string()))
    }

    pub fn lhs(&self, i: Sid) -> &Term {
        &self.steps[i - 1].lhs
    }

    pub fn rhs(&self, i: Sid) -> &Term {
        &self.steps[i - 1].rhs
    }

    fn is_refl(&self, i: Sid) -> bool {
        self.lhs(i) == self.rhs(i)
    }

    pub fn define(&mut self, base: &str, body: Term) -> Res<ConstName> {
        Ok(self.ws.define_fresh(base, body)?)
    }

    fn push(&mut self, lhs: Term, rhs: Term, rule: Rule, premises: Vec<Sid>, bindings: Bindings) -> Sid {
        let index = self.steps.len() + 1;
        let introduced = self.ws.take_new();
        self.steps.push(ProofStep { index, lhs, rhs, rule, premises, bindings, introduced });
        index
    }

    pub fn refl(&mut self, t: Term) -> Sid {
        self.push(t.clone(), t, Rule::Reflexivity, vec![], Bindings::None)
    }

    pub fn symm(&mut self, i: Sid) -> Sid {
        if self.is_refl(i) {
            return i;
        }
        let (l, r) = (self.rhs(i).clone(), self.lhs(i).clone());
        self.push(l, r, Rule::Symmetry, vec![i], Bindings::None)
    }

    pub fn trans(&mut self, i: Sid, j: Sid) -> Res<Sid> {
        if self.rhs(i) != self.lhs(j) {
            return Err(internal(format!(
                "cannot chain `{} = {}` with `{} = {}`",
                self.lhs(i),
                self.rhs(i),
                self.lhs(j),
                self.rhs(j)
            )));
        }
        if self.is_refl(j) {
            return Ok(i);
        }
        if self.is_refl(i) {
            return Ok(j);
        }
        let (l, r) = (self.lhs(i).clone(), self.rhs(j).clone());
        Ok(self.push(l, r, Rule::Transitivity, vec![i, j], Bindings::None))
    }

    pub fn chain(&mut self, ids: &[Sid]) -> Res<Sid> {
        let (&first, rest) = ids.split_first().ok_or_else(|| internal("empty chain"))?;
        rest.iter().try_fold(first, |acc, &j| self.trans(acc, j))
    }

    fn require(&self, a: AxiomId) -> Res<()> {
        if self.set.contains(a) {
            Ok(())
        } else {
            Err(internal(format!("axiom {a} is not available in {}", self.set)))
        }
    }

    /// An instance of a choice or prefix law; `vars` are bound to `x`, `y`, `z`.
    pub fn law(&mut self, a: AxiomId, label: Option<Label>, vars: &[Term]) -> Res<Sid> {
        self.require(a)?;
        let subst: Subst =
            ["x", "y", "z"].iter().zip(vars).map(|(n, t)| (VarName::new_unchecked(n), t.clone())).collect();
        let (l, r) = instance(a, label.as_ref(), &subst).ok_or_else(|| internal(format!("bad instance of {a}")))?;
        Ok(self.push(l, r, Rule::Axiom(a), vec![], Bindings::Subst { subst, label }))
    }

    /// `C = body(C)`.
    pub fn unfold(&mut self, c: &ConstName) -> Res<Sid> {
        self.require(AxiomId::R1)?;
        let body = self.body(c)?;
        Ok(self.push(
            Term::Const(c.clone()),
            body,
            Rule::Axiom(AxiomId::R1),
            vec![],
            Bindings::Unfold { constant: c.clone() },
        ))
    }

    /// `C = q` from `premise: q = template{q/x}` when `body(C)` is `template{C/x}`.
    pub fn fold(&mut self, c: &ConstName, x: &VarName, template: &Term, premise: Sid) -> Res<Sid> {
        let a = if self.set.contains(AxiomId::R2) { AxiomId::R2 } else { AxiomId::R2P };
        self.require(a)?;
        let q = self.lhs(premise).clone();
        Ok(self.push(
            Term::Const(c.clone()),
            q,
            Rule::Axiom(a),
            vec![premise],
            Bindings::Fold { constant: c.clone(), var: x.clone(), template: template.clone() },
        ))
    }

    /// `C = D` when `C ≐ (ε.x + template){C/x}` and `D ≐ template{D/x}`.
    pub fn excise(&mut self, c: &ConstName, d: &ConstName, x: &VarName, template: &Term) -> Res<Sid> {
        self.require(AxiomId::R3)?;
        Ok(self.push(
            Term::Const(c.clone()),
            Term::Const(d.clone()),
            Rule::Axiom(AxiomId::R3),
            vec![],
            Bindings::Excise { left: c.clone(), right: d.clone(), var: x.clone(), template: template.clone() },
        ))
    }

    /// `C = D` from an open premise `t1 = t2` with `C ≐ t1{C/x}`, `D ≐ t2{D/x}`.
    pub fn recursion(&mut self, premise: Sid, x: &VarName, c: &ConstName, d: &ConstName) -> Sid {
        self.push(
            Term::Const(c.clone()),
            Term::Const(d.clone()),
            Rule::Recursion,
            vec![premise],
            Bindings::Recursion { var: x.clone(), left: c.clone(), right: d.clone() },
        )
    }

    pub fn instantiate(&mut self, i: Sid, rho: &Subst) -> Res<Sid> {
        let (l, r) = (self.lhs(i).clone(), self.rhs(i).clone());
        let l = self.ws.apply(&l, rho)?;
        let r = self.ws.apply(&r, rho)?;
        if l == r {
            return Ok(self.refl(l));
        }
        Ok(self.push(l, r, Rule::Instantiation, vec![i], Bindings::Subst { subst: rho.clone(), label: None }))
    }

    /// `context{t̃/holes} = context{ũ/holes}` from premises `t_j = u_j`.
    pub fn congruence(&mut self, context: &Term, holes: &[VarName], premises: &[Sid]) -> Res<Sid> {
        let left: Subst = holes.iter().zip(premises).map(|(h, &p)| (h.clone(), self.lhs(p).clone())).collect();
        let right: Subst = holes.iter().zip(premises).map(|(h, &p)| (h.clone(), self.rhs(p).clone())).collect();
        let l = self.ws.apply(context, &left)?;
        let r = self.ws.apply(context, &right)?;
        if l == r {
            return Ok(self.refl(l));
        }
        Ok(self.push(
            l,
            r,
            Rule::Substitutivity,
            premises.to_vec(),
            Bindings::Context { context: context.clone(), holes: holes.to_vec() },
        ))
    }

    /// Single-hole congruence.
    pub fn in_context(&mut self, context: &Term, h: &VarName, premise: Sid) -> Res<Sid> {
        if self.is_refl(premise) {
            let t = self.ws.apply(context, &Subst::single(h.clone(), self.lhs(premise).clone()))?;
            return Ok(self.refl(t));
        }
        self.congruence(context, std::slice::from_ref(h), &[premise])
    }

    /// `α.t = α.u` from `t = u`.
    pub fn under_prefix(&mut self, a: &Label, premise: Sid) -> Res<Sid> {
        self.in_context(&Term::prefix(a.clone(), Term::Var(hole(0))), &hole(0), premise)
    }

    /// Rewrites chosen summands of `t`: `proofs[i]` proves `s_i = s_i'` for the
    /// i-th flattened summand.
    pub fn rewrite_summands(&mut self, t: &Term, proofs: &[Option<Sid>]) -> Res<Sid> {
        let mut holes = Vec::new();
        let mut premises = Vec::new();
        let mut next = 0;
        let context = self.cut(t, proofs, &mut next, &mut holes, &mut premises);
        if premises.is_empty() {
            return Ok(self.refl(t.clone()));
        }
        self.congruence(&context, &holes, &premises)
    }

    fn cut(
        &self,
        t: &Term,
        proofs: &[Option<Sid>],
        next: &mut usize,
        holes: &mut Vec<VarName>,
        premises: &mut Vec<Sid>,
    ) -> Term {
        match t {
            Term::Sum(l, r) => {
                let l = self.cut(l, proofs, next, holes, premises);
                let r = self.cut(r, proofs, next, holes, premises);
                Term::sum(l, r)
            }
            _ => {
                let i = *next;
                *next += 1;
                match proofs.get(i).copied().flatten() {
                    Some(p) if !self.is_refl(p) => {
                        let h = hole(holes.len());
                        holes.push(h.clone());
                        premises.push(p);
                        Term::Var(h)
                    }
                    _ => t.clone(),
                }
            }
        }
    }

    /// `t = u` where the two differ only by associativity, commutativity,
    /// idempotence and `0` summands.
    pub fn ac_eq(&mut self, t: &Term, u: &Term) -> Res<Sid> {
        if t == u {
            return Ok(self.refl(t.clone()));
        }
        let (lt, pt) = self.norm(t)?;
        let (lu, pu) = self.norm(u)?;
        if lt != lu {
            return Err(internal(format!("`{t}` and `{u}` are not equal up to the choice laws")));
        }
        let back = self.symm(pu);
        self.trans(pt, back)
    }

    /// Proof of `t = canon(t)`, with the canonical summand list.
    fn norm(&mut self, t: &Term) -> Res<(Vec<Term>, Sid)> {
        match t {
            Term::Sum(l, r) => {
                let (ll, pl) = self.norm(l)?;
                let (rl, pr) = self.norm(r)?;
                let ctx = Term::sum(Term::Var(hole(0)), Term::Var(hole(1)));
                let s1 = self.congruence(&ctx, &[hole(0), hole(1)], &[pl, pr])?;
                let (m, pm) = self.merge(&ll, &rl)?;
                Ok((m, self.trans(s1, pm)?))
            }
            Term::Zero => Ok((vec![], self.refl(Term::Zero))),
            other => Ok((vec![other.clone()], self.refl(other.clone()))),
        }
    }

    /// `canon(l) + canon(r) = canon(l ∪ r)`.
    fn merge(&mut self, l: &[Term], r: &[Term]) -> Res<(Vec<Term>, Sid)> {
        let lt = canon_term(l);
        match r.len() {
            0 => Ok((l.to_vec(), self.law(AxiomId::A3, None, &[lt])?)),
            1 => self.insert(l, &r[0]),
            m => {
                let init = &r[..m - 1];
                let last = r[m - 1].clone();
                let s1 = self.law(AxiomId::A1, None, &[lt, canon_term(init), last.clone()])?;
                let (mid, pm) = self.merge(l, init)?;
                let ctx = Term::sum(Term::Var(hole(0)), last.clone());
                let s2 = self.in_context(&ctx, &hole(0), pm)?;
                let (out, s3) = self.insert(&mid, &last)?;
                Ok((out, self.chain(&[s1, s2, s3])?))
            }
        }
    }

    /// `canon(n) + s = canon(n ∪ {s})` for a single non-zero summand `s`.
    fn insert(&mut self, n: &[Term], s: &Term) -> Res<(Vec<Term>, Sid)> {
        let nt = canon_term(n);
        match n.len() {
            0 => {
                let a = self.law(AxiomId::A2, None, &[Term::Zero, s.clone()])?;
                let b = self.law(AxiomId::A3, None, std::slice::from_ref(s))?;
                Ok((vec![s.clone()], self.trans(a, b)?))
            }
            1 => match s.cmp(&n[0]) {
                Ordering::Equal => Ok((n.to_vec(), self.law(AxiomId::A4, None, std::slice::from_ref(s))?)),
                Ordering::Greater => Ok((vec![n[0].clone(), s.clone()], self.refl(Term::sum(nt, s.clone())))),
                Ordering::Less => Ok((vec![s.clone(), n[0].clone()], self.law(AxiomId::A2, None, &[nt, s.clone()])?)),
            },
            k => {
                let p = &n[..k - 1];
                let pt = canon_term(p);
                let last = n[k - 1].clone();
                match s.cmp(&last) {
                    Ordering::Greater => {
                        let mut out = n.to_vec();
                        out.push(s.clone());
                        Ok((out, self.refl(Term::sum(nt, s.clone()))))
                    }
                    Ordering::Equal => {
                        let a1 = self.law(AxiomId::A1, None, &[pt.clone(), last.clone(), last.clone()])?;
                        let back = self.symm(a1);
                        let a4 = self.law(AxiomId::A4, None, std::slice::from_ref(&last))?;
                        let ctx = Term::sum(pt, Term::Var(hole(0)));
                        let inner = self.in_context(&ctx, &hole(0), a4)?;
                        Ok((n.to_vec(), self.trans(back, inner)?))
                    }
                    Ordering::Less => {
                        let a1 = self.law(AxiomId::A1, None, &[pt.clone(), last.clone(), s.clone()])?;
                        let s1 = self.symm(a1);
                        let comm = self.law(AxiomId::A2, None, &[last.clone(), s.clone()])?;
                        let ctx = Term::sum(pt.clone(), Term::Var(hole(0)));
                        let s2 = self.in_context(&ctx, &hole(0), comm)?;
                        let s3 = self.law(AxiomId::A1, None, &[pt, s.clone(), last.clone()])?;
                        let (mut p2, pp) = self.insert(p, s)?;
                        let ctx = Term::sum(Term::Var(hole(0)), last.clone());
                        let s4 = self.in_context(&ctx, &hole(0), pp)?;
                        p2.push(last);
                        Ok((p2, self.chain(&[s1, s2, s3, s4])?))
                    }
                }
            }
        }
    }
}

/// Sorted, duplicate-free, zero-free summands.
pub(super) fn canon_list(t: &Term) -> Vec<Term> {
    let mut out: Vec<Term> = t.summands().into_iter().filter(|s| **s != Term::Zero).cloned().collect();
    out.sort();
    out.dedup();
    out
}

pub(super) fn canon_term(list: &[Term]) -> Term {
    Term::sum_of(list.iter().cloned())
}
