//! Independent proof checker. It shares no code with the proof builders
//! beyond the term types and predicates.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::terms::{free_vars, og, ConstName, Env, Label, Subst, Term, VarName};

use super::{AxiomId, Bindings, Proof, ProofStep, Rule};

/// Why a proof was rejected. `step` is the 1-based index of the first bad
/// step, or `None` when the initial environment itself is malformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    pub step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.reason),
            None => write!(f, "initial environment: {}", self.reason),
        }
    }
}

impl std::error::Error for CheckError {}

pub fn is_valid(proof: &Proof) -> bool {
    check_proof(proof).is_ok()
}

/// Re-validates every step in order. Never panics on malformed input.
pub fn check_proof(proof: &Proof) -> Result<(), CheckError> {
    proof.env0.check_closed().map_err(|e| CheckError { step: None, reason: e.to_string() })?;
    let mut env = proof.env0.clone();
    let mut done: Vec<&ProofStep> = Vec::with_capacity(proof.steps.len());
    for (pos, step) in proof.steps.iter().enumerate() {
        let fail = |reason: String| CheckError { step: Some(step.index), reason };
        if step.index != pos + 1 {
            return Err(CheckError { step: Some(pos + 1), reason: format!("step numbered {}", step.index) });
        }
        for (c, body) in &step.introduced {
            env.define(c.clone(), body.clone()).map_err(|e| fail(format!("introducing {c}: {e}")))?;
        }
        for (c, body) in &step.introduced {
            env.check_term(body).map_err(|e| fail(format!("body of {c}: {e}")))?;
        }
        env.check_term(&step.lhs).map_err(|e| fail(format!("left side: {e}")))?;
        env.check_term(&step.rhs).map_err(|e| fail(format!("right side: {e}")))?;
        let mut premises = Vec::with_capacity(step.premises.len());
        for &i in &step.premises {
            if i == 0 || i > pos {
                return Err(fail(format!("premise {i} does not refer to an earlier step")));
            }
            premises.push(done[i - 1]);
        }
        let mut ck = Checker { env: &env, fv: HashMap::new() };
        ck.step(step, &premises, proof.axiom_set).map_err(fail)?;
        done.push(step);
    }
    Ok(())
}

struct Checker<'a> {
    env: &'a Env,
    fv: HashMap<ConstName, BTreeSet<VarName>>,
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn arity(premises: &[&ProofStep], n: usize) -> Result<(), String> {
    need(premises.len() == n, || format!("expected {n} premises, got {}", premises.len()))
}

impl Checker<'_> {
    fn step(&mut self, s: &ProofStep, prem: &[&ProofStep], set: super::AxiomSet) -> Result<(), String> {
        match (s.rule, &s.bindings) {
            (Rule::Reflexivity, _) => {
                arity(prem, 0)?;
                need(s.lhs == s.rhs, || "sides differ".into())
            }
            (Rule::Symmetry, _) => {
                arity(prem, 1)?;
                need(s.lhs == prem[0].rhs && s.rhs == prem[0].lhs, || "not the premise reversed".into())
            }
            (Rule::Transitivity, _) => {
                arity(prem, 2)?;
                need(prem[0].rhs == prem[1].lhs, || "premises do not chain".into())?;
                need(s.lhs == prem[0].lhs && s.rhs == prem[1].rhs, || "conclusion does not match premises".into())
            }
            (Rule::Substitutivity, Bindings::Context { context, holes }) => {
                arity(prem, holes.len())?;
                let distinct: BTreeSet<&VarName> = holes.iter().collect();
                need(distinct.len() == holes.len(), || "repeated hole".into())?;
                self.env.check_term(context).map_err(|e| format!("context: {e}"))?;
                let left: Subst = holes.iter().zip(prem).map(|(h, p)| (h.clone(), p.lhs.clone())).collect();
                let right: Subst = holes.iter().zip(prem).map(|(h, p)| (h.clone(), p.rhs.clone())).collect();
                need(self.matches(&s.lhs, context, &left), || "left side is not the filled context".into())?;
                need(self.matches(&s.rhs, context, &right), || "right side is not the filled context".into())
            }
            (Rule::Instantiation, Bindings::Subst { subst, .. }) => {
                arity(prem, 1)?;
                for (_, t) in subst.iter() {
                    self.env.check_term(t).map_err(|e| format!("substituted term: {e}"))?;
                }
                need(self.matches(&s.lhs, &prem[0].lhs, subst), || "left side is not the instance".into())?;
                need(self.matches(&s.rhs, &prem[0].rhs, subst), || "right side is not the instance".into())
            }
            (Rule::Recursion, Bindings::Recursion { var, left, right }) => {
                arity(prem, 1)?;
                need(s.lhs == Term::Const(left.clone()) && s.rhs == Term::Const(right.clone()), || {
                    "conclusion must equate the two constants".into()
                })?;
                self.folds(left, &prem[0].lhs, var)?;
                self.folds(right, &prem[0].rhs, var)
            }
            (Rule::Axiom(a), b) => {
                need(set.contains(a), || format!("axiom {a} is not in {set}"))?;
                self.axiom(a, b, s, prem)
            }
            (rule, _) => Err(format!("bindings do not fit rule {rule}")),
        }
    }

    /// `body(c)` is `template{c/var}`.
    fn folds(&mut self, c: &ConstName, template: &Term, var: &VarName) -> Result<(), String> {
        let body = self.env.body(c).ok_or_else(|| format!("undefined constant {c}"))?.clone();
        let rho = Subst::single(var.clone(), Term::Const(c.clone()));
        need(self.matches(&body, template, &rho), || format!("body of {c} is not `{template}` with {c} for ${var}"))
    }

    fn axiom(&mut self, a: AxiomId, b: &Bindings, s: &ProofStep, prem: &[&ProofStep]) -> Result<(), String> {
        match (a, b) {
            (AxiomId::R1, Bindings::Unfold { constant }) => {
                arity(prem, 0)?;
                let body = self.env.body(constant).ok_or_else(|| format!("undefined constant {constant}"))?;
                need(s.lhs == Term::Const(constant.clone()) && &s.rhs == body, || "not an unfolding".into())
            }
            (AxiomId::R2 | AxiomId::R2P, Bindings::Fold { constant, var, template }) => {
                arity(prem, 1)?;
                self.env.check_term(template).map_err(|e| format!("template: {e}"))?;
                need(s.lhs == Term::Const(constant.clone()), || "left side must be the constant".into())?;
                need(s.rhs == prem[0].lhs, || "right side must be the premise's left side".into())?;
                let rho = Subst::single(var.clone(), prem[0].lhs.clone());
                need(self.matches(&prem[0].rhs, template, &rho), || "premise is not a fixed-point equation".into())?;
                self.folds(constant, template, var)?;
                if a == AxiomId::R2 {
                    need(og(template, self.env), || format!("template `{template}` is not guarded"))?;
                }
                Ok(())
            }
            (AxiomId::R3, Bindings::Excise { left, right, var, template }) => {
                arity(prem, 0)?;
                self.env.check_term(template).map_err(|e| format!("template: {e}"))?;
                need(s.lhs == Term::Const(left.clone()) && s.rhs == Term::Const(right.clone()), || {
                    "conclusion must equate the two constants".into()
                })?;
                let looped = Term::sum(Term::prefix(Label::Eps, Term::Var(var.clone())), template.clone());
                self.folds(left, &looped, var)?;
                self.folds(right, template, var)
            }
            (_, Bindings::Subst { subst, label })
                if !matches!(a, AxiomId::R1 | AxiomId::R2 | AxiomId::R2P | AxiomId::R3) =>
            {
                arity(prem, 0)?;
                let (l, r, vars) = schema(a, label.as_ref())?;
                need(subst.domain() == vars, || format!("{a} binds exactly {vars:?}"))?;
                if a == AxiomId::T3 {
                    need(!matches!(subst.get(&var("x")), Some(Term::Const(_))), || {
                        "T3 does not apply to a constant".into()
                    })?;
                }
                need(s.lhs == plug(&l, subst) && s.rhs == plug(&r, subst), || format!("not an instance of {a}"))
            }
            _ => Err(format!("bindings do not fit axiom {a}")),
        }
    }

    fn const_vars(&mut self, c: &ConstName) -> BTreeSet<VarName> {
        if let Some(v) = self.fv.get(c) {
            return v.clone();
        }
        let v = free_vars(&Term::Const(c.clone()), self.env);
        self.fv.insert(c.clone(), v.clone());
        v
    }

    /// `t` is `p` under `rho`, where a constant of `p` open on the domain of
    /// `rho` may be matched by any constant whose body matches coinductively.
    fn matches(&mut self, t: &Term, p: &Term, rho: &Subst) -> bool {
        let mut assumed = HashSet::new();
        self.match_in(t, p, rho, &mut assumed)
    }

    fn match_in(
        &mut self,
        t: &Term,
        p: &Term,
        rho: &Subst,
        assumed: &mut HashSet<(ConstName, ConstName, String)>,
    ) -> bool {
        match (t, p) {
            (_, Term::Var(y)) => match rho.get(y) {
                Some(u) => t == u,
                None => t == p,
            },
            (Term::One, Term::One) | (Term::Zero, Term::Zero) => true,
            (Term::Prefix(a, t1), Term::Prefix(b, p1)) => a == b && self.match_in(t1, p1, rho, assumed),
            (Term::Sum(t1, t2), Term::Sum(p1, p2)) => {
                self.match_in(t1, p1, rho, assumed) && self.match_in(t2, p2, rho, assumed)
            }
            (_, Term::Const(k)) => {
                let local = rho.restrict(&self.const_vars(k));
                if local.is_empty() {
                    return t == p;
                }
                let Term::Const(k2) = t else { return false };
                let key = (k2.clone(), k.clone(), local.to_string());
                if !assumed.insert(key) {
                    return true;
                }
                match (self.env.body(k2), self.env.body(k)) {
                    (Some(b2), Some(b)) => {
                        let (b2, b) = (b2.clone(), b.clone());
                        self.match_in(&b2, &b, &local, assumed)
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }
}

fn var(name: &str) -> VarName {
    VarName::new(name).expect("schema variable")
}

/// Left side, right side and variables of a choice or prefix axiom.
fn schema(a: AxiomId, label: Option<&Label>) -> Result<(Term, Term, BTreeSet<VarName>), String> {
    let (x, y, z) = (Term::Var(var("x")), Term::Var(var("y")), Term::Var(var("z")));
    let vars = |names: &[&str]| names.iter().map(|n| var(n)).collect::<BTreeSet<_>>();
    let label = |required: bool| -> Result<Label, String> {
        match label {
            Some(l) if required => Ok(l.clone()),
            None if !required => Ok(Label::Eps),
            Some(_) => Err(format!("{a} takes no label")),
            None => Err(format!("{a} needs a label")),
        }
    };
    Ok(match a {
        AxiomId::A1 => {
            label(false)?;
            (
                Term::sum(x.clone(), Term::sum(y.clone(), z.clone())),
                Term::sum(Term::sum(x, y), z),
                vars(&["x", "y", "z"]),
            )
        }
        AxiomId::A2 => {
            label(false)?;
            (Term::sum(x.clone(), y.clone()), Term::sum(y, x), vars(&["x", "y"]))
        }
        AxiomId::A3 => {
            label(false)?;
            (Term::sum(x.clone(), Term::Zero), x, vars(&["x"]))
        }
        AxiomId::A4 => {
            label(false)?;
            (Term::sum(x.clone(), x.clone()), x, vars(&["x"]))
        }
        AxiomId::T1 => (Term::prefix(label(true)?, Term::Zero), Term::Zero, BTreeSet::new()),
        AxiomId::T2 => {
            let a = label(true)?;
            (
                Term::prefix(a.clone(), Term::sum(x.clone(), y.clone())),
                Term::sum(Term::prefix(a.clone(), x), Term::prefix(a, y)),
                vars(&["x", "y"]),
            )
        }
        AxiomId::T3 => {
            label(false)?;
            (Term::prefix(Label::Eps, x.clone()), x, vars(&["x"]))
        }
        _ => return Err(format!("{a} is not a schema")),
    })
}

/// Purely syntactic substitution into a constant-free schema.
fn plug(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Prefix(a, p) => Term::prefix(a.clone(), plug(p, s)),
        Term::Sum(l, r) => Term::sum(plug(l, s), plug(r, s)),
        other => other.clone(),
    }
}

/// Axiom schema instance, used by the builders.
pub(super) fn instance(a: AxiomId, label: Option<&Label>, s: &Subst) -> Option<(Term, Term)> {
    let (l, r, _) = schema(a, label).ok()?;
    Some((plug(&l, s), plug(&r, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::AxiomSet;
    use crate::terms::{parse_system, parse_term, ParseMode};

    fn t(src: &str) -> Term {
        parse_term(src, ParseMode::Internal).unwrap()
    }

    fn step(index: usize, lhs: &str, rhs: &str, rule: Rule, premises: Vec<usize>, bindings: Bindings) -> ProofStep {
        ProofStep { index, lhs: t(lhs), rhs: t(rhs), rule, premises, bindings, introduced: vec![] }
    }

    fn env(src: &str) -> Env {
        parse_system(src, ParseMode::Internal).unwrap().env
    }

    #[test]
    fn unfold_then_symmetry() {
        let c = ConstName::new("C").unwrap();
        let p = Proof {
            axiom_set: AxiomSet::B,
            env0: env("C := a.C + 1\n"),
            steps: vec![
                step(1, "C", "a.C + 1", Rule::Axiom(AxiomId::R1), vec![], Bindings::Unfold { constant: c }),
                step(2, "a.C + 1", "C", Rule::Symmetry, vec![1], Bindings::None),
            ],
        };
        assert_eq!(check_proof(&p), Ok(()));
    }

    #[test]
    fn axiom_outside_set_is_rejected() {
        let s: Subst = [(var("x"), t("a.1"))].into_iter().collect();
        let p = Proof {
            axiom_set: AxiomSet::B,
            env0: Env::new(),
            steps: vec![step(
                1,
                "eps.a.1",
                "a.1",
                Rule::Axiom(AxiomId::T3),
                vec![],
                Bindings::Subst { subst: s, label: None },
            )],
        };
        let err = check_proof(&p).unwrap_err();
        assert_eq!(err.step, Some(1));
    }

    #[test]
    fn t3_on_constant_is_rejected() {
        let s: Subst = [(var("x"), t("C"))].into_iter().collect();
        let p = Proof {
            axiom_set: AxiomSet::W,
            env0: env("C := a.C\n"),
            steps: vec![step(
                1,
                "eps.C",
                "C",
                Rule::Axiom(AxiomId::T3),
                vec![],
                Bindings::Subst { subst: s, label: None },
            )],
        };
        assert!(check_proof(&p).unwrap_err().reason.contains("constant"));
    }

    #[test]
    fn copies_match_coinductively() {
        // K is open on x; C is K with D for x, written out by hand.
        let e = env("K := a.K + b.$x\nC := a.C + b.D\nD := 1\n");
        let mut ck = Checker { env: &e, fv: HashMap::new() };
        let rho = Subst::single(var("x"), t("D"));
        assert!(ck.matches(&t("c.C"), &t("c.K"), &rho));
        assert!(!ck.matches(&t("c.D"), &t("c.K"), &rho));
    }

    #[test]
    fn forward_premise_is_rejected() {
        let p = Proof {
            axiom_set: AxiomSet::B,
            env0: Env::new(),
            steps: vec![step(1, "1", "1", Rule::Symmetry, vec![1], Bindings::None)],
        };
        assert_eq!(check_proof(&p).unwrap_err().step, Some(1));
    }
}
