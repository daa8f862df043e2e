//! Terms to automata: the reduced NFA of a process, and the two languages of a
//! term open on one variable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::{language_equiv, AutomataError, Nfa, StateId};
use crate::terms::{free_vars, is_final, ConstName, Env, Label, Process, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("term is not open on {0}")]
    NotOpenOn(String),
    #[error("undefined constant `{0}`")]
    Undefined(String),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// Initial moves of a term: a prefix moves to its body, a sum moves as either
/// operand, a constant moves as its body.
pub fn moves(t: &Term, env: &Env) -> Vec<(Label, Term)> {
    fn go(t: &Term, env: &Env, out: &mut Vec<(Label, Term)>) {
        match t {
            Term::Prefix(a, p) => out.push((a.clone(), (**p).clone())),
            Term::Sum(l, r) => {
                go(l, env, out);
                go(r, env, out);
            }
            Term::Const(c) => {
                if let Some(body) = env.body(c) {
                    go(body, env, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, env, &mut out);
    out
}

/// The automaton of a process. States are the terms reachable from the root,
/// named by their rendering; syntactically equal terms are one state.
pub fn denote(p: &Process) -> Nfa {
    let mut seen: BTreeMap<StateId, Term> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let root = p.root.to_string();
    seen.insert(root.clone(), p.root.clone());
    queue.push_back(p.root.clone());
    let mut transitions = BTreeSet::new();
    let mut alphabet = BTreeSet::new();
    let mut finals = BTreeSet::new();
    while let Some(t) = queue.pop_front() {
        let name = t.to_string();
        if is_final(&t, &p.env) {
            finals.insert(name.clone());
        }
        for (a, target) in moves(&t, &p.env) {
            let target_name = target.to_string();
            if let Label::Sym(s) = &a {
                alphabet.insert(s.clone());
            }
            if !seen.contains_key(&target_name) {
                seen.insert(target_name.clone(), target.clone());
                queue.push_back(target);
            }
            transitions.insert((name.clone(), a, target_name));
        }
    }
    Nfa::new(seen.into_keys(), alphabet, root, finals, transitions).expect("semantic automaton is well formed")
}

/// The automata of `L↓` (words reaching a final state) and `Lx` (words reaching
/// the variable state) for a term open on `x`.
pub fn open_languages(p: &Term, x: &VarName, env: &Env) -> Result<(Nfa, Nfa), SemanticsError> {
    if !free_vars(p, env).contains(x) {
        return Err(SemanticsError::NotOpenOn(x.to_string()));
    }
    let n = denote(&Process { root: p.clone(), env: env.clone() });
    let var_state = x.to_string();
    let down = n.with_finals(n.finals().iter().filter(|q| **q != var_state).cloned())?;
    let to_x = n.with_finals(n.states().get(&var_state).cloned())?;
    Ok((down, to_x))
}

/// `(Lx)* · L↓` built by ε-gluing the two automata.
pub fn star_concat(down: &Nfa, to_x: &Nfa) -> Nfa {
    let start = "start".to_string();
    let x = to_x.rename(|q| format!("x/{q}"));
    let d = down.rename(|q| format!("d/{q}"));
    let mut states: BTreeSet<StateId> = x.states().union(d.states()).cloned().collect();
    states.insert(start.clone());
    let mut transitions: BTreeSet<_> = x.transitions().union(d.transitions()).cloned().collect();
    transitions.insert((start.clone(), Label::Eps, x.initial().clone()));
    transitions.insert((start.clone(), Label::Eps, d.initial().clone()));
    for f in x.finals() {
        transitions.insert((f.clone(), Label::Eps, start.clone()));
    }
    let alphabet: BTreeSet<_> = x.alphabet().union(d.alphabet()).cloned().collect();
    Nfa::new(states, alphabet, start, d.finals().clone(), transitions).expect("glued automaton is well formed")
}

/// Checks `L(C) = (Lx)* · L↓` where `p` is the body of `c` with every
/// occurrence of `c` replaced by a variable.
pub fn star_concat_identity_check(c: &ConstName, env: &Env) -> Result<bool, SemanticsError> {
    let body = env.body(c).ok_or_else(|| SemanticsError::Undefined(c.to_string()))?;
    let x = VarName::new("self%0").expect("valid generated variable");
    let p = abstract_const(body, c, &x);
    let whole = denote(&Process { root: Term::Const(c.clone()), env: env.clone() });
    let glued = match open_languages(&p, &x, env) {
        Ok((down, to_x)) => star_concat(&down, &to_x),
        Err(SemanticsError::NotOpenOn(_)) => {
            // No recursion: Lx is empty, so the identity reads L(C) = L(p).
            denote(&Process { root: p, env: env.clone() })
        }
        Err(e) => return Err(e),
    };
    Ok(language_equiv(&whole, &glued).is_equal())
}

fn abstract_const(t: &Term, c: &ConstName, x: &VarName) -> Term {
    match t {
        Term::Const(k) if k == c => Term::Var(x.clone()),
        Term::Prefix(a, p) => Term::prefix(a.clone(), abstract_const(p, c, x)),
        Term::Sum(l, r) => Term::sum(abstract_const(l, c, x), abstract_const(r, c, x)),
        other => other.clone(),
    }
}
