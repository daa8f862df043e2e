//! Reduced NFAs to systems of equations, one constant per state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::{is_isomorphism, is_reduced, Nfa, StateId};
use crate::semantics::denote;
use crate::terms::{ConstName, Env, Process, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("automaton is not reduced: some state is unreachable from the initial state")]
    NotReduced,
    #[error("state `{0}` has no numeric suffix to name its constant after")]
    Naming(String),
    #[error("invalid constant prefix `{0}`")]
    Prefix(String),
    #[error("compiled system is not isomorphic to its automaton")]
    RoundTrip,
}

/// How constants are numbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Numbering {
    /// Breadth-first order from the initial state, starting at 0.
    #[default]
    Bfs,
    /// The trailing digits of each state's name (`q7` gives `C7`).
    StateSuffix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub prefix: String,
    pub numbering: Numbering,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { prefix: "C".into(), numbering: Numbering::Bfs }
    }
}

/// States in breadth-first order, successors visited by label then name.
fn bfs_order(n: &Nfa) -> Vec<StateId> {
    let mut order = vec![n.initial().clone()];
    let mut seen = BTreeSet::from([n.initial().clone()]);
    let mut queue = VecDeque::from([n.initial().clone()]);
    while let Some(q) = queue.pop_front() {
        let mut next: Vec<(String, &StateId)> = n.successors(&q).map(|(a, t)| (a.to_string(), t)).collect();
        next.sort();
        for (_, t) in next {
            if seen.insert(t.clone()) {
                order.push(t.clone());
                queue.push_back(t.clone());
            }
        }
    }
    order
}

fn state_names(n: &Nfa, opts: &CompileOptions) -> Result<BTreeMap<StateId, (usize, ConstName)>, CompileError> {
    let numbered: Vec<(StateId, usize)> = match opts.numbering {
        Numbering::Bfs => bfs_order(n).into_iter().enumerate().map(|(i, q)| (q, i)).collect(),
        Numbering::StateSuffix => {
            let mut out = Vec::new();
            let mut used = BTreeSet::new();
            for q in n.states() {
                let digits: String = q.chars().rev().take_while(char::is_ascii_digit).collect();
                let index: usize =
                    digits.chars().rev().collect::<String>().parse().map_err(|_| CompileError::Naming(q.clone()))?;
                if !used.insert(index) {
                    return Err(CompileError::Naming(q.clone()));
                }
                out.push((q.clone(), index));
            }
            out
        }
    };
    numbered
        .into_iter()
        .map(|(q, i)| {
            let name = format!("{}{i}", opts.prefix);
            ConstName::new(&name).map(|c| (q, (i, c))).map_err(|_| CompileError::Prefix(opts.prefix.clone()))
        })
        .collect()
}

/// Compiles with `C0..Cn` numbered breadth-first.
pub fn compile(n: &Nfa) -> Result<Process, CompileError> {
    compile_with(n, &CompileOptions::default())
}

/// One constant per state: `0` for a non-final deadlock, `1` for a final one,
/// otherwise the sum of `α.Ck` over the outgoing transitions (by label, then
/// target number) with `+ 1` appended when final.
pub fn compile_with(n: &Nfa, opts: &CompileOptions) -> Result<Process, CompileError> {
    if !is_reduced(n) {
        return Err(CompileError::NotReduced);
    }
    let names = state_names(n, opts)?;
    let mut env = Env::new();
    for (q, (_, c)) in &names {
        let mut edges: Vec<(String, usize, Term)> = n
            .successors(q)
            .map(|(a, t)| {
                let (k, target) = &names[t];
                (a.to_string(), *k, Term::prefix(a.clone(), Term::Const(target.clone())))
            })
            .collect();
        edges.sort_by(|x, y| (&x.0, x.1).cmp(&(&y.0, y.1)));
        let mut summands: Vec<Term> = edges.into_iter().map(|e| e.2).collect();
        if n.is_final(q) {
            summands.push(Term::One);
        }
        let body = if summands.is_empty() { Term::Zero } else { Term::sum_of(summands) };
        env.define(c.clone(), body).expect("compiled bodies are guarded and names distinct");
    }
    let root = Term::Const(names[n.initial()].1.clone());
    Ok(Process { root, env })
}

/// The map from states to their constants, checked to be an isomorphism
/// between the automaton and the semantics of its compilation.
pub fn roundtrip_iso(n: &Nfa) -> Result<BTreeMap<StateId, ConstName>, CompileError> {
    let p = compile(n)?;
    let names = state_names(n, &CompileOptions::default())?;
    let f: BTreeMap<StateId, ConstName> = names.into_iter().map(|(q, (_, c))| (q, c)).collect();
    let as_states: BTreeMap<StateId, StateId> = f.iter().map(|(q, c)| (q.clone(), c.to_string())).collect();
    if is_isomorphism(n, &denote(&p), &as_states) {
        Ok(f)
    } else {
        Err(CompileError::RoundTrip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::from_json;
    use crate::terms::write_system;

    fn a_star_b_star() -> Nfa {
        from_json(
            r#"{"states":["q0","q1"],"alphabet":["a","b"],"initial":"q0","finals":["q1"],
                "transitions":[["q0","a","q0"],["q0","eps","q1"],["q1","b","q1"]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn a_star_b_star_compiles() {
        let p = compile(&a_star_b_star()).unwrap();
        assert_eq!(write_system(&p), "C0 := a.C0 + eps.C1\nC1 := b.C1 + 1\n");
    }

    #[test]
    fn final_deadlock_is_one() {
        let n = from_json(r#"{"states":["s"],"alphabet":[],"initial":"s","finals":["s"],"transitions":[]}"#).unwrap();
        assert_eq!(write_system(&compile(&n).unwrap()), "C0 := 1\n");
    }

    #[test]
    fn unreduced_is_rejected() {
        let n = from_json(r#"{"states":["s","t"],"alphabet":[],"initial":"s","finals":[],"transitions":[]}"#).unwrap();
        assert_eq!(compile(&n), Err(CompileError::NotReduced));
    }

    #[test]
    fn suffix_numbering() {
        let n = a_star_b_star().rename(|q| q.replace('q', "q1"));
        let opts = CompileOptions { prefix: "C".into(), numbering: Numbering::StateSuffix };
        let p = compile_with(&n, &opts).unwrap();
        assert_eq!(write_system(&p), "C10 := a.C10 + eps.C11\nC11 := b.C11 + 1\n");
    }

    #[test]
    fn roundtrip_map() {
        let f = roundtrip_iso(&a_star_b_star()).unwrap();
        assert_eq!(f["q1"].as_str(), "C1");
    }
}
