//! Finite automata with ε-moves and the semantic deciders over them.

mod equiv;
mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::terms::{Label, Symbol};

pub use equiv::{bisimilar, determinize, is_isomorphism, isomorphic, language_equiv, Dfa, LangVerdict, ISO_LIMIT};
pub use io::{from_json, to_dot, to_json};

pub type StateId = String;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("symbol `{0}` is not in the alphabet")]
    ForeignSymbol(String),
    #[error("isomorphism search limited to {limit} states, got {states}")]
    TooLarge { states: usize, limit: usize },
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// A word over the alphabet that tells two automata apart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness(pub Vec<Symbol>);

impl Witness {
    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.0.iter().all(|s| s.as_str().len() == 1) { "" } else { " " };
        let parts: Vec<&str> = self.0.iter().map(Symbol::as_str).collect();
        f.write_str(&parts.join(sep))
    }
}

/// Nondeterministic finite automaton with ε-transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    states: BTreeSet<StateId>,
    alphabet: BTreeSet<Symbol>,
    transitions: BTreeSet<(StateId, Label, StateId)>,
    finals: BTreeSet<StateId>,
    initial: StateId,
}

impl Nfa {
    /// Builds an automaton, checking that every endpoint, final and the initial
    /// state are states and that every symbol label is in the alphabet.
    pub fn new(
        states: impl IntoIterator<Item = StateId>,
        alphabet: impl IntoIterator<Item = Symbol>,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, Label, StateId)>,
    ) -> Result<Self, AutomataError> {
        let nfa = Nfa {
            states: states.into_iter().collect(),
            alphabet: alphabet.into_iter().collect(),
            transitions: transitions.into_iter().collect(),
            finals: finals.into_iter().collect(),
            initial,
        };
        nfa.validate()?;
        Ok(nfa)
    }

    fn validate(&self) -> Result<(), AutomataError> {
        let known = |q: &StateId| {
            if self.states.contains(q) {
                Ok(())
            } else {
                Err(AutomataError::UnknownState(q.clone()))
            }
        };
        known(&self.initial)?;
        self.finals.iter().try_for_each(known)?;
        for (src, label, dst) in &self.transitions {
            known(src)?;
            known(dst)?;
            if let Label::Sym(a) = label {
                if !self.alphabet.contains(a) {
                    return Err(AutomataError::ForeignSymbol(a.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn transitions(&self) -> &BTreeSet<(StateId, Label, StateId)> {
        &self.transitions
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn initial(&self) -> &StateId {
        &self.initial
    }

    pub fn is_final(&self, q: &str) -> bool {
        self.finals.contains(q)
    }

    /// Outgoing transitions of `q` as (label, target) pairs.
    pub fn successors<'a>(&'a self, q: &'a str) -> impl Iterator<Item = (&'a Label, &'a StateId)> + 'a {
        self.transitions.iter().filter(move |(s, _, _)| s == q).map(|(_, a, t)| (a, t))
    }

    /// The same automaton with its alphabet extended by `extra`.
    pub fn with_alphabet(&self, extra: &BTreeSet<Symbol>) -> Nfa {
        let mut out = self.clone();
        out.alphabet.extend(extra.iter().cloned());
        out
    }

    /// The same automaton with a different final set.
    pub fn with_finals(&self, finals: impl IntoIterator<Item = StateId>) -> Result<Nfa, AutomataError> {
        let out = Nfa { finals: finals.into_iter().collect(), ..self.clone() };
        out.validate()?;
        Ok(out)
    }

    /// States renamed through `f`, which must be injective on the state set.
    pub fn rename(&self, f: impl Fn(&str) -> StateId) -> Nfa {
        Nfa {
            states: self.states.iter().map(|q| f(q)).collect(),
            alphabet: self.alphabet.clone(),
            transitions: self.transitions.iter().map(|(s, a, t)| (f(s), a.clone(), f(t))).collect(),
            finals: self.finals.iter().map(|q| f(q)).collect(),
            initial: f(&self.initial),
        }
    }

    fn adjacency(&self) -> BTreeMap<&str, Vec<(&Label, &str)>> {
        let mut adj: BTreeMap<&str, Vec<(&Label, &str)>> = BTreeMap::new();
        for (s, a, t) in &self.transitions {
            adj.entry(s.as_str()).or_default().push((a, t.as_str()));
        }
        adj
    }
}

/// States reachable from `q` by any sequence of transitions, `q` included.
pub fn reach(n: &Nfa, q: &str) -> Result<BTreeSet<StateId>, AutomataError> {
    if !n.states.contains(q) {
        return Err(AutomataError::UnknownState(q.to_string()));
    }
    let adj = n.adjacency();
    let mut seen = BTreeSet::from([q.to_string()]);
    let mut queue = VecDeque::from([q]);
    while let Some(s) = queue.pop_front() {
        for (_, t) in adj.get(s).into_iter().flatten() {
            if seen.insert(t.to_string()) {
                queue.push_back(t);
            }
        }
    }
    Ok(seen)
}

/// Every state is reachable from the initial state.
pub fn is_reduced(n: &Nfa) -> bool {
    reach(n, &n.initial).map(|r| r.len() == n.states.len()).unwrap_or(false)
}

/// Least superset of `set` closed under ε-transitions.
pub fn epsilon_closure(n: &Nfa, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    let mut out = set.clone();
    let mut stack: Vec<StateId> = set.iter().cloned().collect();
    while let Some(s) = stack.pop() {
        for (a, t) in n.successors(&s) {
            if a.is_eps() && out.insert(t.clone()) {
                stack.push(t.clone());
            }
        }
    }
    out
}

/// States reached from `set` by one `a`-transition, before closure.
pub(crate) fn step(n: &Nfa, set: &BTreeSet<StateId>, a: &Symbol) -> BTreeSet<StateId> {
    n.transitions
        .iter()
        .filter(|(s, l, _)| l.symbol() == Some(a) && set.contains(s))
        .map(|(_, _, t)| t.clone())
        .collect()
}

/// Membership of `word` in the recognized language.
pub fn accepts(n: &Nfa, word: &[Symbol]) -> Result<bool, AutomataError> {
    if let Some(a) = word.iter().find(|a| !n.alphabet.contains(*a)) {
        return Err(AutomataError::ForeignSymbol(a.to_string()));
    }
    let mut current = epsilon_closure(n, &BTreeSet::from([n.initial.clone()]));
    for a in word {
        current = epsilon_closure(n, &step(n, &current, a));
    }
    Ok(current.iter().any(|q| n.finals.contains(q)))
}
