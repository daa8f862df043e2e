//! Equational proofs of language equivalence: axioms, proof objects, an
//! independent checker, and the procedures that build proofs.

mod builder;
mod check;
mod equiv;
mod json;
mod normal;
mod og;
mod solve;

use std::fmt;

use thiserror::Error;

use crate::terms::{ConstName, Env, Label, Subst, Term, TermError, VarName};

pub use check::{check_proof, is_valid, CheckError};
pub use equiv::{prove_equivalence, prove_unfold, unique_solution, EquivVerdict};
pub use json::{proof_from_json, proof_to_json, ProofFormatError};
pub use normal::{prove_det_equal, to_deterministic, to_eps_free, to_normal_form};
pub use og::to_og;

/// Axiom schemata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    /// `x + (y + z) = (x + y) + z`
    A1,
    /// `x + y = y + x`
    A2,
    /// `x + 0 = x`
    A3,
    /// `x + x = x`
    A4,
    /// `α.0 = 0`
    T1,
    /// `α.(x + y) = α.x + α.y`
    T2,
    /// `ε.x = x`, `x` not a constant
    T3,
    /// `C = p` when `C ≐ p`
    R1,
    /// `C = q` when `C ≐ p{C/x}`, `og(p)` and `q = p{q/x}`
    R2,
    /// R2 without the `og` side condition
    R2P,
    /// `C = D` when `C ≐ (ε.x + p){C/x}` and `D ≐ p{D/x}`
    R3,
}

impl AxiomId {
    pub const ALL: [AxiomId; 11] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::T1,
        AxiomId::T2,
        AxiomId::T3,
        AxiomId::R1,
        AxiomId::R2,
        AxiomId::R2P,
        AxiomId::R3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::A1 => "A1",
            AxiomId::A2 => "A2",
            AxiomId::A3 => "A3",
            AxiomId::A4 => "A4",
            AxiomId::T1 => "T1",
            AxiomId::T2 => "T2",
            AxiomId::T3 => "T3",
            AxiomId::R1 => "R1",
            AxiomId::R2 => "R2",
            AxiomId::R2P => "R2P",
            AxiomId::R3 => "R3",
        }
    }

    pub fn parse(s: &str) -> Option<AxiomId> {
        AxiomId::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three axiom systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomSet {
    /// Choice laws, unfolding and folding without the guardedness condition.
    B,
    /// Choice and prefix laws, unfolding and guarded folding.
    Wg,
    /// `Wg` plus excision.
    W,
}

impl AxiomSet {
    pub fn contains(self, a: AxiomId) -> bool {
        use AxiomId::*;
        match self {
            AxiomSet::B => matches!(a, A1 | A2 | A3 | A4 | R1 | R2P),
            AxiomSet::Wg => matches!(a, A1 | A2 | A3 | A4 | T1 | T2 | T3 | R1 | R2),
            AxiomSet::W => matches!(a, A1 | A2 | A3 | A4 | T1 | T2 | T3 | R1 | R2 | R3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxiomSet::B => "B",
            AxiomSet::Wg => "Wg",
            AxiomSet::W => "W",
        }
    }

    pub fn parse(s: &str) -> Option<AxiomSet> {
        [AxiomSet::B, AxiomSet::Wg, AxiomSet::W].into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deduction rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Reflexivity,
    Symmetry,
    Transitivity,
    Substitutivity,
    Recursion,
    Instantiation,
    Axiom(AxiomId),
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Reflexivity => "Reflexivity",
            Rule::Symmetry => "Symmetry",
            Rule::Transitivity => "Transitivity",
            Rule::Substitutivity => "Substitutivity",
            Rule::Recursion => "Recursion",
            Rule::Instantiation => "Instantiation",
            Rule::Axiom(_) => "Axiom",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Axiom(a) => write!(f, "Axiom {a}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Rule-specific data needed to re-validate a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bindings {
    None,
    /// Substitutivity: `lhs = context{t̃/holes}`, `rhs = context{ũ/holes}`,
    /// premise `j` proving `t_j = u_j`.
    Context {
        context: Term,
        holes: Vec<VarName>,
    },
    /// Instantiation, or a choice/prefix axiom instance.
    Subst {
        subst: Subst,
        label: Option<Label>,
    },
    /// Recursion: the premise `t1 = t2` is open on `var`, `left ≐ t1{left/var}`
    /// and `right ≐ t2{right/var}`.
    Recursion {
        var: VarName,
        left: ConstName,
        right: ConstName,
    },
    /// R1.
    Unfold {
        constant: ConstName,
    },
    /// R2 and R2P.
    Fold {
        constant: ConstName,
        var: VarName,
        template: Term,
    },
    /// R3.
    Excise {
        left: ConstName,
        right: ConstName,
        var: VarName,
        template: Term,
    },
}

/// One judgment of a proof, 1-based `index`, premises referring to earlier steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub index: usize,
    pub lhs: Term,
    pub rhs: Term,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub bindings: Bindings,
    pub introduced: Vec<(ConstName, Term)>,
}

/// A flat, checkable sequence of equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub axiom_set: AxiomSet,
    pub env0: Env,
    pub steps: Vec<ProofStep>,
}

impl Proof {
    /// The equality established by the last step.
    pub fn conclusion(&self) -> Option<(&Term, &Term)> {
        self.steps.last().map(|s| (&s.lhs, &s.rhs))
    }

    /// `env0` extended with every introduced constant.
    pub fn final_env(&self) -> Env {
        let mut env = self.env0.clone();
        for step in &self.steps {
            for (c, body) in &step.introduced {
                let _ = env.define(c.clone(), body.clone());
            }
        }
        env
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Axioms used anywhere in the proof.
    pub fn axioms_used(&self) -> std::collections::BTreeSet<AxiomId> {
        self.steps
            .iter()
            .filter_map(|s| match s.rule {
                Rule::Axiom(a) => Some(a),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("process is not observationally guarded")]
    NotOg,
    #[error("process is not in normal form")]
    NotNf,
    #[error("process still has ε-prefixes")]
    NotEpsFree,
    #[error("process is not deterministic over the alphabet: {0}")]
    NotDeterministic(String),
    #[error("processes are not language equivalent")]
    NotEquivalent,
    #[error("supplied terms are not a solution: {0}")]
    NotASolution(String),
    #[error("process has free variables")]
    Open,
    #[error("undefined constant `{0}`")]
    Undefined(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("internal error while building a proof: {0}")]
    Internal(String),
}

#[cfg(test)]
mod tests;
