//! Abstract syntax of SFM1 terms, systems of equations, and the syntactic
//! predicates and measures defined over them.

mod parse;
mod predicates;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse_system, parse_term, write_system, ParseError, ParseMode, System};
pub use predicates::{consts, count_unguarded, free_vars, is_final, is_og_system, len, nf, og};
pub use subst::{substitute, Fresh, Subst, Workspace};

/// Reserved spelling of the silent label.
pub const EPS_TEXT: &str = "eps";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("invalid constant name `{0}`")]
    InvalidConstName(String),
    #[error("invalid variable name `{0}`")]
    InvalidVarName(String),
    #[error("sort violation: {0}")]
    SortViolation(String),
    #[error("undefined constant `{0}`")]
    Undefined(String),
    #[error("constant `{0}` defined twice")]
    Redefined(String),
}

/// An alphabet symbol: a lowercase identifier other than `eps`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, TermError> {
        if is_symbol_text(name) {
            Ok(Symbol(name.to_string()))
        } else {
            Err(TermError::InvalidSymbol(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_symbol_text(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    s != EPS_TEXT && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A prefix label: either the silent move or an alphabet symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Eps,
    Sym(Symbol),
}

impl Label {
    pub fn sym(name: &str) -> Result<Self, TermError> {
        Symbol::new(name).map(Label::Sym)
    }

    pub fn parse(text: &str) -> Result<Self, TermError> {
        if text == EPS_TEXT {
            Ok(Label::Eps)
        } else {
            Label::sym(text)
        }
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Label::Eps)
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Label::Eps => None,
            Label::Sym(s) => Some(s),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Eps => f.write_str(EPS_TEXT),
            Label::Sym(s) => s.fmt(f),
        }
    }
}

/// Name of a process constant. User names start with an uppercase letter;
/// generated names additionally carry a `%<n>` suffix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstName(Arc<str>);

impl ConstName {
    pub fn new(name: &str) -> Result<Self, TermError> {
        if parse::is_const_text(name, ParseMode::Internal) {
            Ok(ConstName(name.into()))
        } else {
            Err(TermError::InvalidConstName(name.to_string()))
        }
    }

    pub(crate) fn new_unchecked(name: &str) -> Self {
        ConstName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Name without any generated `%<n>` suffix.
    pub fn base(&self) -> &str {
        match self.0.find('%') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl fmt::Display for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a variable, stored without the leading `$`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn new(name: &str) -> Result<Self, TermError> {
        let name = name.strip_prefix('$').unwrap_or(name);
        if parse::is_var_text(name, ParseMode::Internal) {
            Ok(VarName(name.into()))
        } else {
            Err(TermError::InvalidVarName(name.to_string()))
        }
    }

    pub(crate) fn new_unchecked(name: &str) -> Self {
        VarName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.0)
    }
}

/// SFM1 term. Equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    One,
    Zero,
    Prefix(Label, Arc<Term>),
    Sum(Arc<Term>, Arc<Term>),
    Const(ConstName),
    Var(VarName),
}

impl Term {
    pub fn prefix(label: Label, body: Term) -> Term {
        Term::Prefix(label, Arc::new(body))
    }

    pub fn sum(left: Term, right: Term) -> Term {
        Term::Sum(Arc::new(left), Arc::new(right))
    }

    pub fn constant(name: &ConstName) -> Term {
        Term::Const(name.clone())
    }

    pub fn var(name: &VarName) -> Term {
        Term::Var(name.clone())
    }

    /// Left-nested sum of the given summands; `0` when empty.
    pub fn sum_of<I: IntoIterator<Item = Term>>(summands: I) -> Term {
        let mut iter = summands.into_iter();
        let Some(first) = iter.next() else {
            return Term::Zero;
        };
        iter.fold(first, Term::sum)
    }

    /// Category s: no bare constant or variable at the top or as a sum operand.
    pub fn is_guarded(&self) -> bool {
        match self {
            Term::One | Term::Zero | Term::Prefix(..) => true,
            Term::Sum(l, r) => l.is_guarded() && r.is_guarded(),
            Term::Const(_) | Term::Var(_) => false,
        }
    }

    /// No constant is used as a sum operand, at any depth. Variables may be
    /// summands in open terms; a substitution must not put a constant there.
    pub fn is_well_sorted(&self) -> bool {
        match self {
            Term::One | Term::Zero | Term::Const(_) | Term::Var(_) => true,
            Term::Prefix(_, p) => p.is_well_sorted(),
            Term::Sum(l, r) => {
                !matches!(**l, Term::Const(_))
                    && !matches!(**r, Term::Const(_))
                    && l.is_well_sorted()
                    && r.is_well_sorted()
            }
        }
    }

    pub fn as_const(&self) -> Option<&ConstName> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Constants occurring syntactically in the term (bodies not entered).
    pub fn const_refs(&self, out: &mut BTreeSet<ConstName>) {
        match self {
            Term::One | Term::Zero | Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::Prefix(_, p) => p.const_refs(out),
            Term::Sum(l, r) => {
                l.const_refs(out);
                r.const_refs(out);
            }
        }
    }

    /// Variables occurring syntactically in the term (bodies not entered).
    pub fn var_refs(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Term::One | Term::Zero | Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Prefix(_, p) => p.var_refs(out),
            Term::Sum(l, r) => {
                l.var_refs(out);
                r.var_refs(out);
            }
        }
    }

    /// Prefix labels used anywhere in the term.
    pub fn labels(&self, out: &mut BTreeSet<Label>) {
        match self {
            Term::Prefix(a, p) => {
                out.insert(a.clone());
                p.labels(out);
            }
            Term::Sum(l, r) => {
                l.labels(out);
                r.labels(out);
            }
            _ => {}
        }
    }

    /// Flattened summands of a (possibly nested) sum.
    pub fn summands(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            match t {
                Term::Sum(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Prefix(_, p) => 1 + p.size(),
            Term::Sum(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }
}

/// A system of equations: constant names mapped to guarded bodies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    defs: BTreeMap<ConstName, Term>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Adds a definition; the body must be guarded and the name unused.
    pub fn define(&mut self, name: ConstName, body: Term) -> Result<(), TermError> {
        if !body.is_guarded() || !body.is_well_sorted() {
            return Err(TermError::SortViolation(format!("body of {name} must be a guarded term, got `{body}`")));
        }
        if self.defs.contains_key(&name) {
            return Err(TermError::Redefined(name.to_string()));
        }
        self.defs.insert(name, body);
        Ok(())
    }

    pub fn body(&self, name: &ConstName) -> Option<&Term> {
        self.defs.get(name)
    }

    pub fn contains(&self, name: &ConstName) -> bool {
        self.defs.contains_key(name)
    }

    pub fn contains_str(&self, name: &str) -> bool {
        self.defs.contains_key(&ConstName::new_unchecked(name))
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConstName, &Term)> {
        self.defs.iter()
    }

    /// Checks that every constant mentioned in a body is defined.
    pub fn check_closed(&self) -> Result<(), TermError> {
        for body in self.defs.values() {
            let mut refs = BTreeSet::new();
            body.const_refs(&mut refs);
            if let Some(missing) = refs.into_iter().find(|c| !self.contains(c)) {
                return Err(TermError::Undefined(missing.to_string()));
            }
        }
        Ok(())
    }

    /// Checks that the term is well sorted and only mentions defined constants.
    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        if !t.is_well_sorted() {
            return Err(TermError::SortViolation(format!("`{t}`")));
        }
        let mut refs = BTreeSet::new();
        t.const_refs(&mut refs);
        match refs.into_iter().find(|c| !self.contains(c)) {
            Some(missing) => Err(TermError::Undefined(missing.to_string())),
            None => Ok(()),
        }
    }

    /// Restriction to the constants reachable from `t`.
    pub fn restrict_to(&self, t: &Term) -> Env {
        let reach = consts(t, self);
        Env {
            defs: self.defs.iter().filter(|(k, _)| reach.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }
}

/// A term together with the system of equations defining its constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub root: Term,
    pub env: Env,
}

impl Process {
    pub fn new(root: Term, env: Env) -> Result<Self, TermError> {
        env.check_term(&root)?;
        env.check_closed()?;
        Ok(Process { root, env })
    }

    /// Free variables of the root and of every reachable body.
    pub fn vars(&self) -> BTreeSet<VarName> {
        free_vars(&self.root, &self.env)
    }

    pub fn is_closed(&self) -> bool {
        self.vars().is_empty()
    }

    /// Constants reachable from the root, in breadth-first order of first reference.
    pub fn constants_bfs(&self) -> Vec<ConstName> {
        bfs_consts(&self.root, &self.env)
    }
}

/// Constants reachable from `t`, in breadth-first order of first syntactic reference.
pub fn bfs_consts(t: &Term, env: &Env) -> Vec<ConstName> {
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    let push_refs = |t: &Term, seen: &mut BTreeSet<ConstName>, queue: &mut std::collections::VecDeque<ConstName>| {
        for c in ordered_const_refs(t) {
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    };
    push_refs(t, &mut seen, &mut queue);
    while let Some(c) = queue.pop_front() {
        if let Some(body) = env.body(&c) {
            push_refs(body, &mut seen, &mut queue);
        }
        order.push(c);
    }
    order
}

/// Constant references in left-to-right order of occurrence, without duplicates.
pub fn ordered_const_refs(t: &Term) -> Vec<ConstName> {
    fn go(t: &Term, out: &mut Vec<ConstName>) {
        match t {
            Term::Const(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            Term::Prefix(_, p) => go(p, out),
            Term::Sum(l, r) => {
                go(l, out);
                go(r, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}
