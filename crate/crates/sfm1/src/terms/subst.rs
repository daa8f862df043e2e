//! Substitution of terms for variables, including through constant bodies.
//!
//! A constant whose body mentions a substituted variable is replaced by a copy
//! defined by the substituted body. Copies are canonical within a
//! [`Workspace`]: the same constant under the same effective substitution
//! always yields the same copy, and substituting into a copy is the same as
//! substituting the composed map into the original.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{free_vars, ConstName, Env, Term, TermError, VarName};

/// A finite map from variables to terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subst(BTreeMap<VarName, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn single(x: VarName, t: Term) -> Self {
        Subst(BTreeMap::from([(x, t)]))
    }

    pub fn insert(&mut self, x: VarName, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn get(&self, x: &VarName) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn contains(&self, x: &VarName) -> bool {
        self.0.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<VarName> {
        self.0.keys().cloned().collect()
    }

    /// Restriction to `vars`, dropping entries that map a variable to itself.
    pub fn restrict(&self, vars: &BTreeSet<VarName>) -> Subst {
        Subst(
            self.0
                .iter()
                .filter(|(x, t)| vars.contains(*x) && !matches!(t, Term::Var(y) if y == *x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(VarName, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (VarName, Term)>>(iter: I) -> Self {
        Subst(iter.into_iter().collect())
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}/{x}")?;
        }
        f.write_str("}")
    }
}

/// Generator of `<base>%<n>` names from a monotone counter.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    next: u64,
}

impl Fresh {
    pub fn new(start: u64) -> Self {
        Fresh { next: start }
    }

    /// A constant name not defined in `env`.
    pub fn const_name(&mut self, base: &str, env: &Env) -> ConstName {
        loop {
            let name = ConstName::new_unchecked(&format!("{base}%{}", self.next));
            self.next += 1;
            if !env.contains(&name) {
                return name;
            }
        }
    }

    pub fn var_name(&mut self, base: &str) -> VarName {
        let name = VarName::new_unchecked(&format!("{base}%{}", self.next));
        self.next += 1;
        name
    }
}

/// A growing environment with a fresh-name supply and the copy table used by
/// substitution. Newly defined constants are queued until [`Workspace::take_new`].
#[derive(Debug, Clone)]
pub struct Workspace {
    pub env: Env,
    pub fresh: Fresh,
    origin: HashMap<ConstName, (ConstName, Subst)>,
    copies: HashMap<(ConstName, String), ConstName>,
    fv: HashMap<ConstName, BTreeSet<VarName>>,
    new_defs: Vec<(ConstName, Term)>,
}

impl Workspace {
    pub fn new(env: Env, fresh: Fresh) -> Self {
        Workspace {
            env,
            fresh,
            origin: HashMap::new(),
            copies: HashMap::new(),
            fv: HashMap::new(),
            new_defs: Vec::new(),
        }
    }

    /// Defines a constant under a fresh name derived from `base`.
    pub fn define_fresh(&mut self, base: &str, body: Term) -> Result<ConstName, TermError> {
        let name = self.fresh.const_name(base, &self.env);
        self.define(name.clone(), body)?;
        Ok(name)
    }

    pub fn define(&mut self, name: ConstName, body: Term) -> Result<(), TermError> {
        self.env.define(name.clone(), body.clone())?;
        self.new_defs.push((name, body));
        Ok(())
    }

    /// Definitions added since the previous call, in creation order.
    pub fn take_new(&mut self) -> Vec<(ConstName, Term)> {
        std::mem::take(&mut self.new_defs)
    }

    /// Free variables of a constant, through its reachable bodies.
    pub fn const_vars(&mut self, c: &ConstName) -> BTreeSet<VarName> {
        if let Some(v) = self.fv.get(c) {
            return v.clone();
        }
        let v = free_vars(&Term::Const(c.clone()), &self.env);
        self.fv.insert(c.clone(), v.clone());
        v
    }

    /// Applies `sigma` to `t`, copying constants as needed.
    pub fn apply(&mut self, t: &Term, sigma: &Subst) -> Result<Term, TermError> {
        if sigma.is_empty() {
            return Ok(t.clone());
        }
        match t {
            Term::One | Term::Zero => Ok(t.clone()),
            Term::Var(x) => Ok(sigma.get(x).cloned().unwrap_or_else(|| t.clone())),
            Term::Prefix(a, p) => Ok(Term::prefix(a.clone(), self.apply(p, sigma)?)),
            Term::Sum(l, r) => {
                let l = self.apply(l, sigma)?;
                let r = self.apply(r, sigma)?;
                if matches!(l, Term::Const(_)) || matches!(r, Term::Const(_)) {
                    return Err(TermError::SortViolation(format!("constant as sum operand in `{l} + {r}`")));
                }
                Ok(Term::sum(l, r))
            }
            Term::Const(k) => Ok(Term::Const(self.copy(k, sigma)?)),
        }
    }

    /// The constant standing for `k` under `sigma`.
    pub fn copy(&mut self, k: &ConstName, sigma: &Subst) -> Result<ConstName, TermError> {
        let vars = self.const_vars(k);
        let local = sigma.restrict(&vars);
        if local.is_empty() {
            return Ok(k.clone());
        }
        let (origin, tau) = match self.origin.get(k).cloned() {
            Some((o, sigma0)) => {
                let mut tau = Subst::new();
                for (y, t) in sigma0.iter() {
                    tau.insert(y.clone(), self.apply(t, &local)?);
                }
                for (y, t) in local.iter() {
                    if !sigma0.contains(y) {
                        tau.insert(y.clone(), t.clone());
                    }
                }
                let ovars = self.const_vars(&o);
                (o, tau.restrict(&ovars))
            }
            None => (k.clone(), local),
        };
        if tau.is_empty() {
            return Ok(origin);
        }
        let key = (origin.clone(), tau.to_string());
        if let Some(c) = self.copies.get(&key) {
            return Ok(c.clone());
        }
        let body = self.env.body(&origin).cloned().ok_or_else(|| TermError::Undefined(origin.to_string()))?;
        let name = self.fresh.const_name(origin.base(), &self.env);
        self.copies.insert(key, name.clone());
        self.origin.insert(name.clone(), (origin, tau.clone()));
        let new_body = self.apply(&body, &tau)?;
        self.define(name.clone(), new_body)?;
        Ok(name)
    }

    /// Declares the existing constant `name` to be the copy of `origin` under
    /// `tau`, so later substitutions reuse it. Its body must be the one the
    /// copy would get.
    pub fn register_copy(&mut self, origin: &ConstName, tau: &Subst, name: &ConstName) -> Result<(), TermError> {
        let ovars = self.const_vars(origin);
        let tau = tau.restrict(&ovars);
        let key = (origin.clone(), tau.to_string());
        if let Some(existing) = self.copies.get(&key) {
            if existing == name {
                return Ok(());
            }
            return Err(TermError::Redefined(format!("copy of {origin} under {tau}")));
        }
        self.copies.insert(key, name.clone());
        self.origin.insert(name.clone(), (origin.clone(), tau.clone()));
        let body = self.env.body(origin).cloned().ok_or_else(|| TermError::Undefined(origin.to_string()))?;
        let expected = self.apply(&body, &tau)?;
        if self.env.body(name) != Some(&expected) {
            return Err(TermError::SortViolation(format!(
                "{name} does not have the body of {origin} under {tau}: expected `{expected}`"
            )));
        }
        Ok(())
    }

    /// Origin constant and substitution of a copy made by this workspace.
    pub fn origin_of(&self, c: &ConstName) -> Option<&(ConstName, Subst)> {
        self.origin.get(c)
    }
}

/// Applies `rho` to `p` over `env`, returning the result and `env` extended
/// with any constant copies.
pub fn substitute(p: &Term, rho: &Subst, env: &Env) -> Result<(Term, Env), TermError> {
    let mut ws = Workspace::new(env.clone(), Fresh::default());
    let t = ws.apply(p, rho)?;
    Ok((t, ws.env))
}
