//! Proof objects as JSON.
//!
//! ```json
//! {"axiom_set": "W", "env0": ["C := a.C + 1"],
//!  "steps": [{"i": 1, "lhs": "C", "rhs": "a.C + 1", "rule": "Axiom", "axiom": "R1",
//!             "premises": [], "bindings": {"constant": "C"}, "introduced": []}]}
//! ```
//!
//! A bare array of steps is also accepted; its environment then comes from
//! elsewhere.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::terms::{parse_term, ConstName, Env, Label, ParseMode, Subst, Term, VarName};

use super::{AxiomId, AxiomSet, Bindings, Proof, ProofStep, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ProofFormatError {
    pub message: String,
}

fn bad(message: impl Into<String>) -> ProofFormatError {
    ProofFormatError { message: message.into() }
}

fn def_line(c: &ConstName, body: &Term) -> Value {
    Value::String(format!("{c} := {body}"))
}

pub fn proof_to_json(p: &Proof) -> Value {
    let env0: Vec<Value> = p.env0.iter().map(|(c, b)| def_line(c, b)).collect();
    let steps: Vec<Value> = p.steps.iter().map(step_to_json).collect();
    json!({ "axiom_set": p.axiom_set.name(), "env0": env0, "steps": steps })
}

fn step_to_json(s: &ProofStep) -> Value {
    let mut m = Map::new();
    m.insert("i".into(), json!(s.index));
    m.insert("lhs".into(), json!(s.lhs.to_string()));
    m.insert("rhs".into(), json!(s.rhs.to_string()));
    m.insert("rule".into(), json!(s.rule.name()));
    if let Rule::Axiom(a) = s.rule {
        m.insert("axiom".into(), json!(a.name()));
    }
    m.insert("premises".into(), json!(s.premises));
    let b = bindings_to_json(&s.bindings);
    if !b.is_null() {
        m.insert("bindings".into(), b);
    }
    if !s.introduced.is_empty() {
        m.insert("introduced".into(), s.introduced.iter().map(|(c, b)| def_line(c, b)).collect());
    }
    Value::Object(m)
}

fn subst_to_json(s: &Subst) -> Value {
    Value::Object(s.iter().map(|(x, t)| (x.to_string(), json!(t.to_string()))).collect())
}

fn bindings_to_json(b: &Bindings) -> Value {
    match b {
        Bindings::None => Value::Null,
        Bindings::Context { context, holes } => json!({
            "context": context.to_string(),
            "holes": holes.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
        }),
        Bindings::Subst { subst, label } => {
            let mut m = Map::new();
            m.insert("subst".into(), subst_to_json(subst));
            if let Some(l) = label {
                m.insert("label".into(), json!(l.to_string()));
            }
            Value::Object(m)
        }
        Bindings::Recursion { var, left, right } => json!({
            "var": var.to_string(), "left": left.as_str(), "right": right.as_str(),
        }),
        Bindings::Unfold { constant } => json!({ "constant": constant.as_str() }),
        Bindings::Fold { constant, var, template } => json!({
            "constant": constant.as_str(), "var": var.to_string(), "template": template.to_string(),
        }),
        Bindings::Excise { left, right, var, template } => json!({
            "left": left.as_str(), "right": right.as_str(), "var": var.to_string(),
            "template": template.to_string(),
        }),
    }
}

/// Parses a proof. `env` replaces (or, for a bare array, supplies) `env0`.
pub fn proof_from_json(v: &Value, env: Option<&Env>) -> Result<Proof, ProofFormatError> {
    let (set, env0, steps) = match v {
        Value::Array(steps) => {
            let env = env.ok_or_else(|| bad("a bare list of steps needs an environment"))?;
            (AxiomSet::W, env.clone(), steps)
        }
        Value::Object(m) => {
            let set = match m.get("axiom_set") {
                None => AxiomSet::W,
                Some(Value::String(s)) => AxiomSet::parse(s).ok_or_else(|| bad(format!("unknown axiom set `{s}`")))?,
                Some(_) => return Err(bad("`axiom_set` must be a string")),
            };
            let env0 = match (env, m.get("env0")) {
                (Some(e), _) => e.clone(),
                (None, Some(defs)) => parse_defs(defs, "env0")?,
                (None, None) => Env::new(),
            };
            let steps = m.get("steps").and_then(Value::as_array).ok_or_else(|| bad("missing `steps` array"))?;
            (set, env0, steps)
        }
        _ => return Err(bad("a proof is an object or an array of steps")),
    };
    let steps = steps
        .iter()
        .enumerate()
        .map(|(k, s)| step_from_json(s).map_err(|e| bad(format!("step {}: {}", k + 1, e.message))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Proof { axiom_set: set, env0, steps })
}

fn term(v: Option<&Value>, what: &str) -> Result<Term, ProofFormatError> {
    let s = v.and_then(Value::as_str).ok_or_else(|| bad(format!("missing `{what}`")))?;
    parse_term(s, ParseMode::Internal).map_err(|e| bad(format!("`{what}`: {e}")))
}

fn constant(v: Option<&Value>, what: &str) -> Result<ConstName, ProofFormatError> {
    let s = v.and_then(Value::as_str).ok_or_else(|| bad(format!("missing `{what}`")))?;
    ConstName::new(s).map_err(|e| bad(e.to_string()))
}

fn variable(v: Option<&Value>, what: &str) -> Result<VarName, ProofFormatError> {
    let s = v.and_then(Value::as_str).ok_or_else(|| bad(format!("missing `{what}`")))?;
    VarName::new(s).map_err(|e| bad(e.to_string()))
}

fn parse_defs(v: &Value, what: &str) -> Result<Env, ProofFormatError> {
    let mut env = Env::new();
    for (c, body) in parse_def_list(v, what)? {
        env.define(c, body).map_err(|e| bad(format!("`{what}`: {e}")))?;
    }
    Ok(env)
}

fn parse_def_list(v: &Value, what: &str) -> Result<Vec<(ConstName, Term)>, ProofFormatError> {
    let items = v.as_array().ok_or_else(|| bad(format!("`{what}` must be a list")))?;
    items
        .iter()
        .map(|item| {
            let line = item.as_str().ok_or_else(|| bad(format!("`{what}` entries are strings")))?;
            let (name, body) = line.split_once(":=").ok_or_else(|| bad(format!("`{line}` is not a definition")))?;
            let c = ConstName::new(name.trim()).map_err(|e| bad(e.to_string()))?;
            let body = parse_term(body.trim(), ParseMode::Internal).map_err(|e| bad(format!("`{line}`: {e}")))?;
            Ok((c, body))
        })
        .collect()
}

fn step_from_json(v: &Value) -> Result<ProofStep, ProofFormatError> {
    let m = v.as_object().ok_or_else(|| bad("a step is an object"))?;
    let index = m.get("i").and_then(Value::as_u64).ok_or_else(|| bad("missing step number `i`"))? as usize;
    let lhs = term(m.get("lhs"), "lhs")?;
    let rhs = term(m.get("rhs"), "rhs")?;
    let rule_name = m.get("rule").and_then(Value::as_str).ok_or_else(|| bad("missing `rule`"))?;
    let rule = match rule_name {
        "Reflexivity" => Rule::Reflexivity,
        "Symmetry" => Rule::Symmetry,
        "Transitivity" => Rule::Transitivity,
        "Substitutivity" => Rule::Substitutivity,
        "Recursion" => Rule::Recursion,
        "Instantiation" => Rule::Instantiation,
        "Axiom" => {
            let a = m.get("axiom").and_then(Value::as_str).ok_or_else(|| bad("axiom step without `axiom`"))?;
            Rule::Axiom(AxiomId::parse(a).ok_or_else(|| bad(format!("unknown axiom `{a}`")))?)
        }
        other => return Err(bad(format!("unknown rule `{other}`"))),
    };
    let premises = match m.get("premises") {
        None => vec![],
        Some(Value::Array(ps)) => ps
            .iter()
            .map(|p| p.as_u64().map(|n| n as usize).ok_or_else(|| bad("premises are step numbers")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(bad("`premises` must be a list")),
    };
    let empty = Map::new();
    let b = match m.get("bindings") {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(b)) => b,
        Some(_) => return Err(bad("`bindings` must be an object")),
    };
    let bindings = match rule {
        Rule::Reflexivity | Rule::Symmetry | Rule::Transitivity => Bindings::None,
        Rule::Substitutivity => Bindings::Context {
            context: term(b.get("context"), "context")?,
            holes: b
                .get("holes")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing `holes`"))?
                .iter()
                .map(|h| variable(Some(h), "holes"))
                .collect::<Result<_, _>>()?,
        },
        Rule::Recursion => Bindings::Recursion {
            var: variable(b.get("var"), "var")?,
            left: constant(b.get("left"), "left")?,
            right: constant(b.get("right"), "right")?,
        },
        Rule::Axiom(AxiomId::R1) => Bindings::Unfold { constant: constant(b.get("constant"), "constant")? },
        Rule::Axiom(AxiomId::R2 | AxiomId::R2P) => Bindings::Fold {
            constant: constant(b.get("constant"), "constant")?,
            var: variable(b.get("var"), "var")?,
            template: term(b.get("template"), "template")?,
        },
        Rule::Axiom(AxiomId::R3) => Bindings::Excise {
            left: constant(b.get("left"), "left")?,
            right: constant(b.get("right"), "right")?,
            var: variable(b.get("var"), "var")?,
            template: term(b.get("template"), "template")?,
        },
        Rule::Instantiation | Rule::Axiom(_) => {
            let subst = match b.get("subst") {
                None => Subst::new(),
                Some(Value::Object(s)) => s
                    .iter()
                    .map(|(x, t)| Ok((variable(Some(&json!(x)), "subst")?, term(Some(t), "subst")?)))
                    .collect::<Result<_, ProofFormatError>>()?,
                Some(_) => return Err(bad("`subst` must be an object")),
            };
            let label = match b.get("label") {
                None => None,
                Some(l) => {
                    let s = l.as_str().ok_or_else(|| bad("`label` must be a string"))?;
                    Some(Label::parse(s).map_err(|e| bad(e.to_string()))?)
                }
            };
            Bindings::Subst { subst, label }
        }
    };
    let introduced = match m.get("introduced") {
        None => vec![],
        Some(v) => parse_def_list(v, "introduced")?,
    };
    Ok(ProofStep { index, lhs, rhs, rule, premises, bindings, introduced })
}
