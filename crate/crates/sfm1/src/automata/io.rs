//! JSON and DOT renderings of automata.

use serde::{Deserialize, Serialize};

use super::{AutomataError, Nfa};
use crate::terms::{Label, Symbol, EPS_TEXT};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NfaJson {
    states: Vec<String>,
    alphabet: Vec<String>,
    initial: String,
    finals: Vec<String>,
    transitions: Vec<(String, String, String)>,
}

/// Pretty JSON with states, finals and transitions in sorted order.
pub fn to_json(n: &Nfa) -> String {
    let doc = NfaJson {
        states: n.states().iter().cloned().collect(),
        alphabet: n.alphabet().iter().map(|a| a.to_string()).collect(),
        initial: n.initial().clone(),
        finals: n.finals().iter().cloned().collect(),
        transitions: n.transitions().iter().map(|(s, a, t)| (s.clone(), a.to_string(), t.clone())).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("automaton serializes") + "\n"
}

pub fn from_json(text: &str) -> Result<Nfa, AutomataError> {
    let doc: NfaJson = serde_json::from_str(text).map_err(|e| AutomataError::Malformed(e.to_string()))?;
    let alphabet = doc
        .alphabet
        .iter()
        .map(|a| {
            if a == EPS_TEXT {
                Err(AutomataError::Malformed("the alphabet cannot contain `eps`".into()))
            } else {
                Symbol::new(a).map_err(|e| AutomataError::Malformed(e.to_string()))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let transitions = doc
        .transitions
        .into_iter()
        .map(|(s, a, t)| Label::parse(&a).map(|l| (s, l, t)).map_err(|e| AutomataError::Malformed(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Nfa::new(doc.states, alphabet, doc.initial, doc.finals, transitions)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: finals are double circles and the initial state has an
/// arrow from an invisible node.
pub fn to_dot(n: &Nfa) -> String {
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  __start [shape=point, style=invis];\n");
    for q in n.states() {
        let shape = if n.is_final(q) { "doublecircle" } else { "circle" };
        out.push_str(&format!("  {} [shape={shape}];\n", quote(q)));
    }
    out.push_str(&format!("  __start -> {};\n", quote(n.initial())));
    for (s, a, t) in n.transitions() {
        let label = match a {
            Label::Eps => "ε".to_string(),
            Label::Sym(x) => x.to_string(),
        };
        out.push_str(&format!("  {} -> {} [label={}];\n", quote(s), quote(t), quote(&label)));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "states": ["q0", "q1"],
  "alphabet": ["a", "b"],
  "initial": "q0",
  "finals": ["q1"],
  "transitions": [["q0", "a", "q0"], ["q0", "eps", "q1"], ["q1", "b", "q1"]]
}"#;

    #[test]
    fn json_roundtrip() {
        let n = from_json(SAMPLE).unwrap();
        assert_eq!(n.transitions().len(), 3);
        assert_eq!(from_json(&to_json(&n)).unwrap(), n);
    }

    #[test]
    fn json_rejects_eps_in_alphabet() {
        let bad = SAMPLE.replace(r#"["a", "b"]"#, r#"["a", "eps"]"#);
        assert!(from_json(&bad).is_err());
        assert!(from_json("{").is_err());
    }

    #[test]
    fn dot_marks_finals_and_start() {
        let dot = to_dot(&from_json(SAMPLE).unwrap());
        assert!(dot.contains("\"q1\" [shape=doublecircle];"));
        assert!(dot.contains("__start -> \"q0\";"));
        assert!(dot.contains("\"q0\" -> \"q1\" [label=\"ε\"];"));
    }
}
