use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const STAR_NFA: &str = r#"{"states":["q0","q1"],"alphabet":["a","b"],"initial":"q0","finals":["q1"],
  "transitions":[["q0","a","q0"],["q0","eps","q1"],["q1","b","q1"]]}"#;
const STAR_DFA: &str = r#"{"states":["q2","q3"],"alphabet":["a","b"],"initial":"q2","finals":["q2","q3"],
  "transitions":[["q2","a","q2"],["q2","b","q3"],["q3","b","q3"]]}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn sfm1(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfm1")).args(args.iter().map(|a| a.as_ref())).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &std::ffi::OsStr {
    path.as_os_str()
}

#[test]
fn semantics_of_the_three_state_example() {
    let d = Dir::new();
    let f = d.file("c.sfm", "C := b.D\nD := a.(b.D + 1)\n");
    let o = sfm1(&[&"semantics", &p(&f)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 3);
    assert_eq!(v["finals"], serde_json::json!(["b.D + 1"]));
    let dot = stdout(&sfm1(&[&"semantics", &p(&f), &"--format", &"dot"]));
    assert!(dot.starts_with("digraph"));
}

#[test]
fn semantics_of_zero_has_one_state() {
    let d = Dir::new();
    let f = d.file("z.sfm", "root 0\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&sfm1(&[&"semantics", &p(&f)]))).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 1);
}

#[test]
fn compile_and_back_is_isomorphic() {
    let d = Dir::new();
    let left = d.file("left.nfa.json", STAR_NFA);
    let o = sfm1(&[&"compile", &p(&left)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "C0 := a.C0 + eps.C1\nC1 := b.C1 + 1\n");
    let sys = d.file("left.sfm", &stdout(&o));
    let back = d.path("back.json");
    assert_eq!(code(&sfm1(&[&"semantics", &p(&sys), &"--out", &p(&back)])), 0);
    let iso = sfm1(&[&"equiv", &p(&back), &p(&left), &"--relation", &"iso"]);
    assert_eq!(code(&iso), 0, "{}", stdout(&iso));
    assert!(stdout(&iso).starts_with("ISO\n"));
}

#[test]
fn compile_final_singleton() {
    let d = Dir::new();
    let f = d.file("one.json", r#"{"states":["q"],"alphabet":[],"initial":"q","finals":["q"],"transitions":[]}"#);
    assert_eq!(stdout(&sfm1(&[&"compile", &p(&f)])), "C0 := 1\n");
}

#[test]
fn compile_rejects_unreduced_input() {
    let d = Dir::new();
    let f = d.file(
        "u.json",
        r#"{"states":["q","r"],"alphabet":["a"],"initial":"q","finals":["q"],"transitions":[["r","a","q"]]}"#,
    );
    assert_eq!(code(&sfm1(&[&"compile", &p(&f)])), 2);
}

#[test]
fn equivalence_relations_on_the_two_automata() {
    let d = Dir::new();
    let l = d.file("l.nfa.json", STAR_NFA);
    let r = d.file("r.nfa.json", STAR_DFA);
    let lang = sfm1(&[&"equiv", &p(&l), &p(&r)]);
    assert_eq!((code(&lang), stdout(&lang)), (0, "EQUAL\n".to_string()));
    assert_eq!(code(&sfm1(&[&"equiv", &p(&l), &p(&r), &"--relation", &"bisim"])), 1);
    let iso = sfm1(&[&"equiv", &p(&l), &p(&l), &"--relation", &"iso"]);
    assert_eq!(stdout(&iso), "ISO\nq0 -> q0\nq1 -> q1\n");
}

#[test]
fn prove_emits_a_checkable_proof() {
    let d = Dir::new();
    let l = d.file("l.nfa.json", STAR_NFA);
    let r = d.file("r.nfa.json", STAR_DFA);
    let out = d.path("proof.json");
    let o = sfm1(&[&"prove", &p(&l), &p(&r), &"--out", &p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let check = sfm1(&[&"check-proof", &p(&out)]);
    assert_eq!((code(&check), stdout(&check)), (0, "VALID\n".to_string()));
}

#[test]
fn prove_identical_files() {
    let d = Dir::new();
    let f = d.file("c.sfm", "C := a.C + 1\n");
    let o = sfm1(&[&"prove", &p(&f), &p(&f)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!v["steps"].as_array().unwrap().is_empty());
}

#[test]
fn prove_reports_a_separating_word() {
    let d = Dir::new();
    let c = d.file("c.sfm", "C := eps.C + a.1\n");
    let q = d.file("q.sfm", "root a.1 + b.1\n");
    let o = sfm1(&[&"prove", &p(&c), &p(&q)]);
    assert_eq!((code(&o), stdout(&o)), (1, "DISTINCT b\n".to_string()));
}

#[test]
fn normalize_stages() {
    let d = Dir::new();
    let e = d.file("e.sfm", "C1 := a.C1 + eps.C2 + 1\nC2 := b.C2 + eps.C3\nC3 := a.C3 + 1\n");
    let out = d.path("d.sfm");
    assert_eq!(code(&sfm1(&[&"normalize", &p(&e), &"--stage", &"epsfree", &"--out", &p(&out)])), 0);
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "D1 := a.D1 + b.D2 + a.D3 + 1\nD2 := b.D2 + a.D3 + 1\nD3 := a.D3 + 1\n"
    );
    let proof = d.path("d.sfm.proof.json");
    assert_eq!(code(&sfm1(&[&"check-proof", &p(&proof), &p(&e)])), 0);

    let det = d.file("det.sfm", "C1 := a.C1 + a.C2 + a.C1\nC2 := a.C2 + 1\n");
    let o = sfm1(&[&"normalize", &p(&det), &"--stage", &"det", &"--alphabet", &"a,b"]);
    assert_eq!(stdout(&o), "D{1} := a.D{1,2} + b.D{}\nD{1,2} := a.D{1,2} + b.D{} + 1\nD{} := a.D{} + b.D{}\n");

    let og = d.file("og.sfm", "C := a.C + eps.D\nD := b.D + 1\n");
    let o = sfm1(&[&"normalize", &p(&og), &"--stage", &"og"]);
    assert_eq!(stdout(&o), "C := a.C + eps.D\nD := b.D + 1\n");
}

#[test]
fn check_proof_rejects_corruptions() {
    let d = Dir::new();
    let e = d.file("e.sfm", "C1 := a.C1 + eps.C2 + 1\nC2 := b.C2 + eps.C3\nC3 := a.C3 + 1\n");
    let proof = d.path("p.json");
    sfm1(&[&"normalize", &p(&e), &"--stage", &"epsfree", &"--proof", &p(&proof)]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&proof).unwrap()).unwrap();

    let mut forward = v.clone();
    let steps = forward["steps"].as_array_mut().unwrap();
    let k = steps.iter().position(|s| !s["premises"].as_array().unwrap().is_empty()).unwrap();
    steps[k]["premises"][0] = serde_json::json!(k + 1);
    let bad = d.file("forward.json", &forward.to_string());
    let o = sfm1(&[&"check-proof", &p(&bad), &p(&e)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains(&format!("step {}", k + 1)), "{}", stdout(&o));

    let mut t3 = v.clone();
    t3["steps"] = serde_json::json!([{"i": 1, "lhs": "eps.C1", "rhs": "C1", "rule": "Axiom", "axiom": "T3",
        "premises": [], "bindings": {"subst": {"$x": "C1"}}}]);
    let bad = d.file("t3.json", &t3.to_string());
    assert_eq!(code(&sfm1(&[&"check-proof", &p(&bad)])), 1);

    let r2 = serde_json::json!({"axiom_set": "W", "env0": ["C := eps.C + 1"], "steps": [
        {"i": 1, "lhs": "1", "rhs": "eps.1 + 1", "rule": "Axiom", "axiom": "T3",
         "premises": [], "bindings": {"subst": {"$x": "1"}}}]});
    let bad = d.file("r2.json", &r2.to_string());
    assert_eq!(code(&sfm1(&[&"check-proof", &p(&bad)])), 1);
}

#[test]
fn bad_input_exits_with_two() {
    let d = Dir::new();
    let f = d.file("bad.sfm", "C := a.(\n");
    let o = sfm1(&[&"semantics", &p(&f)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(code(&sfm1(&[&"semantics", &d.path("missing.sfm").as_os_str()])), 2);
}

#[test]
fn output_is_deterministic() {
    let d = Dir::new();
    let l = d.file("l.nfa.json", STAR_NFA);
    let r = d.file("r.nfa.json", STAR_DFA);
    let a = stdout(&sfm1(&[&"prove", &p(&l), &p(&r)]));
    let b = stdout(&sfm1(&[&"prove", &p(&l), &p(&r)]));
    assert_eq!(a, b);
}
