use std::collections::BTreeSet;

use super::*;
use crate::automata::{language_equiv, LangVerdict};
use crate::semantics::denote;
use crate::terms::{is_og_system, nf, parse_system, write_system, ParseMode, Process, Symbol};

fn sys(src: &str) -> Process {
    parse_system(src, ParseMode::Internal).unwrap()
}

fn same_language(p: &Process, q: &Process) -> bool {
    language_equiv(&denote(p), &denote(q)) == LangVerdict::Equal
}

fn ends_with(proof: &Proof, p: &Process, q: &Process) {
    let (l, r) = proof.conclusion().expect("non-empty proof");
    assert_eq!((l, r), (&p.root, &q.root));
    assert_eq!(check_proof(proof), Ok(()));
}

fn alphabet(names: &[&str]) -> BTreeSet<Symbol> {
    names.iter().map(|s| Symbol::new(s).unwrap()).collect()
}

#[test]
fn eps_free_golden() {
    let p = sys("C1 := a.C1 + eps.C2 + 1\nC2 := b.C2 + eps.C3\nC3 := a.C3 + 1\n");
    let (q, proof) = to_eps_free(&p).unwrap();
    assert_eq!(write_system(&q), "D1 := a.D1 + b.D2 + a.D3 + 1\nD2 := b.D2 + a.D3 + 1\nD3 := a.D3 + 1\n");
    ends_with(&proof, &p, &q);
    assert!(!proof.axioms_used().contains(&AxiomId::R3));
}

#[test]
fn eps_free_input_is_unchanged() {
    let p = sys("C := a.C + 1\n");
    let (q, proof) = to_eps_free(&p).unwrap();
    assert_eq!(q, p);
    assert_eq!(check_proof(&proof), Ok(()));
}

#[test]
fn determinization_golden() {
    let p = sys("C1 := a.C1 + a.C2 + a.C1\nC2 := a.C2 + 1\n");
    let (q, proof) = to_deterministic(&p, &alphabet(&["a", "b"])).unwrap();
    assert_eq!(write_system(&q), "D{1} := a.D{1,2} + b.D{}\nD{1,2} := a.D{1,2} + b.D{} + 1\nD{} := a.D{} + b.D{}\n");
    ends_with(&proof, &p, &q);
}

#[test]
fn determinization_of_dead_and_final_roots() {
    let (q, proof) = to_deterministic(&sys("C := 0\n"), &alphabet(&["a"])).unwrap();
    assert_eq!(write_system(&q), "D{} := a.D{}\n");
    assert_eq!(check_proof(&proof), Ok(()));
    let (q, proof) = to_deterministic(&sys("C := 1\n"), &alphabet(&["a"])).unwrap();
    assert_eq!(write_system(&q), "D{1} := a.D{} + 1\nD{} := a.D{}\n");
    assert_eq!(check_proof(&proof), Ok(()));
}

#[test]
fn normal_form_in_b_and_wg() {
    let p = sys("root a.b.1\n");
    for set in [AxiomSet::B, AxiomSet::Wg] {
        let (q, proof) = to_normal_form(&p, set).unwrap();
        assert!(nf(&q.root, &q.env));
        assert!(same_language(&p, &q));
        ends_with(&proof, &p, &q);
        assert!(proof.axioms_used().iter().all(|a| set.contains(*a)));
    }
    let already = sys("C := a.C + 1\n");
    let (q, proof) = to_normal_form(&already, AxiomSet::Wg).unwrap();
    assert_eq!(q, already);
    assert_eq!(check_proof(&proof), Ok(()));
}

#[test]
fn normal_form_without_og() {
    let p = sys("C := eps.C + a.(b.C + 1)\n");
    assert_eq!(to_normal_form(&p, AxiomSet::Wg).unwrap_err(), ProofError::NotOg);
    let (q, proof) = to_normal_form(&p, AxiomSet::B).unwrap();
    assert!(nf(&q.root, &q.env));
    ends_with(&proof, &p, &q);
}

#[test]
fn og_reduction() {
    for src in [
        "C := eps.C + a.1\n",
        "C := eps.D + a.C\nD := eps.C + b.1\n",
        "C := eps.eps.C + eps.(a.C + eps.D)\nD := eps.C + 1\n",
        "root eps.C + b.1\nC := a.C + eps.C\n",
    ] {
        let p = sys(src);
        let (q, proof) = to_og(&p).unwrap();
        assert!(is_og_system(&q.root, &q.env), "{src}");
        assert!(same_language(&p, &q), "{src}");
        ends_with(&proof, &p, &q);
    }
}

#[test]
fn equivalence_of_two_presentations() {
    let p = sys("C0 := a.C0 + eps.C1\nC1 := b.C1 + 1\n");
    let q = sys("E := a.E + b.F + 1\nF := b.F + 1\n");
    let EquivVerdict::Equal(proof) = prove_equivalence(&p, &q).unwrap() else { panic!("expected equal") };
    let (l, r) = proof.conclusion().unwrap();
    assert_eq!((l.to_string(), r.to_string()), ("C0".to_string(), "E".to_string()));
    assert_eq!(check_proof(&proof), Ok(()));
}

#[test]
fn distinct_processes_get_a_witness() {
    let p = sys("C := a.C + 1\n");
    let q = sys("C := a.a.C + 1\n");
    match prove_equivalence(&p, &q).unwrap() {
        EquivVerdict::Distinct(w) => assert_eq!(w.to_string(), "a"),
        EquivVerdict::Equal(_) => panic!("languages differ"),
    }
}

#[test]
fn clashing_names_are_renamed() {
    let p = sys("C := a.C + 1\n");
    let q = sys("C := a.a.C + a.1 + 1\n");
    let EquivVerdict::Equal(proof) = prove_equivalence(&p, &q).unwrap() else { panic!() };
    assert_eq!(check_proof(&proof), Ok(()));
}

#[test]
fn det_equal_rejects_different_languages() {
    let p = sys("C := a.C + 1\n");
    let q = sys("E := a.F\nF := a.E + 1\n");
    assert_eq!(prove_det_equal(&p, &q).unwrap_err(), ProofError::NotEquivalent);
}

#[test]
fn unique_solution_of_a_loop() {
    let p = sys("L := a.L + 1\nM := a.a.M + a.1 + 1\nN := 1 + a.N\n");
    let x = crate::terms::VarName::new("x").unwrap();
    let template = crate::terms::parse_term("a.$x + 1", ParseMode::Internal).unwrap();
    let lit = crate::terms::ConstName::new("L").unwrap();
    let sol = crate::terms::parse_term("M", ParseMode::Internal).unwrap();
    // M is not literally a.M + 1, so this is not a solution by choice laws alone.
    assert!(matches!(
        unique_solution(
            &p.env,
            std::slice::from_ref(&x),
            std::slice::from_ref(&template),
            std::slice::from_ref(&lit),
            &[sol]
        ),
        Err(ProofError::NotASolution(_))
    ));
    let sol = crate::terms::parse_term("N", ParseMode::Internal).unwrap();
    let (proof, steps) = unique_solution(&p.env, &[x], &[template], &[lit], &[sol]).unwrap();
    assert_eq!(check_proof(&proof), Ok(()));
    assert_eq!(steps.len(), 1);
}
