mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sfm1::automata::{accepts, determinize, language_equiv, Dfa, LangVerdict};
use sfm1::compiler::compile;
use sfm1::proofs::{
    check_proof, prove_det_equal, prove_equivalence, to_deterministic, to_eps_free, to_normal_form, to_og, AxiomSet,
    EquivVerdict, Proof,
};
use sfm1::semantics::denote;
use sfm1::terms::{is_og_system, nf, Label, Process, Symbol, Term};

fn endpoints_agree(proof: &Proof) -> Result<(), TestCaseError> {
    prop_assert_eq!(check_proof(proof), Ok(()));
    let (l, r) = proof.conclusion().unwrap();
    let env = proof.final_env();
    let side = |t: &Term| Process { root: t.clone(), env: env.clone() };
    prop_assert!(language_equiv(&denote(&side(l)), &denote(&side(r))).is_equal());
    Ok(())
}

fn has_eps(p: &Process) -> bool {
    denote(p).transitions().iter().any(|(_, a, _)| *a == Label::Eps)
}

fn ab() -> BTreeSet<Symbol> {
    symbols(2).into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pipeline_stages_are_sound(seed in any::<u64>()) {
        let p = random_system(&mut rng(seed), &Shape { og: false, eps: 0.3, ..Shape::default() });

        let (o, proof) = to_og(&p).unwrap();
        prop_assert!(is_og_system(&o.root, &o.env));
        endpoints_agree(&proof)?;

        let (nb, proof) = to_normal_form(&p, AxiomSet::B).unwrap();
        prop_assert!(nf(&nb.root, &nb.env));
        prop_assert!(proof.axioms_used().iter().all(|a| AxiomSet::B.contains(*a)));
        endpoints_agree(&proof)?;

        let (n, proof) = to_normal_form(&o, AxiomSet::Wg).unwrap();
        prop_assert!(nf(&n.root, &n.env) && is_og_system(&n.root, &n.env));
        endpoints_agree(&proof)?;

        let (e, proof) = to_eps_free(&n).unwrap();
        prop_assert!(!has_eps(&e) && nf(&e.root, &e.env));
        endpoints_agree(&proof)?;

        let (d, proof) = to_deterministic(&e, &ab()).unwrap();
        prop_assert!(Dfa::from_nfa(denote(&d)).is_ok());
        endpoints_agree(&proof)?;

        let proof = prove_det_equal(&d, &d).unwrap();
        endpoints_agree(&proof)?;
        prop_assert!(language_equiv(&denote(&p), &denote(&d)).is_equal());
    }

    #[test]
    fn unguarded_systems_reduce(seed in any::<u64>()) {
        let p = random_unguarded(&mut rng(seed), &Shape::default());
        prop_assert!(!is_og_system(&p.root, &p.env));
        let (o, proof) = to_og(&p).unwrap();
        prop_assert!(is_og_system(&o.root, &o.env));
        endpoints_agree(&proof)?;
    }

    #[test]
    fn rewritten_systems_are_proved_equal(seed in any::<u64>(), times in 1usize..=10) {
        let mut r = rng(seed);
        let p = random_system(&mut r, &Shape { og: false, eps: 0.3, ..Shape::default() });
        let q = rewrite(&mut r, &p, times);
        let EquivVerdict::Equal(proof) = prove_equivalence(&p, &q).unwrap() else {
            return Err(TestCaseError::fail("rewrites keep the language"));
        };
        let (l, r) = proof.conclusion().unwrap();
        prop_assert_eq!(l, &p.root);
        prop_assert!(r == &q.root || r.to_string().starts_with(&format!("{}%", q.root)), "{} vs {}", r, q.root);
        endpoints_agree(&proof)?;
    }

    #[test]
    fn recompiled_automaton_is_proved_equal(seed in any::<u64>()) {
        let p = random_system(&mut rng(seed), &Shape { og: false, eps: 0.3, ..Shape::default() });
        let q = compile(&determinize(&denote(&p), &ab()).into_nfa()).unwrap();
        let EquivVerdict::Equal(proof) = prove_equivalence(&p, &q).unwrap() else {
            return Err(TestCaseError::fail("determinization keeps the language"));
        };
        endpoints_agree(&proof)?;
    }

    #[test]
    fn distinct_systems_get_a_real_witness(s1 in any::<u64>(), s2 in any::<u64>()) {
        let p = random_system(&mut rng(s1), &Shape::default());
        let q = random_system(&mut rng(s2), &Shape::default());
        let lang = language_equiv(&denote(&p), &denote(&q));
        match prove_equivalence(&p, &q).unwrap() {
            EquivVerdict::Equal(proof) => {
                prop_assert_eq!(lang, LangVerdict::Equal);
                endpoints_agree(&proof)?;
            }
            EquivVerdict::Distinct(w) => {
                let on = |x: &Process| {
                    let n = denote(x).with_alphabet(&ab());
                    accepts(&n, w.symbols()).unwrap()
                };
                prop_assert_ne!(on(&p), on(&q));
            }
        }
    }
}
