mod common;

use common::*;
use proptest::prelude::*;
use sfm1::automata::{accepts, isomorphic, language_equiv, LangVerdict};
use sfm1::compiler::compile;
use sfm1::semantics::denote;
use sfm1::terms::{Label, Process, Term};

fn shape() -> Shape {
    Shape { eps: 0.3, og: false, ..Shape::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn denote_follows_the_transition_rules(seed in any::<u64>()) {
        let p = random_system(&mut rng(seed), &shape());
        prop_assert_eq!(denote(&p), oracle_denote(&p));
    }

    #[test]
    fn nfa_acceptance_matches_the_rules(seed in any::<u64>()) {
        let p = random_system(&mut rng(seed), &shape());
        let n = denote(&p);
        for w in words(&symbols(2), 4) {
            if w.iter().all(|a| n.alphabet().contains(a)) {
                prop_assert_eq!(accepts(&n, &w).unwrap(), term_accepts(&p, &w));
            }
        }
    }

    #[test]
    fn language_verdicts_are_confirmed_by_enumeration(s1 in any::<u64>(), s2 in any::<u64>()) {
        let p = random_system(&mut rng(s1), &shape());
        let q = random_system(&mut rng(s2), &shape());
        match language_equiv(&denote(&p), &denote(&q)) {
            LangVerdict::Equal => prop_assert!(agree_upto(&p, &q, &symbols(2), 5)),
            LangVerdict::Distinct(w) => prop_assert_ne!(term_accepts(&p, w.symbols()), term_accepts(&q, w.symbols())),
        }
    }

    #[test]
    fn prefixing_concatenates(seed in any::<u64>()) {
        let p = random_system(&mut rng(seed), &shape());
        let a = sym("a");
        let ap = Process { root: Term::prefix(Label::Sym(a.clone()), p.root.clone()), env: p.env.clone() };
        let ep = Process { root: Term::prefix(Label::Eps, p.root.clone()), env: p.env.clone() };
        for w in words(&symbols(2), 3) {
            let aw: Vec<_> = std::iter::once(a.clone()).chain(w.iter().cloned()).collect();
            prop_assert_eq!(term_accepts(&ap, &aw), term_accepts(&p, &w));
            prop_assert_eq!(term_accepts(&ep, &w), term_accepts(&p, &w));
        }
    }

    #[test]
    fn rewrites_preserve_the_language(seed in any::<u64>(), times in 1usize..10) {
        let mut r = rng(seed);
        let p = random_system(&mut r, &shape());
        let q = rewrite(&mut r, &p, times);
        prop_assert!(language_equiv(&denote(&p), &denote(&q)).is_equal(), "{:?} vs {:?}", p, q);
    }

    #[test]
    fn compile_inverts_denote(seed in any::<u64>()) {
        let n = random_reduced_nfa(&mut rng(seed), 6, 2, true);
        let p = compile(&n).unwrap();
        prop_assert!(isomorphic(&denote(&p), &n).unwrap().is_some());
    }
}
