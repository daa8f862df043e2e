//! Syntactic predicates and measures: reachable constants, finality,
//! observational guardedness, normal forms, length and unguarded counts.

use std::collections::BTreeSet;

use super::{bfs_consts, ConstName, Env, Label, Term, VarName};

/// Constants reachable from `p` through bodies (the `δ(p, ∅)` set).
pub fn consts(p: &Term, env: &Env) -> BTreeSet<ConstName> {
    bfs_consts(p, env).into_iter().collect()
}

/// Least finality predicate: `1` is final, a sum is final if an operand is,
/// a constant is final if its body is.
pub fn is_final(p: &Term, env: &Env) -> bool {
    fn go(p: &Term, env: &Env, seen: &mut BTreeSet<ConstName>) -> bool {
        match p {
            Term::One => true,
            Term::Sum(l, r) => go(l, env, seen) || go(r, env, seen),
            Term::Const(c) => {
                if !seen.insert(c.clone()) {
                    return false;
                }
                env.body(c).is_some_and(|b| go(b, env, seen))
            }
            _ => false,
        }
    }
    go(p, env, &mut BTreeSet::new())
}

/// Observational guardedness of `p` itself: no variable is reachable through
/// ε-prefixes and sums, and no constant reachable that way re-enters itself
/// through ε-moves. Constants only reachable behind an alphabet symbol are not
/// inspected; see [`is_og_system`].
pub fn og(p: &Term, env: &Env) -> bool {
    fn go(p: &Term, env: &Env, active: &mut BTreeSet<ConstName>, done: &mut BTreeSet<ConstName>) -> bool {
        match p {
            Term::One | Term::Zero => true,
            Term::Var(_) => false,
            Term::Prefix(Label::Sym(_), _) => true,
            Term::Prefix(Label::Eps, q) => go(q, env, active, done),
            Term::Sum(l, r) => go(l, env, active, done) && go(r, env, active, done),
            Term::Const(c) => {
                if done.contains(c) {
                    return true;
                }
                if !active.insert(c.clone()) {
                    return false;
                }
                let ok = env.body(c).is_some_and(|b| go(b, env, active, done));
                active.remove(c);
                if ok {
                    done.insert(c.clone());
                }
                ok
            }
        }
    }
    go(p, env, &mut BTreeSet::new(), &mut BTreeSet::new())
}

/// `og` of the term and of every constant reachable from it.
pub fn is_og_system(p: &Term, env: &Env) -> bool {
    og(p, env) && consts(p, env).iter().all(|c| og(&Term::Const(c.clone()), env))
}

/// Normal form: every prefix is applied to a constant, recursively through
/// constant bodies.
pub fn nf(p: &Term, env: &Env) -> bool {
    fn go(p: &Term, env: &Env, seen: &mut BTreeSet<ConstName>) -> bool {
        match p {
            Term::One | Term::Zero => true,
            Term::Var(_) => false,
            Term::Prefix(_, q) => matches!(**q, Term::Const(_)) && go(q, env, seen),
            Term::Sum(l, r) => go(l, env, seen) && go(r, env, seen),
            Term::Const(c) => {
                if !seen.insert(c.clone()) {
                    return true;
                }
                env.body(c).is_some_and(|b| go(b, env, seen))
            }
        }
    }
    go(p, env, &mut BTreeSet::new())
}

/// Length measure. A constant re-entered while its own body is being measured
/// counts as the variable it recursively closes.
pub fn len(p: &Term, env: &Env) -> usize {
    fn go(p: &Term, env: &Env, ancestors: &mut Vec<ConstName>) -> usize {
        match p {
            Term::One | Term::Zero | Term::Prefix(Label::Sym(_), _) => 0,
            Term::Var(_) => 1,
            Term::Prefix(Label::Eps, q) => match go(q, env, ancestors) {
                0 => 0,
                n => n + 1,
            },
            Term::Sum(l, r) => go(l, env, ancestors) + go(r, env, ancestors),
            Term::Const(c) => {
                if ancestors.contains(c) {
                    return 1;
                }
                let Some(body) = env.body(c) else { return 0 };
                ancestors.push(c.clone());
                let n = go(body, env, ancestors);
                ancestors.pop();
                n
            }
        }
    }
    go(p, env, &mut Vec::new())
}

/// Occurrences of `x` reachable from `p` without crossing an alphabet prefix,
/// counting each constant body once.
pub fn count_unguarded(x: &VarName, p: &Term, env: &Env) -> usize {
    fn go(x: &VarName, p: &Term, env: &Env, seen: &mut BTreeSet<ConstName>) -> usize {
        match p {
            Term::Var(y) => usize::from(y == x),
            Term::Prefix(Label::Eps, q) => go(x, q, env, seen),
            Term::Sum(l, r) => go(x, l, env, seen) + go(x, r, env, seen),
            Term::Const(c) => {
                if !seen.insert(c.clone()) {
                    return 0;
                }
                env.body(c).map_or(0, |b| go(x, b, env, seen))
            }
            _ => 0,
        }
    }
    go(x, p, env, &mut BTreeSet::new())
}

/// Variables of `p` and of every body reachable from it.
pub fn free_vars(p: &Term, env: &Env) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    p.var_refs(&mut out);
    for c in bfs_consts(p, env) {
        if let Some(b) = env.body(&c) {
            b.var_refs(&mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_system, parse_term, ParseMode, Process};
    use super::*;

    fn sys(src: &str) -> Process {
        parse_system(src, ParseMode::User).unwrap()
    }

    fn t(src: &str) -> Term {
        parse_term(src, ParseMode::User).unwrap()
    }

    #[test]
    fn consts_follow_bodies() {
        let p = sys("C := b.D\nD := a.(b.D + 1)\n");
        let names: Vec<_> = consts(&p.root, &p.env).into_iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["C", "D"]);
        assert!(consts(&Term::Zero, &p.env).is_empty());
        assert!(consts(&t("a.$x + 1"), &Env::new()).is_empty());
    }

    #[test]
    fn finality() {
        let p = sys("D := a.(b.D + 1)\n");
        assert!(is_final(&Term::One, &p.env));
        assert!(is_final(&t("b.D + 1"), &p.env));
        assert!(!is_final(&t("a.1"), &p.env));
        assert!(!is_final(&p.root, &p.env));
    }

    #[test]
    fn og_examples() {
        assert!(!og(&t("eps.$x + a.1"), &Env::new()));
        let p = sys("C1 := a.C2 + eps.a.C1\nC2 := b.C2 + eps.C1\n");
        assert!(og(&p.root, &p.env));
        assert!(is_og_system(&p.root, &p.env));
        assert!(og(&t("a.$x"), &Env::new()));
        let loop_sys = sys("C := eps.C + a.1\n");
        assert!(!og(&loop_sys.root, &loop_sys.env));
    }

    #[test]
    fn og_of_term_does_not_look_behind_symbols() {
        let p = sys("root a.C\nC := eps.C + 1\n");
        assert!(og(&p.root, &p.env));
        assert!(!is_og_system(&p.root, &p.env));
    }

    #[test]
    fn normal_form_examples() {
        assert!(!nf(&t("a.b.1"), &Env::new()));
        let p = sys("C := a.b.C + 1\n");
        assert!(!nf(&p.root, &p.env));
        let q = sys("C := a.C + 1\n");
        assert!(nf(&q.root, &q.env));
    }

    #[test]
    fn length_examples() {
        let env = Env::new();
        assert_eq!(len(&t("a.$y"), &env), 0);
        assert_eq!(len(&t("$x"), &env), 1);
        assert_eq!(len(&t("eps.$x"), &env), 2);
        let p = sys("C := eps.C + a.1\n");
        assert_eq!(len(&p.root, &p.env), 2);
    }

    #[test]
    fn unguarded_counts() {
        let p = sys("root eps.$x + a.$x + eps.D\nD := eps.D + eps.$x\n");
        let x = VarName::new("x").unwrap();
        assert_eq!(count_unguarded(&x, &p.root, &p.env), 2);
        assert_eq!(count_unguarded(&x, &t("a.$x"), &p.env), 0);
        assert_eq!(count_unguarded(&x, &t("$x + $x"), &p.env), 2);
    }
}
