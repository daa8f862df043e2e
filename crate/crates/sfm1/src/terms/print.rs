//! Deterministic rendering of terms in the concrete syntax.

use std::fmt;

use super::Term;

fn write_operand(t: &Term, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if parens {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::One => f.write_str("1"),
            Term::Zero => f.write_str("0"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Prefix(a, p) => {
                write!(f, "{a}.")?;
                write_operand(p, matches!(**p, Term::Sum(..)), f)
            }
            Term::Sum(l, r) => {
                write!(f, "{l} + ")?;
                write_operand(r, matches!(**r, Term::Sum(..)), f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_term, ParseMode};

    #[test]
    fn right_nested_sums_keep_parentheses() {
        for src in ["a.1 + (b.1 + c.1)", "a.1 + b.1 + c.1", "eps.(a.C + 1) + 0", "a.b.$x"] {
            let t = parse_term(src, ParseMode::User).unwrap();
            assert_eq!(t.to_string(), src);
        }
    }
}
