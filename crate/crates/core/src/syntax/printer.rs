//! Canonical concrete syntax. Applications are always printed with their
//! own parentheses, `(f a)`, which keeps the output close to the usual
//! presentation of the calculus and makes the printer trivially
//! re-parseable.

use std::fmt::{self, Write};

use super::ast::{Marker, Term};
use super::module::SourceModule;
use crate::types::Formula;

/// Render a term in the concrete syntax accepted by the parser.
pub fn print(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t).expect("writing to a String cannot fail");
    s
}

/// Render a whole module, one definition per line.
pub fn print_module(m: &SourceModule) -> String {
    let mut s = String::new();
    for d in &m.defs {
        match &d.ascription {
            Some(f) => writeln!(s, "def {} : {} =\n  {}\n", d.name, f, print(&d.body)),
            None => writeln!(s, "def {} =\n  {}\n", d.name, print(&d.body)),
        }
        .expect("writing to a String cannot fail");
    }
    s
}

/// Binder forms extend to the right and need parentheses when nested
/// inside an operand position.
fn is_open(t: &Term) -> bool {
    matches!(
        t,
        Term::Abs(..) | Term::LetBang(..) | Term::Let(..) | Term::LetPair(..) | Term::Case(..)
    )
}

fn write_operand(out: &mut String, t: &Term) -> fmt::Result {
    if is_open(t) {
        out.push('(');
        write_term(out, t)?;
        out.push(')');
        Ok(())
    } else {
        write_term(out, t)
    }
}

fn write_annotation(out: &mut String, f: &Formula) -> fmt::Result {
    match f {
        Formula::Forall(..) | Formula::Mu(..) => write!(out, "({f})"),
        _ => write!(out, "{f}"),
    }
}

fn write_term(out: &mut String, t: &Term) -> fmt::Result {
    match t {
        Term::Var(x) => write!(out, "{x}"),
        Term::Unit => out.write_str("()"),
        Term::Abs(x, ann, body) => {
            write!(out, "\\{x}")?;
            if let Some(f) = ann {
                out.push(':');
                write_annotation(out, f)?;
            }
            out.push_str(". ");
            write_term(out, body)
        }
        Term::App(f, a) => {
            out.push('(');
            write_operand(out, f)?;
            out.push(' ');
            write_operand(out, a)?;
            out.push(')');
            Ok(())
        }
        Term::Bang(b) => {
            out.push('!');
            write_operand(out, b)
        }
        Term::LetBang(s, x, b) => {
            out.push_str("let ");
            write_operand(out, s)?;
            write!(out, " be !{x} in ")?;
            write_term(out, b)
        }
        Term::Let(s, x, b) => {
            out.push_str("let ");
            write_operand(out, s)?;
            write!(out, " be {x} in ")?;
            write_term(out, b)
        }
        Term::Pair(l, r) => {
            out.push('<');
            write_term(out, l)?;
            out.push_str(", ");
            write_term(out, r)?;
            out.push('>');
            Ok(())
        }
        Term::LetPair(s, x, y, b) => {
            out.push_str("let ");
            write_operand(out, s)?;
            write!(out, " be <{x}, {y}> in ")?;
            write_term(out, b)
        }
        Term::Inl(b) => {
            out.push_str("inl(");
            write_term(out, b)?;
            out.push(')');
            Ok(())
        }
        Term::Inr(b) => {
            out.push_str("inr(");
            write_term(out, b)?;
            out.push(')');
            Ok(())
        }
        Term::Case(s, x, l, y, r) => {
            out.push_str("case ");
            write_operand(out, s)?;
            write!(out, " of inl({x}) => ")?;
            write_operand(out, l)?;
            write!(out, " | inr({y}) => ")?;
            write_term(out, r)
        }
        Term::Marker(Marker::Inst(f), b) => {
            out.push('(');
            write_operand(out, b)?;
            write!(out, " @[{f}])")
        }
        Term::Marker(m, b) => {
            match m {
                Marker::Gen(a) => write!(out, "gen[{a}] ")?,
                Marker::Fold(f) => write!(out, "fold[{f}] ")?,
                Marker::Unfold => out.push_str("unfold "),
                Marker::Inst(_) => unreachable!("handled above"),
            }
            write_operand(out, b)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Name};

    #[test]
    fn prints_variable() {
        assert_eq!(print(&Term::Var(Name::new("x"))), "x");
    }

    #[test]
    fn prints_integer_two() {
        let t = parse_term(r"\s.\x. let s be !s' in (s' (s' x))").unwrap();
        assert_eq!(print(&t), r"\s. \x. let s be !s' in (s' (s' x))");
    }

    #[test]
    fn prints_pair() {
        assert_eq!(print(&Term::pair(Term::var("a"), Term::var("b"))), "<a, b>");
    }

    #[test]
    fn prints_beta_redex_with_parenthesized_function() {
        let t = Term::app(Term::abs("x", Term::var("x")), Term::var("y"));
        assert_eq!(print(&t), r"((\x. x) y)");
    }

    #[test]
    fn nested_open_forms_round_trip() {
        for src in [
            r"let (let a be !b in c) be !x in (x (\y. y))",
            r"case (case u of inl(a) => a | inr(b) => b) of inl(x) => (case x of inl(p) => p | inr(q) => q) | inr(y) => \z. z",
            r"gen[a] (\x:(forall b. b). (x @[a]))",
            r"!(fold[mu X. 1 + X] inl(()))",
            r"((unfold l) @[1 * 1])",
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(parse_term(&print(&t)).unwrap(), t, "{src}");
        }
    }
}
