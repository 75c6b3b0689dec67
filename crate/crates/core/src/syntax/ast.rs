//! Pseudo-terms of the soft lambda-calculus, including the derived
//! connectives (pairs, injections, case, unit) and the type markers used
//! by the checker.

use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::types::Formula;

/// An identifier. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part of the name before any `$k` renaming suffix.
    pub fn base(&self) -> &str {
        match self.0.find('$') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Name::from)
    }
}

/// Type-level annotations that carry no computational content.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marker {
    /// `gen[a] t`: introduce `forall a`.
    Gen(Name),
    /// `t @[A]`: instantiate the outermost `forall`.
    Inst(Formula),
    /// `fold[mu X. A] t`
    Fold(Formula),
    /// `unfold t`
    Unfold,
}

/// A pseudo-term. Child indices (used by [`Path`]) are listed per variant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    /// `\x[:A]. t`: body = 0
    Abs(Name, Option<Formula>, Box<Term>),
    /// `(t u)`: fun = 0, arg = 1
    App(Box<Term>, Box<Term>),
    /// `!t`: 0
    Bang(Box<Term>),
    /// `let u be !x in t`: subject = 0, body = 1
    LetBang(Box<Term>, Name, Box<Term>),
    /// `let u be x in t`, sugar for `((\x. t) u)`: subject = 0, body = 1
    Let(Box<Term>, Name, Box<Term>),
    /// `<t, u>`: 0, 1
    Pair(Box<Term>, Box<Term>),
    /// `let u be <x, y> in t`: subject = 0, body = 1
    LetPair(Box<Term>, Name, Name, Box<Term>),
    /// `inl(t)`: 0
    Inl(Box<Term>),
    /// `inr(t)`: 0
    Inr(Box<Term>),
    /// `case u of inl(x) => t1 | inr(y) => t2`: subject = 0, t1 = 1, t2 = 2
    Case(Box<Term>, Name, Box<Term>, Name, Box<Term>),
    /// `()`
    Unit,
    /// marker around a term: 0
    Marker(Marker, Box<Term>),
}

/// Child indices from the root to a node.
pub type Path = Vec<usize>;

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(Name::new(x))
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(Name::new(x), None, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application `(((f a1) a2) ...)`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn bang(t: Term) -> Term {
        Term::Bang(Box::new(t))
    }

    pub fn let_bang(subject: Term, x: &str, body: Term) -> Term {
        Term::LetBang(Box::new(subject), Name::new(x), Box::new(body))
    }

    pub fn pair(l: Term, r: Term) -> Term {
        Term::Pair(Box::new(l), Box::new(r))
    }

    pub fn let_pair(subject: Term, x: &str, y: &str, body: Term) -> Term {
        Term::LetPair(Box::new(subject), Name::new(x), Name::new(y), Box::new(body))
    }

    pub fn inl(t: Term) -> Term {
        Term::Inl(Box::new(t))
    }

    pub fn inr(t: Term) -> Term {
        Term::Inr(Box::new(t))
    }

    pub fn case(subject: Term, x: &str, left: Term, y: &str, right: Term) -> Term {
        Term::Case(
            Box::new(subject),
            Name::new(x),
            Box::new(left),
            Name::new(y),
            Box::new(right),
        )
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Unit => vec![],
            Term::Abs(_, _, b) | Term::Bang(b) | Term::Inl(b) | Term::Inr(b) => vec![b],
            Term::Marker(_, b) => vec![b],
            Term::App(a, b) | Term::Pair(a, b) => vec![a, b],
            Term::LetBang(a, _, b) | Term::Let(a, _, b) | Term::LetPair(a, _, _, b) => {
                vec![a, b]
            }
            Term::Case(s, _, l, _, r) => vec![s, l, r],
        }
    }

    pub fn child(&self, i: usize) -> Option<&Term> {
        self.children().get(i).copied()
    }

    pub fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (Term::Abs(_, _, b), 0)
            | (Term::Bang(b), 0)
            | (Term::Inl(b), 0)
            | (Term::Inr(b), 0)
            | (Term::Marker(_, b), 0) => Some(b),
            (Term::App(a, _), 0) | (Term::Pair(a, _), 0) => Some(a),
            (Term::App(_, b), 1) | (Term::Pair(_, b), 1) => Some(b),
            (Term::LetBang(a, _, _), 0) | (Term::Let(a, _, _), 0) => Some(a),
            (Term::LetBang(_, _, b), 1) | (Term::Let(_, _, b), 1) => Some(b),
            (Term::LetPair(a, _, _, _), 0) => Some(a),
            (Term::LetPair(_, _, _, b), 1) => Some(b),
            (Term::Case(s, _, _, _, _), 0) => Some(s),
            (Term::Case(_, _, l, _, _), 1) => Some(l),
            (Term::Case(_, _, _, _, r), 2) => Some(r),
            _ => None,
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.child(i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        let mut t = self;
        for &i in path {
            t = t.child_mut(i)?;
        }
        Some(t)
    }

    /// Number of nodes, counting every constructor once.
    pub fn node_count(&self) -> usize {
        1 + self.children().into_iter().map(Term::node_count).sum::<usize>()
    }

    pub fn has_markers(&self) -> bool {
        match self {
            Term::Marker(..) => true,
            Term::Abs(_, Some(_), _) => true,
            t => t.children().into_iter().any(Term::has_markers),
        }
    }

    pub fn has_plain_let(&self) -> bool {
        match self {
            Term::Let(..) => true,
            t => t.children().into_iter().any(Term::has_plain_let),
        }
    }

    /// True when the term only uses the five constructs of the core grammar.
    pub fn is_core(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, None, b) | Term::Bang(b) => b.is_core(),
            Term::App(a, b) | Term::LetBang(a, _, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }
}

/// Remove every type marker and binder annotation.
pub fn erase_markers(t: &Term) -> Term {
    match t {
        Term::Var(x) => Term::Var(x.clone()),
        Term::Unit => Term::Unit,
        Term::Abs(x, _, b) => Term::Abs(x.clone(), None, Box::new(erase_markers(b))),
        Term::App(a, b) => Term::app(erase_markers(a), erase_markers(b)),
        Term::Bang(b) => Term::bang(erase_markers(b)),
        Term::LetBang(s, x, b) => {
            Term::LetBang(Box::new(erase_markers(s)), x.clone(), Box::new(erase_markers(b)))
        }
        Term::Let(s, x, b) => {
            Term::Let(Box::new(erase_markers(s)), x.clone(), Box::new(erase_markers(b)))
        }
        Term::Pair(a, b) => Term::pair(erase_markers(a), erase_markers(b)),
        Term::LetPair(s, x, y, b) => Term::LetPair(
            Box::new(erase_markers(s)),
            x.clone(),
            y.clone(),
            Box::new(erase_markers(b)),
        ),
        Term::Inl(b) => Term::inl(erase_markers(b)),
        Term::Inr(b) => Term::inr(erase_markers(b)),
        Term::Case(s, x, l, y, r) => Term::Case(
            Box::new(erase_markers(s)),
            x.clone(),
            Box::new(erase_markers(l)),
            y.clone(),
            Box::new(erase_markers(r)),
        ),
        Term::Marker(_, b) => erase_markers(b),
    }
}

/// Replace every `let u be x in t` by `((\x. t) u)`.
pub fn expand_plain_let(t: &Term) -> Term {
    match t {
        Term::Let(s, x, b) => Term::app(
            Term::Abs(x.clone(), None, Box::new(expand_plain_let(b))),
            expand_plain_let(s),
        ),
        Term::Var(x) => Term::Var(x.clone()),
        Term::Unit => Term::Unit,
        Term::Abs(x, a, b) => Term::Abs(x.clone(), a.clone(), Box::new(expand_plain_let(b))),
        Term::App(a, b) => Term::app(expand_plain_let(a), expand_plain_let(b)),
        Term::Bang(b) => Term::bang(expand_plain_let(b)),
        Term::LetBang(s, x, b) => Term::LetBang(
            Box::new(expand_plain_let(s)),
            x.clone(),
            Box::new(expand_plain_let(b)),
        ),
        Term::Pair(a, b) => Term::pair(expand_plain_let(a), expand_plain_let(b)),
        Term::LetPair(s, x, y, b) => Term::LetPair(
            Box::new(expand_plain_let(s)),
            x.clone(),
            y.clone(),
            Box::new(expand_plain_let(b)),
        ),
        Term::Inl(b) => Term::inl(expand_plain_let(b)),
        Term::Inr(b) => Term::inr(expand_plain_let(b)),
        Term::Case(s, x, l, y, r) => Term::Case(
            Box::new(expand_plain_let(s)),
            x.clone(),
            Box::new(expand_plain_let(l)),
            y.clone(),
            Box::new(expand_plain_let(r)),
        ),
        Term::Marker(m, b) => Term::Marker(m.clone(), Box::new(expand_plain_let(b))),
    }
}

/// Erase markers and expand plain lets: the form the reduction engine and
/// the metrics operate on.
pub fn to_engine(t: &Term) -> Term {
    expand_plain_let(&erase_markers(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn erase_inst_marker_around_identity() {
        let t = parse_term(r"(\x. x) @[a -o a]").unwrap();
        assert_eq!(erase_markers(&t), Term::abs("x", Term::var("x")));
    }

    #[test]
    fn erase_is_identity_on_marker_free_terms() {
        let t = parse_term(r"\s.\x. let s be !s' in (s' (s' x))").unwrap();
        assert_eq!(erase_markers(&t), t);
    }

    #[test]
    fn erase_fold_around_inl_unit() {
        let t = parse_term("fold[mu X. 1 + (A * X)] inl(())").unwrap();
        assert_eq!(erase_markers(&t), Term::inl(Term::Unit));
    }

    #[test]
    fn erase_strips_binder_annotations() {
        let t = parse_term(r"\x:a. gen[b] x").unwrap();
        assert_eq!(erase_markers(&t), Term::abs("x", Term::var("x")));
        assert!(!erase_markers(&t).has_markers());
    }

    #[test]
    fn expand_single_plain_let() {
        let t = parse_term("let y be x in x").unwrap();
        assert_eq!(
            expand_plain_let(&t),
            Term::app(Term::abs("x", Term::var("x")), Term::var("y"))
        );
    }

    #[test]
    fn expand_without_plain_let_is_identity() {
        let t = parse_term(r"let y be !x in <x, inl(())>").unwrap();
        assert_eq!(expand_plain_let(&t), t);
    }

    #[test]
    fn expand_nested_plain_lets() {
        let t = parse_term("let a be x in let b be y in (x y)").unwrap();
        let inner = Term::app(
            Term::abs("y", Term::app(Term::var("x"), Term::var("y"))),
            Term::var("b"),
        );
        let expected = Term::app(Term::abs("x", inner), Term::var("a"));
        assert_eq!(expand_plain_let(&t), expected);
    }

    #[test]
    fn paths_follow_child_convention() {
        let t = parse_term("case u of inl(x) => a | inr(y) => b").unwrap();
        assert_eq!(t.at(&[0]), Some(&Term::var("u")));
        assert_eq!(t.at(&[2]), Some(&Term::var("b")));
        assert_eq!(t.at(&[3]), None);
    }
}
