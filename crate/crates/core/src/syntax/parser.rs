//! Lexer and recursive-descent parser for `.slc` sources.
//!
//! ```text
//! module  ::= { "def" ident [ ":" formula ] "=" term }
//! term    ::= "\" ident [ ":" formula ] "." term
//!           | "let" term "be" ( "!" ident | "<" ident "," ident ">" | ident ) "in" term
//!           | "case" term "of" "inl" "(" ident ")" "=>" term "|" "inr" "(" ident ")" "=>" term
//!           | app
//! app     ::= prefix { prefix | "@[" formula "]" }
//! prefix  ::= ( "!" | "gen[" ident "]" | "fold[" formula "]" | "unfold" ) operand | atom
//! atom    ::= ident | "()" | "(" term ")" | "<" term "," term ">" | "inl(" term ")" | "inr(" term ")"
//! formula ::= "forall" ident "." formula | "mu" ident "." formula | sum [ "-o" formula ]
//! sum     ::= prod [ "+" sum ]        prod ::= unary [ "*" prod ]
//! unary   ::= "!" unary | ident | "1" | "(" formula ")"
//! ```
//!
//! A binder form (`\`, `let`, `case`) may appear as the last operand of an
//! application or prefix operator and then extends as far right as possible.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::{Marker, Name, Term};
use super::module::{Definition, SourceModule};
use crate::types::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate definition `{name}` at {line}:{col}")]
    DuplicateDefinition { name: String, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Lambda,
    Dot,
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
    Bang,
    Colon,
    Eq,
    FatArrow,
    Bar,
    At,
    LBracket,
    RBracket,
    Lolli,
    Star,
    Plus,
    Eof,
}

const KEYWORDS: &[&str] = &[
    "def", "let", "be", "in", "case", "of", "inl", "inr", "gen", "fold", "unfold", "forall", "mu",
];

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'o') => push(Tok::Lolli, 2, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::FatArrow, 2, &mut i, &mut col),
            '\\' | 'λ' => push(Tok::Lambda, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '<' => push(Tok::LAngle, 1, &mut i, &mut col),
            '>' => push(Tok::RAngle, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '@' => push(Tok::At, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '1' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) => {
                push(Tok::One, 1, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '\'' | '_' | '$'))
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Ident(word), line: l0, col: c0 });
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        let found = match &s.tok {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(w) => format!("`{w}`"),
            t => format!("{t:?}"),
        };
        Err(ParseError::Syntax {
            line: s.line,
            col: s.col,
            msg: format!("{}, found {found}", msg.into()),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok(Name::from(w))
            }
            _ => self.err("expected identifier"),
        }
    }

    fn module(&mut self) -> Result<SourceModule, ParseError> {
        let mut defs = Vec::new();
        let mut seen = HashSet::new();
        while *self.peek() != Tok::Eof {
            let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
            self.expect_kw("def")?;
            let name = self.ident()?;
            let ascription = if *self.peek() == Tok::Colon {
                self.bump();
                Some(self.formula()?)
            } else {
                None
            };
            self.expect(Tok::Eq, "`=`")?;
            let body = self.term()?;
            if !seen.insert(name.clone()) {
                return Err(ParseError::DuplicateDefinition {
                    name: name.to_string(),
                    line,
                    col,
                });
            }
            defs.push(Definition { name, ascription, body, line, col });
        }
        Ok(SourceModule { defs })
    }

    fn starts_binder(&self) -> bool {
        *self.peek() == Tok::Lambda || self.is_kw("let") || self.is_kw("case")
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            self.bump();
            let x = self.ident()?;
            let ann = if *self.peek() == Tok::Colon {
                self.bump();
                Some(self.formula()?)
            } else {
                None
            };
            self.expect(Tok::Dot, "`.` after binder")?;
            let body = self.term()?;
            return Ok(Term::Abs(x, ann, Box::new(body)));
        }
        if self.is_kw("let") {
            self.bump();
            let subject = Box::new(self.term()?);
            self.expect_kw("be")?;
            let t = match self.peek() {
                Tok::Bang => {
                    self.bump();
                    let x = self.ident()?;
                    self.expect_kw("in")?;
                    Term::LetBang(subject, x, Box::new(self.term()?))
                }
                Tok::LAngle => {
                    self.bump();
                    let x = self.ident()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let y = self.ident()?;
                    self.expect(Tok::RAngle, "`>`")?;
                    self.expect_kw("in")?;
                    Term::LetPair(subject, x, y, Box::new(self.term()?))
                }
                _ => {
                    let x = self.ident()?;
                    self.expect_kw("in")?;
                    Term::Let(subject, x, Box::new(self.term()?))
                }
            };
            return Ok(t);
        }
        if self.is_kw("case") {
            self.bump();
            let subject = Box::new(self.term()?);
            self.expect_kw("of")?;
            self.expect_kw("inl")?;
            self.expect(Tok::LParen, "`(`")?;
            let x = self.ident()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let left = Box::new(self.term()?);
            self.expect(Tok::Bar, "`|`")?;
            self.expect_kw("inr")?;
            self.expect(Tok::LParen, "`(`")?;
            let y = self.ident()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let right = Box::new(self.term()?);
            return Ok(Term::Case(subject, x, left, y, right));
        }
        self.app()
    }

    fn starts_operand(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) => {
                !KEYWORDS.contains(&w.as_str())
                    || matches!(w.as_str(), "inl" | "inr" | "gen" | "fold" | "unfold")
            }
            Tok::LParen | Tok::LAngle | Tok::Bang => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.prefix()?;
        loop {
            if *self.peek() == Tok::At && *self.peek_at(1) == Tok::LBracket {
                self.bump();
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RBracket, "`]`")?;
                acc = Term::Marker(Marker::Inst(f), Box::new(acc));
            } else if self.starts_binder() {
                let arg = self.term()?;
                return Ok(Term::app(acc, arg));
            } else if self.starts_operand() {
                let arg = self.prefix()?;
                acc = Term::app(acc, arg);
            } else {
                return Ok(acc);
            }
        }
    }

    /// Operand of a prefix operator: another prefix term, or a binder form.
    fn operand(&mut self) -> Result<Term, ParseError> {
        if self.starts_binder() {
            self.term()
        } else {
            self.prefix()
        }
    }

    fn prefix(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Term::bang(self.operand()?));
        }
        if self.is_kw("gen") {
            self.bump();
            self.expect(Tok::LBracket, "`[` after gen")?;
            let a = self.ident()?;
            self.expect(Tok::RBracket, "`]`")?;
            return Ok(Term::Marker(Marker::Gen(a), Box::new(self.operand()?)));
        }
        if self.is_kw("fold") {
            self.bump();
            self.expect(Tok::LBracket, "`[` after fold")?;
            let f = self.formula()?;
            self.expect(Tok::RBracket, "`]`")?;
            return Ok(Term::Marker(Marker::Fold(f), Box::new(self.operand()?)));
        }
        if self.is_kw("unfold") {
            self.bump();
            return Ok(Term::Marker(Marker::Unfold, Box::new(self.operand()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(Term::Unit);
                }
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::LAngle => {
                self.bump();
                let l = self.term()?;
                self.expect(Tok::Comma, "`,` in pair")?;
                let r = self.term()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Term::pair(l, r))
            }
            Tok::Ident(w) if w == "inl" || w == "inr" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if w == "inl" { Term::inl(t) } else { Term::inr(t) })
            }
            Tok::Ident(_) => Ok(Term::Var(self.ident()?)),
            _ => self.err("expected a term"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.is_kw("forall") || self.is_kw("mu") {
            let is_forall = self.is_kw("forall");
            self.bump();
            let a = self.ident()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = Box::new(self.formula()?);
            return Ok(if is_forall {
                Formula::Forall(a, body)
            } else {
                Formula::Mu(a, body)
            });
        }
        let lhs = self.sum()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::lolli(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.prod()?;
        if *self.peek() == Tok::Plus {
            self.bump();
            return Ok(Formula::plus(lhs, self.sum()?));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Star {
            self.bump();
            return Ok(Formula::tensor(lhs, self.prod()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::bang(self.unary()?))
            }
            Tok::One => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(_) => Ok(Formula::Var(self.ident()?)),
            _ => self.err("expected a formula"),
        }
    }

    fn finish<T>(&mut self, v: T) -> Result<T, ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(v)
        } else {
            self.err("unexpected trailing input")
        }
    }
}

fn parser(src: &str) -> Result<Parser, ParseError> {
    Ok(Parser { toks: lex(src)?, pos: 0 })
}

/// Parse a whole `.slc` module.
pub fn parse(src: &str) -> Result<SourceModule, ParseError> {
    let mut p = parser(src)?;
    let m = p.module()?;
    p.finish(m)
}

/// Parse a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = parser(src)?;
    let t = p.term()?;
    p.finish(t)
}

/// Parse a single formula.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = parser(src)?;
    let f = p.formula()?;
    p.finish(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Term {
        Term::abs(
            "s",
            Term::abs(
                "x",
                Term::let_bang(
                    Term::var("s"),
                    "s'",
                    Term::app(Term::var("s'"), Term::app(Term::var("s'"), Term::var("x"))),
                ),
            ),
        )
    }

    #[test]
    fn parses_integer_two() {
        let m = parse(r"def two = \s.\x. let s be !s' in (s' (s' x))").unwrap();
        assert_eq!(m.defs.len(), 1);
        assert_eq!(m.defs[0].name.as_str(), "two");
        assert_eq!(m.defs[0].body, two());
    }

    #[test]
    fn parses_identity() {
        let m = parse(r"def i = \x.x").unwrap();
        assert_eq!(m.defs[0].body, Term::abs("x", Term::var("x")));
    }

    #[test]
    fn unclosed_paren_reports_eof() {
        let err = parse(r"def bad = (\x.").unwrap_err();
        match err {
            ParseError::Syntax { line, col, msg } => {
                assert_eq!((line, col), (1, 15));
                assert!(msg.contains("end of input"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_definition_rejected() {
        let err = parse("def a = x\ndef a = y").unwrap_err();
        assert_eq!(
            err,
            ParseError::DuplicateDefinition { name: "a".into(), line: 2, col: 1 }
        );
    }

    #[test]
    fn application_is_left_associative_and_bang_binds_tighter() {
        let t = parse_term("f !x y").unwrap();
        assert_eq!(
            t,
            Term::app(Term::app(Term::var("f"), Term::bang(Term::var("x"))), Term::var("y"))
        );
    }

    #[test]
    fn parses_sugar_forms() {
        let t = parse_term("let <a, b> be <x, y> in case inl(()) of inl(u) => a | inr(v) => b")
            .unwrap();
        let Term::LetPair(subject, x, y, body) = t else { panic!() };
        assert_eq!(*subject, Term::pair(Term::var("a"), Term::var("b")));
        assert_eq!((x.as_str(), y.as_str()), ("x", "y"));
        assert!(matches!(*body, Term::Case(..)));
    }

    #[test]
    fn parses_markers_and_annotations() {
        let t = parse_term(r"gen[a] \x:forall b. b -o b. (x @[a] unfold y)").unwrap();
        let Term::Marker(Marker::Gen(a), body) = t else { panic!() };
        assert_eq!(a.as_str(), "a");
        let Term::Abs(_, Some(ann), inner) = *body else { panic!() };
        assert_eq!(ann, parse_formula("forall b. b -o b").unwrap());
        let Term::App(f, arg) = *inner else { panic!() };
        assert!(matches!(*f, Term::Marker(Marker::Inst(_), _)));
        assert!(matches!(*arg, Term::Marker(Marker::Unfold, _)));
    }

    #[test]
    fn comments_and_ascriptions() {
        let src = "-- numerals\ndef id : forall a. a -o a = gen[a] \\x:a. x -- trailing\n";
        let m = parse(src).unwrap();
        assert_eq!(m.defs[0].ascription, Some(parse_formula("forall a. a -o a").unwrap()));
    }

    #[test]
    fn trailing_lambda_argument() {
        let t = parse_term(r"f \x. x y").unwrap();
        assert_eq!(
            t,
            Term::app(Term::var("f"), Term::abs("x", Term::app(Term::var("x"), Term::var("y"))))
        );
    }
}
