//! Bidirectional checker for marker-annotated terms.
//!
//! Every bound variable is recorded with the `!`-nesting level at which it
//! was bound. λ-, pair-, case- and context-bound variables are linear: they
//! may be used once, at their own level. A variable bound by `let u be !x`
//! may either be used any number of times at its own level (multiplexing)
//! or exactly once one level deeper (promotion), never both.
//!
//! Definitions of a module are available to later ones as globals. A
//! global's ascription is generalized over its free type variables (in
//! order of first occurrence), so a reference to a polymorphic global is
//! written `g @[A] @[B]`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::formula::{subst_type, Formula};
use crate::calculus::free_vars;
use crate::syntax::{Marker, Name, Path, SourceModule, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Usage {
    Unused,
    Used,
    Promoted,
}

/// A typing context: an ordered list of linear hypotheses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    pub entries: Vec<(Name, Formula, Usage)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, a: Formula) -> Self {
        self.entries.push((Name::new(x), a, Usage::Unused));
        self
    }

    pub fn usage(&self, x: &str) -> Option<Usage> {
        self.entries.iter().rev().find(|e| e.0.as_str() == x).map(|e| e.2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Judgement {
    pub context: Context,
    pub term: Term,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TypeErrorKind {
    TypeMismatch { expected: String, found: String },
    LinearityViolation { var: String },
    DepthViolation { var: String },
    ForallEscape { tvar: String, var: String },
    UnknownVariable { var: String },
    CannotInfer,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub struct TypeError {
    pub path: Path,
    #[serde(flatten)]
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::TypeMismatch { expected, found } => {
                write!(f, "type mismatch: expected {expected}, found {found}")?
            }
            TypeErrorKind::LinearityViolation { var } => {
                write!(f, "linearity violation: `{var}` used more than allowed")?
            }
            TypeErrorKind::DepthViolation { var } => {
                write!(f, "depth violation: `{var}` used under `!` without a banged binder")?
            }
            TypeErrorKind::ForallEscape { tvar, var } => {
                write!(f, "cannot generalize `{tvar}`: it is free in the type of `{var}`")?
            }
            TypeErrorKind::UnknownVariable { var } => write!(f, "unknown variable `{var}`")?,
            TypeErrorKind::CannotInfer => {
                write!(f, "cannot infer a type here; an annotation is needed")?
            }
        }
        write!(f, " (at path {:?})", self.path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Linear,
    Exp,
}

#[derive(Clone, Debug)]
struct Entry {
    name: Name,
    ty: Formula,
    kind: Kind,
    level: usize,
    uses: usize,
    promoted: bool,
}

struct Checker<'g> {
    entries: Vec<Entry>,
    globals: &'g BTreeMap<Name, Formula>,
    path: Path,
}

type Res<T> = Result<T, TypeError>;

fn shape(s: &str) -> String {
    s.to_string()
}

impl Checker<'_> {
    fn err<T>(&self, kind: TypeErrorKind) -> Res<T> {
        Err(TypeError { path: self.path.clone(), kind })
    }

    fn mismatch<T>(&self, expected: impl fmt::Display, found: &Formula) -> Res<T> {
        self.err(TypeErrorKind::TypeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }

    fn at<T>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        self.path.push(i);
        let r = f(self)?;
        self.path.pop();
        Ok(r)
    }

    fn bind<T>(
        &mut self,
        binds: Vec<(Name, Formula, Kind)>,
        level: usize,
        f: impl FnOnce(&mut Self) -> Res<T>,
    ) -> Res<T> {
        let n = self.entries.len();
        for (name, ty, kind) in binds {
            self.entries.push(Entry { name, ty, kind, level, uses: 0, promoted: false });
        }
        let r = f(self)?;
        self.entries.truncate(n);
        Ok(r)
    }

    fn var(&mut self, x: &Name, level: usize) -> Res<Formula> {
        let Some(i) = self.entries.iter().rposition(|e| &e.name == x) else {
            return match self.globals.get(x) {
                Some(ty) => Ok(ty.clone()),
                None => self.err(TypeErrorKind::UnknownVariable { var: x.to_string() }),
            };
        };
        let var = x.to_string();
        let e = &self.entries[i];
        match (e.kind, level) {
            (Kind::Linear, l) if l == e.level => {
                if e.uses > 0 {
                    return self.err(TypeErrorKind::LinearityViolation { var });
                }
            }
            (Kind::Exp, l) if l == e.level => {
                if e.promoted {
                    return self.err(TypeErrorKind::LinearityViolation { var });
                }
            }
            (Kind::Exp, l) if l == e.level + 1 => {
                if e.promoted || e.uses > 0 {
                    return self.err(TypeErrorKind::LinearityViolation { var });
                }
                let ty = e.ty.clone();
                self.entries[i].promoted = true;
                return Ok(ty);
            }
            _ => return self.err(TypeErrorKind::DepthViolation { var }),
        }
        let ty = e.ty.clone();
        self.entries[i].uses += 1;
        Ok(ty)
    }

    fn expect_bang(&self, f: Formula) -> Res<Formula> {
        match f {
            Formula::Bang(a) => Ok(*a),
            other => self.mismatch(shape("!_"), &other),
        }
    }

    /// Type a let-like or case form: `subject` is inferred, `body` is
    /// continued in either mode.
    fn infer(&mut self, t: &Term, level: usize) -> Res<Formula> {
        match t {
            Term::Var(x) => self.var(x, level),
            Term::Unit => Ok(Formula::One),
            Term::Abs(x, Some(a), body) => {
                let b = self.at(0, |c| {
                    c.bind(vec![(x.clone(), a.clone(), Kind::Linear)], level, |c| {
                        c.infer(body, level)
                    })
                })?;
                Ok(Formula::lolli(a.clone(), b))
            }
            Term::Abs(_, None, _) | Term::Inl(_) | Term::Inr(_) => {
                self.err(TypeErrorKind::CannotInfer)
            }
            Term::App(f, a) => {
                let ft = self.at(0, |c| c.infer(f, level))?;
                match ft {
                    Formula::Lolli(dom, cod) => {
                        self.at(1, |c| c.check(a, &dom, level))?;
                        Ok(*cod)
                    }
                    other => self.at(0, |c| c.mismatch(shape("_ -o _"), &other)),
                }
            }
            Term::Bang(b) => Ok(Formula::bang(self.at(0, |c| c.infer(b, level + 1))?)),
            Term::Pair(l, r) => {
                let a = self.at(0, |c| c.infer(l, level))?;
                let b = self.at(1, |c| c.infer(r, level))?;
                Ok(Formula::tensor(a, b))
            }
            Term::Marker(Marker::Gen(a), b) => {
                let body = self.at(0, |c| c.infer(b, level))?;
                self.escape_check(a, b)?;
                Ok(Formula::forall(a.as_str(), body))
            }
            Term::Marker(Marker::Inst(arg), b) => {
                let ft = self.at(0, |c| c.infer(b, level))?;
                match ft {
                    Formula::Forall(a, body) => Ok(subst_type(&body, &a, arg)),
                    other => self.at(0, |c| c.mismatch(shape("forall _. _"), &other)),
                }
            }
            Term::Marker(Marker::Fold(f), b) => {
                let Formula::Mu(x, body) = f else {
                    return self.mismatch(shape("mu _. _"), f);
                };
                let unfolded = subst_type(body, x, f);
                self.at(0, |c| c.check(b, &unfolded, level))?;
                Ok(f.clone())
            }
            Term::Marker(Marker::Unfold, b) => {
                let ft = self.at(0, |c| c.infer(b, level))?;
                match &ft {
                    Formula::Mu(x, body) => Ok(subst_type(body, x, &ft)),
                    other => self.at(0, |c| c.mismatch(shape("mu _. _"), other)),
                }
            }
            _ => self.elim(t, level, None),
        }
    }

    fn check(&mut self, t: &Term, expected: &Formula, level: usize) -> Res<()> {
        match (t, expected) {
            (Term::Abs(x, ann, body), Formula::Lolli(dom, cod)) => {
                if let Some(a) = ann {
                    if !a.alpha_eq(dom) {
                        return self.mismatch(expected, &Formula::lolli(a.clone(), (**cod).clone()));
                    }
                }
                self.at(0, |c| {
                    c.bind(vec![(x.clone(), (**dom).clone(), Kind::Linear)], level, |c| {
                        c.check(body, cod, level)
                    })
                })
            }
            (Term::Bang(b), Formula::Bang(a)) => self.at(0, |c| c.check(b, a, level + 1)),
            (Term::Pair(l, r), Formula::Tensor(a, b)) => {
                self.at(0, |c| c.check(l, a, level))?;
                self.at(1, |c| c.check(r, b, level))
            }
            (Term::Inl(b), Formula::Plus(a, _)) | (Term::Inr(b), Formula::Plus(_, a)) => {
                self.at(0, |c| c.check(b, a, level))
            }
            (Term::Inl(_) | Term::Inr(_), _) => self.mismatch(expected, &Formula::plus(
                Formula::var("_"),
                Formula::var("_"),
            )),
            (Term::Marker(Marker::Gen(a), b), Formula::Forall(y, body)) => {
                let inner = subst_type(body, y, &Formula::Var(a.clone()));
                self.at(0, |c| c.check(b, &inner, level))?;
                self.escape_check(a, b)
            }
            (Term::LetBang(..) | Term::Let(..) | Term::LetPair(..) | Term::Case(..), _) => {
                self.elim(t, level, Some(expected)).map(|_| ())
            }
            _ => {
                let found = self.infer(t, level)?;
                if found.alpha_eq(expected) {
                    Ok(())
                } else {
                    self.mismatch(expected, &found)
                }
            }
        }
    }

    fn body(&mut self, t: &Term, level: usize, expected: Option<&Formula>) -> Res<Formula> {
        match expected {
            Some(e) => self.check(t, e, level).map(|_| e.clone()),
            None => self.infer(t, level),
        }
    }

    /// Elimination forms, in checking mode when `expected` is given.
    fn elim(&mut self, t: &Term, level: usize, expected: Option<&Formula>) -> Res<Formula> {
        match t {
            Term::LetBang(s, x, b) => {
                let st = self.at(0, |c| c.infer(s, level))?;
                let a = self.at(0, |c| c.expect_bang(st))?;
                self.at(1, |c| {
                    c.bind(vec![(x.clone(), a, Kind::Exp)], level, |c| c.body(b, level, expected))
                })
            }
            Term::Let(s, x, b) => {
                let a = self.at(0, |c| c.infer(s, level))?;
                self.at(1, |c| {
                    c.bind(vec![(x.clone(), a, Kind::Linear)], level, |c| {
                        c.body(b, level, expected)
                    })
                })
            }
            Term::LetPair(s, x, y, b) => {
                let st = self.at(0, |c| c.infer(s, level))?;
                let Formula::Tensor(l, r) = st else {
                    return self.at(0, |c| c.mismatch(shape("_ * _"), &st));
                };
                if x == y {
                    return self.err(TypeErrorKind::LinearityViolation { var: x.to_string() });
                }
                self.at(1, |c| {
                    c.bind(
                        vec![(x.clone(), *l, Kind::Linear), (y.clone(), *r, Kind::Linear)],
                        level,
                        |c| c.body(b, level, expected),
                    )
                })
            }
            Term::Case(s, x, l, y, r) => {
                let st = self.at(0, |c| c.infer(s, level))?;
                let Formula::Plus(a, b) = st else {
                    return self.at(0, |c| c.mismatch(shape("_ + _"), &st));
                };
                let snapshot = self.entries.clone();
                let lt = self.at(1, |c| {
                    c.bind(vec![(x.clone(), *a, Kind::Linear)], level, |c| {
                        c.body(l, level, expected)
                    })
                })?;
                let after_left = std::mem::replace(&mut self.entries, snapshot);
                let rt = self.at(2, |c| {
                    c.bind(vec![(y.clone(), *b, Kind::Linear)], level, |c| {
                        c.body(r, level, Some(expected.unwrap_or(&lt)))
                    })
                })?;
                for (e, o) in self.entries.iter_mut().zip(after_left) {
                    if (e.promoted && o.uses > 0) || (o.promoted && e.uses > 0) {
                        return Err(TypeError {
                            path: self.path.clone(),
                            kind: TypeErrorKind::LinearityViolation { var: e.name.to_string() },
                        });
                    }
                    e.uses = e.uses.max(o.uses);
                    e.promoted |= o.promoted;
                }
                Ok(rt)
            }
            _ => unreachable!("elim called on a non-elimination form"),
        }
    }

    /// Side condition of ∀-introduction: `a` must not occur free in the
    /// type of any term variable free in `t`.
    fn escape_check(&self, a: &Name, t: &Term) -> Res<()> {
        for x in free_vars(t) {
            if let Some(e) = self.entries.iter().rev().find(|e| e.name == x) {
                if e.ty.mentions_free(a) {
                    return self.err(TypeErrorKind::ForallEscape {
                        tvar: a.to_string(),
                        var: x.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    fn context(&self) -> Context {
        Context {
            entries: self
                .entries
                .iter()
                .map(|e| {
                    let u = if e.promoted {
                        Usage::Promoted
                    } else if e.uses > 0 {
                        Usage::Used
                    } else {
                        Usage::Unused
                    };
                    (e.name.clone(), e.ty.clone(), u)
                })
                .collect(),
        }
    }
}

fn run<'g>(
    ctx: &Context,
    globals: &'g BTreeMap<Name, Formula>,
) -> Checker<'g> {
    let entries = ctx
        .entries
        .iter()
        .map(|(name, ty, u)| Entry {
            name: name.clone(),
            ty: ty.clone(),
            kind: Kind::Linear,
            level: 0,
            uses: usize::from(*u != Usage::Unused),
            promoted: false,
        })
        .collect();
    Checker { entries, globals, path: Vec::new() }
}

fn check_with(
    ctx: &Context,
    globals: &BTreeMap<Name, Formula>,
    t: &Term,
    expected: Option<&Formula>,
) -> Res<Judgement> {
    let mut c = run(ctx, globals);
    let formula = match expected {
        Some(e) => {
            c.check(t, e, 0)?;
            e.clone()
        }
        None => c.infer(t, 0)?,
    };
    Ok(Judgement { context: c.context(), term: t.clone(), formula })
}

/// Check `ctx ⊢ t : expected`.
pub fn check(ctx: &Context, t: &Term, expected: &Formula) -> Result<Judgement, TypeError> {
    check_with(ctx, &BTreeMap::new(), t, Some(expected))
}

/// Infer a type for `t`; binders must be annotated.
pub fn infer(ctx: &Context, t: &Term) -> Result<Judgement, TypeError> {
    check_with(ctx, &BTreeMap::new(), t, None)
}

/// Outcome of checking one definition.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// The ascription (or the inferred type) holds.
    Typed(Formula),
    Failed(TypeError),
    /// No ascription and no type could be inferred.
    Unchecked,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModuleReport {
    pub entries: Vec<(Name, Outcome)>,
}

impl ModuleReport {
    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.entries.iter().rev().find(|(n, _)| n.as_str() == name).map(|(_, o)| o)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Name, &TypeError)> {
        self.entries.iter().filter_map(|(n, o)| match o {
            Outcome::Failed(e) => Some((n, e)),
            _ => None,
        })
    }

    pub fn all_ok(&self) -> bool {
        self.failures().next().is_none()
    }
}

fn generalize(f: &Formula) -> Formula {
    f.free_vars_ordered()
        .into_iter()
        .rev()
        .fold(f.clone(), |acc, a| Formula::Forall(a, Box::new(acc)))
}

/// Check every definition; typed definitions become globals for the rest.
pub fn check_module(m: &SourceModule) -> ModuleReport {
    let mut globals = BTreeMap::new();
    let mut report = ModuleReport::default();
    for d in &m.defs {
        let outcome = match &d.ascription {
            Some(a) => match check_with(&Context::new(), &globals, &d.body, Some(a)) {
                Ok(j) => Outcome::Typed(j.formula),
                Err(e) => Outcome::Failed(e),
            },
            None => match check_with(&Context::new(), &globals, &d.body, None) {
                Ok(j) => Outcome::Typed(j.formula),
                Err(_) => Outcome::Unchecked,
            },
        };
        match &outcome {
            Outcome::Typed(f) => {
                globals.insert(d.name.clone(), generalize(f));
            }
            _ => {
                globals.remove(&d.name);
            }
        }
        report.entries.push((d.name.clone(), outcome));
    }
    report
}
