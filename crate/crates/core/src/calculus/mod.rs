//! Structural analysis of pseudo-terms: free and temporary variables,
//! occurrence counts, the termhood predicate, size, depth and rank.
//!
//! Termhood for the derived constructs follows their typing rules: a pair
//! behaves like an application, `let u be <x,y> in t` like a `let !` whose
//! two binders are linear and never temporary, injections are transparent,
//! and `case` checks each branch against the subject like a `let`, counting
//! occurrences additively (maximum over the two branches).

pub mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Name, Path, Term};

pub use subst::{substitute, substitute_many};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("term contains type markers or binder annotations; erase them first")]
    MarkerPresent,
    #[error("term contains a plain `let`; expand it first")]
    PlainLetPresent,
    #[error("path {0:?} does not address a node")]
    InvalidPath(Path),
}

/// The termhood clause a pseudo-term violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    AbsOverTemporary,
    AbsNonLinear,
    AppTemporaryClash,
    BangHasTemporary,
    BangNonLinear,
    LetTemporaryClash,
    PairTemporaryClash,
    LetPairDuplicateBinder,
    LetPairNonLinear,
    LetPairOverTemporary,
    LetPairTemporaryClash,
    CaseNonLinear,
    CaseOverTemporary,
    CaseTemporaryClash,
    CaseBranchMismatch,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::AbsOverTemporary => "abstraction over temporary variable",
            Clause::AbsNonLinear => "abstracted variable occurs more than once",
            Clause::AppTemporaryClash => {
                "application: a temporary variable of one side is free in the other"
            }
            Clause::BangHasTemporary => "bang clause: body has a temporary variable",
            Clause::BangNonLinear => "bang clause: a free variable of the body does not occur exactly once",
            Clause::LetTemporaryClash => {
                "let: a temporary variable of one side is free in the other"
            }
            Clause::PairTemporaryClash => "pair: a temporary variable of one side is free in the other",
            Clause::LetPairDuplicateBinder => "let-pair binds the same name twice",
            Clause::LetPairNonLinear => "let-pair: a bound variable occurs more than once",
            Clause::LetPairOverTemporary => "let-pair: a bound variable is temporary",
            Clause::CaseNonLinear => "case: a branch variable occurs more than once",
            Clause::CaseOverTemporary => "case: a branch variable is temporary",
            Clause::CaseTemporaryClash => {
                "case: a temporary variable of the subject or a branch is free in the other"
            }
            Clause::LetPairTemporaryClash => {
                "let-pair: a temporary variable of one side is free in the other"
            }
            Clause::CaseBranchMismatch => {
                "case: a variable is temporary in one branch but not in the other"
            }
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub path: Path,
    pub clause: Clause,
}

/// Result of [`analyze`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermInfo {
    pub free_vars: BTreeSet<Name>,
    pub temp_vars: BTreeSet<Name>,
    #[serde(skip)]
    pub occ: BTreeMap<Name, usize>,
    pub size: usize,
    pub depth: usize,
    pub rank: usize,
    pub is_term: bool,
    pub is_well_formed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Occ {
    count: usize,
    temp: bool,
}

struct Node {
    fv: BTreeMap<Name, Occ>,
    size: usize,
    depth: usize,
    rank: usize,
}

impl Node {
    fn temps(&self) -> impl Iterator<Item = &Name> {
        self.fv.iter().filter(|(_, o)| o.temp).map(|(x, _)| x)
    }

    fn is_temp(&self, x: &Name) -> bool {
        self.fv.get(x).is_some_and(|o| o.temp)
    }

    fn count(&self, x: &Name) -> usize {
        self.fv.get(x).map_or(0, |o| o.count)
    }

    fn without(mut self, xs: &[&Name]) -> Self {
        for x in xs {
            self.fv.remove(*x);
        }
        self
    }
}

/// `TV(a) ∩ FV(b) = ∅` and `FV(a) ∩ TV(b) = ∅`.
fn disjoint(a: &Node, b: &Node) -> bool {
    a.temps().all(|x| !b.fv.contains_key(x)) && b.temps().all(|x| !a.fv.contains_key(x))
}

/// Additive union: counts summed, temporary if temporary on either side.
fn merge_sum(a: BTreeMap<Name, Occ>, b: BTreeMap<Name, Occ>) -> BTreeMap<Name, Occ> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (x, o) in small {
        big.entry(x)
            .and_modify(|e| {
                e.count += o.count;
                e.temp |= o.temp;
            })
            .or_insert(o);
    }
    big
}

struct Analyzer {
    path: Path,
    witness: Option<Witness>,
}

impl Analyzer {
    fn fail(&mut self, clause: Clause) {
        if self.witness.is_none() {
            self.witness = Some(Witness { path: self.path.clone(), clause });
        }
    }

    fn child(&mut self, i: usize, t: &Term) -> Result<Node, AnalysisError> {
        self.path.push(i);
        let r = self.node(t);
        self.path.pop();
        r
    }

    fn node(&mut self, t: &Term) -> Result<Node, AnalysisError> {
        Ok(match t {
            Term::Marker(..) | Term::Abs(_, Some(_), _) => return Err(AnalysisError::MarkerPresent),
            Term::Let(..) => return Err(AnalysisError::PlainLetPresent),
            Term::Var(x) => Node {
                fv: BTreeMap::from([(x.clone(), Occ { count: 1, temp: false })]),
                size: 1,
                depth: 0,
                rank: 0,
            },
            Term::Unit => Node { fv: BTreeMap::new(), size: 1, depth: 0, rank: 0 },
            Term::Abs(x, None, body) => {
                let b = self.child(0, body)?;
                if b.is_temp(x) {
                    self.fail(Clause::AbsOverTemporary);
                } else if b.count(x) > 1 {
                    self.fail(Clause::AbsNonLinear);
                }
                Node { size: b.size + 1, ..b.without(&[x]) }
            }
            Term::App(f, a) | Term::Pair(f, a) => {
                let l = self.child(0, f)?;
                let r = self.child(1, a)?;
                if !disjoint(&l, &r) {
                    self.fail(if matches!(t, Term::App(..)) {
                        Clause::AppTemporaryClash
                    } else {
                        Clause::PairTemporaryClash
                    });
                }
                let extra = usize::from(matches!(t, Term::Pair(..)));
                Node {
                    size: l.size + r.size + extra,
                    depth: l.depth.max(r.depth),
                    rank: l.rank.max(r.rank),
                    fv: merge_sum(l.fv, r.fv),
                }
            }
            Term::Bang(body) => {
                let b = self.child(0, body)?;
                if b.temps().next().is_some() {
                    self.fail(Clause::BangHasTemporary);
                } else if b.fv.values().any(|o| o.count != 1) {
                    self.fail(Clause::BangNonLinear);
                }
                let fv = b
                    .fv
                    .into_iter()
                    .map(|(x, o)| (x, Occ { count: o.count, temp: true }))
                    .collect();
                Node { fv, size: b.size + 1, depth: b.depth + 1, rank: b.rank }
            }
            Term::LetBang(subject, x, body) => {
                let s = self.child(0, subject)?;
                let b = self.child(1, body)?;
                let rank = if b.is_temp(x) {
                    s.rank.max(b.rank)
                } else {
                    s.rank.max(b.rank).max(b.count(x))
                };
                let b = b.without(&[x]);
                if !disjoint(&s, &b) {
                    self.fail(Clause::LetTemporaryClash);
                }
                Node {
                    size: s.size + b.size + 1,
                    depth: s.depth.max(b.depth),
                    rank,
                    fv: merge_sum(s.fv, b.fv),
                }
            }
            Term::LetPair(subject, x, y, body) => {
                let s = self.child(0, subject)?;
                let b = self.child(1, body)?;
                if x == y {
                    self.fail(Clause::LetPairDuplicateBinder);
                } else if b.is_temp(x) || b.is_temp(y) {
                    self.fail(Clause::LetPairOverTemporary);
                } else if b.count(x) > 1 || b.count(y) > 1 {
                    self.fail(Clause::LetPairNonLinear);
                }
                let rank = s.rank.max(b.rank).max(b.count(x)).max(b.count(y));
                let b = b.without(&[x, y]);
                if !disjoint(&s, &b) {
                    self.fail(Clause::LetPairTemporaryClash);
                }
                Node {
                    size: s.size + b.size + 1,
                    depth: s.depth.max(b.depth),
                    rank,
                    fv: merge_sum(s.fv, b.fv),
                }
            }
            Term::Inl(body) | Term::Inr(body) => {
                let b = self.child(0, body)?;
                Node { size: b.size + 1, ..b }
            }
            Term::Case(subject, x, left, y, right) => {
                let s = self.child(0, subject)?;
                let l = self.child(1, left)?;
                let r = self.child(2, right)?;
                if l.is_temp(x) || r.is_temp(y) {
                    self.fail(Clause::CaseOverTemporary);
                } else if l.count(x) > 1 || r.count(y) > 1 {
                    self.fail(Clause::CaseNonLinear);
                }
                let l = l.without(&[x]);
                let r = r.without(&[y]);
                if !disjoint(&s, &l) || !disjoint(&s, &r) {
                    self.fail(Clause::CaseTemporaryClash);
                }
                let mismatch = l
                    .fv
                    .iter()
                    .any(|(v, o)| r.fv.get(v).is_some_and(|p| p.temp != o.temp));
                if mismatch {
                    self.fail(Clause::CaseBranchMismatch);
                }
                let mut branches = l.fv;
                for (v, o) in r.fv {
                    branches
                        .entry(v)
                        .and_modify(|e| {
                            e.count = e.count.max(o.count);
                            e.temp |= o.temp;
                        })
                        .or_insert(o);
                }
                Node {
                    size: s.size + l.size + r.size + 1,
                    depth: s.depth.max(l.depth).max(r.depth),
                    rank: s.rank.max(l.rank).max(r.rank),
                    fv: merge_sum(s.fv, branches),
                }
            }
        })
    }
}

/// Compute free/temporary variables, occurrence counts, size, depth, rank
/// and the termhood verdict in one pass.
pub fn analyze(t: &Term) -> Result<TermInfo, AnalysisError> {
    let mut a = Analyzer { path: Vec::new(), witness: None };
    let n = a.node(t)?;
    let free_vars: BTreeSet<Name> = n.fv.keys().cloned().collect();
    let temp_vars: BTreeSet<Name> = n.temps().cloned().collect();
    let occ: BTreeMap<Name, usize> = n.fv.iter().map(|(x, o)| (x.clone(), o.count)).collect();
    let is_term = a.witness.is_none();
    let is_well_formed = is_term && temp_vars.is_empty() && occ.values().all(|&c| c == 1);
    Ok(TermInfo {
        free_vars,
        temp_vars,
        occ,
        size: n.size,
        depth: n.depth,
        rank: n.rank,
        is_term,
        is_well_formed,
        failure_witness: a.witness,
    })
}

/// Number of `!` nodes strictly enclosing the node at `path`.
pub fn depth_of(t: &Term, path: &[usize]) -> Result<usize, AnalysisError> {
    let mut cur = t;
    let mut d = 0;
    for &i in path {
        if matches!(cur, Term::Bang(_)) {
            d += 1;
        }
        cur = cur.child(i).ok_or_else(|| AnalysisError::InvalidPath(path.to_vec()))?;
    }
    Ok(d)
}

/// Depth (relative to `t`) of every free occurrence of every free variable.
pub fn free_occurrence_depths(t: &Term) -> BTreeMap<Name, Vec<usize>> {
    fn go(t: &Term, d: usize, bound: &mut Vec<Name>, out: &mut BTreeMap<Name, Vec<usize>>) {
        let scoped = |bound: &mut Vec<Name>, xs: &[&Name], body: &Term, out: &mut _| {
            let n = bound.len();
            bound.extend(xs.iter().map(|x| (*x).clone()));
            go(body, d, bound, out);
            bound.truncate(n);
        };
        match t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.entry(x.clone()).or_default().push(d);
                }
            }
            Term::Unit => {}
            Term::Bang(b) => go(b, d + 1, bound, out),
            Term::Abs(x, _, b) => scoped(bound, &[x], b, out),
            Term::LetBang(s, x, b) | Term::Let(s, x, b) => {
                go(s, d, bound, out);
                scoped(bound, &[x], b, out);
            }
            Term::LetPair(s, x, y, b) => {
                go(s, d, bound, out);
                scoped(bound, &[x, y], b, out);
            }
            Term::Case(s, x, l, y, r) => {
                go(s, d, bound, out);
                scoped(bound, &[x], l, out);
                scoped(bound, &[y], r, out);
            }
            Term::App(a, b) | Term::Pair(a, b) => {
                go(a, d, bound, out);
                go(b, d, bound, out);
            }
            Term::Inl(b) | Term::Inr(b) | Term::Marker(_, b) => go(b, d, bound, out),
        }
    }
    let mut out = BTreeMap::new();
    go(t, 0, &mut Vec::new(), &mut out);
    out
}

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    free_occurrence_depths(t).into_keys().collect()
}

/// Whether `x` occurs free in `t`; stops at the first occurrence.
pub fn occurs_free(x: &Name, t: &Term) -> bool {
    match t {
        Term::Var(y) => x == y,
        Term::Unit => false,
        Term::Abs(y, _, b) => y != x && occurs_free(x, b),
        Term::LetBang(s, y, b) | Term::Let(s, y, b) => {
            occurs_free(x, s) || (y != x && occurs_free(x, b))
        }
        Term::LetPair(s, y, z, b) => occurs_free(x, s) || (y != x && z != x && occurs_free(x, b)),
        Term::Case(s, y, l, z, r) => {
            occurs_free(x, s) || (y != x && occurs_free(x, l)) || (z != x && occurs_free(x, r))
        }
        Term::App(a, b) | Term::Pair(a, b) => occurs_free(x, a) || occurs_free(x, b),
        Term::Bang(b) | Term::Inl(b) | Term::Inr(b) | Term::Marker(_, b) => occurs_free(x, b),
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    type Env = Vec<(Name, Name)>;
    fn var_eq(x: &Name, y: &Name, env: &Env) -> bool {
        for (l, r) in env.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
    fn under(env: &mut Env, pairs: &[(&Name, &Name)], a: &Term, b: &Term) -> bool {
        let n = env.len();
        env.extend(pairs.iter().map(|(x, y)| ((*x).clone(), (*y).clone())));
        let r = go(a, b, env);
        env.truncate(n);
        r
    }
    fn go(a: &Term, b: &Term, env: &mut Env) -> bool {
        use crate::syntax::Marker;
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => var_eq(x, y, env),
            (Term::Unit, Term::Unit) => true,
            (Term::Abs(x, fa, ba), Term::Abs(y, fb, bb)) => {
                let anns = match (fa, fb) {
                    (None, None) => true,
                    (Some(p), Some(q)) => p.alpha_eq(q),
                    _ => false,
                };
                anns && under(env, &[(x, y)], ba, bb)
            }
            (Term::App(a1, b1), Term::App(a2, b2)) | (Term::Pair(a1, b1), Term::Pair(a2, b2)) => {
                go(a1, a2, env) && go(b1, b2, env)
            }
            (Term::Bang(p), Term::Bang(q))
            | (Term::Inl(p), Term::Inl(q))
            | (Term::Inr(p), Term::Inr(q)) => go(p, q, env),
            (Term::LetBang(s1, x, b1), Term::LetBang(s2, y, b2))
            | (Term::Let(s1, x, b1), Term::Let(s2, y, b2)) => {
                go(s1, s2, env) && under(env, &[(x, y)], b1, b2)
            }
            (Term::LetPair(s1, x1, y1, b1), Term::LetPair(s2, x2, y2, b2)) => {
                go(s1, s2, env) && under(env, &[(x1, x2), (y1, y2)], b1, b2)
            }
            (Term::Case(s1, x1, l1, y1, r1), Term::Case(s2, x2, l2, y2, r2)) => {
                go(s1, s2, env) && under(env, &[(x1, x2)], l1, l2) && under(env, &[(y1, y2)], r1, r2)
            }
            (Term::Marker(m1, b1), Term::Marker(m2, b2)) => {
                let markers = match (m1, m2) {
                    (Marker::Gen(a), Marker::Gen(b)) => a == b,
                    (Marker::Inst(f), Marker::Inst(g)) | (Marker::Fold(f), Marker::Fold(g)) => {
                        f.alpha_eq(g)
                    }
                    (Marker::Unfold, Marker::Unfold) => true,
                    _ => false,
                };
                markers && go(b1, b2, env)
            }
            _ => false,
        }
    }
    go(t1, t2, &mut Vec::new())
}

/// Rename every binder to `%k` (k = preorder index of the binder), giving
/// a representative that is syntactically equal for alpha-equivalent terms.
/// Free variables are left untouched.
pub fn canonical(t: &Term) -> Term {
    struct Canon {
        next: usize,
        env: Vec<(Name, Name)>,
    }
    impl Canon {
        fn bind(&mut self, x: &Name) -> Name {
            let n = Name::from(format!("%{}", self.next));
            self.next += 1;
            self.env.push((x.clone(), n.clone()));
            n
        }
        fn go(&mut self, t: &Term) -> Term {
            match t {
                Term::Var(x) => Term::Var(
                    self.env
                        .iter()
                        .rev()
                        .find(|(o, _)| o == x)
                        .map_or_else(|| x.clone(), |(_, n)| n.clone()),
                ),
                Term::Unit => Term::Unit,
                Term::Abs(x, a, b) => {
                    let n = self.bind(x);
                    let b = self.go(b);
                    self.env.pop();
                    Term::Abs(n, a.clone(), Box::new(b))
                }
                Term::App(a, b) => Term::app(self.go(a), self.go(b)),
                Term::Pair(a, b) => Term::pair(self.go(a), self.go(b)),
                Term::Bang(b) => Term::bang(self.go(b)),
                Term::Inl(b) => Term::inl(self.go(b)),
                Term::Inr(b) => Term::inr(self.go(b)),
                Term::Marker(m, b) => Term::Marker(m.clone(), Box::new(self.go(b))),
                Term::LetBang(s, x, b) | Term::Let(s, x, b) => {
                    let s = self.go(s);
                    let n = self.bind(x);
                    let b = self.go(b);
                    self.env.pop();
                    if matches!(t, Term::LetBang(..)) {
                        Term::LetBang(Box::new(s), n, Box::new(b))
                    } else {
                        Term::Let(Box::new(s), n, Box::new(b))
                    }
                }
                Term::LetPair(s, x, y, b) => {
                    let s = self.go(s);
                    let nx = self.bind(x);
                    let ny = self.bind(y);
                    let b = self.go(b);
                    self.env.truncate(self.env.len() - 2);
                    Term::LetPair(Box::new(s), nx, ny, Box::new(b))
                }
                Term::Case(s, x, l, y, r) => {
                    let s = self.go(s);
                    let nx = self.bind(x);
                    let l = self.go(l);
                    self.env.pop();
                    let ny = self.bind(y);
                    let r = self.go(r);
                    self.env.pop();
                    Term::Case(Box::new(s), nx, Box::new(l), ny, Box::new(r))
                }
            }
        }
    }
    Canon { next: 0, env: Vec::new() }.go(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn info(s: &str) -> TermInfo {
        analyze(&p(s)).unwrap()
    }

    #[test]
    fn integer_two_is_well_formed() {
        let i = info(r"\s.\x. let s be !s' in (s' (s' x))");
        assert!(i.is_term && i.is_well_formed);
        assert_eq!((i.size, i.depth, i.rank), (7, 0, 2));
        assert!(i.temp_vars.is_empty());
    }

    #[test]
    fn abstraction_over_temporary_rejected() {
        let i = info(r"\x. !x");
        assert!(!i.is_term);
        let w = i.failure_witness.unwrap();
        assert_eq!(w.clause, Clause::AbsOverTemporary);
        assert_eq!(w.path, Vec::<usize>::new());
        assert_eq!(w.clause.to_string(), "abstraction over temporary variable");
    }

    #[test]
    fn bang_over_duplicated_variable_rejected() {
        let i = info("!(x x)");
        assert!(!i.is_term);
        assert_eq!(i.failure_witness.unwrap().clause, Clause::BangNonLinear);
        assert_eq!(i.occ[&Name::new("x")], 2);
    }

    #[test]
    fn single_variable() {
        let i = info("x");
        assert!(i.is_term && i.is_well_formed);
        assert_eq!((i.size, i.depth, i.rank), (1, 0, 0));
    }

    #[test]
    fn bang_makes_variables_temporary() {
        let i = info("!(f x)");
        assert!(i.is_term && !i.is_well_formed);
        assert_eq!(i.temp_vars, i.free_vars);
        assert_eq!(i.depth, 1);
    }

    #[test]
    fn markers_and_plain_lets_refused() {
        assert_eq!(analyze(&p("unfold x")), Err(AnalysisError::MarkerPresent));
        assert_eq!(analyze(&p("let a be b in b")), Err(AnalysisError::PlainLetPresent));
    }

    #[test]
    fn case_counts_occurrences_additively() {
        let i = info("!(case u of inl(a) => (s a) | inr(b) => (s b))");
        assert!(i.is_term, "{:?}", i.failure_witness);
        assert_eq!(i.occ[&Name::new("s")], 1);
    }

    #[test]
    fn case_branch_temporary_mismatch_rejected() {
        let i = info("case u of inl(a) => !x | inr(b) => (x x)");
        assert_eq!(i.failure_witness.unwrap().clause, Clause::CaseBranchMismatch);
    }

    #[test]
    fn let_pair_binders_must_be_linear() {
        let i = info("let u be <a, b> in (a a)");
        assert_eq!(i.failure_witness.unwrap().clause, Clause::LetPairNonLinear);
        let j = info("let u be <a, b> in !a");
        assert_eq!(j.failure_witness.unwrap().clause, Clause::LetPairOverTemporary);
    }

    #[test]
    fn sugar_sizes() {
        assert_eq!(info("<a, b>").size, 3);
        assert_eq!(info("inl(())").size, 2);
        assert_eq!(info("let u be <a, b> in a").size, 3);
        assert_eq!(info("case u of inl(a) => a | inr(b) => b").size, 4);
    }

    #[test]
    fn depth_of_examples() {
        let t = p(r"!(\f.\x. let f be !f' in !(f' x))");
        // ! / \f / \x / let(body) / ! / (f' x)
        assert_eq!(depth_of(&t, &[0, 0, 0, 1, 0]).unwrap(), 2);
        assert_eq!(depth_of(&t, &[]).unwrap(), 0);
        assert_eq!(depth_of(&t, &[0, 0, 0, 0]).unwrap(), 1);
        assert!(matches!(depth_of(&t, &[1]), Err(AnalysisError::InvalidPath(_))));
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&p(r"\x.x"), &p(r"\y.y")));
        assert!(!alpha_eq(&p(r"\x.\y.x"), &p(r"\x.\y.y")));
        assert!(alpha_eq(
            &p(r"\s.\x. let s be !s' in (s' (s' x))"),
            &p(r"\s.\x. let s be !w in (w (w x))")
        ));
        assert!(!alpha_eq(&p(r"\x. y"), &p(r"\x. x")));
    }

    #[test]
    fn canonical_identifies_alpha_variants() {
        let a = p(r"\x. let x be !y in (y z)");
        let b = p(r"\u. let u be !v in (v z)");
        assert_eq!(canonical(&a), canonical(&b));
        assert!(alpha_eq(&canonical(&a), &a));
    }

    #[test]
    fn rank_counts_multiplexing_only() {
        // promotion: x temporary in the body, rank unaffected
        assert_eq!(info(r"let y be !x in !x").rank, 0);
        assert_eq!(info(r"let y be !x in (x (x x))").rank, 3);
    }
}
