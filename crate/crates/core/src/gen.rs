//! Term generators: exhaustive enumeration of small well-formed terms and
//! a seeded random generator of well-formed terms rich in redexes.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::calculus::analyze;
use crate::syntax::{Name, Term};

const FREE: &str = "?";

fn bound_name(level: usize) -> Name {
    Name::from(format!("x{level}"))
}

/// Give every free-variable placeholder a distinct name `f0, f1, ...` in
/// preorder.
fn name_free(t: &Term, next: &mut usize) -> Term {
    match t {
        Term::Var(x) if x.as_str() == FREE => {
            let n = Name::from(format!("f{next}"));
            *next += 1;
            Term::Var(n)
        }
        Term::Var(_) | Term::Unit => t.clone(),
        Term::Abs(x, a, b) => Term::Abs(x.clone(), a.clone(), Box::new(name_free(b, next))),
        Term::App(a, b) => {
            let a = name_free(a, next);
            Term::app(a, name_free(b, next))
        }
        Term::Bang(b) => Term::bang(name_free(b, next)),
        Term::LetBang(s, x, b) => {
            let s = name_free(s, next);
            Term::LetBang(Box::new(s), x.clone(), Box::new(name_free(b, next)))
        }
        _ => unreachable!("enumeration produces core terms only"),
    }
}

struct Enumerator {
    memo: HashMap<(usize, usize), Vec<Term>>,
}

impl Enumerator {
    /// All core pseudo-terms of exactly `size` with `scope` binders
    /// `x0 .. x{scope-1}` in scope; free leaves are placeholders.
    fn exact(&mut self, size: usize, scope: usize) -> Vec<Term> {
        if let Some(v) = self.memo.get(&(size, scope)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.push(Term::var(FREE));
            out.extend((0..scope).map(|i| Term::Var(bound_name(i))));
        }
        if size >= 2 {
            for b in self.exact(size - 1, scope + 1) {
                out.push(Term::Abs(bound_name(scope), None, Box::new(b)));
            }
            for b in self.exact(size - 1, scope) {
                out.push(Term::bang(b));
            }
            for l in 1..size {
                let fs = self.exact(l, scope);
                let args = self.exact(size - l, scope);
                for f in &fs {
                    for a in &args {
                        out.push(Term::app(f.clone(), a.clone()));
                    }
                }
            }
        }
        if size >= 3 {
            for l in 1..size - 1 {
                let subjects = self.exact(l, scope);
                let bodies = self.exact(size - 1 - l, scope + 1);
                for s in &subjects {
                    for b in &bodies {
                        out.push(Term::LetBang(
                            Box::new(s.clone()),
                            bound_name(scope),
                            Box::new(b.clone()),
                        ));
                    }
                }
            }
        }
        // Keep only candidates whose free placeholders could still be
        // completed into a term: prune by termhood of the named version.
        out.retain(|t| {
            let named = name_free(t, &mut 0);
            analyze(&named).map(|i| i.is_term).unwrap_or(false)
        });
        self.memo.insert((size, scope), out.clone());
        out
    }
}

/// Every well-formed core term of size `1..=max_size`, up to renaming of
/// bound variables and of free variables (named `f0, f1, ...` in order).
pub fn enumerate_well_formed(max_size: usize) -> Vec<Term> {
    let mut e = Enumerator { memo: HashMap::new() };
    let mut out = Vec::new();
    for size in 1..=max_size {
        for t in e.exact(size, 0) {
            let named = name_free(&t, &mut 0);
            if analyze(&named).is_ok_and(|i| i.is_well_formed) {
                out.push(named);
            }
        }
    }
    out
}

/// Shape of the random generator.
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Upper bound on the size of generated terms.
    pub max_size: usize,
    /// Also produce pairs, injections and case analyses.
    pub sugar: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_size: 40, sugar: false }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Linear,
    Exp,
}

struct Slot {
    name: Name,
    kind: Kind,
    level: usize,
    uses: usize,
    promoted: bool,
}

struct RandomGen<'c> {
    rng: Xoshiro256PlusPlus,
    cfg: &'c GenConfig,
    scope: Vec<Slot>,
    fresh: usize,
    free: usize,
}

impl RandomGen<'_> {
    fn binder(&mut self) -> Name {
        self.fresh += 1;
        Name::from(format!("v{}", self.fresh))
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Pick a variable usable at `level`, marking it used.
    fn variable(&mut self, level: usize) -> Term {
        let usable: Vec<usize> = (0..self.scope.len())
            .filter(|&i| {
                let s = &self.scope[i];
                match s.kind {
                    Kind::Linear => s.level == level && s.uses == 0,
                    Kind::Exp => {
                        (s.level == level && !s.promoted)
                            || (s.level + 1 == level && s.uses == 0 && !s.promoted)
                    }
                }
            })
            .collect();
        if !usable.is_empty() && (level > 0 || self.chance(0.85)) {
            let i = usable[self.rng.random_range(0..usable.len())];
            let s = &mut self.scope[i];
            if s.level + 1 == level {
                s.promoted = true;
            } else {
                s.uses += 1;
            }
            return Term::Var(s.name.clone());
        }
        if level == 0 {
            self.free += 1;
            return Term::Var(Name::from(format!("f{}", self.free)));
        }
        let x = self.binder();
        Term::Abs(x.clone(), None, Box::new(Term::Var(x)))
    }

    fn with_binder(&mut self, kind: Kind, level: usize, budget: usize) -> (Name, Term) {
        let x = self.binder();
        self.scope.push(Slot { name: x.clone(), kind, level, uses: 0, promoted: false });
        let body = self.term(budget, level);
        self.scope.pop();
        (x, body)
    }

    fn split(&mut self, budget: usize) -> (usize, usize) {
        let l = self.rng.random_range(1..budget);
        (l, budget - l)
    }

    /// A term of size roughly `budget` at bang level `level`.
    fn term(&mut self, budget: usize, level: usize) -> Term {
        if budget <= 1 {
            return self.variable(level);
        }
        let roll = self.rng.random_range(0..100u32);
        match roll {
            0..=21 => {
                let (x, b) = self.with_binder(Kind::Linear, level, budget - 1);
                Term::Abs(x, None, Box::new(b))
            }
            22..=41 if budget >= 3 => {
                // beta redex
                let (l, r) = self.split(budget - 1);
                let (x, b) = self.with_binder(Kind::Linear, level, l);
                let arg = self.term(r, level);
                Term::app(Term::Abs(x, None, Box::new(b)), arg)
            }
            42..=53 => {
                let (l, r) = self.split(budget);
                let f = self.term(l, level);
                let a = self.term(r, level);
                Term::app(f, a)
            }
            54..=63 => Term::bang(self.term(budget - 1, level + 1)),
            64..=83 if budget >= 4 => {
                // bang redex, or a let over an arbitrary subject
                let (l, r) = self.split(budget - 1);
                let subject = if self.chance(0.7) {
                    Term::bang(self.term(l.saturating_sub(1).max(1), level + 1))
                } else {
                    self.term(l, level)
                };
                let (x, b) = self.with_binder(Kind::Exp, level, r);
                Term::LetBang(Box::new(subject), x, Box::new(b))
            }
            84..=91 if budget >= 5 => {
                // commutation shapes: (let .. in ..) u
                let (l, r) = self.split(budget - 1);
                let (l1, l2) = if l >= 2 { self.split(l) } else { (1, 1) };
                let subject = self.term(l1, level);
                let (x, b) = self.with_binder(Kind::Exp, level, l2);
                let inner = Term::LetBang(Box::new(subject), x, Box::new(b));
                if self.chance(0.5) {
                    let arg = self.term(r, level);
                    Term::app(inner, arg)
                } else {
                    let (y, body) = self.with_binder(Kind::Exp, level, r);
                    Term::LetBang(Box::new(inner), y, Box::new(body))
                }
            }
            92..=99 if self.cfg.sugar && budget >= 4 => self.sugar(budget, level),
            _ => self.variable(level),
        }
    }

    fn sugar(&mut self, budget: usize, level: usize) -> Term {
        match self.rng.random_range(0..4u32) {
            0 => {
                let (l, r) = self.split(budget - 1);
                let a = self.term(l, level);
                let b = self.term(r, level);
                Term::pair(a, b)
            }
            1 => {
                // pair redex
                let (l, r) = self.split(budget - 2);
                let (l1, l2) = if l >= 2 { self.split(l) } else { (1, 1) };
                let a = self.term(l1, level);
                let b = self.term(l2, level);
                let x = self.binder();
                let y = self.binder();
                for n in [&x, &y] {
                    self.scope.push(Slot {
                        name: n.clone(),
                        kind: Kind::Linear,
                        level,
                        uses: 0,
                        promoted: false,
                    });
                }
                let body = self.term(r, level);
                self.scope.truncate(self.scope.len() - 2);
                Term::LetPair(Box::new(Term::pair(a, b)), x, y, Box::new(body))
            }
            2 => {
                let inner = self.term(budget - 1, level);
                if self.chance(0.5) {
                    Term::inl(inner)
                } else {
                    Term::inr(inner)
                }
            }
            _ => {
                // case over an injection; branches share the context
                let (l, r) = self.split(budget - 1);
                let inj = self.term(l.max(1), level);
                let subject = if self.chance(0.5) { Term::inl(inj) } else { Term::inr(inj) };
                let snapshot: Vec<(usize, bool)> =
                    self.scope.iter().map(|s| (s.uses, s.promoted)).collect();
                let (x, left) = self.with_binder(Kind::Linear, level, r.max(1));
                let after_left: Vec<(usize, bool)> =
                    self.scope.iter().map(|s| (s.uses, s.promoted)).collect();
                for (s, &(u, p)) in self.scope.iter_mut().zip(&snapshot) {
                    s.uses = u;
                    s.promoted = p;
                }
                let (y, right) = self.with_binder(Kind::Linear, level, r.max(1));
                for (s, &(u, p)) in self.scope.iter_mut().zip(&after_left) {
                    s.uses = s.uses.max(u);
                    s.promoted |= p;
                }
                Term::Case(Box::new(subject), x, Box::new(left), y, Box::new(right))
            }
        }
    }
}

/// A random well-formed term of size at most `cfg.max_size`, determined
/// by `seed`.
pub fn random_well_formed(seed: u64, cfg: &GenConfig) -> Term {
    let mut g = RandomGen {
        rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        cfg,
        scope: Vec::new(),
        fresh: 0,
        free: 0,
    };
    loop {
        let target = g.rng.random_range(1..=cfg.max_size.max(1));
        g.scope.clear();
        g.free = 0;
        let t = g.term(target, 0);
        if analyze(&t).is_ok_and(|i| i.is_well_formed && i.size <= cfg.max_size) {
            return t;
        }
    }
}

/// `count` random well-formed terms from consecutive seeds.
pub fn random_corpus(first_seed: u64, count: usize, cfg: &GenConfig) -> Vec<Term> {
    (0..count as u64).map(|i| random_well_formed(first_seed.wrapping_add(i), cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::alpha_eq;
    use crate::reduction::redexes;

    #[test]
    fn enumeration_of_size_one_is_a_variable() {
        let ts = enumerate_well_formed(1);
        assert_eq!(ts, vec![Term::var("f0")]);
    }

    #[test]
    fn enumeration_is_well_formed_and_duplicate_free() {
        let ts = enumerate_well_formed(5);
        assert!(ts.len() > 10);
        for (i, a) in ts.iter().enumerate() {
            assert!(analyze(a).unwrap().is_well_formed);
            for b in &ts[i + 1..] {
                assert!(!alpha_eq(a, b));
            }
        }
    }

    #[test]
    fn enumeration_contains_expected_small_terms() {
        let ts = enumerate_well_formed(4);
        let want = crate::syntax::parse_term(r"(\x0. x0)").unwrap();
        assert!(ts.iter().any(|t| alpha_eq(t, &want)));
        let bang = crate::syntax::parse_term(r"let f0 be !x0 in (x0 x0)").unwrap();
        assert!(ts.iter().any(|t| alpha_eq(t, &bang)));
    }

    #[test]
    fn random_terms_are_well_formed_and_deterministic() {
        let cfg = GenConfig::default();
        let a = random_corpus(1, 200, &cfg);
        assert_eq!(a, random_corpus(1, 200, &cfg));
        assert!(a.iter().all(|t| analyze(t).unwrap().is_well_formed));
        let with_redex = a.iter().filter(|t| !redexes(t).is_empty()).count();
        assert!(with_redex > 100, "{with_redex}");
    }

    #[test]
    fn sugar_terms_are_well_formed() {
        let cfg = GenConfig { max_size: 30, sugar: true };
        for t in random_corpus(9, 200, &cfg) {
            assert!(analyze(&t).unwrap().is_well_formed);
        }
    }
}
