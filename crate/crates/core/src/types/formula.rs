//! ISALF formulas.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::Name;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Name),
    Lolli(Box<Formula>, Box<Formula>),
    Forall(Name, Box<Formula>),
    Bang(Box<Formula>),
    Mu(Name, Box<Formula>),
    One,
    Tensor(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(a: &str) -> Formula {
        Formula::Var(Name::new(a))
    }

    pub fn lolli(a: Formula, b: Formula) -> Formula {
        Formula::Lolli(Box::new(a), Box::new(b))
    }

    pub fn forall(a: &str, body: Formula) -> Formula {
        Formula::Forall(Name::new(a), Box::new(body))
    }

    pub fn bang(a: Formula) -> Formula {
        Formula::Bang(Box::new(a))
    }

    pub fn mu(x: &str, body: Formula) -> Formula {
        Formula::Mu(Name::new(x), Box::new(body))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<Name> {
        let mut out = Vec::new();
        fn go(f: &Formula, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            match f {
                Formula::Var(a) => {
                    if !bound.contains(a) && !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Formula::One => {}
                Formula::Bang(a) => go(a, bound, out),
                Formula::Forall(x, a) | Formula::Mu(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
                Formula::Lolli(a, b) | Formula::Tensor(a, b) | Formula::Plus(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Var(a) => {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            Formula::One => {}
            Formula::Bang(a) => a.collect_free(bound, out),
            Formula::Forall(x, a) | Formula::Mu(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::Lolli(a, b) | Formula::Tensor(a, b) | Formula::Plus(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    pub fn mentions_free(&self, a: &Name) -> bool {
        self.free_vars().contains(a)
    }

    /// Equality up to renaming of `forall`/`mu` binders.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn go(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
            match (a, b) {
                (Formula::Var(x), Formula::Var(y)) => {
                    for (l, r) in env.iter().rev() {
                        if l == x || r == y {
                            return l == x && r == y;
                        }
                    }
                    x == y
                }
                (Formula::One, Formula::One) => true,
                (Formula::Bang(a), Formula::Bang(b)) => go(a, b, env),
                (Formula::Forall(x, a), Formula::Forall(y, b))
                | (Formula::Mu(x, a), Formula::Mu(y, b)) => {
                    env.push((x.clone(), y.clone()));
                    let r = go(a, b, env);
                    env.pop();
                    r
                }
                (Formula::Lolli(a1, b1), Formula::Lolli(a2, b2))
                | (Formula::Tensor(a1, b1), Formula::Tensor(a2, b2))
                | (Formula::Plus(a1, b1), Formula::Plus(a2, b2)) => {
                    go(a1, a2, env) && go(b1, b2, env)
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

/// Capture-avoiding substitution `A[B/x]`.
pub fn subst_type(a: &Formula, x: &Name, b: &Formula) -> Formula {
    let fv_b = b.free_vars();
    subst_inner(a, x, b, &fv_b)
}

fn subst_inner(a: &Formula, x: &Name, b: &Formula, fv_b: &BTreeSet<Name>) -> Formula {
    match a {
        Formula::Var(y) if y == x => b.clone(),
        Formula::Var(_) | Formula::One => a.clone(),
        Formula::Bang(c) => Formula::Bang(Box::new(subst_inner(c, x, b, fv_b))),
        Formula::Lolli(c, d) => Formula::Lolli(
            Box::new(subst_inner(c, x, b, fv_b)),
            Box::new(subst_inner(d, x, b, fv_b)),
        ),
        Formula::Tensor(c, d) => Formula::Tensor(
            Box::new(subst_inner(c, x, b, fv_b)),
            Box::new(subst_inner(d, x, b, fv_b)),
        ),
        Formula::Plus(c, d) => Formula::Plus(
            Box::new(subst_inner(c, x, b, fv_b)),
            Box::new(subst_inner(d, x, b, fv_b)),
        ),
        Formula::Forall(y, c) | Formula::Mu(y, c) => {
            let rebuild = |y: Name, c: Formula| match a {
                Formula::Forall(..) => Formula::Forall(y, Box::new(c)),
                _ => Formula::Mu(y, Box::new(c)),
            };
            if y == x || !c.mentions_free(x) {
                return a.clone();
            }
            if fv_b.contains(y) {
                let mut avoid = c.free_vars();
                avoid.extend(fv_b.iter().cloned());
                avoid.insert(x.clone());
                let fresh = fresh_type_name(y, &avoid);
                let renamed = subst_inner(c, y, &Formula::Var(fresh.clone()), &BTreeSet::new());
                rebuild(fresh, subst_inner(&renamed, x, b, fv_b))
            } else {
                rebuild(y.clone(), subst_inner(c, x, b, fv_b))
            }
        }
    }
}

fn fresh_type_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    (1..)
        .map(|k| Name::from(format!("{}{}", base.base(), "'".repeat(k))))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of primed names")
}

/// Precedence levels used by the printer: lower binds looser.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Mu(..) => 0,
        Formula::Lolli(..) => 1,
        Formula::Plus(..) => 2,
        Formula::Tensor(..) => 3,
        Formula::Bang(..) | Formula::Var(_) | Formula::One => 4,
    }
}

struct Prec<'a>(&'a Formula, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if level(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(a) => write!(f, "{a}"),
            Formula::One => write!(f, "1"),
            Formula::Bang(a) => write!(f, "!{}", Prec(a, 4)),
            Formula::Forall(a, b) => write!(f, "forall {a}. {b}"),
            Formula::Mu(a, b) => write!(f, "mu {a}. {b}"),
            // right-associative binary connectives
            Formula::Lolli(a, b) => write!(f, "{} -o {}", Prec(a, 2), Prec(b, 1)),
            Formula::Plus(a, b) => write!(f, "{} + {}", Prec(a, 3), Prec(b, 2)),
            Formula::Tensor(a, b) => write!(f, "{} * {}", Prec(a, 4), Prec(b, 3)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn nat_round_trip() {
        let n = f("forall a. !(a -o a) -o a -o a");
        let expected = Formula::forall(
            "a",
            Formula::lolli(
                Formula::bang(Formula::lolli(Formula::var("a"), Formula::var("a"))),
                Formula::lolli(Formula::var("a"), Formula::var("a")),
            ),
        );
        assert_eq!(n, expected);
        assert_eq!(n.to_string(), "forall a. !(a -o a) -o a -o a");
        assert_eq!(f(&n.to_string()), n);
    }

    #[test]
    fn list_type_round_trip() {
        let l = f("mu X. (1 + (A * X))");
        let expected = Formula::mu(
            "X",
            Formula::plus(
                Formula::One,
                Formula::tensor(Formula::var("A"), Formula::var("X")),
            ),
        );
        assert_eq!(l, expected);
        assert_eq!(f(&l.to_string()), l);
    }

    #[test]
    fn one_round_trip() {
        assert_eq!(f("1"), Formula::One);
        assert_eq!(Formula::One.to_string(), "1");
    }

    #[test]
    fn subst_identity_type_by_nat() {
        let n = f("forall a. !(a -o a) -o a -o a");
        let out = subst_type(&f("a -o a"), &Name::new("a"), &n);
        assert_eq!(out, Formula::lolli(n.clone(), n));
    }

    #[test]
    fn subst_unfolds_list_type() {
        let l = f("mu X. 1 + (A * X)");
        let Formula::Mu(x, body) = &l else { unreachable!() };
        let out = subst_type(body, x, &l);
        assert_eq!(out, f("1 + (A * (mu X. 1 + (A * X)))"));
    }

    #[test]
    fn subst_stops_at_shadowing_binder() {
        let t = f("forall a. a -o b");
        assert_eq!(subst_type(&t, &Name::new("a"), &Formula::One), t);
    }

    #[test]
    fn subst_avoids_capture() {
        let t = f("forall b. a -o b");
        let out = subst_type(&t, &Name::new("a"), &f("b"));
        assert!(out.alpha_eq(&f("forall c. b -o c")));
    }

    #[test]
    fn alpha_eq_respects_binding() {
        assert!(f("forall a. a -o a").alpha_eq(&f("forall b. b -o b")));
        assert!(!f("forall a. forall b. a").alpha_eq(&f("forall a. forall b. b")));
        assert!(!f("forall a. a").alpha_eq(&f("forall b. a")));
    }

    #[test]
    fn printer_parenthesizes_by_precedence() {
        let t = f("(a -o b) -o (a * b) * c + 1");
        assert_eq!(t.to_string(), "(a -o b) -o (a * b) * c + 1");
        assert_eq!(f(&t.to_string()), t);
        let u = f("!(forall a. a) -o (mu X. X)");
        assert_eq!(f(&u.to_string()), u);
    }
}
