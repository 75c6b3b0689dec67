//! Capture-avoiding substitution.
//!
//! Binders that would capture a free variable of the substituted term are
//! renamed to `base$k`, with `k` the smallest positive integer giving a
//! name unused by the substituted terms, the binder's scope, and the other
//! binders of the same node.

use std::collections::BTreeSet;

use super::{free_vars, occurs_free};
use crate::syntax::{Name, Term};

/// `t[u/x]`
pub fn substitute(t: &Term, x: &Name, u: &Term) -> Term {
    substitute_many(t, &[(x.clone(), u.clone())])
}

/// Simultaneous substitution `t[u1/x1, ..., un/xn]`.
pub fn substitute_many(t: &Term, pairs: &[(Name, Term)]) -> Term {
    let entries: Vec<Entry<'_>> = pairs
        .iter()
        .map(|(x, u)| Entry { key: x, with: u, fv: free_vars(u) })
        .collect();
    let refs: Vec<&Entry<'_>> = entries.iter().collect();
    go(t, &refs)
}

struct Entry<'a> {
    key: &'a Name,
    with: &'a Term,
    fv: BTreeSet<Name>,
}

/// `base$k` for the smallest `k >= 1` not in `avoid`.
pub(crate) fn fresh_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    (1..)
        .map(|k| Name::from(format!("{}${k}", base.base())))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of fresh names")
}

/// Prepare a scope binding `binders` over `bodies`: drop shadowed entries
/// and rename binders that would capture. Returns the surviving entries and
/// the (possibly renamed) binder names with their renamed bodies.
fn enter<'e, 'a>(
    active: &[&'e Entry<'a>],
    binders: &[&Name],
    bodies: &[&Term],
) -> (Vec<&'e Entry<'a>>, Vec<Name>, Vec<Term>) {
    let live: Vec<&Entry<'_>> = active
        .iter()
        .copied()
        .filter(|e| !binders.contains(&e.key))
        .collect();
    let mut names: Vec<Name> = binders.iter().map(|b| (*b).clone()).collect();
    let mut bodies: Vec<Term> = bodies.iter().map(|b| (*b).clone()).collect();
    if live.is_empty() {
        return (live, names, bodies);
    }
    let relevant = |body: &Term| live.iter().any(|e| occurs_free(e.key, body));
    for i in 0..names.len() {
        let b = names[i].clone();
        let captures = live.iter().any(|e| e.fv.contains(&b)) && bodies.iter().any(relevant);
        if !captures {
            continue;
        }
        let mut avoid: BTreeSet<Name> = live.iter().flat_map(|e| e.fv.iter().cloned()).collect();
        avoid.extend(live.iter().map(|e| e.key.clone()));
        for body in &bodies {
            avoid.extend(free_vars(body));
        }
        avoid.extend(names.iter().cloned());
        let nb = fresh_name(&b, &avoid);
        let rename = Term::Var(nb.clone());
        for body in bodies.iter_mut() {
            if occurs_free(&b, body) {
                *body = substitute(body, &b, &rename);
            }
        }
        names[i] = nb;
    }
    (live, names, bodies)
}

fn go(t: &Term, active: &[&Entry<'_>]) -> Term {
    if active.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(y) => match active.iter().find(|e| e.key == y) {
            Some(e) => e.with.clone(),
            None => t.clone(),
        },
        Term::Unit => Term::Unit,
        Term::Abs(x, ann, body) => {
            let (live, names, bodies) = enter(active, &[x], &[body]);
            Term::Abs(names[0].clone(), ann.clone(), Box::new(go(&bodies[0], &live)))
        }
        Term::App(a, b) => Term::app(go(a, active), go(b, active)),
        Term::Pair(a, b) => Term::pair(go(a, active), go(b, active)),
        Term::Bang(b) => Term::bang(go(b, active)),
        Term::Inl(b) => Term::inl(go(b, active)),
        Term::Inr(b) => Term::inr(go(b, active)),
        Term::Marker(m, b) => Term::Marker(m.clone(), Box::new(go(b, active))),
        Term::LetBang(s, x, body) => {
            let s = go(s, active);
            let (live, names, bodies) = enter(active, &[x], &[body]);
            Term::LetBang(Box::new(s), names[0].clone(), Box::new(go(&bodies[0], &live)))
        }
        Term::Let(s, x, body) => {
            let s = go(s, active);
            let (live, names, bodies) = enter(active, &[x], &[body]);
            Term::Let(Box::new(s), names[0].clone(), Box::new(go(&bodies[0], &live)))
        }
        Term::LetPair(s, x, y, body) => {
            let s = go(s, active);
            let (live, names, bodies) = enter(active, &[x, y], &[body]);
            Term::LetPair(
                Box::new(s),
                names[0].clone(),
                names[1].clone(),
                Box::new(go(&bodies[0], &live)),
            )
        }
        Term::Case(s, x, l, y, r) => {
            let s = go(s, active);
            let (live_l, nl, bl) = enter(active, &[x], &[l]);
            let (live_r, nr, br) = enter(active, &[y], &[r]);
            Term::Case(
                Box::new(s),
                nl[0].clone(),
                Box::new(go(&bl[0], &live_l)),
                nr[0].clone(),
                Box::new(go(&br[0], &live_r)),
            )
        }
    }
}
