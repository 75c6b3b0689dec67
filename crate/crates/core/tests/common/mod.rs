//! Invariant checks shared by the property suites and the acceptance run.
//! Each check returns `Err` with a description of the first failure.
#![allow(dead_code)]

use std::collections::BTreeSet;

use softlc::calculus::{analyze, free_occurrence_depths, free_vars, substitute, TermInfo};
use softlc::metrics::{key_lemma_check, nlet, weight, Verdict};
use softlc::reduction::{normalize, NormalizeOptions, ReductionError, RuleLabel, Strategy};
use softlc::syntax::{print, Name, Term};

pub type Check = Result<(), String>;

pub fn info(t: &Term) -> TermInfo {
    analyze(t).unwrap_or_else(|e| panic!("analysis of {} failed: {e}", print(t)))
}

/// Every subterm, in preorder.
pub fn subterms(t: &Term) -> Vec<&Term> {
    let mut out = vec![t];
    let mut i = 0;
    while i < out.len() {
        out.extend(out[i].children());
        i += 1;
    }
    out
}

/// Temporary variables occur exactly once.
pub fn temporaries_are_linear(t: &Term) -> Check {
    for s in subterms(t) {
        let i = info(s);
        for x in &i.temp_vars {
            if i.occ.get(x) != Some(&1) {
                return Err(format!("{x} is temporary in {} but occurs {:?} times", print(s), i.occ.get(x)));
            }
        }
    }
    Ok(())
}

/// Free occurrences sit at depth 0 or 1, all occurrences of a variable at
/// the same depth, and depth 1 exactly for temporaries.
pub fn free_depths_are_uniform(t: &Term) -> Check {
    for s in subterms(t) {
        let i = info(s);
        if !i.is_term {
            return Err(format!("subterm {} of a term is not a term", print(s)));
        }
        for (x, depths) in free_occurrence_depths(s) {
            let first = depths[0];
            if first > 1 || depths.iter().any(|&d| d != first) {
                return Err(format!("{x} has depths {depths:?} in {}", print(s)));
            }
            if (first == 1) != i.temp_vars.contains(&x) {
                return Err(format!("{x} at depth {first}, temporary = {}", i.temp_vars.contains(&x)));
            }
        }
    }
    Ok(())
}

/// The body of every `!` is well-formed.
pub fn bang_bodies_are_well_formed(t: &Term) -> Check {
    for s in subterms(t) {
        if let Term::Bang(b) = s {
            if !info(b).is_well_formed {
                return Err(format!("body of {} is not well-formed", print(s)));
            }
        }
    }
    Ok(())
}

/// `nlet(t) <= W(t, n) - 1` for several `n`.
pub fn nlet_below_weight(t: &Term) -> Check {
    let k = nlet(t).map_err(|e| e.to_string())? as u128;
    for n in [1, 2, 3, 5, 8] {
        let w = weight(t, n).map_err(|e| e.to_string())?;
        if k + 1 > w {
            return Err(format!("nlet {k} and weight {w} at n = {n} for {}", print(t)));
        }
    }
    Ok(())
}

/// `W(t, n) <= W(t, 1) * n^depth(t)`.
pub fn weight_polynomial_in_n(t: &Term) -> Check {
    let i = info(t);
    let w1 = weight(t, 1).map_err(|e| e.to_string())?;
    for n in [1u64, 2, 3, 5, 8] {
        let w = weight(t, n).map_err(|e| e.to_string())?;
        let limit = w1 * (n as u128).pow(i.depth as u32);
        if w > limit {
            return Err(format!("W(t,{n}) = {w} > {limit} for {}", print(t)));
        }
    }
    Ok(())
}

/// Which of the substitution lemmas apply to `(t, x, u)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SubstitutionTally {
    pub plain: usize,
    pub linear: usize,
    pub temporary: usize,
    pub weight: usize,
}

/// Check every substitution lemma whose hypotheses hold for `t[u/x]`.
pub fn substitution_lemmas(t: &Term, x: &Name, u: &Term, tally: &mut SubstitutionTally) -> Check {
    let ti = info(t);
    let ui = info(u);
    if !ti.is_term || !ui.is_term {
        return Ok(());
    }
    let fv_u = free_vars(u);
    let fv_t = &ti.free_vars;
    let disjoint = |a: &BTreeSet<Name>, b: &BTreeSet<Name>| a.is_disjoint(b);
    let s = substitute(t, x, u);
    let si = info(&s);
    let x_temp = ti.temp_vars.contains(x);
    if ui.temp_vars.is_empty() && !x_temp && disjoint(&fv_u, &ti.temp_vars) {
        tally.plain += 1;
        if !si.is_term || si.temp_vars != ti.temp_vars {
            return Err(format!("plain substitution of {} for {x} in {}", print(u), print(t)));
        }
    }
    if !x_temp
        && ti.occ.get(x) == Some(&1)
        && disjoint(&fv_u, &ti.temp_vars)
        && disjoint(&ui.temp_vars, fv_t)
    {
        tally.linear += 1;
        let expected: BTreeSet<Name> = ti.temp_vars.union(&ui.temp_vars).cloned().collect();
        if !si.is_term || si.temp_vars != expected {
            return Err(format!("linear substitution of {} for {x} in {}", print(u), print(t)));
        }
    }
    if x_temp && ui.is_well_formed && disjoint(fv_t, &fv_u) {
        tally.temporary += 1;
        let mut expected = ti.temp_vars.clone();
        expected.remove(x);
        expected.extend(fv_u.iter().cloned());
        if !si.is_term || si.temp_vars != expected {
            return Err(format!("substitution of {} for temporary {x} in {}", print(u), print(t)));
        }
    }
    for n in [ti.rank.max(1) as u64, ti.rank as u64 + 3] {
        tally.weight += 1;
        match key_lemma_check(t, x, u, n) {
            Ok(Verdict::Ok) => {}
            other => return Err(format!("weight of {}[{}/{x}] at n = {n}: {other:?}", print(t), print(u))),
        }
    }
    Ok(())
}

/// Per-rule step counts of monitored runs.
#[derive(Debug, Default, Clone)]
pub struct MonitorTally {
    pub weight_steps: usize,
    pub commutation_steps: usize,
    pub other_steps: usize,
}

/// Normalize under the monitor at `n`; every step must satisfy its
/// decrease condition, and the result must stay well-formed.
pub fn monitored_run(t: &Term, strategy: Strategy, n: u64, tally: &mut MonitorTally) -> Check {
    let opts = NormalizeOptions { strategy, monitor: true, n: Some(n), ..Default::default() };
    match normalize(t, &opts) {
        Ok(trace) => {
            for r in trace.rules() {
                match r {
                    RuleLabel::Beta | RuleLabel::Bang => tally.weight_steps += 1,
                    RuleLabel::Com1 | RuleLabel::Com2 => tally.commutation_steps += 1,
                    _ => tally.other_steps += 1,
                }
            }
            if !trace.within_bound() {
                return Err(format!("{} steps exceed the bound for {}", trace.len(), print(t)));
            }
            if !info(&trace.final_term).is_well_formed {
                return Err(format!("normal form of {} is not well-formed", print(t)));
            }
            Ok(())
        }
        Err(ReductionError::MonitorViolation(r)) => Err(format!("{r} in {}", r.term_before)),
        Err(e) => Err(format!("{e} for {}", print(t))),
    }
}
