//! One-step reduction, redex enumeration, strategies and traces.

mod explore;

use std::fmt;
use std::mem;

use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::subst::fresh_name;
use crate::calculus::{analyze, free_vars, substitute, substitute_many, Witness};
use crate::metrics::{self, check_step, Certificate, MetricSnapshot, MetricsError, Verdict, Violation};
use crate::syntax::{print, Name, Path, Term};

pub use explore::{
    all_sequences, explore, Exploration, ExploreError, ExploreOptions, Fault, Sequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleLabel {
    Beta,
    Bang,
    Com1,
    Com2,
    Pair,
    CaseL,
    CaseR,
    ComPair,
    ComCase,
}

impl RuleLabel {
    pub const ALL: [RuleLabel; 9] = [
        RuleLabel::Beta,
        RuleLabel::Bang,
        RuleLabel::Com1,
        RuleLabel::Com2,
        RuleLabel::Pair,
        RuleLabel::CaseL,
        RuleLabel::CaseR,
        RuleLabel::ComPair,
        RuleLabel::ComCase,
    ];

    pub fn is_commutation(self) -> bool {
        matches!(self, RuleLabel::Com1 | RuleLabel::Com2 | RuleLabel::ComPair | RuleLabel::ComCase)
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleLabel::Beta => "beta",
            RuleLabel::Bang => "bang",
            RuleLabel::Com1 => "com1",
            RuleLabel::Com2 => "com2",
            RuleLabel::Pair => "pair",
            RuleLabel::CaseL => "case-l",
            RuleLabel::CaseR => "case-r",
            RuleLabel::ComPair => "com-pair",
            RuleLabel::ComCase => "com-case",
        }
    }
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("no {rule} redex at path {path:?}")]
    NotARedex { path: Path, rule: RuleLabel },
    #[error("not a term: {} at path {:?}", .0.clause, .0.path)]
    NotATerm(Witness),
    #[error("step cap {cap} exceeded")]
    StepCapExceeded { cap: u64 },
    #[error("{0}")]
    MonitorViolation(Box<MonitorReport>),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Details of a step that broke a decrease condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonitorReport {
    pub step: usize,
    pub path: Path,
    pub rule: RuleLabel,
    pub violation: Violation,
    pub before: MetricSnapshot,
    pub after: MetricSnapshot,
    pub term_before: String,
}

impl fmt::Display for MonitorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "monitor violation at step {} ({} at {:?}): {}; weight {} -> {}, measure {} -> {}",
            self.step,
            self.rule,
            self.path,
            self.violation,
            self.before.weight,
            self.after.weight,
            self.before.measure,
            self.after.measure
        )
    }
}

/// The rule whose left-hand side matches `t` at its root, if any.
pub fn redex_at_root(t: &Term) -> Option<RuleLabel> {
    match t {
        Term::App(f, _) => match **f {
            Term::Abs(..) => Some(RuleLabel::Beta),
            Term::LetBang(..) => Some(RuleLabel::Com2),
            Term::LetPair(..) => Some(RuleLabel::ComPair),
            Term::Case(..) => Some(RuleLabel::ComCase),
            _ => None,
        },
        Term::LetBang(s, _, _) => match **s {
            Term::Bang(_) => Some(RuleLabel::Bang),
            Term::LetBang(..) => Some(RuleLabel::Com1),
            _ => None,
        },
        Term::LetPair(s, _, _, _) => matches!(**s, Term::Pair(..)).then_some(RuleLabel::Pair),
        Term::Case(s, ..) => match **s {
            Term::Inl(_) => Some(RuleLabel::CaseL),
            Term::Inr(_) => Some(RuleLabel::CaseR),
            _ => None,
        },
        _ => None,
    }
}

/// Every redex of `t`, in leftmost-outermost (preorder) order.
pub fn redexes(t: &Term) -> Vec<(Path, RuleLabel)> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<(Path, RuleLabel)>) {
        if let Some(r) = redex_at_root(t) {
            out.push((path.clone(), r));
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn is_normal(t: &Term) -> bool {
    redex_at_root(t).is_none() && t.children().into_iter().all(is_normal)
}

fn leftmost_outermost(t: &Term) -> Option<(Path, RuleLabel)> {
    fn go(t: &Term, path: &mut Path) -> Option<RuleLabel> {
        if let Some(r) = redex_at_root(t) {
            return Some(r);
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            if let Some(r) = go(c, path) {
                return Some(r);
            }
            path.pop();
        }
        None
    }
    let mut path = Vec::new();
    go(t, &mut path).map(|r| (path, r))
}

fn rightmost_innermost(t: &Term) -> Option<(Path, RuleLabel)> {
    fn go(t: &Term, path: &mut Path) -> Option<RuleLabel> {
        let children = t.children();
        for (i, c) in children.into_iter().enumerate().rev() {
            path.push(i);
            if let Some(r) = go(c, path) {
                return Some(r);
            }
            path.pop();
        }
        redex_at_root(t)
    }
    let mut path = Vec::new();
    go(t, &mut path).map(|r| (path, r))
}

/// Rename binder `x` of `body` away from the free variables of `other`.
fn rebind(x: &Name, body: Term, other_fv: &std::collections::BTreeSet<Name>) -> (Name, Term) {
    if !other_fv.contains(x) {
        return (x.clone(), body);
    }
    let mut avoid = other_fv.clone();
    avoid.extend(free_vars(&body));
    avoid.insert(x.clone());
    let fresh = fresh_name(x, &avoid);
    let renamed = substitute(&body, x, &Term::Var(fresh.clone()));
    (fresh, renamed)
}

/// Contract the redex at the root of `t`.
fn contract(t: Term, rule: RuleLabel) -> Result<Term, Term> {
    Ok(match (rule, t) {
        (RuleLabel::Beta, Term::App(f, u)) => match *f {
            Term::Abs(x, _, body) => substitute(&body, &x, &u),
            f => return Err(Term::App(Box::new(f), u)),
        },
        (RuleLabel::Bang, Term::LetBang(s, x, body)) => match *s {
            Term::Bang(u) => substitute(&body, &x, &u),
            s => return Err(Term::LetBang(Box::new(s), x, body)),
        },
        (RuleLabel::Com1, Term::LetBang(s, x, t3)) => match *s {
            Term::LetBang(t1, y, t2) => {
                let mut fv3 = free_vars(&t3);
                fv3.remove(&x);
                let (y, t2) = rebind(&y, *t2, &fv3);
                Term::LetBang(t1, y, Box::new(Term::LetBang(Box::new(t2), x, t3)))
            }
            s => return Err(Term::LetBang(Box::new(s), x, t3)),
        },
        (RuleLabel::Com2, Term::App(f, t3)) => match *f {
            Term::LetBang(t1, x, t2) => {
                let (x, t2) = rebind(&x, *t2, &free_vars(&t3));
                Term::LetBang(t1, x, Box::new(Term::App(Box::new(t2), t3)))
            }
            f => return Err(Term::App(Box::new(f), t3)),
        },
        (RuleLabel::ComPair, Term::App(f, v)) => match *f {
            Term::LetPair(u, x, y, body) => {
                let fv = free_vars(&v);
                let (x, body) = rebind(&x, *body, &fv);
                let mut fv_y = fv.clone();
                fv_y.insert(x.clone());
                let (y, body) = rebind(&y, body, &fv_y);
                Term::LetPair(u, x, y, Box::new(Term::App(Box::new(body), v)))
            }
            f => return Err(Term::App(Box::new(f), v)),
        },
        (RuleLabel::ComCase, Term::App(f, v)) => match *f {
            Term::Case(u, x, l, y, r) => {
                let fv = free_vars(&v);
                let (x, l) = rebind(&x, *l, &fv);
                let (y, r) = rebind(&y, *r, &fv);
                Term::Case(
                    u,
                    x,
                    Box::new(Term::App(Box::new(l), v.clone())),
                    y,
                    Box::new(Term::App(Box::new(r), v)),
                )
            }
            f => return Err(Term::App(Box::new(f), v)),
        },
        (RuleLabel::Pair, Term::LetPair(s, x, y, body)) => match *s {
            Term::Pair(a, b) => substitute_many(&body, &[(x, *a), (y, *b)]),
            s => return Err(Term::LetPair(Box::new(s), x, y, body)),
        },
        (RuleLabel::CaseL | RuleLabel::CaseR, Term::Case(s, x, l, y, r)) => match (rule, *s) {
            (RuleLabel::CaseL, Term::Inl(u)) => substitute(&l, &x, &u),
            (RuleLabel::CaseR, Term::Inr(u)) => substitute(&r, &y, &u),
            (_, s) => return Err(Term::Case(Box::new(s), x, l, y, r)),
        },
        (_, t) => return Err(t),
    })
}

/// Rewrite `t` in place at `path`.
pub(crate) fn step_in_place(t: &mut Term, path: &[usize], rule: RuleLabel) -> Result<(), ReductionError> {
    let not_a_redex = || ReductionError::NotARedex { path: path.to_vec(), rule };
    let node = t.at_mut(path).ok_or_else(not_a_redex)?;
    let old = mem::replace(node, Term::Unit);
    match contract(old, rule) {
        Ok(new) => {
            *node = new;
            Ok(())
        }
        Err(old) => {
            *node = old;
            Err(not_a_redex())
        }
    }
}

/// Apply `rule` at `path`; `t` must be a term.
pub fn step(t: &Term, path: &[usize], rule: RuleLabel) -> Result<Term, ReductionError> {
    let info = analyze(t).map_err(MetricsError::from)?;
    if let Some(w) = info.failure_witness {
        return Err(ReductionError::NotATerm(w));
    }
    let mut out = t.clone();
    step_in_place(&mut out, path, rule)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "name", content = "seed", rename_all = "kebab-case")]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
    Random(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::LeftmostOutermost => f.write_str("leftmost-outermost"),
            Strategy::RightmostInnermost => f.write_str("rightmost-innermost"),
            Strategy::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    pub strategy: Strategy,
    /// Check every step against the decrease conditions.
    pub monitor: bool,
    /// Weight parameter for the monitor; `None` means `max(1, rank)`.
    pub n: Option<u64>,
    /// Maximum number of steps; 0 means the certificate bound.
    pub step_cap: u64,
    /// Keep every intermediate term in the trace.
    pub record_terms: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            strategy: Strategy::LeftmostOutermost,
            monitor: false,
            n: None,
            step_cap: 0,
            record_terms: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub path: Path,
    pub rule: RuleLabel,
    pub size_after: usize,
    pub snapshot: Option<MetricSnapshot>,
    pub result: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Term,
    pub steps: Vec<TraceStep>,
    pub final_term: Term,
    pub strategy: Strategy,
    pub certificate: Certificate,
    /// Snapshot of the initial term when monitored.
    pub initial_snapshot: Option<MetricSnapshot>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rules(&self) -> Vec<RuleLabel> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn within_bound(&self) -> bool {
        self.certificate.admits(self.steps.len())
    }
}

#[derive(Serialize)]
struct StepJson<'a> {
    path: &'a Path,
    rule: RuleLabel,
    size_after: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_after: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure_after: Option<u128>,
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TraceJson<'a> {
            strategy: Strategy,
            initial: String,
            #[serde(rename = "final")]
            final_term: String,
            length: usize,
            certificate: &'a Certificate,
            steps: Vec<StepJson<'a>>,
        }
        TraceJson {
            strategy: self.strategy,
            initial: print(&self.initial),
            final_term: print(&self.final_term),
            length: self.steps.len(),
            certificate: &self.certificate,
            steps: self
                .steps
                .iter()
                .map(|st| StepJson {
                    path: &st.path,
                    rule: st.rule,
                    size_after: st.size_after,
                    weight_after: st.snapshot.map(|m| m.weight),
                    measure_after: st.snapshot.map(|m| m.measure),
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Reduce `t` to normal form.
pub fn normalize(t: &Term, opts: &NormalizeOptions) -> Result<Trace, ReductionError> {
    let info = analyze(t).map_err(MetricsError::from)?;
    if let Some(w) = info.failure_witness.clone() {
        return Err(ReductionError::NotATerm(w));
    }
    let certificate = metrics::certificate_with(t, &info);
    let cap = if opts.step_cap == 0 { certificate.bound_u64() } else { opts.step_cap };
    let n = opts.n.unwrap_or(info.rank.max(1) as u64);
    let mut before = if opts.monitor { Some(metrics::snapshot_with(t, &info, n)?) } else { None };
    let initial_snapshot = before;
    let mut rng = match opts.strategy {
        Strategy::Random(seed) => Some(Xoshiro256PlusPlus::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = t.clone();
    let mut steps = Vec::new();
    loop {
        let next = match opts.strategy {
            Strategy::LeftmostOutermost => leftmost_outermost(&cur),
            Strategy::RightmostInnermost => rightmost_innermost(&cur),
            Strategy::Random(_) => {
                let all = redexes(&cur);
                if all.is_empty() {
                    None
                } else {
                    let rng = rng.as_mut().expect("seeded for the random strategy");
                    let i = rng.random_range(0..all.len());
                    all.into_iter().nth(i)
                }
            }
        };
        let Some((path, rule)) = next else { break };
        if steps.len() as u64 >= cap {
            return Err(ReductionError::StepCapExceeded { cap });
        }
        let term_before = before.map(|_| cur.clone());
        step_in_place(&mut cur, &path, rule)?;
        let (size_after, snapshot) = match before {
            Some(b) => {
                let info = analyze(&cur).map_err(MetricsError::from)?;
                if let Some(w) = info.failure_witness.clone() {
                    return Err(ReductionError::NotATerm(w));
                }
                let after = metrics::snapshot_with(&cur, &info, n)?;
                if let Verdict::Violation(violation) = check_step(&b, &after, rule) {
                    return Err(ReductionError::MonitorViolation(Box::new(MonitorReport {
                        step: steps.len(),
                        path,
                        rule,
                        violation,
                        before: b,
                        after,
                        term_before: print(term_before.as_ref().expect("kept when monitoring")),
                    })));
                }
                before = Some(after);
                (info.size, Some(after))
            }
            None => (term_size(&cur), None),
        };
        steps.push(TraceStep {
            path,
            rule,
            size_after,
            snapshot,
            result: opts.record_terms.then(|| cur.clone()),
        });
    }
    Ok(Trace {
        initial: t.clone(),
        steps,
        final_term: cur,
        strategy: opts.strategy,
        certificate,
        initial_snapshot,
    })
}

/// Size without the termhood analysis.
pub(crate) fn term_size(t: &Term) -> usize {
    let own = usize::from(!matches!(t, Term::App(..) | Term::Marker(..) | Term::Let(..)));
    own + t.children().into_iter().map(term_size).sum::<usize>()
}
