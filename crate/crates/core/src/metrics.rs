//! Weight, let count, measure and the polynomial step bound.
//!
//! Weights are exact `u128` values; every operation reports
//! [`MetricsError::Overflow`] rather than wrapping. The certificate bound
//! `|t|^(3(d+1))` is computed with arbitrary precision.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::calculus::{analyze, substitute, AnalysisError, TermInfo, Witness};
use crate::reduction::RuleLabel;
use crate::syntax::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("not a term: {} at path {:?}", .0.clause, .0.path)]
    NotATerm(Witness),
    #[error("weight parameter {n} is below the rank {rank}")]
    RankTooSmall { n: u64, rank: usize },
    #[error("the weight parameter must be positive")]
    ZeroParameter,
    #[error("weight exceeds 128 bits")]
    Overflow,
    #[error("side condition unmet: {0}")]
    SideConditionUnmet(String),
}

type Res<T> = Result<T, MetricsError>;

fn term_info(t: &Term) -> Res<TermInfo> {
    let info = analyze(t)?;
    match &info.failure_witness {
        Some(w) => Err(MetricsError::NotATerm(w.clone())),
        None => Ok(info),
    }
}

/// Weight, number of let-like nodes and the sum of their body weights,
/// computed bottom-up.
#[derive(Clone, Copy)]
struct Acc {
    w: u128,
    lets: u128,
    bodies: u128,
}

fn add(a: u128, b: u128) -> Res<u128> {
    a.checked_add(b).ok_or(MetricsError::Overflow)
}

fn walk(t: &Term, n: u128) -> Res<Acc> {
    let leaf = Acc { w: 1, lets: 0, bodies: 0 };
    let join = |a: Acc, b: Acc, w: u128| -> Res<Acc> {
        Ok(Acc { w, lets: a.lets + b.lets, bodies: add(a.bodies, b.bodies)? })
    };
    match t {
        Term::Var(_) | Term::Unit => Ok(leaf),
        Term::Abs(_, _, b) | Term::Inl(b) | Term::Inr(b) => {
            let b = walk(b, n)?;
            Ok(Acc { w: add(b.w, 1)?, ..b })
        }
        Term::Marker(_, b) => walk(b, n),
        Term::Bang(b) => {
            let b = walk(b, n)?;
            let w = b.w.checked_mul(n).ok_or(MetricsError::Overflow)?;
            Ok(Acc { w: add(w, 1)?, ..b })
        }
        Term::App(f, a) => {
            let (f, a) = (walk(f, n)?, walk(a, n)?);
            join(f, a, add(f.w, a.w)?)
        }
        Term::Pair(l, r) => {
            let (l, r) = (walk(l, n)?, walk(r, n)?);
            join(l, r, add(add(l.w, r.w)?, 1)?)
        }
        Term::LetBang(s, _, b) | Term::Let(s, _, b) | Term::LetPair(s, _, _, b) => {
            let (s, b) = (walk(s, n)?, walk(b, n)?);
            let extra = u128::from(matches!(t, Term::LetPair(..)));
            let mut acc = join(s, b, add(add(s.w, b.w)?, extra)?)?;
            if !matches!(t, Term::Let(..)) {
                acc.lets += 1;
                acc.bodies = add(acc.bodies, b.w)?;
            }
            Ok(acc)
        }
        Term::Case(s, _, l, _, r) => {
            let (s, l, r) = (walk(s, n)?, walk(l, n)?, walk(r, n)?);
            let w = add(add(s.w, l.w.max(r.w))?, 1)?;
            let lr = join(l, r, 0)?;
            join(s, lr, w)
        }
    }
}

fn measure_of(acc: Acc) -> Res<u128> {
    let total = acc.lets.checked_mul(acc.w).ok_or(MetricsError::Overflow)?;
    Ok(total - acc.bodies)
}

/// `W(t, n)`. The table is structural, so any marker-free pseudo-term
/// has a weight; termhood is only required where the rank matters.
pub fn weight(t: &Term, n: u64) -> Res<u128> {
    if n == 0 {
        return Err(MetricsError::ZeroParameter);
    }
    analyze(t)?;
    Ok(walk(t, u128::from(n))?.w)
}

/// Number of `let !` and `let <,>` nodes.
pub fn nlet(t: &Term) -> Res<usize> {
    analyze(t)?;
    fn go(t: &Term) -> usize {
        let own = usize::from(matches!(t, Term::LetBang(..) | Term::LetPair(..)));
        own + t.children().into_iter().map(go).sum::<usize>()
    }
    Ok(go(t))
}

/// `M(t)`: the sum over let-like nodes of `W(t, n) - W(body, n)`.
pub fn measure(t: &Term, n: u64) -> Res<u128> {
    Ok(snapshot(t, n)?.measure)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetricSnapshot {
    pub n: u64,
    pub weight: u128,
    pub nlet: u128,
    pub measure: u128,
    pub rank: usize,
    pub size: usize,
    pub depth: usize,
}

/// All metrics of `t` at parameter `n` (which must dominate the rank).
pub fn snapshot(t: &Term, n: u64) -> Res<MetricSnapshot> {
    let info = term_info(t)?;
    snapshot_with(t, &info, n)
}

pub(crate) fn snapshot_with(t: &Term, info: &TermInfo, n: u64) -> Res<MetricSnapshot> {
    if n == 0 {
        return Err(MetricsError::ZeroParameter);
    }
    if (n as u128) < info.rank as u128 {
        return Err(MetricsError::RankTooSmall { n, rank: info.rank });
    }
    let acc = walk(t, u128::from(n))?;
    Ok(MetricSnapshot {
        n,
        weight: acc.w,
        nlet: acc.lets,
        measure: measure_of(acc)?,
        rank: info.rank,
        size: info.size,
        depth: info.depth,
    })
}

fn big_as_string<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// The step bound for `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub size: usize,
    pub depth: usize,
    pub degree: usize,
    /// `|t|^(3(d+1))`
    #[serde(serialize_with = "big_as_string")]
    pub bound: BigUint,
    /// `W(t, |t|)`
    #[serde(serialize_with = "big_as_string")]
    pub weight_at_size: BigUint,
    /// `W(t, |t|)^3`
    #[serde(serialize_with = "big_as_string")]
    pub weight_cube: BigUint,
}

impl Certificate {
    /// The bound as a step count, saturating at `u64::MAX`.
    pub fn bound_u64(&self) -> u64 {
        u64::try_from(&self.bound).unwrap_or(u64::MAX)
    }

    pub fn admits(&self, steps: usize) -> bool {
        BigUint::from(steps) <= self.bound
    }
}

fn big_weight(t: &Term, n: &BigUint) -> BigUint {
    match t {
        Term::Var(_) | Term::Unit => BigUint::one(),
        Term::Abs(_, _, b) | Term::Inl(b) | Term::Inr(b) => big_weight(b, n) + 1u32,
        Term::Marker(_, b) => big_weight(b, n),
        Term::Bang(b) => big_weight(b, n) * n + 1u32,
        Term::App(a, b) | Term::LetBang(a, _, b) | Term::Let(a, _, b) => {
            big_weight(a, n) + big_weight(b, n)
        }
        Term::Pair(a, b) | Term::LetPair(a, _, _, b) => big_weight(a, n) + big_weight(b, n) + 1u32,
        Term::Case(s, _, l, _, r) => {
            big_weight(s, n) + big_weight(l, n).max(big_weight(r, n)) + 1u32
        }
    }
}

pub fn certificate(t: &Term) -> Res<Certificate> {
    let info = term_info(t)?;
    Ok(certificate_with(t, &info))
}

pub(crate) fn certificate_with(t: &Term, info: &TermInfo) -> Certificate {
    let degree = 3 * (info.depth + 1);
    let size = BigUint::from(info.size);
    let bound = size.pow(degree as u32);
    let weight_at_size = big_weight(t, &size);
    let weight_cube = weight_at_size.pow(3);
    Certificate { size: info.size, depth: info.depth, degree, bound, weight_at_size, weight_cube }
}

/// Which decrease condition a step broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    /// A contraction did not strictly decrease the weight.
    WeightNotDecreased,
    /// A commutation changed the weight.
    WeightChanged,
    /// A commutation did not strictly decrease the measure.
    MeasureNotDecreased,
    /// The two snapshots use different parameters.
    ParameterMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::WeightNotDecreased => "weight did not strictly decrease",
            Violation::WeightChanged => "commutation changed the weight",
            Violation::MeasureNotDecreased => "commutation did not strictly decrease the measure",
            Violation::ParameterMismatch => "snapshots taken at different n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "clause", rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violation(Violation),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

pub fn check_step(before: &MetricSnapshot, after: &MetricSnapshot, rule: RuleLabel) -> Verdict {
    if before.n != after.n {
        return Verdict::Violation(Violation::ParameterMismatch);
    }
    if rule.is_commutation() {
        if after.weight != before.weight {
            Verdict::Violation(Violation::WeightChanged)
        } else if after.measure >= before.measure {
            Verdict::Violation(Violation::MeasureNotDecreased)
        } else {
            Verdict::Ok
        }
    } else if after.weight >= before.weight {
        Verdict::Violation(Violation::WeightNotDecreased)
    } else {
        Verdict::Ok
    }
}

/// Check the weight bound for `t[u/x]`: `W(t) + k W(u)` when `x` occurs
/// `k` times and is not temporary, `W(t) + n W(u)` when it is.
pub fn key_lemma_check(t: &Term, x: &Name, u: &Term, n: u64) -> Res<Verdict> {
    let ti = term_info(t).map_err(|e| MetricsError::SideConditionUnmet(format!("t: {e}")))?;
    term_info(u).map_err(|e| MetricsError::SideConditionUnmet(format!("u: {e}")))?;
    if n == 0 || (n as u128) < ti.rank as u128 {
        return Err(MetricsError::SideConditionUnmet(format!(
            "n = {n} is below rank {}",
            ti.rank
        )));
    }
    let n128 = u128::from(n);
    let wt = walk(t, n128)?.w;
    let wu = walk(u, n128)?.w;
    let factor = if ti.temp_vars.contains(x) {
        n128
    } else {
        ti.occ.get(x).copied().unwrap_or(0) as u128
    };
    let limit = add(wt, factor.checked_mul(wu).ok_or(MetricsError::Overflow)?)?;
    let ws = walk(&substitute(t, x, u), n128)?.w;
    Ok(if ws <= limit { Verdict::Ok } else { Verdict::Violation(Violation::WeightNotDecreased) })
}
