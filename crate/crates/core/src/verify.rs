//! Exhaustive verification of the reduction-length bound and confluence
//! over a collection of terms.

use std::collections::BTreeMap;
use std::thread;

use serde::Serialize;

use crate::calculus::analyze;
use crate::metrics::{certificate_with, Certificate};
use crate::reduction::{explore, ExploreError, ExploreOptions, Exploration};
use crate::syntax::{print, Term};

/// What went wrong for one term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Counterexample {
    BoundExceeded { term: String, longest: usize, bound: String },
    NotConfluent { term: String, normal_forms: Vec<String> },
    ExplorationFailed { term: String, error: String },
}

/// Per-size tallies.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SizeRow {
    pub terms: usize,
    pub sequences: u128,
    pub longest: usize,
    /// Largest ratio of longest sequence to bound seen, in percent.
    pub max_fill_percent: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub terms: usize,
    pub by_size: BTreeMap<usize, SizeRow>,
    pub counterexamples: Vec<Counterexample>,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// The outcome for a single term.
#[derive(Debug, Clone)]
pub struct TermCheck {
    pub size: usize,
    pub certificate: Certificate,
    pub exploration: Result<Exploration, ExploreError>,
}

impl TermCheck {
    pub fn counterexample(&self, t: &Term) -> Option<Counterexample> {
        match &self.exploration {
            Err(e) => Some(Counterexample::ExplorationFailed { term: print(t), error: e.to_string() }),
            Ok(x) if !self.certificate.admits(x.longest) => Some(Counterexample::BoundExceeded {
                term: print(t),
                longest: x.longest,
                bound: self.certificate.bound.to_string(),
            }),
            Ok(x) if !x.is_confluent() => Some(Counterexample::NotConfluent {
                term: print(t),
                normal_forms: x.normal_forms.iter().map(print).collect(),
            }),
            Ok(_) => None,
        }
    }
}

/// Explore every reduction sequence of `t` and compare with its certificate.
pub fn check_term(t: &Term, opts: &ExploreOptions) -> Result<TermCheck, ExploreError> {
    let info = analyze(t)?;
    if let Some(w) = info.failure_witness.clone() {
        return Err(ExploreError::NotATerm(w));
    }
    Ok(TermCheck { size: info.size, certificate: certificate_with(t, &info), exploration: explore(t, opts) })
}

/// Check every term, spreading the work over `threads` workers. The report
/// does not depend on the number of threads.
pub fn check_all(terms: &[Term], opts: &ExploreOptions, threads: usize) -> BoundReport {
    let threads = threads.max(1);
    // Terms are interleaved across workers since enumerations are sorted by size.
    let mut results: Vec<Option<Result<TermCheck, ExploreError>>> = Vec::new();
    results.resize_with(terms.len(), || None);
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                s.spawn(move || {
                    (w..terms.len()).step_by(threads).map(|i| (i, check_term(&terms[i], opts))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut report = BoundReport::default();
    for (t, r) in terms.iter().zip(results.into_iter().map(|r| r.expect("every index checked"))) {
        report.terms += 1;
        let check = match r {
            Ok(c) => c,
            Err(e) => {
                report
                    .counterexamples
                    .push(Counterexample::ExplorationFailed { term: print(t), error: e.to_string() });
                continue;
            }
        };
        let row = report.by_size.entry(check.size).or_default();
        row.terms += 1;
        if let Ok(x) = &check.exploration {
            row.sequences = row.sequences.saturating_add(x.sequences);
            row.longest = row.longest.max(x.longest);
            let bound = check.certificate.bound_u64().max(1) as f64;
            row.max_fill_percent = row.max_fill_percent.max(100.0 * x.longest as f64 / bound);
        }
        if let Some(c) = check.counterexample(t) {
            report.counterexamples.push(c);
        }
    }
    report
}

/// Worker count for [`check_all`] when the caller has no preference.
pub fn default_threads() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::enumerate_well_formed;
    use crate::reduction::Fault;

    #[test]
    fn small_sizes_pass() {
        let terms = enumerate_well_formed(5);
        let report = check_all(&terms, &ExploreOptions::default(), 4);
        assert!(report.ok(), "{:?}", report.counterexamples);
        assert_eq!(report.terms, terms.len());
        assert_eq!(report.by_size[&1].terms, 1);
        assert_eq!(report.by_size[&1].longest, 0);
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let terms = enumerate_well_formed(5);
        let opts = ExploreOptions::default();
        assert_eq!(check_all(&terms, &opts, 1), check_all(&terms, &opts, 3));
    }

    #[test]
    fn injected_fault_is_caught() {
        let terms = enumerate_well_formed(4);
        let opts = ExploreOptions { fault: Some(Fault::DropArgument), ..Default::default() };
        let report = check_all(&terms, &opts, 2);
        assert!(!report.ok());
    }
}
