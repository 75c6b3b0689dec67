//! Exhaustive exploration of the reduction graph of a term.
//!
//! Nodes are alpha-equivalence classes (keyed by [`canonical`]); an edge
//! is one rewrite at one redex. Since every term is strongly normalizing
//! the graph is a finite DAG, and the longest maximal sequence is its
//! longest path.

use std::collections::HashMap;

use thiserror::Error;

use super::{redexes, step_in_place, RuleLabel};
use crate::calculus::{analyze, canonical, AnalysisError, Witness};
use crate::syntax::{Path, Term};

/// Deliberately wrong extra rules, used to check that the bound checker
/// notices a broken engine.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Also rewrite `((\x. t) u)` to `t`, dropping the argument.
    DropArgument,
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub node_cap: usize,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { node_cap: 100_000, fault: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("more than {cap} distinct terms reachable")]
    CapExceeded { cap: usize },
    #[error("not a term: {} at path {:?}", .0.clause, .0.path)]
    NotATerm(Witness),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("reduction graph has a cycle")]
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration {
    /// Distinct reachable terms, up to alpha-equivalence.
    pub nodes: usize,
    pub edges: usize,
    /// Length of the longest maximal reduction sequence.
    pub longest: usize,
    /// Number of maximal reduction sequences (saturating).
    pub sequences: u128,
    /// Reachable normal forms, one per alpha class, in canonical form.
    pub normal_forms: Vec<Term>,
}

impl Exploration {
    pub fn is_confluent(&self) -> bool {
        self.normal_forms.len() == 1
    }
}

struct Graph {
    terms: Vec<Term>,
    succ: Vec<Vec<usize>>,
    labels: Vec<Vec<(Path, RuleLabel)>>,
}

fn successors(t: &Term, fault: Option<Fault>) -> Vec<(Path, RuleLabel, Term)> {
    let mut out = Vec::new();
    for (path, rule) in redexes(t) {
        let mut next = t.clone();
        step_in_place(&mut next, &path, rule).expect("listed redexes contract");
        out.push((path.clone(), rule, next));
        if fault == Some(Fault::DropArgument) && rule == RuleLabel::Beta {
            let mut next = t.clone();
            let node = next.at_mut(&path).expect("valid path");
            if let Term::App(f, _) = node {
                if let Term::Abs(_, _, body) = &**f {
                    *node = (**body).clone();
                    out.push((path, rule, next));
                }
            }
        }
    }
    out
}

fn build(t: &Term, opts: &ExploreOptions) -> Result<Graph, ExploreError> {
    let info = analyze(t)?;
    if let Some(w) = info.failure_witness {
        return Err(ExploreError::NotATerm(w));
    }
    let root = canonical(t);
    let mut index: HashMap<Term, usize> = HashMap::from([(root.clone(), 0)]);
    let mut g = Graph { terms: vec![root], succ: vec![Vec::new()], labels: vec![Vec::new()] };
    let mut next = 0;
    while next < g.terms.len() {
        let cur = g.terms[next].clone();
        for (path, rule, reduct) in successors(&cur, opts.fault) {
            let key = canonical(&reduct);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if g.terms.len() >= opts.node_cap {
                        return Err(ExploreError::CapExceeded { cap: opts.node_cap });
                    }
                    let id = g.terms.len();
                    index.insert(key.clone(), id);
                    g.terms.push(key);
                    g.succ.push(Vec::new());
                    g.labels.push(Vec::new());
                    id
                }
            };
            g.succ[next].push(id);
            g.labels[next].push((path, rule));
        }
        next += 1;
    }
    Ok(g)
}

/// Reverse topological order of the nodes, or `Cycle`.
fn postorder(g: &Graph) -> Result<Vec<usize>, ExploreError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; g.terms.len()];
    let mut order = Vec::with_capacity(g.terms.len());
    let mut stack = vec![(0usize, 0usize)];
    mark[0] = Mark::Open;
    while let Some(top) = stack.last_mut() {
        let (v, i) = *top;
        if i < g.succ[v].len() {
            let w = g.succ[v][i];
            top.1 += 1;
            match mark[w] {
                Mark::New => {
                    mark[w] = Mark::Open;
                    stack.push((w, 0));
                }
                Mark::Open => return Err(ExploreError::Cycle),
                Mark::Done => {}
            }
        } else {
            mark[v] = Mark::Done;
            order.push(v);
            stack.pop();
        }
    }
    Ok(order)
}

/// Explore every reduction sequence of `t`.
pub fn explore(t: &Term, opts: &ExploreOptions) -> Result<Exploration, ExploreError> {
    let g = build(t, opts)?;
    let order = postorder(&g)?;
    let n = g.terms.len();
    let mut longest = vec![0usize; n];
    let mut count = vec![0u128; n];
    let mut normal_forms = Vec::new();
    for &v in &order {
        if g.succ[v].is_empty() {
            count[v] = 1;
            normal_forms.push(g.terms[v].clone());
        } else {
            longest[v] = 1 + g.succ[v].iter().map(|&w| longest[w]).max().unwrap_or(0);
            count[v] = g.succ[v].iter().fold(0u128, |acc, &w| acc.saturating_add(count[w]));
        }
    }
    Ok(Exploration {
        nodes: n,
        edges: g.succ.iter().map(Vec::len).sum(),
        longest: longest[0],
        sequences: count[0],
        normal_forms,
    })
}

/// One maximal reduction sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub steps: Vec<(Path, RuleLabel)>,
    pub final_term: Term,
}

/// Every maximal reduction sequence of `t`. Fails when more than
/// `node_cap` distinct terms or more than `node_cap` sequences arise.
pub fn all_sequences(t: &Term, node_cap: usize) -> Result<Vec<Sequence>, ExploreError> {
    let opts = ExploreOptions { node_cap, fault: None };
    let g = build(t, &opts)?;
    postorder(&g)?;
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<(Path, RuleLabel)>)> = vec![(0, Vec::new())];
    while let Some((v, steps)) = stack.pop() {
        if g.succ[v].is_empty() {
            if out.len() >= node_cap {
                return Err(ExploreError::CapExceeded { cap: node_cap });
            }
            out.push(Sequence { steps, final_term: g.terms[v].clone() });
            continue;
        }
        for (w, label) in g.succ[v].iter().zip(&g.labels[v]).rev() {
            let mut s = steps.clone();
            s.push(label.clone());
            stack.push((*w, s));
        }
    }
    Ok(out)
}
