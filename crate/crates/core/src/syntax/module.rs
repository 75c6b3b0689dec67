use std::collections::BTreeMap;

use super::ast::{Name, Term};
use crate::calculus::subst::substitute_many;
use crate::calculus::free_vars;
use crate::types::Formula;

#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub name: Name,
    pub ascription: Option<Formula>,
    pub body: Term,
    /// Source position of the `def` keyword.
    pub line: usize,
    pub col: usize,
}

/// An ordered list of definitions. Later definitions may refer to earlier
/// ones by name; [`SourceModule::resolve`] inlines those references.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceModule {
    pub defs: Vec<Definition>,
}

impl SourceModule {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().rev().find(|d| d.name.as_str() == name)
    }

    /// `prelude` followed by `self`; definitions of `self` shadow the prelude.
    pub fn with_prelude(&self, prelude: &SourceModule) -> SourceModule {
        let mut defs = prelude.defs.clone();
        defs.extend(self.defs.iter().cloned());
        SourceModule { defs }
    }

    /// Every definition body with references to earlier definitions
    /// replaced by their (already inlined) bodies.
    pub fn inlined(&self) -> BTreeMap<Name, Term> {
        let mut done: BTreeMap<Name, Term> = BTreeMap::new();
        for d in &self.defs {
            let refs: Vec<(Name, Term)> = free_vars(&d.body)
                .into_iter()
                .filter_map(|x| done.get(&x).map(|b| (x, b.clone())))
                .collect();
            let body = if refs.is_empty() {
                d.body.clone()
            } else {
                substitute_many(&d.body, &refs)
            };
            done.insert(d.name.clone(), body);
        }
        done
    }

    /// The body of `name` with references to earlier definitions inlined.
    pub fn resolve(&self, name: &str) -> Option<Term> {
        let idx = self.defs.iter().rposition(|d| d.name.as_str() == name)?;
        let prefix = SourceModule { defs: self.defs[..=idx].to_vec() };
        prefix.inlined().remove(name)
    }

    /// Inline module definitions into an arbitrary term.
    pub fn inline_into(&self, t: &Term) -> Term {
        let all = self.inlined();
        let refs: Vec<(Name, Term)> = free_vars(t)
            .into_iter()
            .filter_map(|x| all.get(&x).map(|b| (x, b.clone())))
            .collect();
        if refs.is_empty() {
            t.clone()
        } else {
            substitute_many(t, &refs)
        }
    }
}
